//! `spectrum`: analytic homodyne output spectrum of the fluctuations around
//! a steady branch, optionally verified by a Monte Carlo ensemble.

use kerrsense::dynamics::{estimate_spectrum_mc, langevin_ensemble, LangevinMode, WindowSpec};
use kerrsense::numerics::linspace;
use kerrsense::response::{
    integrated_spectrum, spectral_density, spectral_density_zero, spectrum_extrema,
};
use kerrsense::steady_state::{linearize, solve_energy};
use serde_json::json;

use super::{pick_branch, write_json};
use crate::cli::{CliError, RunEnv};
use crate::config::RunConfig;
use crate::csvio::{fmt_f, write_csv};

pub fn run(cfg: &RunConfig, env: &RunEnv) -> Result<(), CliError> {
    let sc = cfg
        .spectrum
        .as_ref()
        .ok_or_else(|| CliError::Config("spectrum needs a [spectrum] section".into()))?;
    let drive = env.need_drive()?;

    let states = solve_energy(&env.params, &drive)?;
    let (branch_index, branch) = pick_branch(&states, sc.branch)?;
    let lin = linearize(&env.params, &drive, branch.energy);
    let coth = env.units.coth_factor(&env.params);

    // trips the stability guard before any expensive work
    let s_zero = spectral_density_zero(&lin, coth, sc.phi_lo)?;
    let variance = integrated_spectrum(&lin, coth, sc.phi_lo)?;
    let ex = spectrum_extrema(&lin, coth)?;

    let omega_max = if sc.omega_max > 0.0 { env.freq_in(sc.omega_max) } else { 8.0 * lin.w.norm() };

    let mut header = vec!["omega", "density"];
    let mut rows: Vec<Vec<String>>;
    if sc.mc {
        let seed = env.need_seed()?;
        let lambda_max = lin.lambda0.norm().max(lin.lambda1.norm());
        let dt = if sc.dt > 0.0 { env.time_in(sc.dt) } else { 0.01 / lambda_max };
        let samples = sc.discard + sc.segments_per_traj * sc.segment_len;
        let t_max = dt * samples as f64;
        let trajs = langevin_ensemble(
            &env.units,
            &env.params,
            &drive,
            branch.c_m,
            dt,
            t_max,
            seed,
            LangevinMode::Linearized,
            1,
            sc.n_traj,
        )?;
        let window = WindowSpec { discard: sc.discard, segment_len: sc.segment_len };
        let mc = estimate_spectrum_mc(&trajs, sc.phi_lo, &window)?;
        header.extend(["mc_density", "mc_std_error"]);
        rows = Vec::new();
        for ((&omega, &est), &se) in mc.omegas.iter().zip(&mc.values).zip(&mc.std_errors) {
            if omega > omega_max {
                break;
            }
            let analytic = spectral_density(&lin, coth, sc.phi_lo, omega)?;
            rows.push(vec![
                fmt_f(env.freq_out(omega)),
                fmt_f(env.time_out(analytic)),
                fmt_f(env.time_out(est)),
                fmt_f(env.time_out(se)),
            ]);
        }
    } else {
        rows = Vec::with_capacity(sc.n_omega);
        for omega in linspace(0.0, omega_max, sc.n_omega.max(2)) {
            let analytic = spectral_density(&lin, coth, sc.phi_lo, omega)?;
            rows.push(vec![fmt_f(env.freq_out(omega)), fmt_f(env.time_out(analytic))]);
        }
    }
    write_csv(&env.out.join("spectrum.csv"), &env.meta, &header, &rows)?;

    write_json(
        &env.out.join("spectrum.json"),
        &json!({
            "branch_index": branch_index,
            "energy": branch.energy,
            "zeta": lin.zeta,
            "phi_lo": sc.phi_lo,
            "coth": coth,
            "s_zero": env.time_out(s_zero),
            "variance": variance,
            "p_min": env.time_out(ex.p_min),
            "p_max": env.time_out(ex.p_max),
            "phi_at_min": ex.phi_at_min,
            "phi_at_max": ex.phi_at_max,
        }),
    )?;
    Ok(())
}
