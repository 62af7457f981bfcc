//! `simulate`: seeded Langevin trajectories in the rotating frame, a
//! decimated CSV dump and quadrature statistics compared against the
//! closed-form integrated spectrum.

use kerrsense::dynamics::{langevin_ensemble, LangevinMode, Trajectory};
use kerrsense::response::{integrated_spectrum, ring_down_time};
use kerrsense::steady_state::{linearize, solve_energy, SteadyBranch};
use kerrsense::Complex;
use serde_json::json;

use super::{pick_branch, write_json};
use crate::cli::{CliError, RunEnv};
use crate::config::{InitConfig, RunConfig};
use crate::csvio::{fmt_f, write_csv};

pub fn run(cfg: &RunConfig, env: &RunEnv) -> Result<(), CliError> {
    let sim = cfg
        .simulate
        .as_ref()
        .ok_or_else(|| CliError::Config("simulate needs a [simulate] section".into()))?;
    let drive = env.need_drive()?;
    let seed = env.need_seed()?;
    let mode = match sim.mode.as_str() {
        "linearized" => LangevinMode::Linearized,
        "full" => LangevinMode::Full,
        other => {
            return Err(CliError::Config(format!(
                "mode must be \"linearized\" or \"full\", got {other:?}"
            )))
        }
    };

    let states = solve_energy(&env.params, &drive)?;
    let c_init = match &sim.init {
        InitConfig::Branch(name) => pick_branch(&states, *name)?.1.c_m,
        InitConfig::Point(xy) => Complex::new(xy[0], xy[1]),
    };
    // statistics are referenced to the stable branch nearest the start
    let reference: &SteadyBranch<f64> = states
        .branches
        .iter()
        .filter(|b| b.stability.is_stable())
        .min_by(|a, b| {
            (a.c_m - c_init).norm().partial_cmp(&(b.c_m - c_init).norm()).unwrap()
        })
        .expect("at least one stable branch always exists");
    let lin = linearize(&env.params, &drive, reference.energy);
    let coth = env.units.coth_factor(&env.params);

    let lambda_max = lin.lambda0.norm().max(lin.lambda1.norm());
    let dt = if sim.dt > 0.0 { env.time_in(sim.dt) } else { 0.01 / lambda_max };
    let t_max = env.time_in(sim.t_max);
    let trajs = langevin_ensemble(
        &env.units,
        &env.params,
        &drive,
        c_init,
        dt,
        t_max,
        seed,
        mode,
        sim.record_every,
        sim.n_traj,
    )?;

    let mut rows = Vec::new();
    for (i, traj) in trajs.iter().take(sim.dump_trajectories).enumerate() {
        for (&t, c) in traj.times.iter().zip(&traj.values) {
            rows.push(vec![
                i.to_string(),
                fmt_f(env.time_out(t)),
                fmt_f(c.re),
                fmt_f(c.im),
            ]);
        }
    }
    write_csv(&env.out.join("simulate.csv"), &env.meta, &["traj", "t", "re", "im"], &rows)?;

    let burn = (20.0 * ring_down_time(&lin)?).min(0.5 * t_max);
    let (n_samples, phases) = quadrature_summary(&trajs, reference, &lin, coth, burn, sim)?;
    write_json(
        &env.out.join("simulate.json"),
        &json!({
            "mode": sim.mode,
            "seed": seed,
            "n_traj": sim.n_traj,
            "dt": env.time_out(dt),
            "t_max": env.time_out(t_max),
            "burn_in": env.time_out(burn),
            "n_samples": n_samples,
            "reference_energy": reference.energy,
            "zeta": lin.zeta,
            "coth": coth,
            "phases": phases,
        }),
    )?;
    Ok(())
}

/// Pools all post-burn-in samples and compares the per-phase quadrature
/// variance with the closed form.
fn quadrature_summary(
    trajs: &[Trajectory<f64>],
    reference: &SteadyBranch<f64>,
    lin: &kerrsense::steady_state::Linearization<f64>,
    coth: f64,
    burn: f64,
    sim: &crate::config::SimulateConfig,
) -> Result<(usize, Vec<serde_json::Value>), CliError> {
    let fluct: Vec<Complex<f64>> = trajs
        .iter()
        .flat_map(|traj| {
            traj.times
                .iter()
                .zip(&traj.values)
                .filter(|(&t, _)| t >= burn)
                .map(|(_, c)| c - reference.c_m)
        })
        .collect();
    if fluct.len() < 2 {
        return Err(CliError::Config(
            "t_max leaves fewer than 2 samples after burn-in; raise t_max or n_traj".into(),
        ));
    }

    let quarter = std::f64::consts::FRAC_PI_4;
    let default_phases: Vec<f64> = (0..4).map(|k| lin.phi0 + k as f64 * quarter).collect();
    let phases = sim.phi_lo.clone().unwrap_or(default_phases);

    let n = fluct.len() as f64;
    let mut out = Vec::new();
    for &phi in &phases {
        let rot = Complex::from_polar(1.0, phi);
        let xs: Vec<f64> = fluct.iter().map(|d| 2.0 * (d * rot).re).collect();
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
        let closed = integrated_spectrum(lin, coth, phi)?;
        out.push(json!({
            "phi_lo": phi,
            "mean": mean,
            "variance": var,
            "closed_form": closed,
            "ratio": var / closed,
        }));
    }
    Ok((fluct.len(), out))
}
