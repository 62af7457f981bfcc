//! `sensitivity`: mass-resolution bound along a pump-frequency path, one row
//! per grid point with a status flag; rows keep following the branch by
//! nearest energy so a fold produces the physical hysteretic jump.

use kerrsense::model::Drive;
use kerrsense::numerics::linspace;
use kerrsense::response::{ring_down_time, spectral_density_zero};
use kerrsense::sensitivity::{
    delta_m_from_spectrum, delta_m_linear, delta_m_nonlinear, g_min, optimal_phase_shift,
    responsivity_omega0,
};
use kerrsense::steady_state::{linearize, solve_energy};

use super::{error_flag, pick_branch};
use crate::cli::{CliError, RunEnv};
use crate::config::{PhiPolicyConfig, RunConfig};
use crate::csvio::{fmt_f, write_csv};

const HEADER: [&str; 19] = [
    "omega_p",
    "p",
    "branch_index",
    "E",
    "zeta",
    "phi0",
    "phi_c",
    "phi_lo",
    "responsivity",
    "noise_zero",
    "g_min",
    "phi_at_min",
    "t_rd",
    "q_eff",
    "u0",
    "delta_m_over_m",
    "delta_m_check",
    "delta_m_linear",
    "status",
];

/// Row with every numeric field blank (`nan`) except the sweep coordinates.
fn failed_row(omega_in: f64, p_echo: &str, flag: &str) -> Vec<String> {
    let mut row = vec![fmt_f(omega_in), p_echo.to_string(), "-1".into()];
    row.extend(std::iter::repeat(fmt_f(f64::NAN)).take(15));
    row.push(flag.into());
    row
}

pub fn run(cfg: &RunConfig, env: &RunEnv) -> Result<(), CliError> {
    let sc = cfg
        .sensitivity
        .as_ref()
        .ok_or_else(|| CliError::Config("sensitivity needs a [sensitivity] section".into()))?;
    let drive0 = env.need_drive()?;
    let tau = env.time_in(sc.tau);
    if sc.n_omega == 0 {
        write_csv(&env.out.join("sensitivity.csv"), &env.meta, &HEADER, &[])?;
        return Ok(());
    }
    let p_echo = fmt_f(env.p_out(drive0.p));

    let mut rows = Vec::with_capacity(sc.n_omega);
    let mut prev_energy: Option<f64> = None;
    let mut any_ok = false;
    let mut first_err: Option<CliError> = None;

    for w_in in linspace(sc.omega_min, sc.omega_max, sc.n_omega) {
        match row_at(cfg, env, sc, &drive0, tau, w_in, &p_echo, &mut prev_energy) {
            Ok(row) => {
                any_ok = true;
                rows.push(row);
            }
            Err(e) => {
                let flag = match &e {
                    CliError::Lib(le) => error_flag(le),
                    _ => "config",
                };
                rows.push(failed_row(w_in, &p_echo, flag));
                if first_err.is_none() {
                    first_err = Some(e);
                }
            }
        }
    }
    write_csv(&env.out.join("sensitivity.csv"), &env.meta, &HEADER, &rows)?;
    if any_ok {
        Ok(())
    } else {
        Err(first_err.unwrap_or_else(|| CliError::Config("empty sweep".into())))
    }
}

#[allow(clippy::too_many_arguments)]
fn row_at(
    _cfg: &RunConfig,
    env: &RunEnv,
    sc: &crate::config::SensitivityConfig,
    drive0: &Drive<f64>,
    tau: f64,
    w_in: f64,
    p_echo: &str,
    prev_energy: &mut Option<f64>,
) -> Result<Vec<String>, CliError> {
    let drive = Drive::new(env.freq_in(w_in), drive0.p, drive0.phi_p)?;
    let states = solve_energy(&env.params, &drive)?;
    let (branch_index, branch) = match *prev_energy {
        // continuation: stay on the energetically nearest stable branch
        Some(pe) => states
            .branches
            .iter()
            .enumerate()
            .filter(|(_, b)| b.stability.is_stable())
            .min_by(|(_, a), (_, b)| {
                (a.energy - pe).abs().partial_cmp(&(b.energy - pe).abs()).unwrap()
            })
            .map(|(i, b)| (i, b))
            .ok_or_else(|| CliError::Config("no stable branch".into()))?,
        None => pick_branch(&states, sc.branch)?,
    };
    *prev_energy = Some(branch.energy);

    let lin = linearize(&env.params, &drive, branch.energy);
    let phi_lo = match sc.phi_policy {
        PhiPolicyConfig::Fixed(x) => x,
        PhiPolicyConfig::OptimalG => lin.phi0 + optimal_phase_shift(lin.zeta, lin.phi_c),
        PhiPolicyConfig::OptimalPmin => lin.phi0,
    };
    let coth = env.units.coth_factor(&env.params);

    let resp = responsivity_omega0(&env.params, &drive, branch.energy, phi_lo)?;
    let noise_zero = spectral_density_zero(&lin, coth, phi_lo)?;
    let (g_best, phi_at_min) = g_min(lin.zeta, lin.phi_c);
    let t_rd = ring_down_time(&lin)?;
    let u0 = if env.si {
        kerrsense::model::HBAR_SI * env.freq_out(env.params.omega0) * branch.energy
    } else {
        branch.energy
    };
    let dm = delta_m_nonlinear(&env.units, &env.params, &drive, branch.energy, phi_lo, tau)?;
    let dm_check = delta_m_from_spectrum(&env.units, &env.params, &drive, branch.energy, phi_lo, tau)?;
    let dm_lin = delta_m_linear(&env.units, &env.params, branch.energy, tau)?;

    Ok(vec![
        fmt_f(w_in),
        p_echo.to_string(),
        branch_index.to_string(),
        fmt_f(branch.energy),
        fmt_f(lin.zeta),
        fmt_f(lin.phi0),
        fmt_f(lin.phi_c),
        fmt_f(phi_lo),
        fmt_f(resp),
        fmt_f(env.time_out(noise_zero)),
        fmt_f(g_best),
        fmt_f(phi_at_min),
        fmt_f(env.time_out(t_rd)),
        fmt_f(t_rd * env.params.omega0),
        fmt_f(u0),
        fmt_f(dm),
        fmt_f(dm_check),
        fmt_f(dm_lin),
        "ok".into(),
    ])
}
