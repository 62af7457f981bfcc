//! `steady`: branch energies, phases and squeezing parameters over a pump
//! frequency sweep at fixed drive strength.

use kerrsense::model::Drive;
use kerrsense::numerics::linspace;
use kerrsense::steady_state::{linearize, solve_energy};

use super::stability_text;
use crate::cli::{CliError, RunEnv};
use crate::config::RunConfig;
use crate::csvio::{fmt_f, write_csv};

const HEADER: [&str; 7] = ["omega_p", "p", "branch_index", "E", "phi_m", "stability", "zeta"];

pub fn run(cfg: &RunConfig, env: &RunEnv) -> Result<(), CliError> {
    let sc = cfg
        .steady
        .as_ref()
        .ok_or_else(|| CliError::Config("steady needs a [steady] section".into()))?;
    let drive = env.need_drive()?;
    let p_echo = fmt_f(env.p_out(drive.p));

    let grid = if sc.n_omega == 0 {
        Vec::new()
    } else {
        linspace(sc.omega_min, sc.omega_max, sc.n_omega)
    };
    let mut rows = Vec::new();
    for &w_in in &grid {
        let d = Drive::new(env.freq_in(w_in), drive.p, drive.phi_p)?;
        let states = solve_energy(&env.params, &d)?;
        for (i, b) in states.branches.iter().enumerate() {
            let lin = linearize(&env.params, &d, b.energy);
            rows.push(vec![
                fmt_f(w_in),
                p_echo.clone(),
                i.to_string(),
                fmt_f(b.energy),
                fmt_f(b.phi_m),
                stability_text(b.stability).to_string(),
                fmt_f(lin.zeta),
            ]);
        }
    }
    write_csv(&env.out.join("steady.csv"), &env.meta, &HEADER, &rows)?;
    Ok(())
}
