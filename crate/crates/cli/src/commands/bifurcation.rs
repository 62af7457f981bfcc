//! `bifurcation`: the cusp where bistability sets in and the fold boundary
//! traced up to a maximum drive.

use kerrsense::bifurcation::{bistability_possible, critical_point, trace_boundary};
use serde_json::json;

use super::write_json;
use crate::cli::{CliError, RunEnv};
use crate::config::RunConfig;
use crate::csvio::{fmt_f, write_csv};

pub fn run(cfg: &RunConfig, env: &RunEnv) -> Result<(), CliError> {
    let bc = cfg
        .bifurcation
        .as_ref()
        .ok_or_else(|| CliError::Config("bifurcation needs a [bifurcation] section".into()))?;

    let cp = critical_point(&env.params)?;
    let omega_c = env.freq_out(cp.omega_p);
    let omega0 = env.freq_out(env.params.omega0);
    write_json(
        &env.out.join("bifurcation.json"),
        &json!({
            "bistable_possible": bistability_possible(&env.params),
            "omega_c": omega_c,
            "detuning_c": omega_c - omega0,
            "p_c": env.p_out(cp.p),
            "e_c": cp.energy,
        }),
    )?;

    let boundary = trace_boundary(&env.params, bc.p_max / (env.w * env.w), bc.n)?;
    let rows: Vec<Vec<String>> = boundary
        .iter()
        .map(|pt| {
            vec![
                fmt_f(env.p_out(pt.p)),
                fmt_f(env.freq_out(pt.omega_p_low)),
                fmt_f(env.freq_out(pt.omega_p_high)),
            ]
        })
        .collect();
    write_csv(
        &env.out.join("boundary.csv"),
        &env.meta,
        &["p", "omega_p_low", "omega_p_high"],
        &rows,
    )?;
    Ok(())
}
