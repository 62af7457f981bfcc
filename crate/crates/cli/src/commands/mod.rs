//! One module per subcommand plus shared branch-selection and formatting
//! helpers.

pub mod basins;
pub mod bifurcation;
pub mod sensitivity;
pub mod simulate;
pub mod spectrum;
pub mod steady;

use kerrsense::steady_state::{Stability, SteadyBranch, SteadyStates};

use crate::cli::CliError;
use crate::config::BranchName;

/// Text form of a stability label, stable across versions.
pub fn stability_text(s: Stability) -> &'static str {
    match s {
        Stability::UniqueStable => "unique",
        Stability::StableLow => "stable-low",
        Stability::Saddle => "saddle",
        Stability::StableHigh => "stable-high",
    }
}

/// Short per-row flag for a library error.
pub fn error_flag(e: &kerrsense::Error) -> &'static str {
    use kerrsense::Error::*;
    match e {
        InvalidParameter(_) => "invalid-parameter",
        NoConvergence { .. } => "no-convergence",
        InconsistentRoot(_) => "inconsistent-root",
        NotBistable(_) => "not-bistable",
        DivergentSlope(_) => "divergent-slope",
        UnstableBranch(_) => "unstable-branch",
        SlowingDownDivergence(_) => "slowing-down",
        StepSizeUnderflow(_) => "step-underflow",
        SegmentTooShort(_) => "segment-too-short",
        InvalidInput(_) => "invalid-input",
    }
}

/// Selects a branch by name: lowest stable, highest stable, or the saddle.
pub fn pick_branch<'a>(
    states: &'a SteadyStates<f64>,
    name: BranchName,
) -> Result<(usize, &'a SteadyBranch<f64>), CliError> {
    let found = match name {
        BranchName::Low => states.branches.iter().position(|b| b.stability.is_stable()),
        BranchName::High => states.branches.iter().rposition(|b| b.stability.is_stable()),
        BranchName::Saddle => states.branches.iter().position(|b| b.stability == Stability::Saddle),
    };
    match found {
        Some(i) => Ok((i, &states.branches[i])),
        None => Err(CliError::Config(
            "no saddle branch at this operating point (drive is not in the bistable band)".into(),
        )),
    }
}

/// Writes pretty JSON plus a trailing newline.
pub fn write_json(path: &std::path::Path, value: &serde_json::Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Config(format!("json serialization: {e}")))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
