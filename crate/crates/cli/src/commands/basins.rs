//! `basins`: basin-of-attraction grid over the complex-amplitude plane plus
//! the separatrix through the saddle.

use kerrsense::dynamics::{basin_map, BasinLabel, Window};
use serde_json::json;

use super::write_json;
use crate::cli::{CliError, RunEnv};
use crate::config::RunConfig;
use crate::csvio::{fmt_f, write_csv};

fn label_text(l: BasinLabel) -> &'static str {
    match l {
        BasinLabel::Low => "low",
        BasinLabel::High => "high",
        BasinLabel::Unresolved => "unresolved",
    }
}

pub fn run(cfg: &RunConfig, env: &RunEnv) -> Result<(), CliError> {
    let bc = cfg
        .basins
        .as_ref()
        .ok_or_else(|| CliError::Config("basins needs a [basins] section".into()))?;
    let drive = env.need_drive()?;

    let window = Window::new(bc.re_min, bc.re_max, bc.im_min, bc.im_max)?;
    let map = basin_map(
        &env.params,
        &drive,
        &window,
        bc.n_re,
        bc.n_im,
        env.time_in(bc.dt),
        env.time_in(bc.t_max),
    )?;

    let mut rows = Vec::with_capacity(bc.n_re * bc.n_im);
    for (iy, &im) in map.im.iter().enumerate() {
        for (ix, &re) in map.re.iter().enumerate() {
            rows.push(vec![fmt_f(re), fmt_f(im), label_text(map.at(iy, ix)).to_string()]);
        }
    }
    write_csv(&env.out.join("basins.csv"), &env.meta, &["re", "im", "label"], &rows)?;

    let sep_rows: Vec<Vec<String>> =
        map.separatrix.iter().map(|c| vec![fmt_f(c.re), fmt_f(c.im)]).collect();
    write_csv(&env.out.join("separatrix.csv"), &env.meta, &["re", "im"], &sep_rows)?;

    let unresolved = map.labels.iter().filter(|&&l| l == BasinLabel::Unresolved).count();
    write_json(
        &env.out.join("basins.json"),
        &json!({
            "saddle": [map.saddle.re, map.saddle.im],
            "attractor_low": [map.attractor_low.re, map.attractor_low.im],
            "attractor_high": [map.attractor_high.re, map.attractor_high.im],
            "window": [bc.re_min, bc.re_max, bc.im_min, bc.im_max],
            "n_re": bc.n_re,
            "n_im": bc.n_im,
            "unresolved_cells": unresolved,
        }),
    )?;
    Ok(())
}
