//! End-to-end checks of the binary: exit codes, config handling, file
//! schemas, unit conversion and seeded reproducibility.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use kerrsense_cli::csvio::{self, fmt_f};

const BASE: &str = r#"
[resonator]
omega0 = 1.0
gamma = 0.02
gamma3 = 5.7735026918962585e-5
kerr = 1.0e-3
mass = 0.5
temperature = 2.0

[drive]
omega_p = 1.0588
p = 3.39036e-2
"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kerrsense"))
}

fn write_config(dir: &Path, extra: &str) -> PathBuf {
    let path = dir.join("run.toml");
    std::fs::write(&path, format!("{BASE}\n{extra}")).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary should spawn")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn usage_errors_exit_2_and_help_exits_0() {
    assert_eq!(code(&run(&[])), 2);
    assert_eq!(code(&run(&["no-such-command"])), 2);
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
    assert_eq!(code(&run(&["steady", "--help"])), 0);
}

#[test]
fn missing_config_or_out_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[steady]\nomega_min = 1.0\nomega_max = 1.1\nn_omega = 3\n");
    let out = run(&["steady", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("--config"));

    let out = run(&["steady", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("--out"));
}

#[test]
fn unknown_keys_and_malformed_overrides_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[steady]\nomega_min = 1.0\nomega_max = 1.1\nn_omega = 3\n");
    let o = dir.path().join("out");
    let base = ["steady", "--config", cfg.to_str().unwrap(), "--out", o.to_str().unwrap()];

    let mut args = base.to_vec();
    args.extend(["--set", "steady.typo=1"]);
    let out = run(&args);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("typo"));

    let mut args = base.to_vec();
    args.extend(["--set", "not-an-assignment"]);
    let out = run(&args);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("section.key=value"));

    // invalid physics caught by validation, not by a crash
    let mut args = base.to_vec();
    args.extend(["--set", "resonator.gamma=-1.0"]);
    assert_eq!(code(&run(&args)), 2);
}

#[test]
fn randomized_commands_require_an_explicit_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "[simulate]\nt_max = 50.0\n\n[spectrum]\nmc = true\nn_traj = 4\nsegment_len = 64\ndiscard = 64\n",
    );
    let o = dir.path().join("out");

    let out = run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", o.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("--seed"));

    let out = run(&["spectrum", "--config", cfg.to_str().unwrap(), "--out", o.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("--seed"));
}

#[test]
fn impossible_bistability_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[bifurcation]\np_max = 0.1\n");
    let o = dir.path().join("out");
    let out = run(&[
        "bifurcation",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        o.to_str().unwrap(),
        "--set",
        "resonator.gamma3=1.0e-3", // exceeds |kerr|/sqrt(3)
    ]);
    assert_eq!(code(&out), 4);

    // a monostable drive cannot be partitioned into basins
    let cfg2 = write_config(dir.path(), "[basins]\nre_min = -5.0\nre_max = 5.0\nim_min = -5.0\nim_max = 5.0\nn_re = 8\nn_im = 8\n");
    let out = run(&[
        "basins",
        "--config",
        cfg2.to_str().unwrap(),
        "--out",
        o.to_str().unwrap(),
        "--set",
        "drive.p=1.0e-3",
    ]);
    assert_eq!(code(&out), 4);
}

#[test]
fn spectrum_on_the_saddle_exits_5() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[spectrum]\nbranch = \"saddle\"\n");
    let o = dir.path().join("out");
    let out = run(&["spectrum", "--config", cfg.to_str().unwrap(), "--out", o.to_str().unwrap()]);
    assert_eq!(code(&out), 5);
    assert!(stderr(&out).contains("stable"));
}

#[test]
fn empty_sweep_writes_header_only_and_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[steady]\nomega_min = 1.0\nomega_max = 1.1\nn_omega = 0\n");
    let o = dir.path().join("out");
    let out = run(&["steady", "--config", cfg.to_str().unwrap(), "--out", o.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let data = csvio::read_csv(&o.join("steady.csv")).unwrap();
    assert_eq!(data.header[0], "omega_p");
    assert!(data.rows.is_empty());
    assert!(data.meta.iter().any(|m| m.starts_with("kerrsense ")));
}

#[test]
fn emitted_csv_round_trips_through_own_reader() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[steady]\nomega_min = 1.04\nomega_max = 1.07\nn_omega = 31\n");
    let o = dir.path().join("out");
    assert_eq!(code(&run(&["steady", "--config", cfg.to_str().unwrap(), "--out", o.to_str().unwrap()])), 0);

    let data = csvio::read_csv(&o.join("steady.csv")).unwrap();
    assert!(data.rows.len() >= 31);
    // every numeric field reprints to exactly the bytes on disk
    for name in ["omega_p", "p", "E", "phi_m", "zeta"] {
        let i = data.column(name).unwrap();
        for row in &data.rows {
            let x: f64 = row[i].parse().unwrap();
            assert_eq!(fmt_f(x), row[i], "column {name} drifted");
        }
    }
    // sweep order: omega non-decreasing, branch index increasing within a point
    let omegas = data.floats("omega_p").unwrap();
    assert!(omegas.windows(2).all(|w| w[0] <= w[1]));
    let idx = data.floats("branch_index").unwrap();
    for k in 1..idx.len() {
        if omegas[k] == omegas[k - 1] {
            assert_eq!(idx[k], idx[k - 1] + 1.0);
        }
    }
}

#[test]
fn flag_overrides_beat_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[steady]\nomega_min = 1.0\nomega_max = 1.1\nn_omega = 2\n");
    let o = dir.path().join("out");
    let out = run(&[
        "steady",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        o.to_str().unwrap(),
        "--set",
        "drive.p=0.0123",
        "--set",
        "steady.n_omega=5",
    ]);
    assert_eq!(code(&out), 0);
    let data = csvio::read_csv(&o.join("steady.csv")).unwrap();
    let ps = data.floats("p").unwrap();
    assert!(ps.iter().all(|&p| p == 0.0123));
    let omegas = data.floats("omega_p").unwrap();
    assert_eq!(omegas.iter().filter(|&&w| w == 1.0).count(), 1); // 5 grid points, first at 1.0
    assert!(omegas.len() >= 5);
}

#[test]
fn si_input_reproduces_the_dimensionless_run() {
    let dir = tempfile::tempdir().unwrap();
    let w0 = 2.0 * std::f64::consts::PI * 1.0e7; // a 10 MHz resonator
    let si = format!(
        "[resonator]\nomega0 = {w0:e}\ngamma = {:e}\ngamma3 = {:e}\nkerr = {:e}\nmass = 1.0e-15\ntemperature = {:e}\n\n\
         [drive]\nomega_p = {:e}\np = {:e}\n\n[steady]\nomega_min = {:e}\nomega_max = {:e}\nn_omega = 7\n",
        0.02 * w0,
        5.7735026918962585e-5 * w0,
        1.0e-3 * w0,
        2.0 * kerrsense::model::HBAR_SI * w0 / kerrsense::model::KB_SI,
        1.0588 * w0,
        3.39036e-2 * w0 * w0,
        1.05 * w0,
        1.07 * w0,
    );
    let cfg_si = dir.path().join("si.toml");
    std::fs::write(&cfg_si, si).unwrap();
    let cfg_nd = write_config(dir.path(), "[steady]\nomega_min = 1.05\nomega_max = 1.07\nn_omega = 7\n");

    let o_si = dir.path().join("si");
    let o_nd = dir.path().join("nd");
    assert_eq!(
        code(&run(&["steady", "--config", cfg_si.to_str().unwrap(), "--out", o_si.to_str().unwrap(), "--units", "si"])),
        0
    );
    assert_eq!(code(&run(&["steady", "--config", cfg_nd.to_str().unwrap(), "--out", o_nd.to_str().unwrap()])), 0);

    let si = csvio::read_csv(&o_si.join("steady.csv")).unwrap();
    let nd = csvio::read_csv(&o_nd.join("steady.csv")).unwrap();
    assert_eq!(si.rows.len(), nd.rows.len());
    let (e_si, e_nd) = (si.floats("E").unwrap(), nd.floats("E").unwrap());
    let (w_si, w_nd) = (si.floats("omega_p").unwrap(), nd.floats("omega_p").unwrap());
    for k in 0..e_si.len() {
        assert!((e_si[k] - e_nd[k]).abs() <= 1e-9 * e_nd[k].abs(), "energy differs at row {k}");
        assert!((w_si[k] / w0 - w_nd[k]).abs() <= 1e-12 * w_nd[k]);
    }
    assert!(si.meta.iter().any(|m| m == "units: si"));
}

#[test]
fn seeded_runs_reproduce_and_different_seeds_differ() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "[simulate]\nt_max = 200.0\nn_traj = 2\nrecord_every = 10\ndump_trajectories = 2\n",
    );
    let outs: Vec<PathBuf> = (0..3).map(|k| dir.path().join(format!("o{k}"))).collect();
    for (path, seed) in outs.iter().zip(["11", "11", "12"]) {
        let out = run(&[
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            path.to_str().unwrap(),
            "--seed",
            seed,
        ]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
    }
    let read = |p: &PathBuf, f: &str| std::fs::read(p.join(f)).unwrap();
    assert_eq!(read(&outs[0], "simulate.csv"), read(&outs[1], "simulate.csv"));
    assert_eq!(read(&outs[0], "simulate.json"), read(&outs[1], "simulate.json"));
    assert_ne!(read(&outs[0], "simulate.csv"), read(&outs[2], "simulate.csv"));
}

#[test]
fn monte_carlo_spectrum_carries_error_bars() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "[spectrum]\nmc = true\nn_traj = 16\nsegment_len = 256\ndiscard = 256\n",
    );
    let o = dir.path().join("out");
    let out = run(&[
        "spectrum",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        o.to_str().unwrap(),
        "--seed",
        "3",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let data = csvio::read_csv(&o.join("spectrum.csv")).unwrap();
    assert_eq!(data.header, vec!["omega", "density", "mc_density", "mc_std_error"]);
    assert!(!data.rows.is_empty());
    let est = data.floats("mc_density").unwrap();
    let err = data.floats("mc_std_error").unwrap();
    assert!(est.iter().all(|v| v.is_finite() && *v > 0.0));
    assert!(err.iter().all(|v| v.is_finite() && *v > 0.0));
    assert!(data.meta.iter().any(|m| m == "seed: 3"));

    // same command without the Monte-Carlo block stays analytic
    let o2 = dir.path().join("out2");
    let out = run(&[
        "spectrum",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        o2.to_str().unwrap(),
        "--set",
        "spectrum.mc=false",
    ]);
    assert_eq!(code(&out), 0);
    let data = csvio::read_csv(&o2.join("spectrum.csv")).unwrap();
    assert_eq!(data.header, vec!["omega", "density"]);
}

#[test]
fn sensitivity_reports_partial_failures_per_row() {
    let dir = tempfile::tempdir().unwrap();
    // sweep crosses the upper fold: saddle rows exist only inside the band
    let cfg = write_config(
        dir.path(),
        "[sensitivity]\nomega_min = 1.055\nomega_max = 1.075\nn_omega = 9\nbranch = \"saddle\"\nphi_policy = 0.0\ntau = 1.0e4\n",
    );
    let o = dir.path().join("out");
    let out = run(&["sensitivity", "--config", cfg.to_str().unwrap(), "--out", o.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out)); // some rows succeed
    let data = csvio::read_csv(&o.join("sensitivity.csv")).unwrap();
    let status = data.column("status").unwrap();
    let ok = data.rows.iter().filter(|r| r[status] == "ok").count();
    let failed = data.rows.len() - ok;
    assert!(ok > 0 && failed > 0, "expected a mix, got {ok} ok / {failed} failed");
    // failed rows keep the grid position but blank the physics columns
    let e = data.column("E").unwrap();
    for row in data.rows.iter().filter(|r| r[status] != "ok") {
        assert!(row[e].parse::<f64>().unwrap().is_nan());
    }
}
