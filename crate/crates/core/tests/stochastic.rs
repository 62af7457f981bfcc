//! Statistical behaviour of the simulation layer: ensemble variances against
//! the closed-form spectra, reproducibility across thread pools, error-band
//! scaling and basin-label stability under grid refinement.

use kerrsense::bifurcation::critical_point;
use kerrsense::dynamics::{
    basin_map, estimate_spectrum_mc, langevin_ensemble, BasinLabel, LangevinMode, Window,
    WindowSpec,
};
use kerrsense::model::{Drive, ResonatorParams, UnitSystem};
use kerrsense::response::{integrated_spectrum, ring_down_time, spectral_density};
use kerrsense::steady_state::{linearize, solve_energy, SteadyBranch};

fn bistable_params() -> ResonatorParams<f64> {
    ResonatorParams::new(1.0, 0.02, 1.0e-3 * 0.1 / 3.0f64.sqrt(), 1.0e-3, 0.5, 0.0).unwrap()
}

/// Locates the pump frequency where the low branch has the requested
/// squeezing parameter, by bisection between its fold and mid-band.
fn low_branch_at_zeta(
    params: &ResonatorParams<f64>,
    p: f64,
    target: f64,
) -> (Drive<f64>, SteadyBranch<f64>) {
    let zeta_at = |w: f64| {
        let drive = Drive::new(w, p, 0.0).unwrap();
        let states = solve_energy(params, &drive).unwrap();
        linearize(params, &drive, states.branches[0].energy).zeta
    };
    let (mut lo, mut hi) = (1.0550, 1.0588);
    assert!(zeta_at(lo) > target && zeta_at(hi) < target);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if zeta_at(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let drive = Drive::new(0.5 * (lo + hi), p, 0.0).unwrap();
    let states = solve_energy(params, &drive).unwrap();
    (drive, states.branches[0])
}

/// Sample variance (and mean) of the homodyne quadrature over an ensemble of
/// final states.
fn quadrature_stats(
    finals: &[num_complex::Complex<f64>],
    c_m: num_complex::Complex<f64>,
    phi_lo: f64,
) -> (f64, f64) {
    let rot = num_complex::Complex::from_polar(1.0, phi_lo);
    let xs: Vec<f64> = finals.iter().map(|c| 2.0 * ((c - c_m) * rot).re).collect();
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Ensemble quadrature variances at moderate squeezing match the integrated
/// output spectrum at the squeezed, anti-squeezed and periodic-repeat phases,
/// and the principal-axis variance ratio matches `(1+zeta)/(1-zeta)`.
#[test]
fn ensemble_variances_match_integrated_spectrum() {
    let params = ResonatorParams { temperature: 2.0, ..bistable_params() };
    let cp = critical_point(&params).unwrap();
    let (drive, branch) = low_branch_at_zeta(&params, 2.0 * cp.p, 0.6);
    let lin = linearize(&params, &drive, branch.energy);
    assert!((lin.zeta - 0.6).abs() < 1e-9);

    let units = UnitSystem::dimensionless();
    let coth = units.coth_factor(&params);
    let dt = 0.01 / lin.lambda0.norm().max(lin.lambda1.norm());
    let burn = (20.0 * ring_down_time(&lin).unwrap()).max(8.0 / lin.lambda0.re);
    let n_steps = ((burn / dt).ceil() as usize).max(1);
    let trajs = langevin_ensemble(
        &units,
        &params,
        &drive,
        branch.c_m,
        dt,
        burn,
        0x5eed_cafe,
        LangevinMode::Linearized,
        n_steps,
        2048,
    )
    .unwrap();
    let finals: Vec<_> = trajs.iter().map(|t| *t.values.last().unwrap()).collect();

    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut vars = Vec::new();
    for dphi in [0.0, half_pi, 2.0 * half_pi] {
        let phi_lo = lin.phi0 + dphi;
        let closed = integrated_spectrum(&lin, coth, phi_lo).unwrap();
        let (mean, var) = quadrature_stats(&finals, branch.c_m, phi_lo);
        let se_mean = (var / finals.len() as f64).sqrt();
        assert!(
            mean.abs() <= 3.0 * se_mean,
            "fluctuation mean {mean} exceeds 3 SE ({se_mean}) at dphi = {dphi}"
        );
        assert!(
            (var - closed).abs() <= 0.10 * closed,
            "variance {var} vs closed form {closed} at dphi = {dphi}"
        );
        vars.push(var);
    }
    // pi-periodicity: the phi0 and phi0+pi variances estimate the same number
    assert!((vars[2] - vars[0]).abs() <= 0.10 * vars[0]);
    let ratio = vars[1] / vars[0];
    let predicted = (1.0 + lin.zeta) / (1.0 - lin.zeta);
    assert!(
        (ratio - predicted).abs() <= 0.10 * predicted,
        "axis ratio {ratio} vs predicted {predicted}"
    );
}

/// Ensembles and basin grids are bit-identical no matter how many worker
/// threads run them.
#[test]
fn results_do_not_depend_on_thread_count() {
    let params = bistable_params();
    let drive = Drive::new(1.0588, 3.39036e-2, 0.0).unwrap();
    let units = UnitSystem::dimensionless();
    let states = solve_energy(&params, &drive).unwrap();
    let c0 = states.branches[0].c_m;

    let run_ensemble = || {
        langevin_ensemble(
            &units,
            &params,
            &drive,
            c0,
            0.05,
            20.0,
            99,
            LangevinMode::Full,
            10,
            16,
        )
        .unwrap()
    };
    let window = Window::new(-10.0, 10.0, -10.0, 10.0).unwrap();
    let run_map = || basin_map(&params, &drive, &window, 15, 15, 0.2, 2000.0).unwrap();

    let pool1 = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let pool4 = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let (e1, m1) = pool1.install(|| (run_ensemble(), run_map()));
    let (e4, m4) = pool4.install(|| (run_ensemble(), run_map()));

    assert_eq!(e1.len(), e4.len());
    for (a, b) in e1.iter().zip(&e4) {
        assert_eq!(a.values, b.values, "ensemble differs between pools");
    }
    assert_eq!(m1.labels, m4.labels, "basin labels differ between pools");
}

/// Spectral error bands shrink like `1/sqrt(N)` as the ensemble grows, and
/// the largest ensemble agrees with the Lorentzian closed form.
#[test]
fn error_bands_shrink_like_root_n() {
    let params = ResonatorParams::new(1.0f64, 0.5, 0.0, 0.0, 0.5, 0.0).unwrap();
    let drive = Drive::new(1.0, 0.04, 0.0).unwrap();
    let units = UnitSystem::dimensionless();
    let states = solve_energy(&params, &drive).unwrap();
    let c_m = states.branches[0].c_m;
    let lin = linearize(&params, &drive, states.branches[0].energy);

    let window = WindowSpec { discard: 800, segment_len: 256 };
    let dt = 0.05;
    let t_max = dt * (window.discard + window.segment_len) as f64;
    let spectra: Vec<_> = [64usize, 256, 1024]
        .iter()
        .map(|&n| {
            let trajs = langevin_ensemble(
                &units,
                &params,
                &drive,
                c_m,
                dt,
                t_max,
                1234,
                LangevinMode::Linearized,
                1,
                n,
            )
            .unwrap();
            estimate_spectrum_mc(&trajs, 0.0, &window).unwrap()
        })
        .collect();

    let mean_se = |s: &kerrsense::dynamics::McSpectrum<f64>| {
        s.std_errors.iter().sum::<f64>() / s.std_errors.len() as f64
    };
    let (se64, se256, se1024) = (mean_se(&spectra[0]), mean_se(&spectra[1]), mean_se(&spectra[2]));
    for ratio in [se64 / se256, se256 / se1024] {
        assert!(
            (1.6..=2.5).contains(&ratio),
            "error band ratio {ratio} incompatible with 1/sqrt(N) (expected ~2)"
        );
    }

    let best = &spectra[2];
    let s0 = spectral_density(&lin, 1.0, 0.0, 0.0).unwrap();
    for (i, (&w, &est)) in best.omegas.iter().zip(&best.values).enumerate() {
        let truth = spectral_density(&lin, 1.0, 0.0, w).unwrap();
        if truth < 0.3 * s0 {
            continue; // skip bins dominated by leakage from the peak
        }
        let tol = (4.0 * best.std_errors[i]).max(0.15 * truth);
        assert!(
            (est - truth).abs() <= tol,
            "bin {i} at omega = {w}: estimate {est} vs closed form {truth}"
        );
    }
}

/// Basin labels are essentially invariant when the integration step is halved
/// and the time horizon doubled.
#[test]
fn basin_labels_stable_under_refinement() {
    let params = bistable_params();
    let drive = Drive::new(1.0588, 3.39036e-2, 0.0).unwrap();
    let window = Window::new(-10.0, 10.0, -10.0, 10.0).unwrap();
    let base = basin_map(&params, &drive, &window, 41, 41, 0.2, 2000.0).unwrap();
    let refined = basin_map(&params, &drive, &window, 41, 41, 0.1, 4000.0).unwrap();

    let mut both = 0usize;
    let mut agree = 0usize;
    for (a, b) in base.labels.iter().zip(&refined.labels) {
        if *a == BasinLabel::Unresolved || *b == BasinLabel::Unresolved {
            continue;
        }
        both += 1;
        if a == b {
            agree += 1;
        }
    }
    assert!(both > 1500, "too few resolved cells: {both}");
    let frac = agree as f64 / both as f64;
    assert!(frac >= 0.999, "label agreement {frac} under refinement");
}
