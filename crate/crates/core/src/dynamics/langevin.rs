//! Classical Langevin simulation of the slow amplitude: Euler–Maruyama
//! stepping of `dC/dt = drift + F` with complex Gaussian white noise of
//! intensity `coth(beta hbar omega0 / 2) * W'` (so `<F F> = 0` and the
//! stationary statistics of the linearized mode reproduce the closed-form
//! spectra).

use num_complex::Complex;
use rand::distributions::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Drive, ResonatorParams, UnitSystem};
use crate::scalar::Real;
use crate::steady_state::{linearize, solve_energy};

use super::flow::{flow_rhs, Trajectory};

/// Drift and noise model of a stochastic run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LangevinMode {
    /// Linear drift and constant noise intensity, both frozen at the steady
    /// branch nearest to the initial condition. This is the regime whose
    /// statistics match the closed-form spectra exactly.
    Linearized,
    /// Full nonlinear drift with the noise intensity following the
    /// instantaneous amplitude, `W' = gamma + 2 gamma3 |C|^2` (multiplicative
    /// noise, exploratory).
    Full,
}

fn check_grid<T: Real>(dt: T, t_max: T, record_every: usize) -> Result<()> {
    if !(dt > T::zero()) || !dt.is_finite() {
        return Err(Error::InvalidInput(format!("step must be positive and finite, got {dt}")));
    }
    if !(t_max > T::zero()) || !t_max.is_finite() {
        return Err(Error::InvalidInput(format!(
            "span must be positive and finite, got {t_max}"
        )));
    }
    if record_every == 0 {
        return Err(Error::InvalidInput("record_every must be at least 1".into()));
    }
    Ok(())
}

fn simulate_with_rng<T, R>(
    units: &UnitSystem<T>,
    params: &ResonatorParams<T>,
    drive: &Drive<T>,
    c_init: Complex<T>,
    dt: T,
    t_max: T,
    mode: LangevinMode,
    record_every: usize,
    rng: &mut R,
    seed: u64,
) -> Result<Trajectory<T>>
where
    T: Real,
    R: Rng,
    StandardNormal: Distribution<T>,
{
    let coth = units.coth_factor(params);
    let half = T::lit(0.5);
    // number of steps, rounded up so the last step is recorded
    let raw = (t_max / dt).ceil();
    let mut n = raw.to_usize().ok_or_else(|| {
        Error::InvalidInput(format!("span/step gives an unreasonable step count {raw}"))
    })?;
    n = n.max(1);
    n = n.div_ceil(record_every) * record_every;

    enum Drift<T> {
        Linear { c_m: Complex<T>, w: Complex<T>, v: Complex<T>, intensity: T },
        Full,
    }
    let drift = match mode {
        LangevinMode::Linearized => {
            let ss = solve_energy(params, drive)?;
            let near = ss
                .branches
                .iter()
                .min_by(|a, b| {
                    let da = (a.c_m - c_init).norm();
                    let db = (b.c_m - c_init).norm();
                    da.partial_cmp(&db).unwrap()
                })
                .ok_or_else(|| Error::InconsistentRoot("no steady state to linearize at".into()))?;
            let lin = linearize(params, drive, near.energy);
            if !lin.is_stable() {
                return Err(Error::UnstableBranch(
                    "linearized noise run around the saddle branch".into(),
                ));
            }
            Drift::Linear { c_m: near.c_m, w: lin.w, v: lin.v, intensity: coth * lin.w_prime() }
        }
        LangevinMode::Full => Drift::Full,
    };

    let mut times = Vec::with_capacity(n / record_every + 1);
    let mut values = Vec::with_capacity(n / record_every + 1);
    let mut c = c_init;
    times.push(T::zero());
    values.push(c);
    for step in 1..=n {
        let (d, intensity) = match &drift {
            Drift::Linear { c_m, w, v, intensity } => {
                let fluct = c - c_m;
                (-(w * fluct + v * fluct.conj()), *intensity)
            }
            Drift::Full => {
                let w_prime = params.gamma + T::lit(2.0) * params.gamma3 * c.norm_sqr();
                (flow_rhs(params, drive, c), coth * w_prime)
            }
        };
        let sigma = (intensity * dt * half).sqrt();
        let n1: T = rng.sample(StandardNormal);
        let n2: T = rng.sample(StandardNormal);
        c = c + d * dt + Complex::new(sigma * n1, sigma * n2);
        if !c.re.is_finite() || !c.im.is_finite() {
            return Err(Error::StepSizeUnderflow(format!(
                "stochastic trajectory diverged at step {step}; reduce dt"
            )));
        }
        if step % record_every == 0 {
            times.push(T::from_usize(step).unwrap() * dt);
            values.push(c);
        }
    }
    Ok(Trajectory { times, values, seed: Some(seed), dt, integrator: "euler-maruyama" })
}

/// Simulates one noisy trajectory, reproducible from `seed`.
#[allow(clippy::too_many_arguments)]
pub fn simulate_langevin<T>(
    units: &UnitSystem<T>,
    params: &ResonatorParams<T>,
    drive: &Drive<T>,
    c_init: Complex<T>,
    dt: T,
    t_max: T,
    seed: u64,
    mode: LangevinMode,
    record_every: usize,
) -> Result<Trajectory<T>>
where
    T: Real,
    StandardNormal: Distribution<T>,
{
    params.validate()?;
    drive.validate()?;
    check_grid(dt, t_max, record_every)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    simulate_with_rng(units, params, drive, c_init, dt, t_max, mode, record_every, &mut rng, seed)
}

/// Simulates `n_traj` independent trajectories in parallel. Trajectory `i`
/// draws from stream `i` of the master seed, so the ensemble is reproducible
/// and independent of the thread count.
#[allow(clippy::too_many_arguments)]
pub fn langevin_ensemble<T>(
    units: &UnitSystem<T>,
    params: &ResonatorParams<T>,
    drive: &Drive<T>,
    c_init: Complex<T>,
    dt: T,
    t_max: T,
    master_seed: u64,
    mode: LangevinMode,
    record_every: usize,
    n_traj: usize,
) -> Result<Vec<Trajectory<T>>>
where
    T: Real,
    StandardNormal: Distribution<T>,
{
    params.validate()?;
    drive.validate()?;
    check_grid(dt, t_max, record_every)?;
    if n_traj == 0 {
        return Err(Error::InvalidInput("ensemble must have at least one trajectory".into()));
    }
    (0..n_traj)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
            rng.set_stream(i as u64);
            simulate_with_rng(
                units,
                params,
                drive,
                c_init,
                dt,
                t_max,
                mode,
                record_every,
                &mut rng,
                master_seed,
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fast_linear() -> (ResonatorParams<f64>, Drive<f64>) {
        (
            ResonatorParams::new(1.0, 0.5, 0.0, 0.0, 0.5, 0.0).unwrap(),
            Drive::new(0.7, 4.0e-2, 0.0).unwrap(),
        )
    }

    #[test]
    fn trajectories_are_reproducible() {
        let (p, d) = fast_linear();
        let u = UnitSystem::<f64>::dimensionless();
        let c0 = Complex::new(0.3, 0.1);
        let a = simulate_langevin(&u, &p, &d, c0, 0.02, 5.0, 42, LangevinMode::Full, 1).unwrap();
        let b = simulate_langevin(&u, &p, &d, c0, 0.02, 5.0, 42, LangevinMode::Full, 1).unwrap();
        assert_eq!(a.values, b.values);
        let c = simulate_langevin(&u, &p, &d, c0, 0.02, 5.0, 43, LangevinMode::Full, 1).unwrap();
        assert_ne!(a.values, c.values);
        // ensemble stream 0 equals the solo run with the same seed
        let ens =
            langevin_ensemble(&u, &p, &d, c0, 0.02, 5.0, 42, LangevinMode::Full, 1, 3).unwrap();
        assert_eq!(ens[0].values, a.values);
        assert_ne!(ens[1].values, a.values);
    }

    #[test]
    fn linearized_variance_matches_equipartition() {
        let (p, d) = fast_linear();
        let u = UnitSystem::<f64>::dimensionless();
        let c_m = solve_energy(&p, &d).unwrap().branches[0].c_m;
        // start on the branch; by 8 relaxation times the ensemble is stationary
        let ens = langevin_ensemble(
            &u,
            &p,
            &d,
            c_m,
            0.02,
            16.0,
            7,
            LangevinMode::Linearized,
            800,
            512,
        )
        .unwrap();
        let finals: Vec<Complex<f64>> = ens.iter().map(|t| *t.values.last().unwrap() - c_m).collect();
        let mean = finals.iter().sum::<Complex<f64>>() / finals.len() as f64;
        assert!(mean.norm() < 0.1, "drifting mean {mean}");
        let msq = finals.iter().map(|c| c.norm_sqr()).sum::<f64>() / finals.len() as f64;
        // <|c|^2> = coth/2 = 1/2 at zero temperature for a linear resonator
        assert_relative_eq!(msq, 0.5, max_relative = 0.15);
    }

    #[test]
    fn linearized_mode_rejects_the_saddle() {
        let p =
            ResonatorParams::new(1.0, 0.02, 1.0e-3 * 0.1 / 3.0f64.sqrt(), 1.0e-3, 0.5, 0.0).unwrap();
        let d = Drive::new(1.0588, 3.39036e-2, 0.0).unwrap();
        let u = UnitSystem::<f64>::dimensionless();
        let saddle = solve_energy(&p, &d).unwrap().branches[1].c_m;
        assert!(matches!(
            simulate_langevin(&u, &p, &d, saddle, 0.05, 10.0, 1, LangevinMode::Linearized, 1),
            Err(Error::UnstableBranch(_))
        ));
    }

    #[test]
    fn full_mode_stays_near_the_branch() {
        let p =
            ResonatorParams::new(1.0, 0.02, 1.0e-3 * 0.1 / 3.0f64.sqrt(), 1.0e-3, 0.5, 0.0).unwrap();
        let d = Drive::new(1.0588, 3.39036e-2, 0.0).unwrap();
        let u = UnitSystem::<f64>::dimensionless();
        let c_m = solve_energy(&p, &d).unwrap().branches[0].c_m;
        let traj =
            simulate_langevin(&u, &p, &d, c_m, 0.05, 200.0, 11, LangevinMode::Full, 10).unwrap();
        for c in &traj.values {
            assert!(c.re.is_finite() && c.im.is_finite());
        }
        assert!((traj.values.last().unwrap() - c_m).norm() < 5.0);
    }
}
