//! Deterministic rotating-frame flow: right-hand side, adaptive RK4
//! integration and the [`Trajectory`] container shared with the stochastic
//! integrators.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::model::{Drive, ResonatorParams};
use crate::scalar::Real;
use crate::steady_state::solve_energy;

/// A sampled time series of the slow complex amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    /// Strictly increasing sample times.
    pub times: Vec<T>,
    /// Complex amplitude at each sample time.
    pub values: Vec<Complex<T>>,
    /// Master seed for stochastic runs; `None` for deterministic flow.
    pub seed: Option<u64>,
    /// Nominal (maximum) time step of the integrator.
    pub dt: T,
    /// Identifier of the stepping scheme that produced the samples.
    pub integrator: &'static str,
}

/// Noiseless drift of the slow amplitude:
/// `dC/dt = sqrt(p) e^{i phi_p} - [gamma + i(omega0 - omega_p) +
/// (i K + gamma3)|C|^2] C`.
pub fn flow_rhs<T: Real>(params: &ResonatorParams<T>, drive: &Drive<T>, c: Complex<T>) -> Complex<T> {
    let delta = drive.detuning(params);
    let damping = Complex::new(
        params.gamma + params.gamma3 * c.norm_sqr(),
        delta + params.kerr * c.norm_sqr(),
    );
    Complex::from_polar(drive.p.sqrt(), drive.phi_p) - damping * c
}

/// One classical RK4 step of the noiseless flow.
pub fn rk4_step<T: Real>(
    params: &ResonatorParams<T>,
    drive: &Drive<T>,
    c: Complex<T>,
    h: T,
) -> Complex<T> {
    let half = T::lit(0.5);
    let k1 = flow_rhs(params, drive, c);
    let k2 = flow_rhs(params, drive, c + k1 * (h * half));
    let k3 = flow_rhs(params, drive, c + k2 * (h * half));
    let k4 = flow_rhs(params, drive, c + k3 * h);
    c + (k1 + (k2 + k3) * T::lit(2.0) + k4) * (h / T::lit(6.0))
}

/// Integrates the noiseless flow from `c_init` with step-doubling error
/// control (`dt` is the maximum step), recording every accepted step.
///
/// Stops early once the state comes within `1e-8` (relative to the attractor
/// amplitude) of any stable steady state.
pub fn integrate_flow<T: Real>(
    params: &ResonatorParams<T>,
    drive: &Drive<T>,
    c_init: Complex<T>,
    dt: T,
    t_max: T,
) -> Result<Trajectory<T>> {
    params.validate()?;
    drive.validate()?;
    if !(dt > T::zero()) || !dt.is_finite() {
        return Err(Error::InvalidInput(format!("step must be positive and finite, got {dt}")));
    }
    if !(t_max >= T::zero()) || !t_max.is_finite() {
        return Err(Error::InvalidInput(format!(
            "integration span must be non-negative and finite, got {t_max}"
        )));
    }
    let attractors: Vec<Complex<T>> = solve_energy(params, drive)?
        .stable()
        .iter()
        .map(|b| b.c_m)
        .collect();
    let arrive = |c: Complex<T>| {
        attractors.iter().any(|a| (c - a).norm() <= T::lit(1e-8) * (T::one() + a.norm()))
    };

    let rtol = T::lit(1e-9);
    let atol = T::lit(1e-12) * (T::one() + c_init.norm());
    let h_min = dt * T::lit(1e-12);
    let mut times = vec![T::zero()];
    let mut values = vec![c_init];
    let mut t = T::zero();
    let mut c = c_init;
    let mut h = dt;
    while t < t_max && !arrive(c) {
        h = h.min(t_max - t);
        let coarse = rk4_step(params, drive, c, h);
        let mid = rk4_step(params, drive, c, h * T::lit(0.5));
        let fine = rk4_step(params, drive, mid, h * T::lit(0.5));
        let err = (fine - coarse).norm() / T::lit(15.0);
        let tol = atol + rtol * fine.norm();
        if err > tol {
            if h * T::lit(0.5) < h_min {
                return Err(Error::StepSizeUnderflow(format!(
                    "flow integration stalled at t = {t} (step {h})"
                )));
            }
            h = h * T::lit(0.5);
            continue;
        }
        c = fine + (fine - coarse) / T::lit(15.0);
        t = t + h;
        times.push(t);
        values.push(c);
        if err < tol * T::lit(0.03125) {
            h = (h * T::lit(2.0)).min(dt);
        }
    }
    Ok(Trajectory { times, values, seed: None, dt, integrator: "rk4-doubling" })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::steady_state::{linearize, Stability};
    use approx::assert_relative_eq;

    fn kerr_params() -> ResonatorParams<f64> {
        ResonatorParams::new(1.0, 0.02, 1.0e-3 * 0.1 / 3.0f64.sqrt(), 1.0e-3, 0.5, 0.0).unwrap()
    }

    fn bistable_drive() -> Drive<f64> {
        Drive::new(1.0588, 3.39036e-2, 0.0).unwrap()
    }

    #[test]
    fn steady_states_are_fixed_points() {
        let p = kerr_params();
        let d = bistable_drive();
        for b in solve_energy(&p, &d).unwrap().branches {
            assert!(flow_rhs(&p, &d, b.c_m).norm() < 1e-9);
        }
        // and a stable one is not left by the integrator
        let b0 = solve_energy(&p, &d).unwrap().branches[0];
        let traj = integrate_flow(&p, &d, b0.c_m, 1.0, 200.0).unwrap();
        assert!((traj.values.last().unwrap() - b0.c_m).norm() < 1e-7);
    }

    #[test]
    fn linear_flow_matches_closed_form() {
        let p = ResonatorParams::new(1.0, 0.05, 0.0, 0.0, 0.5, 0.0).unwrap();
        let d = Drive::new(0.97, 4.0e-2, 0.5).unwrap();
        let c_inf = Complex::from_polar(0.04f64.sqrt(), 0.5) / Complex::new(0.05, 0.03);
        let c0 = Complex::new(1.5, -2.0);
        let traj = integrate_flow(&p, &d, c0, 0.5, 30.0).unwrap();
        for (&t, &c) in traj.times.iter().zip(&traj.values) {
            let exact = c_inf + (c0 - c_inf) * (-Complex::new(0.05, 0.03) * t).exp();
            assert!((c - exact).norm() < 1e-7, "t = {t}");
        }
    }

    #[test]
    fn saddle_perturbations_split_between_attractors() {
        let p = kerr_params();
        let d = bistable_drive();
        let ss = solve_energy(&p, &d).unwrap();
        let saddle = *ss.saddle().unwrap();
        let lin = linearize(&p, &d, saddle.energy);
        assert!(lin.lambda0.re < 0.0);
        let (v, _) = crate::dynamics::basins::saddle_directions(&lin).unwrap();
        let mut ends = Vec::new();
        for sign in [1.0f64, -1.0] {
            let c0 = saddle.c_m + v * Complex::new(sign * 1e-6, 0.0);
            let traj = integrate_flow(&p, &d, c0, 1.0, 5.0e3).unwrap();
            ends.push(*traj.values.last().unwrap());
        }
        let low = ss.branches[0].c_m;
        let high = ss.branches[2].c_m;
        let near = |c: Complex<f64>, a: Complex<f64>| (c - a).norm() < 1e-6 * (1.0 + a.norm());
        assert!(
            (near(ends[0], low) && near(ends[1], high))
                || (near(ends[0], high) && near(ends[1], low)),
            "ends = {ends:?}"
        );
        assert_eq!(ss.branches[1].stability, Stability::Saddle);
    }

    #[test]
    fn asymptotic_decay_rate_is_slow_eigenvalue() {
        let p = kerr_params();
        let d = bistable_drive();
        let ss = solve_energy(&p, &d).unwrap();
        let b = ss.branches[0];
        let lin = linearize(&p, &d, b.energy);
        let rate = lin.lambda0.re;
        let c0 = b.c_m + Complex::new(0.05, 0.03);
        let traj = integrate_flow(&p, &d, c0, 0.5, 400.0).unwrap();
        // log-slope fit over a late window
        let dist: Vec<(f64, f64)> = traj
            .times
            .iter()
            .zip(&traj.values)
            .filter(|(&t, &c)| t > 100.0 && t < 300.0 && (c - b.c_m).norm() > 1e-12)
            .map(|(&t, &c)| (t, (c - b.c_m).norm().ln()))
            .collect();
        assert!(dist.len() > 10);
        let (t0, l0) = dist[0];
        let (t1, l1) = dist[dist.len() - 1];
        let fitted = -(l1 - l0) / (t1 - t0);
        assert_relative_eq!(fitted, rate, max_relative = 0.02);
    }

    #[test]
    fn bad_steps_are_rejected() {
        let p = kerr_params();
        let d = bistable_drive();
        assert!(integrate_flow(&p, &d, Complex::new(0.0, 0.0), 0.0, 1.0).is_err());
        assert!(integrate_flow(&p, &d, Complex::new(0.0, 0.0), 0.1, -1.0).is_err());
    }
}
