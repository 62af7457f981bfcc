//! Full (non-rotating-frame) integration of the displacement equation of
//! motion, plus demodulation back to a complex amplitude and staircase
//! frequency sweeps for hysteresis runs.
//!
//! In units of the zero-point length `x0` the displacement obeys
//!
//! ```text
//! u'' + 2 gamma (1 + (gamma3/gamma) u^2) u'
//!     + omega0^2 (1 + (2 K / 3 omega0) u^2) u
//!     = 4 omega_p sqrt(p) sin(phi_p - omega_p t)
//! ```
//!
//! whose harmonic-balance reduction at the pump frequency reproduces the
//! rotating-frame flow exactly (cubic-spring term: `u^3` averages to
//! `3|C|^2 C`, hence the 1/3; cubic-damping term: `u^2 u'` averages to
//! `-i omega_p |C|^2 C` with no such factor, hence none).

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::model::{Drive, ResonatorParams, UnitSystem};
use crate::scalar::Real;

/// Sampled displacement trajectory (same length units as the input state).
#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementTrace<T> {
    pub times: Vec<T>,
    /// Displacement samples.
    pub x: Vec<T>,
    /// Velocity samples.
    pub v: Vec<T>,
}

/// One point of a staircase frequency sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HysteresisPoint<T> {
    pub omega_p: T,
    /// Demodulated complex amplitude in zero-point-length units.
    pub amplitude: Complex<T>,
    /// `|amplitude|^2`, comparable to the steady-state energy.
    pub energy: T,
}

fn check_displacement_grid<T: Real>(params: &ResonatorParams<T>, dt: T, t_max: T) -> Result<()> {
    if !(dt > T::zero()) || !dt.is_finite() {
        return Err(Error::InvalidInput(format!("step must be positive and finite, got {dt}")));
    }
    if params.omega0 * dt > T::lit(0.5) {
        return Err(Error::InvalidInput(format!(
            "step {dt} does not resolve the oscillation (omega0 dt > 0.5)"
        )));
    }
    if !(t_max > T::zero()) || !t_max.is_finite() {
        return Err(Error::InvalidInput(format!(
            "span must be positive and finite, got {t_max}"
        )));
    }
    Ok(())
}

/// Integrates the displacement equation of motion with fixed-step RK4 from
/// `(x_init, v_init)`, recording every `record_every`-th step (the span is
/// rounded up so the final step is recorded).
#[allow(clippy::too_many_arguments)]
pub fn integrate_displacement<T: Real>(
    units: &UnitSystem<T>,
    params: &ResonatorParams<T>,
    drive: &Drive<T>,
    x_init: T,
    v_init: T,
    dt: T,
    t_max: T,
    record_every: usize,
) -> Result<DisplacementTrace<T>> {
    params.validate()?;
    drive.validate()?;
    check_displacement_grid(params, dt, t_max)?;
    if record_every == 0 {
        return Err(Error::InvalidInput("record_every must be at least 1".into()));
    }
    let x0 = units.zero_point_length(params);
    let w0 = params.omega0;
    let spring_nl = T::lit(2.0) * params.kerr / (T::lit(3.0) * w0);
    let damp_nl = params.gamma3 / params.gamma;
    let force_amp = T::lit(4.0) * drive.omega_p * drive.p.sqrt();
    let accel = |t: T, u: T, du: T| {
        force_amp * (drive.phi_p - drive.omega_p * t).sin()
            - T::lit(2.0) * params.gamma * (T::one() + damp_nl * u * u) * du
            - w0 * w0 * (T::one() + spring_nl * u * u) * u
    };

    let raw = (t_max / dt).ceil();
    let mut n = raw
        .to_usize()
        .ok_or_else(|| Error::InvalidInput(format!("span/step gives step count {raw}")))?;
    n = n.max(1);
    n = n.div_ceil(record_every) * record_every;

    let mut u = x_init / x0;
    let mut du = v_init / x0;
    let mut times = Vec::with_capacity(n / record_every + 1);
    let mut xs = Vec::with_capacity(n / record_every + 1);
    let mut vs = Vec::with_capacity(n / record_every + 1);
    times.push(T::zero());
    xs.push(x_init);
    vs.push(v_init);
    let half = T::lit(0.5);
    for step in 1..=n {
        let t = T::from_usize(step - 1).unwrap() * dt;
        let (k1u, k1v) = (du, accel(t, u, du));
        let (k2u, k2v) = (du + half * dt * k1v, accel(t + half * dt, u + half * dt * k1u, du + half * dt * k1v));
        let (k3u, k3v) = (du + half * dt * k2v, accel(t + half * dt, u + half * dt * k2u, du + half * dt * k2v));
        let (k4u, k4v) = (du + dt * k3v, accel(t + dt, u + dt * k3u, du + dt * k3v));
        u = u + dt / T::lit(6.0) * (k1u + T::lit(2.0) * (k2u + k3u) + k4u);
        du = du + dt / T::lit(6.0) * (k1v + T::lit(2.0) * (k2v + k3v) + k4v);
        if !u.is_finite() || !du.is_finite() {
            return Err(Error::StepSizeUnderflow(format!(
                "displacement run diverged at step {step}; reduce dt"
            )));
        }
        if step % record_every == 0 {
            times.push(T::from_usize(step).unwrap() * dt);
            xs.push(u * x0);
            vs.push(du * x0);
        }
    }
    Ok(DisplacementTrace { times, x: xs, v: vs })
}

/// Projects a uniformly sampled real signal onto `e^{-i omega t}`:
/// `C = (1/T) integral x(t) e^{+i omega t} dt` over the largest whole number
/// of periods, so `x ~ C e^{-i omega t} + c.c.` gives back `C`.
pub fn demodulate<T: Real>(times: &[T], xs: &[T], omega: T) -> Result<Complex<T>> {
    if times.len() != xs.len() || times.len() < 3 {
        return Err(Error::InvalidInput("demodulation needs matched series of 3+ samples".into()));
    }
    if !(omega > T::zero()) {
        return Err(Error::InvalidInput(format!("demodulation frequency must be positive, got {omega}")));
    }
    let dt = times[1] - times[0];
    let span = times[times.len() - 1] - times[0];
    let period = T::lit(2.0) * T::PI() / omega;
    let n_per = (span / period + T::lit(1e-9)).floor();
    if n_per < T::one() {
        return Err(Error::SegmentTooShort(format!(
            "need at least one full period ({period}), got span {span}"
        )));
    }
    let m = (n_per * period / dt).round().to_usize().unwrap_or(0);
    if m == 0 || m >= times.len() {
        return Err(Error::SegmentTooShort("sampling grid shorter than a whole period".into()));
    }
    let mut acc = Complex::new(T::zero(), T::zero());
    for i in 0..=m {
        let weight = if i == 0 || i == m { T::lit(0.5) } else { T::one() };
        let lo = Complex::from_polar(T::one(), omega * times[i]);
        acc += lo * (xs[i] * weight);
    }
    // trapezoid of x e^{i omega t} dt over m steps, divided by the span m dt
    Ok(acc / T::from_usize(m).unwrap())
}

/// Staircase frequency sweep of the displacement integrator: at each pump
/// frequency the state carries over from the previous point, settles for
/// `settle_cycles` periods and is then demodulated over `sample_cycles`
/// periods. Sweeping the grid up versus down exposes hysteresis.
#[allow(clippy::too_many_arguments)]
pub fn sweep_hysteresis<T: Real>(
    units: &UnitSystem<T>,
    params: &ResonatorParams<T>,
    p: T,
    phi_p: T,
    omega_grid: &[T],
    settle_cycles: usize,
    sample_cycles: usize,
    steps_per_cycle: usize,
    state: (T, T),
) -> Result<Vec<HysteresisPoint<T>>> {
    params.validate()?;
    if omega_grid.is_empty() {
        return Err(Error::InvalidInput("empty frequency grid".into()));
    }
    if settle_cycles == 0 || sample_cycles == 0 || steps_per_cycle < 16 {
        return Err(Error::InvalidInput(
            "need settle/sample cycles >= 1 and at least 16 steps per cycle".into(),
        ));
    }
    let x0 = units.zero_point_length(params);
    let (mut x, mut v) = (state.0, state.1);
    let mut out = Vec::with_capacity(omega_grid.len());
    for &omega_p in omega_grid {
        let drive = Drive::new(omega_p, p, phi_p)?;
        let period = T::lit(2.0) * T::PI() / omega_p;
        let dt = period / T::from_usize(steps_per_cycle).unwrap();
        let settle = integrate_displacement(
            units,
            params,
            &drive,
            x,
            v,
            dt,
            period * T::from_usize(settle_cycles).unwrap(),
            settle_cycles * steps_per_cycle,
        )?;
        x = *settle.x.last().unwrap();
        v = *settle.v.last().unwrap();
        let sampled = integrate_displacement(
            units,
            params,
            &drive,
            x,
            v,
            dt,
            period * T::from_usize(sample_cycles).unwrap(),
            1,
        )?;
        x = *sampled.x.last().unwrap();
        v = *sampled.v.last().unwrap();
        // phase origin restarts at each plateau; the settle window absorbs it
        let amp = demodulate(&sampled.times, &sampled.x, omega_p)? / x0;
        out.push(HysteresisPoint { omega_p, amplitude: amp, energy: amp.norm_sqr() });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use crate::steady_state::solve_energy;

    fn units() -> UnitSystem<f64> {
        UnitSystem::dimensionless()
    }

    #[test]
    fn free_decay_is_a_damped_sinusoid() {
        let p = ResonatorParams::new(1.0, 0.05, 0.0, 0.0, 0.5, 0.0).unwrap();
        let d = Drive::new(1.0, 0.0, 0.0).unwrap();
        let trace = integrate_displacement(&units(), &p, &d, 1.0, 0.0, 0.01, 20.0, 10).unwrap();
        let wd = (1.0f64 - 0.05 * 0.05).sqrt();
        for (&t, &x) in trace.times.iter().zip(&trace.x) {
            let exact = (-0.05 * t).exp() * ((wd * t).cos() + 0.05 / wd * (wd * t).sin());
            assert!((x - exact).abs() < 2.0e-4, "t = {t}: {x} vs {exact}");
        }
    }

    #[test]
    fn driven_linear_motion_demodulates_to_the_exact_amplitude() {
        let p = ResonatorParams::new(1.0, 0.05, 0.0, 0.0, 0.5, 0.0).unwrap();
        let d = Drive::new(0.98, 4.0e-2, 0.7).unwrap();
        // exact particular solution of the linear equation
        let num = Complex::new(0.0, -2.0 * 0.98 * 0.04f64.sqrt()) * Complex::from_polar(1.0, 0.7);
        let den = Complex::new(1.0 - 0.98 * 0.98, -2.0 * 0.05 * 0.98);
        let xc = num / den;
        let period = 2.0 * std::f64::consts::PI / 0.98;
        let dt = period / 200.0;
        let trace = integrate_displacement(
            &units(),
            &p,
            &d,
            2.0 * xc.re,
            2.0 * 0.98 * xc.im,
            dt,
            10.0 * period,
            1,
        )
        .unwrap();
        let c_est = demodulate(&trace.times, &trace.x, 0.98).unwrap();
        assert_relative_eq!(c_est.norm(), xc.norm(), max_relative = 1e-4);
        assert_relative_eq!(c_est.re, xc.re, epsilon = 1e-4 * xc.norm());
        // and the rotating-frame steady state agrees to first order in 1/Q
        let c_m = solve_energy(&p, &d).unwrap().branches[0].c_m;
        assert_relative_eq!(c_est.norm(), c_m.norm(), max_relative = 0.02);
    }

    #[test]
    fn kerr_envelope_matches_the_rotating_frame() {
        let p =
            ResonatorParams::new(1.0, 0.02, 1.0e-3 * 0.1 / 3.0f64.sqrt(), 1.0e-3, 0.5, 0.0).unwrap();
        let d = Drive::new(1.015, 8.4759e-3, 0.0).unwrap();
        let ss = solve_energy(&p, &d).unwrap();
        assert_eq!(ss.branches.len(), 1);
        let c_m = ss.branches[0].c_m;
        let period = 2.0 * std::f64::consts::PI / 1.015;
        let dt = period / 150.0;
        let settle = integrate_displacement(
            &units(),
            &p,
            &d,
            2.0 * c_m.re,
            2.0 * 1.015 * c_m.im,
            dt,
            40.0 * period,
            6000,
        )
        .unwrap();
        let sampled = integrate_displacement(
            &units(),
            &p,
            &d,
            *settle.x.last().unwrap(),
            *settle.v.last().unwrap(),
            dt,
            10.0 * period,
            1,
        )
        .unwrap();
        let c_est = demodulate(&sampled.times, &sampled.x, 1.015).unwrap();
        assert_relative_eq!(c_est.norm(), c_m.norm(), max_relative = 0.03);
    }

    #[test]
    fn frequency_sweeps_show_hysteresis_at_twice_critical_drive() {
        let p =
            ResonatorParams::new(1.0, 0.02, 1.0e-3 * 0.1 / 3.0f64.sqrt(), 1.0e-3, 0.5, 0.0).unwrap();
        let up_grid: Vec<f64> = crate::numerics::linspace(1.050, 1.070, 21);
        let down_grid: Vec<f64> = up_grid.iter().rev().copied().collect();
        let up = sweep_hysteresis(&units(), &p, 3.39036e-2, 0.0, &up_grid, 100, 8, 120, (0.0, 0.0))
            .unwrap();
        let down =
            sweep_hysteresis(&units(), &p, 3.39036e-2, 0.0, &down_grid, 100, 8, 120, (0.0, 0.0))
                .unwrap();
        let jump = |pts: &[HysteresisPoint<f64>]| {
            let mut best = (0usize, 0.0f64);
            for i in 1..pts.len() {
                let d = (pts[i].energy - pts[i - 1].energy).abs();
                if d > best.1 {
                    best = (i, d);
                }
            }
            best
        };
        let (iu, du) = jump(&up);
        let (id, dd) = jump(&down);
        assert!(du > 10.0 && dd > 10.0, "no sharp jumps: {du}, {dd}");
        // up-sweep drops near the high-frequency fold, down-sweep climbs near
        // the low-frequency one
        let up_jump_at = 0.5 * (up[iu].omega_p + up[iu - 1].omega_p);
        let down_jump_at = 0.5 * (down[id].omega_p + down[id - 1].omega_p);
        assert!((1.0615..=1.0675).contains(&up_jump_at), "up jump at {up_jump_at}");
        assert!((1.0525..=1.0580).contains(&down_jump_at), "down jump at {down_jump_at}");
        assert!(up[iu - 1].energy > up[iu].energy, "up-sweep should fall off the high branch");
        assert!(down[id].energy > down[id - 1].energy, "down-sweep should climb");
    }
}
