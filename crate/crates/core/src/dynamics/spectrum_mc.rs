//! Monte Carlo estimate of the homodyne noise spectrum from an ensemble of
//! stochastic trajectories, via averaged periodograms.
//!
//! Normalization matches the closed-form spectral density: for uniform
//! sampling `x_n` with step `dt`, each segment contributes
//! `P(omega_k) = (dt/L) |sum_n x_n e^{-i omega_k n dt}|^2`, whose expectation
//! is the two-sided density with `(1/2pi) integral P domega = Var(x)`.

use num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::flow::Trajectory;

/// Stationary-segment selection for the periodogram.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowSpec {
    /// Leading samples of every trajectory to drop (burn-in).
    pub discard: usize,
    /// Samples per periodogram segment.
    pub segment_len: usize,
}

/// Averaged-periodogram spectrum with per-bin standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct McSpectrum<T> {
    /// Frequency bins `2 pi k / (L dt)`, `k = 0 ..= L/2`.
    pub omegas: Vec<T>,
    /// Averaged spectral density estimate per bin.
    pub values: Vec<T>,
    /// Standard error of the mean per bin (zero when fewer than 2 segments).
    pub std_errors: Vec<T>,
    /// Number of segments averaged.
    pub segments: usize,
}

/// Estimates the spectral density of the quadrature `X = 2 Re(C e^{i phi_lo})`
/// from uniformly sampled trajectories, discarding burn-in and averaging
/// non-overlapping segments. The ensemble-time mean of `X` is subtracted, so
/// the estimate covers the fluctuation spectrum only.
pub fn estimate_spectrum_mc<T>(
    trajs: &[Trajectory<T>],
    phi_lo: T,
    window: &WindowSpec,
) -> Result<McSpectrum<T>>
where
    T: Real + rustfft::FftNum,
{
    let l = window.segment_len;
    if l < 8 {
        return Err(Error::InvalidInput(format!("segment length {l} is too short")));
    }
    let usable: Vec<&Trajectory<T>> = trajs
        .iter()
        .filter(|t| t.values.len() >= window.discard + l)
        .collect();
    if usable.is_empty() {
        return Err(Error::SegmentTooShort(format!(
            "no trajectory has {} + {} samples",
            window.discard, l
        )));
    }
    let dt = {
        let t = usable[0];
        if t.times.len() < 2 {
            return Err(Error::SegmentTooShort("trajectory has fewer than 2 samples".into()));
        }
        t.times[1] - t.times[0]
    };
    for t in &usable {
        let step = t.times[1] - t.times[0];
        if ((step - dt) / dt).abs() > T::lit(1e-6) {
            return Err(Error::InvalidInput(
                "trajectories are not sampled on a common uniform grid".into(),
            ));
        }
    }
    let phase = Complex::from_polar(T::one(), phi_lo);
    let quad = |c: Complex<T>| T::lit(2.0) * (c * phase).re;

    let mut mean = T::zero();
    let mut count = 0usize;
    for t in &usable {
        for &c in &t.values[window.discard..] {
            mean += quad(c);
            count += 1;
        }
    }
    mean /= T::from_usize(count).unwrap();

    let mut planner = FftPlanner::<T>::new();
    let fft = planner.plan_fft_forward(l);
    let n_bins = l / 2 + 1;
    let mut sum = vec![T::zero(); n_bins];
    let mut sum_sq = vec![T::zero(); n_bins];
    let mut segments = 0usize;
    let mut buf = vec![Complex::new(T::zero(), T::zero()); l];
    let norm = dt / T::from_usize(l).unwrap();
    for t in &usable {
        let avail = (t.values.len() - window.discard) / l;
        for s in 0..avail {
            let start = window.discard + s * l;
            for (b, &c) in buf.iter_mut().zip(&t.values[start..start + l]) {
                *b = Complex::new(quad(c) - mean, T::zero());
            }
            fft.process(&mut buf);
            for k in 0..n_bins {
                let p = norm * buf[k].norm_sqr();
                sum[k] += p;
                sum_sq[k] += p * p;
            }
            segments += 1;
        }
    }
    if segments == 0 {
        return Err(Error::SegmentTooShort(
            "trajectories shorter than discard + segment length".into(),
        ));
    }
    let n = T::from_usize(segments).unwrap();
    let two_pi = T::lit(2.0) * T::PI();
    let omegas = (0..n_bins)
        .map(|k| two_pi * T::from_usize(k).unwrap() / (T::from_usize(l).unwrap() * dt))
        .collect();
    let values: Vec<T> = sum.iter().map(|&s| s / n).collect();
    let std_errors = if segments >= 2 {
        sum_sq
            .iter()
            .zip(&values)
            .map(|(&sq, &m)| {
                let var = (sq / n - m * m).max(T::zero());
                (var / (n - T::one())).sqrt()
            })
            .collect()
    } else {
        vec![T::zero(); n_bins]
    };
    Ok(McSpectrum { omegas, values, std_errors, segments })
}

/// Trapezoid-free quadrature of a two-sided spectrum stored one-sided:
/// `(1/2pi) * domega * (P_0 + P_{L/2} + 2 sum interior)`; equals the
/// variance of the underlying signal in expectation.
pub fn integrate_mc_spectrum<T: Real>(spec: &McSpectrum<T>) -> T {
    let domega = spec.omegas[1] - spec.omegas[0];
    let interior: T = spec.values[1..spec.values.len() - 1].iter().copied().sum();
    let edges = spec.values[0] + spec.values[spec.values.len() - 1];
    domega * (edges + T::lit(2.0) * interior) / (T::lit(2.0) * T::PI())
}
