//! Relaxation, impulse response and homodyne noise spectra of the linearized
//! fluctuations around a stable branch.
//!
//! With `W' = Re W` and the eigenvalue product `lambda0 lambda1 = |W|^2 -
//! |V|^2`, the double-sided spectral density of the homodyne quadrature
//! `X = C e^{i phi_LO} + c.c.` (with `S(omega) = integral <X(t) X(0)>
//! e^{i omega t} dt`) is rational,
//!
//! ```text
//! S(omega) = 2 W' coth * [|W|^2 + |V|^2 + omega^2
//!            - 2 |W| |V| cos 2(phi_LO - phi0)] / D(omega),
//! D(omega) = omega^4 + (4 W'^2 - 2 (|W|^2 - |V|^2)) omega^2
//!            + (|W|^2 - |V|^2)^2,
//! ```
//!
//! where `coth = 2 n + 1` is the thermal factor and `phi0` the squeezing
//! axis. The variance over the local-oscillator phase is pi-periodic:
//! minimal (squeezed) at `phi_LO = phi0`, maximal at `phi0 +- pi/2`, with
//! zero-frequency values proportional to `(1 + zeta)^{-2}` and
//! `(1 - zeta)^{-2}` respectively.

use crate::error::{Error, Result};
use crate::numerics::wrap_mod_pi;
use crate::scalar::Real;
use crate::steady_state::Linearization;

/// A sampled spectral density.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult<T> {
    pub omegas: Vec<T>,
    pub values: Vec<T>,
}

/// Zero-frequency spectral extrema over the local-oscillator phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumExtrema<T> {
    /// Smallest zero-frequency density (squeezed quadrature).
    pub p_min: T,
    /// Largest zero-frequency density (anti-squeezed quadrature).
    pub p_max: T,
    /// Phase achieving `p_min` (mod pi); equals the squeezing axis.
    pub phi_at_min: T,
    /// Phase achieving `p_max` (mod pi).
    pub phi_at_max: T,
}

fn guard_stationary<T: Real>(lin: &Linearization<T>) -> Result<()> {
    let prod = lin.relaxation_product();
    if prod < T::zero() {
        return Err(Error::UnstableBranch(format!(
            "fluctuations grow (zeta = {} > 1); no stationary spectrum",
            lin.zeta
        )));
    }
    if prod <= T::lit(1e-12) * lin.w.norm_sqr() {
        return Err(Error::SlowingDownDivergence(format!(
            "working point is on a fold (zeta = {}); fluctuations diverge",
            lin.zeta
        )));
    }
    Ok(())
}

/// `1 / sqrt(lambda0 lambda1)`: the geometric-mean relaxation time that sets
/// the ring-down of transients; diverges on a fold.
pub fn ring_down_time<T: Real>(lin: &Linearization<T>) -> Result<T> {
    guard_stationary(lin)?;
    Ok(lin.relaxation_product().sqrt().recip())
}

/// Causal impulse response `G(t)`: the solution of
/// `G'' + 2 W' G' + lambda0 lambda1 G = 0` with `G(0) = 0`, `G'(0) = 1`,
/// and `G = 0` for `t < 0`.
pub fn propagator<T: Real>(lin: &Linearization<T>, t: T) -> T {
    if t < T::zero() {
        return T::zero();
    }
    let wp = lin.w.re;
    let rad = lin.v.norm_sqr() - lin.w.im * lin.w.im;
    // confluent eigenvalues: |lambda1 - lambda0| below 1e-8 of the scale
    if T::lit(4.0) * rad.abs() <= (T::lit(1e-8) * wp) * (T::lit(1e-8) * wp) {
        return t * (-wp * t).exp();
    }
    if rad > T::zero() {
        // overdamped: difference of pure decays, computed without sinh to
        // avoid overflow when the slow pole dominates
        let r = rad.sqrt();
        ((-(wp - r) * t).exp() - (-(wp + r) * t).exp()) / (T::lit(2.0) * r)
    } else {
        let r = (-rad).sqrt();
        (-wp * t).exp() * (r * t).sin() / r
    }
}

/// Double-sided homodyne spectral density at frequency `omega` (rad/time from
/// the pump) for local-oscillator phase `phi_lo`.
pub fn spectral_density<T: Real>(
    lin: &Linearization<T>,
    coth: T,
    phi_lo: T,
    omega: T,
) -> Result<T> {
    guard_stationary(lin)?;
    let wp = lin.w.re;
    let w2 = lin.w.norm_sqr();
    let v2 = lin.v.norm_sqr();
    let prod = w2 - v2;
    let cross = T::lit(2.0) * (w2 * v2).sqrt() * (T::lit(2.0) * (phi_lo - lin.phi0)).cos();
    let num = w2 + v2 + omega * omega - cross;
    let o2 = omega * omega;
    let den = o2 * o2 + (T::lit(4.0) * wp * wp - T::lit(2.0) * prod) * o2 + prod * prod;
    Ok(T::lit(2.0) * wp * coth * num / den)
}

/// Zero-frequency spectral density in closed form,
/// `(2 W'/|W|^2) coth (1 + zeta^2 - 2 zeta cos 2(phi_LO - phi0)) / (1 - zeta^2)^2`.
pub fn spectral_density_zero<T: Real>(lin: &Linearization<T>, coth: T, phi_lo: T) -> Result<T> {
    guard_stationary(lin)?;
    let z = lin.zeta;
    let one = T::one();
    let num = one + z * z - T::lit(2.0) * z * (T::lit(2.0) * (phi_lo - lin.phi0)).cos();
    let den = (one - z * z) * (one - z * z);
    Ok(T::lit(2.0) * lin.w.re / lin.w.norm_sqr() * coth * num / den)
}

/// Total quadrature variance `(1/2pi) integral S(omega) domega` in closed
/// form: `coth (1 - zeta cos 2(phi_LO - phi0)) / (1 - zeta^2)`.
pub fn integrated_spectrum<T: Real>(lin: &Linearization<T>, coth: T, phi_lo: T) -> Result<T> {
    guard_stationary(lin)?;
    let z = lin.zeta;
    let num = T::one() - z * (T::lit(2.0) * (phi_lo - lin.phi0)).cos();
    Ok(coth * num / (T::one() - z * z))
}

/// Extremal zero-frequency densities over the local-oscillator phase.
pub fn spectrum_extrema<T: Real>(lin: &Linearization<T>, coth: T) -> Result<SpectrumExtrema<T>> {
    guard_stationary(lin)?;
    let z = lin.zeta;
    let base = T::lit(2.0) * lin.w.re / lin.w.norm_sqr() * coth;
    let p_min = base / ((T::one() + z) * (T::one() + z));
    let p_max = base / ((T::one() - z) * (T::one() - z));
    Ok(SpectrumExtrema {
        p_min,
        p_max,
        phi_at_min: lin.phi0,
        phi_at_max: wrap_mod_pi(lin.phi0 + T::FRAC_PI_2()),
    })
}

/// Variance of a homodyne estimate averaged over a window `tau`, in the
/// long-window limit: `(2 pi / tau) S(0)`.
pub fn estimator_variance<T: Real>(
    lin: &Linearization<T>,
    coth: T,
    phi_lo: T,
    tau: T,
) -> Result<T> {
    if !(tau > T::zero()) || !tau.is_finite() {
        return Err(Error::InvalidInput(format!(
            "averaging window must be positive and finite, got {tau}"
        )));
    }
    Ok(T::lit(2.0) * T::PI() / tau * spectral_density_zero(lin, coth, phi_lo)?)
}

/// Samples [`spectral_density`] on a frequency grid.
pub fn sample_spectrum<T: Real>(
    lin: &Linearization<T>,
    coth: T,
    phi_lo: T,
    omegas: &[T],
) -> Result<SpectrumResult<T>> {
    let values = omegas
        .iter()
        .map(|&w| spectral_density(lin, coth, phi_lo, w))
        .collect::<Result<Vec<T>>>()?;
    Ok(SpectrumResult { omegas: omegas.to_vec(), values })
}
