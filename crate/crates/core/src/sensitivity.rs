//! Responsivity of the homodyne signal to resonance-frequency shifts and the
//! resulting bounds on detectable relative mass changes.
//!
//! An accreted mass `delta m` shifts the resonance by `delta omega0 / omega0 =
//! -delta m / 2m`, which moves the mean homodyne signal `X0 = 2 Re(C_m
//! e^{i phi_LO})`. Comparing that shift with the thermal noise accumulated
//! over an averaging window `tau` gives the smallest resolvable `delta m / m`.
//!
//! Two independent routes to the bound are provided and must agree in the
//! classical regime `kb T >> hbar omega0`:
//!
//! * [`delta_m_from_spectrum`] divides the noise of the windowed estimate
//!   (from the zero-frequency spectral density) by `|dX0/domega0|`;
//! * [`delta_m_nonlinear`] is the closed form `2 sqrt(2 pi kb T / (Q_eff
//!   omega0 tau U0)) * G`, with `Q_eff = omega0 / W'`, stored energy `U0 =
//!   hbar omega0 E` and the phase-dependent gain factor [`g_spectral`].
//!
//! The minimum of [`g_spectral`] over the local-oscillator phase is exactly 1
//! for every working point: squeezing of the noise and projection of the
//! signal conspire so that phase choice alone never beats the
//! thermal-noise-limited bound at fixed `W'`. The separate figure of merit
//! [`g_function`] compares noise and signal as the measurement phase `phi` is
//! scanned at fixed orientation `phi_c`; its minimum ranges between 1/2 and 1
//! and reaches `1 / (1 + zeta)` at `phi_c = pi/2`, the sense in which a
//! driven-to-near-fold resonator can halve the resolvable mass.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::model::{Drive, ResonatorParams, UnitSystem};
use crate::numerics::golden_min;
use crate::response::{estimator_variance, spectral_density_zero};
use crate::scalar::Real;
use crate::steady_state::{linearize, mean_amplitude, solve_energy};

/// Mean homodyne signal `X0 = 2 Re(C_m e^{i phi_LO})`.
pub fn homodyne_mean<T: Real>(c_m: Complex<T>, phi_lo: T) -> T {
    T::lit(2.0) * (c_m * Complex::from_polar(T::one(), phi_lo)).re
}

/// Signed slope `dX0/domega0` of the homodyne mean under a resonance shift
/// at fixed drive; errors on a fold where the slope diverges.
pub fn responsivity_omega0<T: Real>(
    params: &ResonatorParams<T>,
    drive: &Drive<T>,
    energy: T,
    phi_lo: T,
) -> Result<T> {
    let lin = linearize(params, drive, energy);
    let prod = lin.relaxation_product();
    if prod.abs() <= T::lit(1e-12) * lin.w.norm_sqr() {
        return Err(Error::DivergentSlope(format!(
            "responsivity at E = {energy}: working point is on a fold"
        )));
    }
    let c_m = mean_amplitude(params, drive, energy);
    let dc = -Complex::<T>::i() * (lin.w.conj() * c_m + lin.v * c_m.conj()) / prod;
    Ok(T::lit(2.0) * (dc * Complex::from_polar(T::one(), phi_lo)).re)
}

/// Phase-scan figure of merit
/// `g(phi) = sqrt(1 + 2 zeta cos phi + zeta^2) / |cos(phi + phi_c) - zeta
/// cos(phi - phi_c)|` for `zeta` in `[0, 1)`; infinite where the signal
/// projection vanishes.
pub fn g_function<T: Real>(zeta: T, phi_c: T, phi: T) -> T {
    let num = (T::one() + T::lit(2.0) * zeta * phi.cos() + zeta * zeta).sqrt();
    let den = ((phi + phi_c).cos() - zeta * (phi - phi_c).cos()).abs();
    num / den
}

/// Minimum of [`g_function`] over the scan phase, with its location:
/// `(g_min, phi_at_min)`.
pub fn g_min<T: Real>(zeta: T, phi_c: T) -> (T, T) {
    let n = 4096;
    let two_pi = T::lit(2.0) * T::PI();
    let h = two_pi / T::from_usize(n).unwrap();
    let mut best = (T::infinity(), T::zero());
    for i in 0..n {
        let phi = h * T::from_usize(i).unwrap();
        let v = g_function(zeta, phi_c, phi);
        if v.is_finite() && v < best.0 {
            best = (v, phi);
        }
    }
    let f = |phi: T| {
        let v = g_function(zeta, phi_c, phi);
        if v.is_finite() {
            v
        } else {
            T::max_value()
        }
    };
    let (phi, g) = golden_min(&f, best.1 - h, best.1 + h, T::lit(1e-10));
    if g < best.0 {
        (g, phi)
    } else {
        best
    }
}

/// Spectrally consistent gain factor entering [`delta_m_nonlinear`]:
/// `sqrt(1 + zeta^2 - 2 zeta cos 2 dphi) / |cos(dphi + phi_c) - zeta
/// cos(dphi - phi_c)|` with `dphi = phi_LO - phi0`. Its minimum over `dphi`
/// is exactly 1 (Cauchy-Schwarz), attained at [`optimal_phase_shift`].
pub fn g_spectral<T: Real>(zeta: T, phi_c: T, dphi: T) -> T {
    let num = (T::one() + zeta * zeta - T::lit(2.0) * zeta * (T::lit(2.0) * dphi).cos()).sqrt();
    let den = ((dphi + phi_c).cos() - zeta * (dphi - phi_c).cos()).abs();
    num / den
}

/// The phase offset `phi_LO - phi0` at which [`g_spectral`] attains its
/// minimum of 1.
pub fn optimal_phase_shift<T: Real>(zeta: T, phi_c: T) -> T {
    (-(T::one() - zeta) * phi_c.sin()).atan2((T::one() + zeta) * phi_c.cos())
}

/// Energy stored in the driven motion, `U0 = hbar omega0 E`.
pub fn stored_energy<T: Real>(
    units: &UnitSystem<T>,
    params: &ResonatorParams<T>,
    energy: T,
) -> T {
    units.hbar * params.omega0 * energy
}

fn check_window_and_energy<T: Real>(tau: T, energy: T) -> Result<()> {
    if !(tau > T::zero()) || !tau.is_finite() {
        return Err(Error::InvalidInput(format!(
            "averaging window must be positive and finite, got {tau}"
        )));
    }
    if !(energy > T::zero()) {
        return Err(Error::InvalidInput(format!(
            "mass resolution needs a driven branch (E > 0), got E = {energy}"
        )));
    }
    Ok(())
}

/// `2 sqrt(2 pi kb T W' / (hbar omega0^3 tau E))`, the closed-form bound at
/// effective damping `W'`.
fn classical_bound<T: Real>(
    units: &UnitSystem<T>,
    params: &ResonatorParams<T>,
    w_prime: T,
    energy: T,
    tau: T,
) -> T {
    let theta = units.kb * params.temperature / (units.hbar * params.omega0);
    let w0 = params.omega0;
    T::lit(2.0) * (T::lit(2.0) * T::PI() * theta * w_prime / (w0 * w0 * tau * energy)).sqrt()
}

/// Smallest resolvable `delta m / m` for a linear resonator (`zeta = 0`)
/// driven to energy `E`: `2 sqrt(2 pi kb T / (Q omega0 tau U0))`.
pub fn delta_m_linear<T: Real>(
    units: &UnitSystem<T>,
    params: &ResonatorParams<T>,
    energy: T,
    tau: T,
) -> Result<T> {
    params.validate()?;
    check_window_and_energy(tau, energy)?;
    Ok(classical_bound(units, params, params.gamma, energy, tau))
}

/// Closed-form mass-resolution bound on a driven branch in the classical
/// regime: the linear bound with `Q -> Q_eff = omega0 / W'` and the phase
/// gain [`g_spectral`] evaluated at `phi_lo`.
pub fn delta_m_nonlinear<T: Real>(
    units: &UnitSystem<T>,
    params: &ResonatorParams<T>,
    drive: &Drive<T>,
    energy: T,
    phi_lo: T,
    tau: T,
) -> Result<T> {
    params.validate()?;
    drive.validate()?;
    check_window_and_energy(tau, energy)?;
    let lin = linearize(params, drive, energy);
    if !lin.is_stable() {
        return Err(Error::UnstableBranch(format!(
            "mass resolution on a non-decaying branch (zeta = {})",
            lin.zeta
        )));
    }
    let g = g_spectral(lin.zeta, lin.phi_c, phi_lo - lin.phi0);
    Ok(classical_bound(units, params, lin.w_prime(), energy, tau) * g)
}

/// Mass-resolution bound assembled from the measured quantities: noise of the
/// windowed homodyne estimate over responsivity,
/// `(2/omega0) sqrt((2 pi / tau) S(0)) / |dX0/domega0|`.
///
/// Exact in temperature (uses `coth`); agrees with [`delta_m_nonlinear`] in
/// the classical regime. Infinite where the responsivity vanishes.
pub fn delta_m_from_spectrum<T: Real>(
    units: &UnitSystem<T>,
    params: &ResonatorParams<T>,
    drive: &Drive<T>,
    energy: T,
    phi_lo: T,
    tau: T,
) -> Result<T> {
    params.validate()?;
    drive.validate()?;
    check_window_and_energy(tau, energy)?;
    let lin = linearize(params, drive, energy);
    let coth = units.coth_factor(params);
    let var = estimator_variance(&lin, coth, phi_lo, tau)?;
    let resp = responsivity_omega0(params, drive, energy, phi_lo)?;
    if resp == T::zero() {
        return Ok(T::infinity());
    }
    Ok(T::lit(2.0) / params.omega0 * var.sqrt() / resp.abs())
}

/// How the local-oscillator phase is chosen along a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhiLoPolicy<T> {
    /// Use the given phase everywhere.
    Fixed(T),
    /// Minimize the gain factor [`g_spectral`] (best mass resolution).
    OptimalG,
    /// Sit on the squeezing axis `phi0` (smallest zero-frequency noise).
    OptimalPmin,
}

/// Which stable branch a sweep starts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchSelect {
    Low,
    High,
}

/// One operating point of a sensitivity sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityReport<T> {
    pub omega_p: T,
    pub energy: T,
    pub zeta: T,
    pub phi0: T,
    pub phi_c: T,
    /// Local-oscillator phase actually used.
    pub phi_lo: T,
    pub homodyne_mean: T,
    pub responsivity: T,
    /// Zero-frequency spectral density at `phi_lo`.
    pub noise_zero: T,
    /// Closed-form bound [`delta_m_nonlinear`].
    pub delta_m: T,
    /// Cross-check [`delta_m_from_spectrum`].
    pub delta_m_check: T,
    /// Reference bound of a linear resonator at the same stored energy.
    pub delta_m_linear: T,
}

/// Sweeps the pump frequency at fixed drive strength, following one branch by
/// nearest-energy continuation (jumping at folds like a real hysteretic
/// sweep), and evaluates every sensitivity quantity at each point.
pub fn sensitivity_sweep<T: Real>(
    units: &UnitSystem<T>,
    params: &ResonatorParams<T>,
    p: T,
    omega_ps: &[T],
    branch: BranchSelect,
    policy: PhiLoPolicy<T>,
    tau: T,
) -> Result<Vec<SensitivityReport<T>>> {
    params.validate()?;
    if omega_ps.is_empty() {
        return Err(Error::InvalidInput("empty pump-frequency grid".into()));
    }
    if !(p > T::zero()) {
        return Err(Error::InvalidInput(format!(
            "sensitivity sweep needs a positive drive strength, got {p}"
        )));
    }
    let mut out = Vec::with_capacity(omega_ps.len());
    let mut prev_energy: Option<T> = None;
    for &omega_p in omega_ps {
        let drive = Drive::new(omega_p, p, T::zero())?;
        let ss = solve_energy(params, &drive)?;
        let stable = ss.stable();
        let chosen = match prev_energy {
            None => match branch {
                BranchSelect::Low => stable.first(),
                BranchSelect::High => stable.last(),
            },
            Some(e_prev) => stable.iter().min_by(|a, b| {
                let da = (a.energy - e_prev).abs();
                let db = (b.energy - e_prev).abs();
                da.partial_cmp(&db).unwrap()
            }),
        }
        .ok_or_else(|| Error::InconsistentRoot("no stable branch at sweep point".into()))?;
        let energy = chosen.energy;
        let lin = linearize(params, &drive, energy);
        let phi_lo = match policy {
            PhiLoPolicy::Fixed(phi) => phi,
            PhiLoPolicy::OptimalG => lin.phi0 + optimal_phase_shift(lin.zeta, lin.phi_c),
            PhiLoPolicy::OptimalPmin => lin.phi0,
        };
        let coth = units.coth_factor(params);
        out.push(SensitivityReport {
            omega_p,
            energy,
            zeta: lin.zeta,
            phi0: lin.phi0,
            phi_c: lin.phi_c,
            phi_lo,
            homodyne_mean: homodyne_mean(chosen.c_m, phi_lo),
            responsivity: responsivity_omega0(params, &drive, energy, phi_lo)?,
            noise_zero: spectral_density_zero(&lin, coth, phi_lo)?,
            delta_m: delta_m_nonlinear(units, params, &drive, energy, phi_lo, tau)?,
            delta_m_check: delta_m_from_spectrum(units, params, &drive, energy, phi_lo, tau)?,
            delta_m_linear: delta_m_linear(units, params, energy, tau)?,
        });
        prev_energy = Some(energy);
    }
    Ok(out)
}
