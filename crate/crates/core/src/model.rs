//! Parameter containers, unit systems and thermal factors.
//!
//! The crate is unit-agnostic: every routine accepts parameters in any
//! self-consistent unit system. [`UnitSystem`] carries the two physical
//! constants that ever appear (`hbar`, `kb`) and converts between SI and the
//! internal dimensionless convention in which the resonance frequency, the
//! zero-point length and both constants are all 1.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Reduced Planck constant in SI units (J s).
pub const HBAR_SI: f64 = 1.054_571_817e-34;
/// Boltzmann constant in SI units (J/K).
pub const KB_SI: f64 = 1.380_649e-23;

/// Mechanical resonator with Kerr nonlinearity and nonlinear damping.
///
/// `gamma`, `gamma3` and `kerr` are angular rates: the slow complex amplitude
/// `C` of the displacement `x = x0 (C e^{-i omega_p t} + c.c.)` relaxes as
/// `dC/dt + [gamma + i(omega0 - omega_p) + (i kerr + gamma3)|C|^2] C = drive`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonatorParams<T> {
    /// Small-amplitude resonance frequency (rad/time).
    pub omega0: T,
    /// Linear amplitude damping rate (rad/time); the energy decay rate is `2 gamma`.
    pub gamma: T,
    /// Nonlinear (amplitude-cubed) damping rate (rad/time).
    pub gamma3: T,
    /// Kerr coefficient: frequency pull per unit `|C|^2` (rad/time).
    pub kerr: T,
    /// Effective mass.
    pub mass: T,
    /// Bath temperature (kelvin in SI; `kb T / (hbar omega0)` when dimensionless).
    pub temperature: T,
}

impl<T: Real> ResonatorParams<T> {
    /// Validating constructor.
    pub fn new(omega0: T, gamma: T, gamma3: T, kerr: T, mass: T, temperature: T) -> Result<Self> {
        let p = Self { omega0, gamma, gamma3, kerr, mass, temperature };
        p.validate()?;
        Ok(p)
    }

    /// Checks ranges and finiteness of every field.
    pub fn validate(&self) -> Result<()> {
        let fin = |name: &str, v: T| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")))
            }
        };
        fin("omega0", self.omega0)?;
        fin("gamma", self.gamma)?;
        fin("gamma3", self.gamma3)?;
        fin("kerr", self.kerr)?;
        fin("mass", self.mass)?;
        fin("temperature", self.temperature)?;
        if !(self.omega0 > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "omega0 must be positive, got {}",
                self.omega0
            )));
        }
        if !(self.gamma > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be positive, got {}",
                self.gamma
            )));
        }
        if self.gamma3 < T::zero() {
            return Err(Error::InvalidParameter(format!(
                "gamma3 must be non-negative, got {}",
                self.gamma3
            )));
        }
        if !(self.mass > T::zero()) {
            return Err(Error::InvalidParameter(format!("mass must be positive, got {}", self.mass)));
        }
        if self.temperature < T::zero() {
            return Err(Error::InvalidParameter(format!(
                "temperature must be non-negative, got {}",
                self.temperature
            )));
        }
        Ok(())
    }

    /// Linear quality factor `omega0 / gamma`.
    pub fn quality_factor(&self) -> T {
        self.omega0 / self.gamma
    }
}

/// Harmonic drive: `p` is the squared drive amplitude in the slow-flow
/// equation (units of rate squared), `phi_p` its phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Drive<T> {
    /// Drive (pump) frequency (rad/time).
    pub omega_p: T,
    /// Squared drive amplitude (rad^2/time^2).
    pub p: T,
    /// Drive phase (rad).
    pub phi_p: T,
}

impl<T: Real> Drive<T> {
    /// Validating constructor.
    pub fn new(omega_p: T, p: T, phi_p: T) -> Result<Self> {
        let d = Self { omega_p, p, phi_p };
        d.validate()?;
        Ok(d)
    }

    /// Checks ranges and finiteness of every field.
    pub fn validate(&self) -> Result<()> {
        if !self.omega_p.is_finite() || !(self.omega_p > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "omega_p must be positive and finite, got {}",
                self.omega_p
            )));
        }
        if !self.p.is_finite() || self.p < T::zero() {
            return Err(Error::InvalidParameter(format!(
                "p must be non-negative and finite, got {}",
                self.p
            )));
        }
        if !self.phi_p.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "phi_p must be finite, got {}",
                self.phi_p
            )));
        }
        Ok(())
    }

    /// Detuning `omega0 - omega_p` of the drive below the resonance.
    pub fn detuning(&self, params: &ResonatorParams<T>) -> T {
        params.omega0 - self.omega_p
    }
}

/// Which convention a [`UnitSystem`] represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitMode {
    /// Kilograms, meters, seconds, kelvins.
    Si,
    /// `hbar = kb = 1`; frequencies in units of `omega0`, lengths in units of
    /// the zero-point length, temperature as `kb T / (hbar omega0)`.
    Dimensionless,
}

/// Scale factors remembered by [`UnitSystem::to_dimensionless`] so the
/// original parameters can be restored exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scales<T> {
    /// Original resonance frequency (rad/time).
    pub omega0: T,
    /// Original effective mass.
    pub mass: T,
}

/// A self-consistent unit system: the values of `hbar` and `kb` in it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem<T> {
    pub hbar: T,
    pub kb: T,
    pub mode: UnitMode,
}

impl<T: Real> UnitSystem<T> {
    /// SI units.
    pub fn si() -> Self {
        Self { hbar: T::lit(HBAR_SI), kb: T::lit(KB_SI), mode: UnitMode::Si }
    }

    /// Internal dimensionless units, `hbar = kb = 1`.
    pub fn dimensionless() -> Self {
        Self { hbar: T::one(), kb: T::one(), mode: UnitMode::Dimensionless }
    }

    /// `hbar omega0 / (kb T)`; infinite at zero temperature.
    pub fn beta_h_omega(&self, params: &ResonatorParams<T>) -> T {
        if params.temperature == T::zero() {
            T::infinity()
        } else {
            self.hbar * params.omega0 / (self.kb * params.temperature)
        }
    }

    /// Bose occupation of the resonator mode, `1 / (e^{hbar omega0 / kb T} - 1)`.
    pub fn thermal_occupation(&self, params: &ResonatorParams<T>) -> T {
        let x = self.beta_h_omega(params);
        if x.is_infinite() {
            return T::zero();
        }
        x.exp_m1().recip()
    }

    /// Thermal enhancement factor `coth(hbar omega0 / 2 kb T) = 2 n + 1` that
    /// multiplies every noise intensity; 1 at zero temperature.
    pub fn coth_factor(&self, params: &ResonatorParams<T>) -> T {
        let x = self.beta_h_omega(params);
        if x.is_infinite() {
            return T::one();
        }
        (x / T::lit(2.0)).tanh().recip()
    }

    /// Whether `kb T >= 10 hbar omega0`, the regime the closed-form mass
    /// resolution bounds are derived in.
    pub fn in_classical_regime(&self, params: &ResonatorParams<T>) -> bool {
        self.beta_h_omega(params) <= T::lit(0.1)
    }

    /// Zero-point length `x0 = sqrt(hbar / 2 m omega0)`.
    pub fn zero_point_length(&self, params: &ResonatorParams<T>) -> T {
        (self.hbar / (T::lit(2.0) * params.mass * params.omega0)).sqrt()
    }

    /// Complex amplitude of the external force `F(t) = f e^{-i omega_p t} + c.c.`
    /// that realizes a given drive.
    pub fn drive_to_force(&self, drive: &Drive<T>, params: &ResonatorParams<T>) -> Complex<T> {
        let x0 = self.zero_point_length(params);
        let amp = Complex::from_polar(drive.p.sqrt(), drive.phi_p);
        -Complex::<T>::i() * amp * (T::lit(2.0) * params.mass * drive.omega_p * x0)
    }

    /// Inverse of [`UnitSystem::drive_to_force`]: the `(p, phi_p)` equivalent
    /// to a force `F(t) = f e^{-i omega_p t} + c.c.` at frequency `omega_p`.
    pub fn force_to_drive(
        &self,
        f: Complex<T>,
        params: &ResonatorParams<T>,
        omega_p: T,
    ) -> (T, T) {
        let x0 = self.zero_point_length(params);
        let amp = Complex::<T>::i() * f / (T::lit(2.0) * params.mass * omega_p * x0);
        let p = amp.norm_sqr();
        let phi_p = if p == T::zero() { T::zero() } else { amp.arg() };
        (p, phi_p)
    }

    /// Rescales parameters and drive to the internal dimensionless convention
    /// (`omega0 = 1`, `x0 = 1`, `hbar = kb = 1`), returning the scale factors
    /// needed to undo it.
    pub fn to_dimensionless(
        &self,
        params: &ResonatorParams<T>,
        drive: &Drive<T>,
    ) -> (ResonatorParams<T>, Drive<T>, Scales<T>) {
        let w = params.omega0;
        let theta = self.kb * params.temperature / (self.hbar * params.omega0);
        let nd_params = ResonatorParams {
            omega0: T::one(),
            gamma: params.gamma / w,
            gamma3: params.gamma3 / w,
            kerr: params.kerr / w,
            // mass 1/2 makes the zero-point length exactly 1 when hbar = omega0 = 1
            mass: T::lit(0.5),
            temperature: theta,
        };
        let nd_drive =
            Drive { omega_p: drive.omega_p / w, p: drive.p / (w * w), phi_p: drive.phi_p };
        (nd_params, nd_drive, Scales { omega0: w, mass: params.mass })
    }

    /// Undoes [`UnitSystem::to_dimensionless`], restoring parameters in the
    /// units of `self` (call on [`UnitSystem::si`] to get SI back).
    pub fn from_dimensionless(
        &self,
        params: &ResonatorParams<T>,
        drive: &Drive<T>,
        scales: &Scales<T>,
    ) -> (ResonatorParams<T>, Drive<T>) {
        let w = scales.omega0;
        let temperature = params.temperature * self.hbar * w / self.kb;
        let out_params = ResonatorParams {
            omega0: params.omega0 * w,
            gamma: params.gamma * w,
            gamma3: params.gamma3 * w,
            kerr: params.kerr * w,
            mass: scales.mass,
            temperature,
        };
        let out_drive =
            Drive { omega_p: drive.omega_p * w, p: drive.p * w * w, phi_p: drive.phi_p };
        (out_params, out_drive)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn device() -> ResonatorParams<f64> {
        // 10 MHz beam, Q = 2500, m = 5e-16 kg, room temperature.
        let omega0 = 2.0 * std::f64::consts::PI * 1.0e7;
        ResonatorParams::new(omega0, omega0 / 2500.0, 0.0, 0.0, 5.0e-16, 300.0).unwrap()
    }

    #[test]
    fn validation_rejects_out_of_range() {
        assert!(ResonatorParams::new(1.0, 0.0, 0.0, 0.0, 1.0, 0.0).is_err());
        assert!(ResonatorParams::new(-1.0, 0.1, 0.0, 0.0, 1.0, 0.0).is_err());
        assert!(ResonatorParams::new(1.0, 0.1, -0.1, 0.0, 1.0, 0.0).is_err());
        assert!(ResonatorParams::new(1.0, 0.1, 0.0, f64::NAN, 1.0, 0.0).is_err());
        assert!(ResonatorParams::new(1.0, 0.1, 0.0, 0.0, 0.0, 0.0).is_err());
        assert!(ResonatorParams::new(1.0, 0.1, 0.0, 0.0, 1.0, -1.0).is_err());
        assert!(Drive::new(0.0, 1.0, 0.0).is_err());
        assert!(Drive::new(1.0, -1.0, 0.0).is_err());
        assert!(Drive::<f64>::new(1.0, 1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn thermal_factors_satisfy_bose_identity() {
        let units = UnitSystem::<f64>::dimensionless();
        for theta in [0.04, 0.3, 2.0, 1.0e4] {
            let p = ResonatorParams::new(1.0, 0.01, 0.0, 0.0, 0.5, theta).unwrap();
            let n = units.thermal_occupation(&p);
            let coth = units.coth_factor(&p);
            assert_relative_eq!(coth, 2.0 * n + 1.0, max_relative = 1e-13);
        }
        // frozen spot value at beta hbar omega0 = 1/2
        let p = ResonatorParams::new(1.0, 0.01, 0.0, 0.0, 0.5, 2.0).unwrap();
        assert_relative_eq!(units.thermal_occupation(&p), 1.5414940825367982, max_relative = 1e-14);
        assert_relative_eq!(units.coth_factor(&p), 4.082988165073596, max_relative = 1e-13);
    }

    #[test]
    fn zero_temperature_is_ground_state() {
        let units = UnitSystem::<f64>::si();
        let mut p = device();
        p.temperature = 0.0;
        assert_eq!(units.thermal_occupation(&p), 0.0);
        assert_eq!(units.coth_factor(&p), 1.0);
        assert!(!units.in_classical_regime(&p));
    }

    #[test]
    fn device_zero_point_length_and_classicality() {
        let units = UnitSystem::<f64>::si();
        let p = device();
        assert_relative_eq!(units.zero_point_length(&p), 4.0968e-14, max_relative = 2e-4);
        // at 300 K a 10 MHz mode is deep in the classical regime
        assert!(units.in_classical_regime(&p));
        assert!(units.beta_h_omega(&p) < 1.7e-5);
    }

    #[test]
    fn force_drive_round_trip() {
        let units = UnitSystem::<f64>::si();
        let p = device();
        let drive = Drive::new(p.omega0 * 0.999, 3.7e9, 0.83).unwrap();
        let f = units.drive_to_force(&drive, &p);
        let (p_back, phi_back) = units.force_to_drive(f, &p, drive.omega_p);
        assert_relative_eq!(p_back, drive.p, max_relative = 1e-12);
        assert_abs_diff_eq!(phi_back, drive.phi_p, epsilon = 1e-12);
        // zero force maps to zero drive with a defined phase
        let (p0, phi0) = units.force_to_drive(Complex::new(0.0, 0.0), &p, drive.omega_p);
        assert_eq!(p0, 0.0);
        assert_eq!(phi0, 0.0);
    }

    #[test]
    fn dimensionless_round_trip_is_exact() {
        let si = UnitSystem::<f64>::si();
        let p = device();
        let d = Drive::new(p.omega0 * 1.001, 5.0e10, -0.4).unwrap();
        let (nd_p, nd_d, scales) = si.to_dimensionless(&p, &d);
        assert_eq!(nd_p.omega0, 1.0);
        assert_eq!(nd_p.mass, 0.5);
        assert_relative_eq!(
            UnitSystem::<f64>::dimensionless().zero_point_length(&nd_p),
            1.0,
            max_relative = 1e-15
        );
        // the reduced temperature equals kb T / (hbar omega0)
        assert_relative_eq!(
            nd_p.temperature,
            KB_SI * 300.0 / (HBAR_SI * p.omega0),
            max_relative = 1e-15
        );
        let (p2, d2) = si.from_dimensionless(&nd_p, &nd_d, &scales);
        assert_relative_eq!(p2.gamma, p.gamma, max_relative = 1e-14);
        assert_relative_eq!(p2.kerr, p.kerr, max_relative = 1e-14);
        assert_relative_eq!(p2.temperature, p.temperature, max_relative = 1e-14);
        assert_eq!(p2.mass, p.mass);
        assert_relative_eq!(d2.omega_p, d.omega_p, max_relative = 1e-14);
        assert_relative_eq!(d2.p, d.p, max_relative = 1e-14);
        assert_eq!(d2.phi_p, d.phi_p);
    }

    #[test]
    fn beta_scales_correctly_between_systems() {
        // the same physical point must give the same coth factor in SI and
        // dimensionless form
        let si = UnitSystem::<f64>::si();
        let p = device();
        let d = Drive::new(p.omega0, 1.0, 0.0).unwrap();
        let (nd_p, _, _) = si.to_dimensionless(&p, &d);
        let nd = UnitSystem::<f64>::dimensionless();
        assert_relative_eq!(
            si.coth_factor(&p),
            nd.coth_factor(&nd_p),
            max_relative = 1e-12
        );
    }
}
