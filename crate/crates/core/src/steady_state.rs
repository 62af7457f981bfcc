//! Steady states of the driven resonator and the linearized fluctuation
//! problem around each of them.
//!
//! In the rotating frame the mean amplitude `C_m` satisfies
//! `[gamma + i Delta + (i kerr + gamma3) E] C_m = sqrt(p) e^{i phi_p}` with
//! `E = |C_m|^2` and `Delta = omega0 - omega_p`. Taking the squared modulus
//! turns this into a cubic in `E`,
//!
//! ```text
//! (kerr^2 + gamma3^2) E^3 + 2 (gamma gamma3 + kerr Delta) E^2
//!     + (gamma^2 + Delta^2) E - p = 0,
//! ```
//!
//! whose positive roots are the branch energies: one when the response is
//! single-valued, three (low node, saddle, high node) inside the hysteretic
//! region.
//!
//! Small fluctuations `c = C - C_m` relax according to
//! `dc/dt + W c + V c* = noise` with `W = gamma + 2 gamma3 E + i(Delta +
//! 2 kerr E)` and `V = (i kerr + gamma3) C_m^2`; everything downstream
//! (spectra, squeezing, sensitivity) is a function of the pair `(W, V)`
//! collected in [`Linearization`].

use num_complex::Complex;

use crate::cubic::solve_real_cubic;
use crate::error::{Error, Result};
use crate::model::{Drive, ResonatorParams};
use crate::numerics::wrap_mod_pi;
use crate::scalar::Real;

/// Stability label of a steady-state branch.
///
/// When the solve sits exactly on a fold ([`SteadyStates::fold_degenerate`]),
/// the merged pair of branches is reported once and labelled `Saddle` even
/// though it is really a marginal saddle-node point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    /// Only steady state; always a stable node.
    UniqueStable,
    /// Lower-energy stable node of a bistable pair.
    StableLow,
    /// Unstable intermediate branch.
    Saddle,
    /// Higher-energy stable node of a bistable pair.
    StableHigh,
}

impl Stability {
    /// Whether trajectories converge to this branch.
    pub fn is_stable(&self) -> bool {
        !matches!(self, Stability::Saddle)
    }
}

/// One steady-state branch: energy, phase and complex mean amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyBranch<T> {
    /// Squared amplitude `E = |C_m|^2`.
    pub energy: T,
    /// Phase of the mean amplitude.
    pub phi_m: T,
    /// Mean amplitude `C_m = sqrt(E) e^{i phi_m}`.
    pub c_m: Complex<T>,
    pub stability: Stability,
}

/// All steady states at one operating point, ordered by ascending energy.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyStates<T> {
    pub branches: Vec<SteadyBranch<T>>,
    /// True when the operating point sits on a fold (double root) or cusp
    /// (triple root) to within numerical precision.
    pub fold_degenerate: bool,
}

impl<T: Real> SteadyStates<T> {
    /// Three coexisting branches?
    pub fn is_bistable(&self) -> bool {
        self.branches.len() == 3
    }

    /// The stable branches, ascending in energy.
    pub fn stable(&self) -> Vec<&SteadyBranch<T>> {
        self.branches.iter().filter(|b| b.stability.is_stable()).collect()
    }

    /// The unstable intermediate branch, if any.
    pub fn saddle(&self) -> Option<&SteadyBranch<T>> {
        self.branches.iter().find(|b| b.stability == Stability::Saddle)
    }
}

/// Linearized fluctuation data at a working point: the coefficient pair
/// `(W, V)`, relaxation eigenvalues and the principal noise axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Linearization<T> {
    /// Diagonal coefficient `gamma + 2 gamma3 E + i(Delta + 2 kerr E)`.
    pub w: Complex<T>,
    /// Conjugating coefficient `(i kerr + gamma3) C_m^2`.
    pub v: Complex<T>,
    /// `|V| / |W|`; 1 on a fold, 0 in the linear regime.
    pub zeta: T,
    /// Slow relaxation eigenvalue (fluctuations decay as `e^{-lambda t}`).
    pub lambda0: Complex<T>,
    /// Fast relaxation eigenvalue; complex-conjugate pair when underdamped.
    pub lambda1: Complex<T>,
    /// Homodyne phase of minimal fluctuation variance (squeezing axis).
    pub phi0: T,
    /// Common phase of the principal-axis response coefficients.
    pub phi_a: T,
    /// Orientation (mod pi) of the mean amplitude in the principal-axis
    /// frame; approaches +-pi/2 on a fold.
    pub phi_c: T,
    /// True when `V = 0` so the axis angles are arbitrary (set to 0).
    pub degenerate_phase: bool,
}

impl<T: Real> Linearization<T> {
    /// Real part of `W`: half the energy relaxation rate, always positive.
    pub fn w_prime(&self) -> T {
        self.w.re
    }

    /// `|W|^2 - |V|^2 = lambda0 lambda1`; positive on stable branches,
    /// negative on the saddle, zero on a fold.
    pub fn relaxation_product(&self) -> T {
        self.w.norm_sqr() - self.v.norm_sqr()
    }

    /// Whether fluctuations decay (both eigenvalues in the right half plane).
    pub fn is_stable(&self) -> bool {
        self.relaxation_product() > T::zero()
    }

    /// Stationary mean square fluctuation `<|c|^2>` given the thermal factor
    /// `coth = 2 n + 1`; diverges as the working point approaches a fold.
    pub fn mean_square_fluctuation(&self, coth: T) -> T {
        coth / (T::lit(2.0) * (T::one() - self.zeta * self.zeta))
    }

    /// Stationary variances `(Var xi, Var eta)` of the squeezed and
    /// anti-squeezed principal quadratures.
    pub fn principal_variances(&self, coth: T) -> (T, T) {
        let q = T::lit(4.0);
        (coth / (q * (T::one() + self.zeta)), coth / (q * (T::one() - self.zeta)))
    }

    /// Relaxation matrix `A` of the real fluctuation vector:
    /// `d/dt (Re c, Im c) = -A (Re c, Im c)` plus noise.
    pub fn jacobian_real(&self) -> [[T; 2]; 2] {
        let (wp, wpp) = (self.w.re, self.w.im);
        let (vp, vpp) = (self.v.re, self.v.im);
        [[wp + vp, vpp - wpp], [wpp + vpp, wp - vp]]
    }
}

/// Components of `c` along the squeezed (`xi`) and anti-squeezed (`eta`)
/// principal axes: `xi + i eta = c e^{i phi0}`.
pub fn to_principal<T: Real>(c: Complex<T>, phi0: T) -> (T, T) {
    let r = c * Complex::from_polar(T::one(), phi0);
    (r.re, r.im)
}

/// Inverse of [`to_principal`].
pub fn from_principal<T: Real>(xi: T, eta: T, phi0: T) -> Complex<T> {
    Complex::new(xi, eta) * Complex::from_polar(T::one(), -phi0)
}

/// Coefficients `(a3, a2, a1, a0)` of the steady-state cubic in `E`.
pub(crate) fn response_cubic<T: Real>(
    params: &ResonatorParams<T>,
    drive: &Drive<T>,
) -> (T, T, T, T) {
    let delta = drive.detuning(params);
    let a3 = params.kerr * params.kerr + params.gamma3 * params.gamma3;
    let a2 = T::lit(2.0) * (params.gamma * params.gamma3 + params.kerr * delta);
    let a1 = params.gamma * params.gamma + delta * delta;
    (a3, a2, a1, -drive.p)
}

fn make_branch<T: Real>(
    params: &ResonatorParams<T>,
    drive: &Drive<T>,
    energy: T,
    stability: Stability,
) -> SteadyBranch<T> {
    let delta = drive.detuning(params);
    let d = Complex::new(
        params.gamma + params.gamma3 * energy,
        delta + params.kerr * energy,
    );
    let phi_m = drive.phi_p - d.arg();
    SteadyBranch { energy, phi_m, c_m: Complex::from_polar(energy.sqrt(), phi_m), stability }
}

/// Solves for every steady state at the given operating point.
pub fn solve_energy<T: Real>(
    params: &ResonatorParams<T>,
    drive: &Drive<T>,
) -> Result<SteadyStates<T>> {
    params.validate()?;
    drive.validate()?;
    let (a3, a2, a1, a0) = response_cubic(params, drive);

    if drive.p == T::zero() {
        // undriven: the origin is the only steady state
        let b = make_branch(params, drive, T::zero(), Stability::UniqueStable);
        return Ok(SteadyStates { branches: vec![b], fold_degenerate: false });
    }
    if a3 == T::zero() {
        // kerr = gamma3 = 0: plain Lorentzian response
        let b = make_branch(params, drive, drive.p / a1, Stability::UniqueStable);
        return Ok(SteadyStates { branches: vec![b], fold_degenerate: false });
    }

    let sol = solve_real_cubic(a3, a2, a1, a0);
    let retained: Vec<T> = sol.roots.into_iter().filter(|e| *e > T::zero()).collect();
    if retained.is_empty() {
        return Err(Error::InconsistentRoot(
            "driven response cubic produced no positive energy root".into(),
        ));
    }
    let fold_degenerate = sol.degenerate
        && sol.double_root.is_some_and(|dr| {
            retained.iter().any(|e| (*e - dr).abs() <= T::lit(1e-9) * (T::one() + dr.abs()))
        });

    let branches: Vec<SteadyBranch<T>> = match retained.len() {
        1 => vec![make_branch(params, drive, retained[0], Stability::UniqueStable)],
        2 => {
            // exact fold: the repeated root is the marginal saddle-node pair
            let dr = sol.double_root.unwrap_or(retained[1]);
            retained
                .iter()
                .map(|&e| {
                    let is_double =
                        (e - dr).abs() <= T::lit(1e-9) * (T::one() + dr.abs());
                    let s = if is_double {
                        Stability::Saddle
                    } else if e < dr {
                        Stability::StableLow
                    } else {
                        Stability::StableHigh
                    };
                    make_branch(params, drive, e, s)
                })
                .collect()
        }
        _ => {
            let labels = [Stability::StableLow, Stability::Saddle, Stability::StableHigh];
            retained
                .iter()
                .zip(labels)
                .map(|(&e, s)| make_branch(params, drive, e, s))
                .collect()
        }
    };

    // the slope of the cubic at a root equals |W|^2 - |V|^2, so stability
    // must alternate +,-,+ in ascending order; anything else means the
    // root-finder and the physics disagree
    for b in &branches {
        let lin = linearize(params, drive, b.energy);
        let prod = lin.relaxation_product();
        let ok = match b.stability {
            Stability::Saddle => prod < T::zero() || fold_degenerate,
            _ => prod > T::zero() || fold_degenerate,
        };
        if !ok {
            return Err(Error::InconsistentRoot(format!(
                "branch at E = {} has relaxation product {} inconsistent with label {:?}",
                b.energy, prod, b.stability
            )));
        }
    }

    Ok(SteadyStates { branches, fold_degenerate })
}

/// Mean amplitude on the branch with the given energy (the energy need not
/// solve the cubic; this just applies the phase relation).
pub fn mean_amplitude<T: Real>(
    params: &ResonatorParams<T>,
    drive: &Drive<T>,
    energy: T,
) -> Complex<T> {
    make_branch(params, drive, energy, Stability::UniqueStable).c_m
}

/// Linearizes the slow-flow dynamics around the branch with energy `energy`.
pub fn linearize<T: Real>(
    params: &ResonatorParams<T>,
    drive: &Drive<T>,
    energy: T,
) -> Linearization<T> {
    let delta = drive.detuning(params);
    let two = T::lit(2.0);
    let w = Complex::new(
        params.gamma + two * params.gamma3 * energy,
        delta + two * params.kerr * energy,
    );
    let c_m = mean_amplitude(params, drive, energy);
    let v = Complex::new(params.gamma3, params.kerr) * c_m * c_m;
    let zeta = v.norm() / w.norm();

    let rad = v.norm_sqr() - w.im * w.im;
    let (lambda0, lambda1) = if rad >= T::zero() {
        let r = rad.sqrt();
        (Complex::new(w.re - r, T::zero()), Complex::new(w.re + r, T::zero()))
    } else {
        let r = (-rad).sqrt();
        (Complex::new(w.re, -r), Complex::new(w.re, r))
    };

    let (phi0, degenerate_phase) = if v.norm() == T::zero() {
        (T::zero(), true)
    } else {
        ((w * v.conj()).arg() / two, false)
    };
    let rot = Complex::from_polar(T::one(), phi0);
    let phi_a = (w * rot.conj() + v * rot).arg();
    let branch = make_branch(params, drive, energy, Stability::UniqueStable);
    let phi_c = wrap_mod_pi(branch.phi_m - phi_a - T::FRAC_PI_2());

    Linearization { w, v, zeta, lambda0, lambda1, phi0, phi_a, phi_c, degenerate_phase }
}

/// Slope of the branch energy with respect to drive strength `p`; errors on
/// a fold, where the response is vertical.
pub fn denergy_dp<T: Real>(
    params: &ResonatorParams<T>,
    drive: &Drive<T>,
    energy: T,
) -> Result<T> {
    let lin = linearize(params, drive, energy);
    let den = lin.relaxation_product();
    if den.abs() <= T::lit(1e-12) * lin.w.norm_sqr() {
        return Err(Error::DivergentSlope(format!(
            "dE/dp at E = {energy}: working point is on a fold (zeta = {})",
            lin.zeta
        )));
    }
    Ok(den.recip())
}

/// Slope of the branch energy with respect to drive frequency `omega_p`;
/// errors on a fold.
pub fn denergy_domega_p<T: Real>(
    params: &ResonatorParams<T>,
    drive: &Drive<T>,
    energy: T,
) -> Result<T> {
    let delta = drive.detuning(params);
    let lin = linearize(params, drive, energy);
    let den = lin.relaxation_product();
    if den.abs() <= T::lit(1e-12) * lin.w.norm_sqr() {
        return Err(Error::DivergentSlope(format!(
            "dE/domega_p at E = {energy}: working point is on a fold (zeta = {})",
            lin.zeta
        )));
    }
    Ok(T::lit(2.0) * (delta + params.kerr * energy) * energy / den)
}
