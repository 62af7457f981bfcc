//! Fold and cusp structure of the bistable region.
//!
//! In the (drive frequency, drive strength) plane the bistable region is a
//! wedge bounded by two fold lines that meet at a cusp. Analytically:
//!
//! * bistability requires `|kerr| > sqrt(3) gamma3`;
//! * the cusp (triple root of the response cubic) sits at
//!   `E_c = 2 gamma / (sqrt(3) (|kerr| - sqrt(3) gamma3))`,
//!   `p_c = (8 / 3 sqrt(3)) gamma^3 (kerr^2 + gamma3^2) / (|kerr| - sqrt(3) gamma3)^3`,
//!   `omega_p - omega0 = sign(kerr) gamma (4 gamma3 |kerr| + sqrt(3)(kerr^2 +
//!   gamma3^2)) / (kerr^2 - 3 gamma3^2)`;
//! * the fold lines themselves are parameterized by the fold energy `E`:
//!   `Delta = -2 kerr E +- sqrt(R)` with
//!   `R(E) = (kerr^2 + gamma3^2) E^2 - (gamma + 2 gamma3 E)^2 >= 0`,
//!   and `p` follows from the steady-state relation. On a fold `|V| = |W|`
//!   exactly (critical slowing down).
//!
//! [`fold_frequencies`] uses the parameterization only to bracket each fold,
//! then polishes the crossing by bisection on the sign of the cubic
//! discriminant; when the folds are closer than `1e-6 omega0` the bracketing
//! value is returned directly.

use crate::cubic::discriminant;
use crate::error::{Error, Result};
use crate::model::{Drive, ResonatorParams};
use crate::numerics::linspace;
use crate::scalar::Real;
use crate::steady_state::{response_cubic, solve_energy};

/// The cusp where the two fold lines meet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint<T> {
    /// Pump frequency at the cusp.
    pub omega_p: T,
    /// Drive strength at the cusp.
    pub p: T,
    /// Branch energy at the cusp (triple root).
    pub energy: T,
}

/// One slice of the bistable wedge: the fold frequencies at drive `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint<T> {
    pub p: T,
    pub omega_p_low: T,
    pub omega_p_high: T,
}

/// Boolean bistability map over a rectangular (omega_p, p) grid,
/// row-major with `omega_p` varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionMap<T> {
    pub omega_p: Vec<T>,
    pub p: Vec<T>,
    pub bistable: Vec<bool>,
}

impl<T> RegionMap<T> {
    /// Bistability flag at row `i_p`, column `i_omega`.
    pub fn at(&self, i_p: usize, i_omega: usize) -> bool {
        self.bistable[i_p * self.omega_p.len() + i_omega]
    }
}

/// Whether the parameters admit bistability at any drive (`|kerr| > sqrt(3) gamma3`).
pub fn bistability_possible<T: Real>(params: &ResonatorParams<T>) -> bool {
    params.kerr.abs() > T::lit(3.0).sqrt() * params.gamma3
}

/// Closed-form location of the cusp.
pub fn critical_point<T: Real>(params: &ResonatorParams<T>) -> Result<CriticalPoint<T>> {
    params.validate()?;
    if !bistability_possible(params) {
        return Err(Error::NotBistable(format!(
            "|kerr| = {} does not exceed sqrt(3) gamma3 = {}",
            params.kerr.abs(),
            T::lit(3.0).sqrt() * params.gamma3
        )));
    }
    let (g, g3, k) = (params.gamma, params.gamma3, params.kerr);
    let s3 = T::lit(3.0).sqrt();
    let k2 = k * k + g3 * g3;
    let margin = k.abs() - s3 * g3;
    let energy = T::lit(2.0) * g / (s3 * margin);
    let p = T::lit(8.0) / (T::lit(3.0) * s3) * g * g * g * k2 / (margin * margin * margin);
    let offset = k.signum() * g * (T::lit(4.0) * g3 * k.abs() + s3 * k2)
        / (k * k - T::lit(3.0) * g3 * g3);
    Ok(CriticalPoint { omega_p: params.omega0 + offset, p, energy })
}

/// `R(E)`, the radicand of the fold-line detuning; non-negative on folds.
fn fold_radicand<T: Real>(params: &ResonatorParams<T>, e: T) -> T {
    let k2 = params.kerr * params.kerr + params.gamma3 * params.gamma3;
    let damp = params.gamma + T::lit(2.0) * params.gamma3 * e;
    k2 * e * e - damp * damp
}

/// Smallest energy on the fold curve (where the two detuning branches meet).
fn ridge_energy<T: Real>(params: &ResonatorParams<T>) -> T {
    let k2 = params.kerr * params.kerr + params.gamma3 * params.gamma3;
    params.gamma / (k2.sqrt() - T::lit(2.0) * params.gamma3)
}

/// Point on the fold curve with energy `energy`: returns `(omega_p, p)`.
/// `plus` selects the detuning branch `Delta = -2 kerr E + sqrt(R)` (the
/// branch carrying the cusp); `false` selects `-sqrt(R)`.
pub fn fold_curve_point<T: Real>(
    params: &ResonatorParams<T>,
    energy: T,
    plus: bool,
) -> Result<(T, T)> {
    params.validate()?;
    let mut r = fold_radicand(params, energy);
    if r < T::zero() {
        let k2 = params.kerr * params.kerr + params.gamma3 * params.gamma3;
        // tolerate rounding exactly at the ridge
        if r > -T::lit(1e-10) * k2 * energy * energy {
            r = T::zero();
        } else {
            return Err(Error::InvalidInput(format!(
                "energy {energy} lies below the fold ridge (radicand {r})"
            )));
        }
    }
    let sq = if plus { r.sqrt() } else { -r.sqrt() };
    let delta = -T::lit(2.0) * params.kerr * energy + sq;
    let damp = params.gamma + params.gamma3 * energy;
    let pull = delta + params.kerr * energy;
    let p = energy * (damp * damp + pull * pull);
    Ok((params.omega0 - delta, p))
}

/// Bisection for `f(e) = target` on a bracket with opposite-sign residuals.
fn bisect_for<T: Real>(f: &dyn Fn(T) -> T, mut lo: T, mut hi: T, target: T) -> Result<T> {
    let flo = f(lo) - target;
    let fhi = f(hi) - target;
    if flo == T::zero() {
        return Ok(lo);
    }
    if fhi == T::zero() {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NoConvergence {
            context: "fold bracket".into(),
            detail: format!("no sign change on [{lo}, {hi}]"),
        });
    }
    for _ in 0..200 {
        let mid = (lo + hi) / T::lit(2.0);
        let fm = f(mid) - target;
        if fm == T::zero() {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo).abs() <= T::lit(1e-14) * (T::one() + hi.abs()) {
            break;
        }
    }
    Ok((lo + hi) / T::lit(2.0))
}

/// Doubles the upper end from `start` until `f` exceeds `target` (for an
/// eventually-increasing `f`), then returns the bracket.
fn grow_bracket<T: Real>(f: &dyn Fn(T) -> T, start: T, target: T) -> Result<(T, T)> {
    let mut hi = start * T::lit(2.0) + T::one();
    for _ in 0..200 {
        if f(hi) > target {
            return Ok((start, hi));
        }
        hi = hi * T::lit(2.0);
    }
    Err(Error::NoConvergence {
        context: "fold bracket growth".into(),
        detail: format!("f stayed below {target}"),
    })
}

fn cubic_discriminant_at<T: Real>(params: &ResonatorParams<T>, omega_p: T, p: T) -> T {
    let drive = Drive { omega_p, p, phi_p: T::zero() };
    let (a3, a2, a1, a0) = response_cubic(params, &drive);
    discriminant(a3, a2, a1, a0)
}

/// The two fold (jump) frequencies at drive strength `p`, ascending.
///
/// Errors with [`Error::NotBistable`] when `p` is below the critical drive.
/// At `p` within a relative `1e-12` of critical, both folds coincide at the
/// cusp frequency.
pub fn fold_frequencies<T: Real>(params: &ResonatorParams<T>, p: T) -> Result<(T, T)> {
    let cp = critical_point(params)?;
    if !p.is_finite() || !(p > T::zero()) {
        return Err(Error::InvalidInput(format!("p must be positive, got {p}")));
    }
    let rel = (p - cp.p) / cp.p;
    if rel < -T::lit(1e-12) {
        return Err(Error::NotBistable(format!(
            "p = {p} is below the critical drive {}",
            cp.p
        )));
    }
    if rel.abs() <= T::lit(1e-12) {
        return Ok((cp.omega_p, cp.omega_p));
    }

    let e_r = ridge_energy(params);
    let e_c = cp.energy;
    let p_plus = |e: T| fold_curve_point(params, e, true).map(|x| x.1).unwrap_or(T::nan());
    let p_minus = |e: T| fold_curve_point(params, e, false).map(|x| x.1).unwrap_or(T::nan());
    let p_ridge = p_plus(e_r);

    // locate the two fold energies on the parameterized fold curve
    let (omega_a, omega_b) = if p <= p_ridge {
        // both folds on the +sqrt(R) branch, either side of the cusp energy
        let e1 = bisect_for(&p_plus, e_r, e_c, p)?;
        let (hi_lo, hi_hi) = grow_bracket(&p_plus, e_c, p)?;
        let e2 = bisect_for(&p_plus, hi_lo, hi_hi, p)?;
        (fold_curve_point(params, e1, true)?.0, fold_curve_point(params, e2, true)?.0)
    } else {
        let (lo1, hi1) = grow_bracket(&p_minus, e_r, p)?;
        let e1 = bisect_for(&p_minus, lo1, hi1, p)?;
        let (lo2, hi2) = grow_bracket(&p_plus, e_c, p)?;
        let e2 = bisect_for(&p_plus, lo2, hi2, p)?;
        (fold_curve_point(params, e1, false)?.0, fold_curve_point(params, e2, true)?.0)
    };
    let (est_low, est_high) =
        if omega_a <= omega_b { (omega_a, omega_b) } else { (omega_b, omega_a) };

    // polish each estimate by bisection on the discriminant sign; inside the
    // wedge the discriminant is positive
    let band = est_high - est_low;
    let polish = |est: T, interior_above: bool| -> T {
        if band < T::lit(1e-6) * params.omega0 {
            return est; // folds nearly merged: the parameterization is the answer
        }
        let half = (T::lit(1e-6) * params.omega0).min(band * T::lit(0.4));
        let (mut lo, mut hi) = (est - half, est + half);
        let inside = |w: T| cubic_discriminant_at(params, w, p) > T::zero();
        if inside(lo) == inside(hi) {
            return est;
        }
        while (hi - lo) > T::lit(1e-8) * params.omega0 {
            let mid = (lo + hi) / T::lit(2.0);
            // keep the bracket straddling the sign change
            if inside(mid) == interior_above {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        (lo + hi) / T::lit(2.0)
    };
    Ok((polish(est_low, true), polish(est_high, false)))
}

/// Traces the wedge boundary from the cusp up to `p_max` with `n` slices;
/// the first entry is the exact cusp.
pub fn trace_boundary<T: Real>(
    params: &ResonatorParams<T>,
    p_max: T,
    n: usize,
) -> Result<Vec<BoundaryPoint<T>>> {
    let cp = critical_point(params)?;
    if !(p_max > cp.p) {
        return Err(Error::InvalidInput(format!(
            "p_max = {p_max} must exceed the critical drive {}",
            cp.p
        )));
    }
    if n < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 slices, got {n}")));
    }
    let mut out =
        vec![BoundaryPoint { p: cp.p, omega_p_low: cp.omega_p, omega_p_high: cp.omega_p }];
    for &p in linspace(cp.p, p_max, n).iter().skip(1) {
        let (lo, hi) = fold_frequencies(params, p)?;
        out.push(BoundaryPoint { p, omega_p_low: lo, omega_p_high: hi });
    }
    Ok(out)
}

/// Classifies every point of a rectangular grid as bistable or not.
pub fn region_map<T: Real>(
    params: &ResonatorParams<T>,
    omega_range: (T, T),
    n_omega: usize,
    p_range: (T, T),
    n_p: usize,
) -> Result<RegionMap<T>> {
    params.validate()?;
    if !(omega_range.0 > T::zero()) || !(omega_range.1 > omega_range.0) {
        return Err(Error::InvalidInput(format!(
            "omega range must satisfy 0 < lo < hi, got ({}, {})",
            omega_range.0, omega_range.1
        )));
    }
    if p_range.0 < T::zero() || !(p_range.1 > p_range.0) {
        return Err(Error::InvalidInput(format!(
            "p range must satisfy 0 <= lo < hi, got ({}, {})",
            p_range.0, p_range.1
        )));
    }
    if n_omega < 2 || n_p < 2 {
        return Err(Error::InvalidInput("grid needs at least 2 points per axis".into()));
    }
    let omega_p = linspace(omega_range.0, omega_range.1, n_omega);
    let p = linspace(p_range.0, p_range.1, n_p);
    let mut bistable = Vec::with_capacity(n_omega * n_p);
    for &pv in &p {
        for &wv in &omega_p {
            let drive = Drive { omega_p: wv, p: pv, phi_p: T::zero() };
            bistable.push(solve_energy(params, &drive)?.is_bistable());
        }
    }
    Ok(RegionMap { omega_p, p, bistable })
}
