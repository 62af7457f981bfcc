//! Real-root solver for cubic polynomials with real coefficients.
//!
//! Used for the steady-state response equation, whose real roots are the
//! branch energies. Degenerate (double/triple) roots are detected and
//! reported instead of being returned as two nearly-equal values, because a
//! degenerate root means the operating point sits exactly on a fold.

use crate::scalar::Real;

/// Real roots of `a x^3 + b x^2 + c x + d`, ascending and distinct.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct CubicRoots<T> {
    pub roots: Vec<T>,
    /// True when a double or triple root was detected (discriminant ~ 0).
    pub degenerate: bool,
    /// The repeated root, when there is one.
    pub double_root: Option<T>,
}

/// Discriminant of `a x^3 + b x^2 + c x + d`; positive for three distinct
/// real roots, negative for one, zero on a repeated root.
pub(crate) fn discriminant<T: Real>(a: T, b: T, c: T, d: T) -> T {
    let _18 = T::lit(18.0);
    let _4 = T::lit(4.0);
    let _27 = T::lit(27.0);
    _18 * a * b * c * d - _4 * b * b * b * d + b * b * c * c
        - _4 * a * c * c * c
        - _27 * a * a * d * d
}

fn horner<T: Real>(a: T, b: T, c: T, d: T, x: T) -> (T, T) {
    let f = ((a * x + b) * x + c) * x + d;
    let df = (T::lit(3.0) * a * x + T::lit(2.0) * b) * x + c;
    (f, df)
}

fn polish<T: Real>(a: T, b: T, c: T, d: T, mut x: T) -> T {
    for _ in 0..2 {
        let (f, df) = horner(a, b, c, d, x);
        if df == T::zero() {
            break;
        }
        let dx = f / df;
        // a Newton step this large means the starting point was not near a
        // simple root (degenerate cluster); leave the root alone
        if !dx.is_finite() || dx.abs() > T::lit(1e-3) * (T::one() + x.abs()) {
            break;
        }
        x = x - dx;
    }
    x
}

/// All real roots of `a x^3 + b x^2 + c x + d` with `a != 0`.
pub(crate) fn solve_real_cubic<T: Real>(a: T, b: T, c: T, d: T) -> CubicRoots<T> {
    assert!(a != T::zero(), "leading coefficient must be nonzero");
    let half = T::lit(0.5);
    let third = T::one() / T::lit(3.0);

    // depressed form t^3 + p t + q with x = t - b / 3a
    let bn = b / a;
    let cn = c / a;
    let dn = d / a;
    let shift = -bn * third;
    let p = cn - bn * bn * third;
    let q = (T::lit(2.0) * bn * bn * bn - T::lit(9.0) * bn * cn) / T::lit(27.0) + dn;

    let four_p3 = T::lit(4.0) * p * p * p;
    let tq2 = T::lit(27.0) * q * q;
    let disc = -(four_p3 + tq2);
    let scale = four_p3.abs() + tq2.abs();

    let mut out = if scale == T::zero() {
        // p = q = 0: triple root at the shift point
        CubicRoots { roots: vec![shift], degenerate: true, double_root: Some(shift) }
    } else if disc.abs() <= T::lit(1e-12) * scale {
        // repeated root: double at -3q/2p, simple at 3q/p
        let double = -T::lit(1.5) * q / p;
        let simple = T::lit(3.0) * q / p;
        CubicRoots {
            roots: vec![simple + shift, double + shift],
            degenerate: true,
            double_root: Some(double + shift),
        }
    } else if disc > T::zero() {
        // three distinct real roots (p < 0 here); trigonometric form
        let m = (-p * third).sqrt();
        let arg = (T::lit(1.5) * q / (p * m)).max(-T::one()).min(T::one());
        let theta = arg.acos() * third;
        let two_pi_3 = T::lit(2.0) * T::PI() * third;
        let roots = (0..3)
            .map(|k| T::lit(2.0) * m * (theta - two_pi_3 * T::from_i32(k).unwrap()).cos() + shift)
            .collect();
        CubicRoots { roots, degenerate: false, double_root: None }
    } else {
        // one real root; Cardano with the cancellation-free branch choice
        let s = (q * q * T::lit(0.25) + p * p * p / T::lit(27.0)).sqrt();
        let w = if q >= T::zero() { -q * half - s } else { -q * half + s };
        let t = if w == T::zero() {
            T::zero()
        } else {
            let u = w.cbrt();
            u - p / (T::lit(3.0) * u)
        };
        CubicRoots { roots: vec![t + shift], degenerate: false, double_root: None }
    };

    for r in &mut out.roots {
        *r = polish(a, b, c, d, *r);
    }
    out.roots.sort_unstable_by(|x, y| x.partial_cmp(y).unwrap());
    out
}
