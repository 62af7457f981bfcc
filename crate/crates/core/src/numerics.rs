//! Small numerical utilities: adaptive quadrature and 1-d minimization.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance
/// `tol`. Recursion depth is capped; hitting the cap is reported as a
/// convergence failure rather than silently returning a bad value.
pub fn adaptive_simpson<T: Real>(f: &dyn Fn(T) -> T, a: T, b: T, tol: T) -> Result<T> {
    let fa = f(a);
    let fb = f(b);
    let m = (a + b) / T::lit(2.0);
    let fm = f(m);
    let whole = simpson_panel(a, b, fa, fm, fb);
    simpson_recurse(f, a, b, fa, fm, fb, whole, tol, 60)
}

fn simpson_panel<T: Real>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_recurse<T: Real>(
    f: &dyn Fn(T) -> T,
    a: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
    tol: T,
    depth: u32,
) -> Result<T> {
    let m = (a + b) / T::lit(2.0);
    let lm = (a + m) / T::lit(2.0);
    let rm = (m + b) / T::lit(2.0);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson_panel(a, m, fa, flm, fm);
    let right = simpson_panel(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= T::lit(15.0) * tol {
        return Ok(left + right + delta / T::lit(15.0));
    }
    if depth == 0 {
        return Err(Error::NoConvergence {
            context: "adaptive_simpson".into(),
            detail: format!("recursion depth exhausted on [{a}, {b}]"),
        });
    }
    let half_tol = tol / T::lit(2.0);
    let l = simpson_recurse(f, a, m, fa, flm, fm, left, half_tol, depth - 1)?;
    let r = simpson_recurse(f, m, b, fm, frm, fb, right, half_tol, depth - 1)?;
    Ok(l + r)
}

/// Integrates `f` over the whole real line by the substitution
/// `x = scale * tan(u)`, which maps `(-pi/2, pi/2)` onto the line and turns a
/// ~1/x^2 tail into a finite integrand. `scale` should match the natural
/// width of `f` (for a rational spectrum, a typical eigenvalue magnitude).
pub fn integrate_real_line<T: Real>(f: &dyn Fn(T) -> T, scale: T, tol: T) -> Result<T> {
    if !(scale > T::zero()) || !scale.is_finite() {
        return Err(Error::InvalidInput(format!(
            "integrate_real_line: scale must be positive and finite, got {scale}"
        )));
    }
    // cos(u)^-2 overflows at the endpoints; clamping u a hair inside the
    // interval keeps the transformed integrand finite while the clipped tail
    // contributes O(eps) for any integrable f.
    let eps = T::lit(1e-9);
    let half_pi = T::FRAC_PI_2();
    let g = move |u: T| {
        let u = u.max(-(half_pi - eps)).min(half_pi - eps);
        let c = u.cos();
        f(scale * u.tan()) * scale / (c * c)
    };
    adaptive_simpson(&g, -half_pi, half_pi, tol)
}

/// Wraps an angle that is only meaningful modulo pi into `[-pi/2, pi/2]`.
pub(crate) fn wrap_mod_pi<T: Real>(x: T) -> T {
    x - T::PI() * (x / T::PI()).round()
}

/// `n` evenly spaced points from `a` to `b` inclusive (`n == 1` gives `[a]`).
pub fn linspace<T: Real>(a: T, b: T, n: usize) -> Vec<T> {
    if n == 1 {
        return vec![a];
    }
    let step = (b - a) / T::from_usize(n - 1).unwrap();
    (0..n).map(|i| a + step * T::from_usize(i).unwrap()).collect()
}

/// Golden-section minimization of a unimodal `f` on `[a, b]`.
///
/// Returns `(x_min, f(x_min))` once the bracket is narrower than `tol`.
pub fn golden_min<T: Real>(f: &dyn Fn(T) -> T, a: T, b: T, tol: T) -> (T, T) {
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let (mut a, mut b) = (a, b);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = (a + b) / T::lit(2.0);
    (x, f(x))
}
