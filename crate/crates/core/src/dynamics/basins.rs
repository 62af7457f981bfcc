//! Basins of attraction of a bistable operating point and the separatrix
//! (stable manifold of the saddle) dividing them.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Drive, ResonatorParams};
use crate::scalar::Real;
use crate::steady_state::{linearize, solve_energy, Linearization};

use super::flow::{flow_rhs, rk4_step};

/// Rectangular window in the complex-amplitude plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window<T> {
    pub re_min: T,
    pub re_max: T,
    pub im_min: T,
    pub im_max: T,
}

impl<T: Real> Window<T> {
    pub fn new(re_min: T, re_max: T, im_min: T, im_max: T) -> Result<Self> {
        if !(re_min < re_max) || !(im_min < im_max) {
            return Err(Error::InvalidInput(format!(
                "degenerate window [{re_min}, {re_max}] x [{im_min}, {im_max}]"
            )));
        }
        Ok(Self { re_min, re_max, im_min, im_max })
    }

    pub fn contains(&self, c: Complex<T>) -> bool {
        c.re >= self.re_min && c.re <= self.re_max && c.im >= self.im_min && c.im <= self.im_max
    }
}

/// Terminal attractor of a grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasinLabel {
    /// Flows to the low-energy attractor.
    Low,
    /// Flows to the high-energy attractor.
    High,
    /// Did not converge within the time budget (expect this only next to the
    /// separatrix).
    Unresolved,
}

/// Classified grid over initial conditions, together with the attractors,
/// the saddle and the separatrix polyline.
#[derive(Debug, Clone, PartialEq)]
pub struct BasinMap<T> {
    /// Real parts of the grid columns.
    pub re: Vec<T>,
    /// Imaginary parts of the grid rows.
    pub im: Vec<T>,
    /// Row-major labels, real part varying fastest.
    pub labels: Vec<BasinLabel>,
    pub attractor_low: Complex<T>,
    pub attractor_high: Complex<T>,
    pub saddle: Complex<T>,
    /// Stable manifold of the saddle, ordered end to end through the saddle.
    pub separatrix: Vec<Complex<T>>,
}

impl<T: Real> BasinMap<T> {
    /// Label of cell `(i_im, i_re)`.
    pub fn at(&self, i_im: usize, i_re: usize) -> BasinLabel {
        self.labels[i_im * self.re.len() + i_re]
    }
}

fn eig_direction<T: Real>(a: [[T; 2]; 2], lam: T) -> Complex<T> {
    // (A - lam I) has rank 1 at an eigenvalue; either row gives the kernel
    let r1 = Complex::new(a[0][1], lam - a[0][0]);
    let r2 = Complex::new(lam - a[1][1], a[1][0]);
    let v = if r1.norm() >= r2.norm() { r1 } else { r2 };
    v / v.norm()
}

/// Unit vectors along the saddle's unstable and stable directions in the
/// complex-amplitude plane.
pub fn saddle_directions<T: Real>(lin: &Linearization<T>) -> Result<(Complex<T>, Complex<T>)> {
    if lin.is_stable() {
        return Err(Error::InvalidInput(
            "saddle directions requested at a stable working point".into(),
        ));
    }
    let a = lin.jacobian_real();
    // fluctuations evolve as e^{-lambda t}: the negative eigenvalue grows
    Ok((eig_direction(a, lin.lambda0.re), eig_direction(a, lin.lambda1.re)))
}

struct Bistable<T> {
    low: Complex<T>,
    high: Complex<T>,
    saddle: Complex<T>,
    saddle_energy: T,
}

fn bistable_points<T: Real>(
    params: &ResonatorParams<T>,
    drive: &Drive<T>,
) -> Result<Bistable<T>> {
    let ss = solve_energy(params, drive)?;
    if !ss.is_bistable() {
        return Err(Error::NotBistable(format!(
            "basins need three coexisting branches; found {}",
            ss.branches.len()
        )));
    }
    Ok(Bistable {
        low: ss.branches[0].c_m,
        high: ss.branches[2].c_m,
        saddle: ss.branches[1].c_m,
        saddle_energy: ss.branches[1].energy,
    })
}

/// Integrates one initial condition until it lands within `1e-6` (relative)
/// of either attractor.
fn classify<T: Real>(
    params: &ResonatorParams<T>,
    drive: &Drive<T>,
    points: &Bistable<T>,
    c0: Complex<T>,
    dt: T,
    t_max: T,
) -> BasinLabel {
    let tol_low = T::lit(1e-6) * (T::one() + points.low.norm());
    let tol_high = T::lit(1e-6) * (T::one() + points.high.norm());
    let mut c = c0;
    let mut t = T::zero();
    while t < t_max {
        c = rk4_step(params, drive, c, dt);
        t = t + dt;
        if (c - points.low).norm() <= tol_low {
            return BasinLabel::Low;
        }
        if (c - points.high).norm() <= tol_high {
            return BasinLabel::High;
        }
    }
    BasinLabel::Unresolved
}

/// Traces the separatrix by integrating the time-reversed flow away from the
/// saddle along its stable direction (offset `1e-7 |C_saddle|` on each side).
///
/// The trace continues past the window edge until the state is far enough
/// out that the reversed flow can only grow (`|C|` beyond both the window's
/// circumradius and `sqrt(p)/gamma`), so arcs that leave and re-enter the
/// window are kept; expect points outside `window` near both ends.
pub fn separatrix<T: Real>(
    params: &ResonatorParams<T>,
    drive: &Drive<T>,
    window: &Window<T>,
    dt: T,
    t_max: T,
) -> Result<Vec<Complex<T>>> {
    separatrix_with_offset(params, drive, window, dt, t_max, T::lit(1e-7))
}

fn separatrix_with_offset<T: Real>(
    params: &ResonatorParams<T>,
    drive: &Drive<T>,
    window: &Window<T>,
    dt: T,
    t_max: T,
    rel_offset: T,
) -> Result<Vec<Complex<T>>> {
    params.validate()?;
    drive.validate()?;
    check_step(dt, t_max)?;
    let points = bistable_points(params, drive)?;
    let lin = linearize(params, drive, points.saddle_energy);
    let (_, stable_dir) = saddle_directions(&lin)?;
    let eps = rel_offset * points.saddle.norm();
    // d|C|/dt of the reversed flow is at least gamma |C| - sqrt(p), so once
    // past both this radius and the window's far corner the trace cannot
    // come back; 5% margin against the discrete step overshooting inward.
    let circum = window
        .re_min
        .abs()
        .max(window.re_max.abs())
        .hypot(window.im_min.abs().max(window.im_max.abs()));
    let escape = T::lit(1.05) * circum.max(drive.p.sqrt() / params.gamma);
    let reversed = |c: Complex<T>, h: T| {
        let half = T::lit(0.5);
        let k1 = -flow_rhs(params, drive, c);
        let k2 = -flow_rhs(params, drive, c + k1 * (h * half));
        let k3 = -flow_rhs(params, drive, c + k2 * (h * half));
        let k4 = -flow_rhs(params, drive, c + k3 * h);
        c + (k1 + (k2 + k3) * T::lit(2.0) + k4) * (h / T::lit(6.0))
    };
    let mut halves: [Vec<Complex<T>>; 2] = [Vec::new(), Vec::new()];
    for (k, sign) in [T::one(), -T::one()].into_iter().enumerate() {
        let mut c = points.saddle + stable_dir * Complex::new(sign * eps, T::zero());
        let mut t = T::zero();
        while t < t_max && c.norm() <= escape {
            halves[k].push(c);
            c = reversed(c, dt);
            t = t + dt;
        }
        halves[k].push(c); // first point past the escape radius (or last in budget)
    }
    let [plus, minus] = halves;
    let mut poly: Vec<Complex<T>> = minus.into_iter().rev().collect();
    poly.push(points.saddle);
    poly.extend(plus);
    Ok(poly)
}

fn check_step<T: Real>(dt: T, t_max: T) -> Result<()> {
    if !(dt > T::zero()) || !dt.is_finite() {
        return Err(Error::InvalidInput(format!("step must be positive and finite, got {dt}")));
    }
    if !(t_max > T::zero()) || !t_max.is_finite() {
        return Err(Error::InvalidInput(format!(
            "time budget must be positive and finite, got {t_max}"
        )));
    }
    Ok(())
}

/// Classifies an `n_re` x `n_im` grid of initial conditions over `window`
/// and attaches the [`separatrix`] traced through (and slightly beyond) the
/// same window, so every boundary arc between labels is covered.
///
/// Cells are integrated independently (in parallel) with fixed step `dt` and
/// per-cell time budget `t_max`; the result is independent of thread count.
pub fn basin_map<T: Real>(
    params: &ResonatorParams<T>,
    drive: &Drive<T>,
    window: &Window<T>,
    n_re: usize,
    n_im: usize,
    dt: T,
    t_max: T,
) -> Result<BasinMap<T>> {
    params.validate()?;
    drive.validate()?;
    check_step(dt, t_max)?;
    if n_re < 2 || n_im < 2 {
        return Err(Error::InvalidInput(format!("grid must be at least 2x2, got {n_re}x{n_im}")));
    }
    let points = bistable_points(params, drive)?;
    let re = crate::numerics::linspace(window.re_min, window.re_max, n_re);
    let im = crate::numerics::linspace(window.im_min, window.im_max, n_im);
    let labels: Vec<BasinLabel> = im
        .par_iter()
        .flat_map_iter(|&y| {
            let re = &re;
            let points = &points;
            re.iter()
                .map(move |&x| classify(params, drive, points, Complex::new(x, y), dt, t_max))
        })
        .collect();
    let sep = separatrix(params, drive, window, dt, t_max)?;
    Ok(BasinMap {
        re,
        im,
        labels,
        attractor_low: points.low,
        attractor_high: points.high,
        saddle: points.saddle,
        separatrix: sep,
    })
}
