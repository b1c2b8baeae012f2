//! Numerical-range quantities computed from the norm alone.
//!
//! `sup Im W(b) = inf_{t>0} (||e - i t b|| - 1) / t`. The numerator is
//! evaluated through [`Algebra::unit_excess`](crate::algebra::Algebra::unit_excess),
//! which has no cancellation, so very small `t` stays usable.

use std::f64::consts::{E, PI};

use crate::algebra::Element;
use crate::linalg::C64;
use crate::spectral::golden_min;

const T_MIN_EXP: i32 = -40;
const T_MAX_EXP: i32 = 4;

/// `t^{-1} (||e - i t b|| - 1)`.
fn support_quotient(b: &Element, t: f64) -> f64 {
    let x: Vec<C64> = b.coords().iter().map(|z| z * C64::new(0.0, -t)).collect();
    b.algebra().unit_excess(&x) / t
}

/// `sup { Im(lambda) : lambda in W(b) }`.
pub fn sup_im_numrange(b: &Element) -> f64 {
    let mut best = f64::INFINITY;
    let mut best_j = T_MIN_EXP;
    let mut j = T_MIN_EXP;
    while j <= T_MAX_EXP {
        let v = support_quotient(b, 2f64.powi(j));
        if v < best {
            best = v;
            best_j = j;
        }
        j += 2;
    }
    let lo = ((best_j - 2).max(T_MIN_EXP - 2)) as f64 * std::f64::consts::LN_2;
    let hi = ((best_j + 2).min(T_MAX_EXP)) as f64 * std::f64::consts::LN_2;
    let refined = golden_min(|s| support_quotient(b, s.exp()), lo, hi, 20);
    best.min(refined)
}

/// `h(theta) = sup Im W(e^{i theta} b)`, the support function of `W(b)`
/// in direction `pi/2 - theta`.
fn support(b: &Element, theta: f64) -> f64 {
    sup_im_numrange(&b.scale(C64::from_polar(1.0, theta)))
}

/// Maximum of the support function over a uniform grid of `n` directions,
/// polished by a golden-section search around the best grid point.
fn radius_on_grid(b: &Element, n: usize) -> f64 {
    let step = 2.0 * PI / n as f64;
    let mut best = f64::NEG_INFINITY;
    let mut best_theta = 0.0;
    for k in 0..n {
        let theta = k as f64 * step;
        let v = support(b, theta);
        if v > best {
            best = v;
            best_theta = theta;
        }
    }
    let polished = -golden_min(|th| -support(b, th), best_theta - step, best_theta + step, 30);
    best.max(polished)
}

/// Numerical radius `sup |W(b)|`, approximated from below. The number of
/// directions doubles until successive estimates agree to `1e-6`.
pub fn numerical_radius(b: &Element, directions: usize) -> f64 {
    let mut n = directions.max(8);
    let mut prev = radius_on_grid(b, n);
    loop {
        n *= 2;
        let cur = radius_on_grid(b, n);
        if (cur - prev).abs() < 1e-6 || n >= 4096 {
            return cur.max(prev);
        }
        prev = cur;
    }
}

/// `||b|| <= e ||b||_W + 1e-6`.
///
/// Any single direction gives a lower bound for the numerical radius, so the
/// scan stops as soon as the inequality is certified and only falls back to
/// the full [`numerical_radius`] when it is not.
pub fn check_norm_numradius(b: &Element) -> bool {
    let target = b.norm() - 1e-6;
    if target <= 0.0 {
        return true;
    }
    let n = 16;
    for k in 0..n {
        if E * support(b, 2.0 * PI * k as f64 / n as f64) >= target {
            return true;
        }
    }
    E * numerical_radius(b, 8) >= target
}
