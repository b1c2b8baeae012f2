//! Invertibility, spectrum, spectral radius and the invertible group.

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;
use thiserror::Error;

use crate::algebra::{Algebra, Element};
use crate::linalg::{self, C64};
use crate::sampling::Sampler;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("element is not invertible (smallest singular value of L_a is {0:.3e})")]
    NotInvertible(f64),
    #[error("k_max must be a power of two not exceeding 1024, got {0}")]
    InvalidPower(u32),
    #[error("power norms overflowed")]
    Overflow,
    #[error("principal component of algebra `{0}` is not certified")]
    UnknownComponentStructure(String),
    #[error("subgroup predicate is not closed under {0}")]
    NotClosed(&'static str),
}

/// Relative singularity threshold on `L_a`.
const SINGULAR_REL: f64 = 1e-12;

pub fn is_invertible(a: &Element) -> bool {
    let (max, min) = linalg::singular_extremes(&a.regular_rep());
    max > 0.0 && min > SINGULAR_REL * max
}

/// Solves `L_a x = e`; in finite dimension a right inverse is two-sided.
pub fn invert(a: &Element) -> Result<Element, SpectralError> {
    let l = a.regular_rep();
    let (max, min) = linalg::singular_extremes(&l);
    if max == 0.0 || min <= SINGULAR_REL * max {
        return Err(SpectralError::NotInvertible(min));
    }
    let rhs = DVector::from_column_slice(a.algebra().unit_coords());
    let x = l
        .lu()
        .solve(&rhs)
        .ok_or(SpectralError::NotInvertible(min))?;
    Ok(a.with_coords(x.iter().copied().collect()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    /// Eigenvalues of `L_a`, with multiplicity.
    pub eigenvalues: Vec<C64>,
    pub spectral_radius: f64,
}

/// Spectrum through the regular representation.
///
/// Eigenvalues of nilpotent blocks are only accurate to about
/// `eps^(1/k)` for a Jordan block of size `k`, so the eigenvalues of `L_a`
/// are snapped onto those of the induced map on `A / rad(A)`: both sets
/// equal `sigma(a)`, and the radical part no longer perturbs the result.
pub fn spectrum(a: &Element) -> SpectrumResult {
    let alg = a.algebra();
    let l = a.regular_rep();
    let raw = linalg::eigenvalues(&l);
    let data = alg.radical_data();
    if data.basis.ncols() == 0 {
        let spectral_radius = raw.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
        return SpectrumResult {
            eigenvalues: raw,
            spectral_radius,
        };
    }
    let quotient = linalg::eigenvalues(&data.quotient_rep(&l));
    let snapped: Vec<C64> = raw
        .iter()
        .map(|z| {
            *quotient
                .iter()
                .min_by(|p, q| (*p - z).norm().total_cmp(&(*q - z).norm()))
                .expect("quotient is non-trivial")
        })
        .collect();
    let spectral_radius = quotient.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
    SpectrumResult {
        eigenvalues: snapped,
        spectral_radius,
    }
}

pub fn spectral_radius(a: &Element) -> f64 {
    spectrum(a).spectral_radius
}

/// `||a^k||^(1/k)` by repeated squaring, renormalizing at every step so the
/// intermediate powers never overflow.
pub fn gelfand_radius(a: &Element, k_max: u32) -> Result<f64, SpectralError> {
    if k_max == 0 || !k_max.is_power_of_two() || k_max > 1024 {
        return Err(SpectralError::InvalidPower(k_max));
    }
    let steps = k_max.trailing_zeros();
    // a^(2^j) = exp(log_scale) * p
    let mut p = a.clone();
    let mut log_scale = 0.0_f64;
    for _ in 0..steps {
        let n = p.norm();
        if n == 0.0 {
            return Ok(0.0);
        }
        if !n.is_finite() {
            return Err(SpectralError::Overflow);
        }
        p = p.scale_real(1.0 / n);
        log_scale = 2.0 * (log_scale + n.ln());
        p = p.mul(&p).expect("same algebra");
    }
    let n = p.norm();
    if n == 0.0 {
        return Ok(0.0);
    }
    let r = ((log_scale + n.ln()) / k_max as f64).exp();
    if r.is_finite() {
        Ok(r)
    } else {
        Err(SpectralError::Overflow)
    }
}

pub type Predicate = Arc<dyn Fn(&Element) -> bool + Send + Sync>;

#[derive(Clone)]
pub enum SubgroupKind {
    FullInvertibleGroup,
    PrincipalComponent,
    Custom(Predicate),
}

impl fmt::Debug for SubgroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubgroupKind::FullInvertibleGroup => write!(f, "FullInvertibleGroup"),
            SubgroupKind::PrincipalComponent => write!(f, "PrincipalComponent"),
            SubgroupKind::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// An open subgroup of the invertible group.
#[derive(Debug, Clone)]
pub struct SubgroupDescriptor {
    pub kind: SubgroupKind,
}

impl SubgroupDescriptor {
    pub fn full() -> Self {
        SubgroupDescriptor {
            kind: SubgroupKind::FullInvertibleGroup,
        }
    }

    pub fn principal() -> Self {
        SubgroupDescriptor {
            kind: SubgroupKind::PrincipalComponent,
        }
    }

    pub fn custom(p: Predicate) -> Self {
        SubgroupDescriptor {
            kind: SubgroupKind::Custom(p),
        }
    }

    /// Samples members and checks that products and inverses stay inside.
    pub fn check_closure(&self, alg: &Arc<Algebra>, seed: u64, samples: usize) -> Result<(), SpectralError> {
        let mut s = Sampler::new(seed);
        let mut members = Vec::new();
        let mut attempts = 0;
        while members.len() < samples && attempts < 100 * samples {
            attempts += 1;
            let a = s.invertible(alg);
            if in_subgroup(&a, self)? {
                members.push(a);
            }
        }
        for pair in members.windows(2) {
            if !in_subgroup(&pair[0].mul(&pair[1]).expect("same algebra"), self)? {
                return Err(SpectralError::NotClosed("product"));
            }
            if !in_subgroup(&invert(&pair[0])?, self)? {
                return Err(SpectralError::NotClosed("inverse"));
            }
        }
        Ok(())
    }
}

pub fn in_subgroup(a: &Element, d: &SubgroupDescriptor) -> Result<bool, SpectralError> {
    match &d.kind {
        SubgroupKind::FullInvertibleGroup => Ok(is_invertible(a)),
        SubgroupKind::PrincipalComponent => {
            if a.algebra().has_connected_invertible_group() {
                Ok(is_invertible(a))
            } else {
                Err(SpectralError::UnknownComponentStructure(a.algebra().name().to_string()))
            }
        }
        SubgroupKind::Custom(p) => Ok(p(a)),
    }
}

/// Membership in `{ a : ||a - r e|| < r for some r > 0 }`.
///
/// `r -> ||a - r e|| - r` is scanned on a logarithmic grid around `||a||`
/// and then refined by golden-section search; convexity is not assumed.
pub fn in_omega(a: &Element) -> bool {
    omega_margin(a) < -1e-10
}

/// Minimum of `||a - r e|| - r` over `r > 0` (as located by the search).
pub fn omega_margin(a: &Element) -> f64 {
    let s = a.norm();
    if s == 0.0 {
        return 0.0;
    }
    let f = |r: f64| a.add_unit(C64::new(-r, 0.0)).norm() - r;
    let mut best_j = -20;
    let mut best = f64::INFINITY;
    for j in -20..=20 {
        let v = f(s * 2f64.powi(j));
        if v < best {
            best = v;
            best_j = j;
        }
    }
    let lo = (s * 2f64.powi(best_j - 1)).ln();
    let hi = (s * 2f64.powi(best_j + 1)).ln();
    let refined = golden_min(|x| f(x.exp()), lo, hi, 60);
    best.min(refined)
}

/// Golden-section minimization on `[lo, hi]`; returns the smallest value seen.
pub(crate) fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut best = f1.min(f2);
    for _ in 0..iters {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
        best = best.min(f1).min(f2);
    }
    best
}

/// `exp(a)` via the matrix exponential of `L_a` applied to the unit.
pub fn exp_element(a: &Element) -> Element {
    let e = a.regular_rep().exp();
    let unit = DVector::from_column_slice(a.algebra().unit_coords());
    a.with_coords((e * unit).iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::linalg::{ONE, ZERO};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn inverse_of_unit_is_unit() {
        let m2 = catalog::make_matrix_algebra(2);
        assert_eq!(invert(&m2.unit()).unwrap().coords(), m2.unit().coords());
    }

    #[test]
    fn dame_inverse_formula() {
        // (alpha I + m)^{-1} = alpha^{-1} I - alpha^{-2} m under the zero product.
        let a = catalog::make_dame_pair().a;
        let alpha = C64::new(2.0, -1.0);
        let m = [C64::new(0.3, 0.1), C64::new(-1.0, 0.0), C64::new(0.0, 2.0)];
        let x = a.element(vec![alpha, m[0], m[1], m[2]]).unwrap();
        let inv = invert(&x).unwrap();
        let expected: Vec<C64> = std::iter::once(1.0 / alpha)
            .chain(m.iter().map(|z| -z / (alpha * alpha)))
            .collect();
        for (got, want) in inv.coords().iter().zip(&expected) {
            assert!((got - want).norm() < 1e-12);
        }
        let e = a.unit();
        assert!((&x.mul(&inv).unwrap() - &e).norm() < 1e-9);
        assert!((&inv.mul(&x).unwrap() - &e).norm() < 1e-9);
    }

    #[test]
    fn matrix_unit_is_not_invertible() {
        let m2 = catalog::make_matrix_algebra(2);
        assert!(matches!(invert(&m2.basis(1)), Err(SpectralError::NotInvertible(_))));
        assert!(!in_subgroup(&m2.basis(1), &SubgroupDescriptor::full()).unwrap());
    }

    #[test]
    fn spectrum_examples() {
        let m3 = catalog::make_matrix_algebra(3);
        let s = spectrum(&m3.unit().scale_real(3.0));
        assert_eq!(s.eigenvalues.len(), 9);
        assert!(s.eigenvalues.iter().all(|z| (z - c(3.0)).norm() < 1e-12));
        assert!((s.spectral_radius - 3.0).abs() < 1e-12);

        let c2 = catalog::make_function_algebra(2);
        let f0 = c2.element(vec![ZERO, c(10.0)]).unwrap();
        let s = spectrum(&f0);
        assert!((s.spectral_radius - 10.0).abs() < 1e-12);

        let m2 = catalog::make_matrix_algebra(2);
        assert!(spectral_radius(&m2.basis(1)) < 1e-12);
    }

    #[test]
    fn dame_radical_products_are_exactly_quasi_nilpotent() {
        let b = catalog::make_dame_pair().b;
        let mut s = Sampler::new(2);
        for _ in 0..50 {
            let g = s.principal_component(&b);
            let x = g.mul(&b.basis(3)).unwrap();
            assert!(spectral_radius(&x) < 1e-12);
        }
    }

    #[test]
    fn gelfand_examples() {
        let m2 = catalog::make_matrix_algebra(2);
        for k in [1, 2, 64, 1024] {
            assert!((gelfand_radius(&m2.unit(), k).unwrap() - 1.0).abs() < 1e-12);
        }
        assert_eq!(gelfand_radius(&m2.basis(1), 2).unwrap(), 0.0);
        let d = m2.element(vec![c(2.0), ZERO, ZERO, ONE]).unwrap();
        assert!((gelfand_radius(&d, 64).unwrap() - 2.0).abs() < 1e-9);
        assert_eq!(gelfand_radius(&d, 3), Err(SpectralError::InvalidPower(3)));
        assert_eq!(gelfand_radius(&d, 2048), Err(SpectralError::InvalidPower(2048)));
    }

    #[test]
    fn principal_component_membership() {
        let m2 = catalog::make_matrix_algebra(2);
        let p = SubgroupDescriptor::principal();
        assert!(in_subgroup(&m2.unit(), &p).unwrap());
        let d = m2.element(vec![ONE, ZERO, ZERO, c(-1.0)]).unwrap();
        assert!(in_subgroup(&d, &p).unwrap());
        let custom = crate::catalog::custom_regular_algebra_c2();
        assert!(matches!(
            in_subgroup(&custom.unit(), &p),
            Err(SpectralError::UnknownComponentStructure(_))
        ));
    }

    #[test]
    fn omega_examples() {
        let m2 = catalog::make_matrix_algebra(2);
        assert!(in_omega(&m2.unit()));
        assert!(!in_omega(&m2.unit().scale_real(-1.0)));
        assert!(!in_omega(&m2.zero()));
        let mut s = Sampler::new(8);
        for _ in 0..20 {
            let a = s.element(&m2, 1.0);
            let shifted = a.add_unit(c(2.0 * a.norm()));
            assert!(in_omega(&shifted));
            assert!(is_invertible(&shifted));
        }
    }

    #[test]
    fn exp_examples() {
        let m2 = catalog::make_matrix_algebra(2);
        assert_eq!(exp_element(&m2.zero()).coords(), m2.unit().coords());
        let e = exp_element(&m2.basis(1));
        let want = [ONE, ONE, ZERO, ONE];
        for (g, w) in e.coords().iter().zip(want) {
            assert!((g - w).norm() < 1e-14);
        }
        let c1 = catalog::make_function_algebra(1);
        let x = exp_element(&c1.element(vec![c(2f64.ln())]).unwrap());
        assert!((x.coords()[0] - c(2.0)).norm() < 1e-14);
    }

    #[test]
    fn closure_of_standard_descriptors() {
        let m2 = catalog::make_matrix_algebra(2);
        SubgroupDescriptor::full().check_closure(&m2, 1, 20).unwrap();
        SubgroupDescriptor::principal().check_closure(&m2, 1, 20).unwrap();
        // Determinants in the open upper half-plane are not closed under products.
        let pred: Predicate = Arc::new(|a: &Element| {
            let c = a.coords();
            (c[0] * c[3] - c[1] * c[2]).im > 0.0
        });
        let res = SubgroupDescriptor::custom(pred).check_closure(&m2, 1, 40);
        assert!(matches!(res, Err(SpectralError::NotClosed(_))));
    }
}
