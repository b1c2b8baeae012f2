//! Jacobson radical by two independent routes.
//!
//! The trace-form route is exact linear algebra: over a field of
//! characteristic zero, `rad(A) = { x : tr(L_{xy}) = 0 for all y }`. The
//! spectral route samples `r(ba)` for `b` in the principal component and
//! reports a witness as soon as one product is not quasi-nilpotent.

use std::sync::Arc;

use nalgebra::DVector;

use crate::algebra::{Algebra, Element};
use crate::linalg::{self, CMatrix, C64, ZERO};
use crate::sampling::Sampler;
use crate::spectral;

/// `r(ba)` above this value counts as a genuine non-zero spectral radius.
pub const QUASI_NILPOTENT_THRESHOLD: f64 = 1e-6;

/// Cached trace-form data of an algebra.
#[derive(Debug, Clone)]
pub(crate) struct RadicalData {
    /// Orthonormal columns spanning the radical (in coordinates).
    pub basis: CMatrix,
    /// Orthonormal columns spanning its orthogonal complement.
    pub complement: CMatrix,
}

impl RadicalData {
    pub fn compute(alg: &Algebra) -> RadicalData {
        let gram = trace_form(alg);
        // x is radical iff sum_i x_i G[i][j] = 0 for all j, i.e. G^T x = 0.
        let basis = linalg::null_space(&gram.transpose(), 1e-10);
        let complement = linalg::orthogonal_complement(&basis, alg.dim());
        RadicalData { basis, complement }
    }

    /// Regular representation of `a` on the quotient `A / rad(A)`.
    pub fn quotient_rep(&self, l_a: &CMatrix) -> CMatrix {
        self.complement.adjoint() * l_a * &self.complement
    }
}

/// `G[i][j] = tr(L_{e_i e_j})`.
pub fn trace_form(alg: &Algebra) -> CMatrix {
    let d = alg.dim();
    // tr(L_{e_m}) = sum_k c[m][k][k]
    let traces: Vec<C64> = (0..d)
        .map(|m| (0..d).map(|k| alg.constant(m, k, k)).sum())
        .collect();
    CMatrix::from_fn(d, d, |i, j| (0..d).map(|m| alg.constant(i, j, m) * traces[m]).sum())
}

/// A basis of the Jacobson radical.
#[derive(Debug, Clone)]
pub struct RadicalBasis {
    pub basis: Vec<Element>,
    pub dim_radical: usize,
}

pub fn dickson_radical(alg: &Arc<Algebra>) -> RadicalBasis {
    let data = alg.radical_data();
    let basis: Vec<Element> = data
        .basis
        .column_iter()
        .map(|c| alg.element(c.iter().copied().collect()).expect("dimension"))
        .collect();
    RadicalBasis {
        dim_radical: basis.len(),
        basis,
    }
}

/// Norm of the component of `a` orthogonal (in coordinates) to the radical.
pub fn radical_distance(a: &Element) -> f64 {
    let data = a.algebra().radical_data();
    let x = DVector::from_column_slice(a.coords());
    let proj = &data.basis * (data.basis.adjoint() * &x);
    let resid: Vec<C64> = (x - proj).iter().copied().collect();
    a.algebra().norm_coords(&resid)
}

pub fn in_dickson_radical(a: &Element, tol: f64) -> bool {
    radical_distance(a) <= tol
}

/// Outcome of the spectral radical test.
#[derive(Debug, Clone)]
pub enum RadicalVerdict {
    ConsistentWithRadical { max_radius: f64 },
    NotRadical { witness: Element, radius: f64 },
}

impl RadicalVerdict {
    pub fn is_consistent(&self) -> bool {
        matches!(self, RadicalVerdict::ConsistentWithRadical { .. })
    }
}

/// Samples `b` from the supplied generator of principal-component elements
/// and looks for `r(ba) > QUASI_NILPOTENT_THRESHOLD`.
pub fn radical_test_spectral(
    a: &Element,
    sampler: &mut dyn FnMut() -> Element,
    trials: usize,
) -> RadicalVerdict {
    if a.coords().iter().all(|z| *z == ZERO) {
        return RadicalVerdict::ConsistentWithRadical { max_radius: 0.0 };
    }
    let mut max_radius = 0.0_f64;
    for _ in 0..trials {
        let b = sampler();
        let ba = b.mul(a).expect("sampler must draw from the same algebra");
        let r = spectral::spectral_radius(&ba);
        if r > QUASI_NILPOTENT_THRESHOLD {
            return RadicalVerdict::NotRadical { witness: b, radius: r };
        }
        max_radius = max_radius.max(r);
    }
    RadicalVerdict::ConsistentWithRadical { max_radius }
}

/// [`radical_test_spectral`] with products of exponentials as the sampler.
pub fn radical_test_seeded(a: &Element, seed: u64, trials: usize) -> RadicalVerdict {
    let mut s = Sampler::new(seed);
    let alg = a.algebra().clone();
    radical_test_spectral(a, &mut || s.principal_component(&alg), trials)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::linalg::ONE;

    #[test]
    fn semisimple_catalog_algebras() {
        for n in 1..=3 {
            assert_eq!(dickson_radical(&catalog::make_matrix_algebra(n)).dim_radical, 0);
        }
        for k in 1..=3 {
            assert_eq!(dickson_radical(&catalog::make_function_algebra(k)).dim_radical, 0);
        }
    }

    #[test]
    fn dame_radicals_are_strictly_upper() {
        let pair = catalog::make_dame_pair();
        for alg in [&pair.a, &pair.b] {
            let rad = dickson_radical(alg);
            assert_eq!(rad.dim_radical, 3);
            // The identity coordinate vanishes on every radical vector.
            for u in &rad.basis {
                assert!(u.coords()[0].norm() < 1e-12);
            }
            for k in 1..4 {
                assert!(in_dickson_radical(&alg.basis(k), 1e-12));
            }
            assert!(!in_dickson_radical(&alg.unit(), 1e-3));
        }
    }

    #[test]
    fn radical_basis_is_closed_under_multiplication() {
        let pair = catalog::make_dame_pair();
        let b = &pair.b;
        let rad = dickson_radical(b);
        for u in &rad.basis {
            for k in 0..4 {
                let e = b.basis(k);
                assert!(in_dickson_radical(&e.mul(u).unwrap(), 1e-12));
                assert!(in_dickson_radical(&u.mul(&e).unwrap(), 1e-12));
            }
        }
    }

    #[test]
    fn zero_is_consistent_with_radical() {
        let m2 = catalog::make_matrix_algebra(2);
        assert!(radical_test_seeded(&m2.zero(), 1, 10).is_consistent());
    }

    #[test]
    fn matrix_unit_has_swap_witness() {
        let m2 = catalog::make_matrix_algebra(2);
        // a = E12, b = E12 + E21 gives ba = E22.
        let a = m2.basis(1);
        let b = m2.element(vec![ZERO, ONE, ONE, ZERO]).unwrap();
        let mut fixed = || b.clone();
        match radical_test_spectral(&a, &mut fixed, 1) {
            RadicalVerdict::NotRadical { radius, .. } => assert!((radius - 1.0).abs() < 1e-12),
            other => panic!("expected a witness, got {other:?}"),
        }
    }

    #[test]
    fn dame_corner_is_consistent_with_radical() {
        let b = catalog::make_dame_pair().b;
        let e13 = b.basis(2);
        assert!(radical_test_seeded(&e13, 9, 200).is_consistent());
    }
}
