//! Seeded samplers. Every random quantity in the crate flows through a
//! `ChaCha8Rng` built from an explicit seed.

use std::sync::Arc;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::{Algebra, Element};
use crate::linalg::{self, CMatrix, C64};
use crate::spectral;

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Coordinates with i.i.d. complex normal entries of standard deviation `sigma`.
pub fn gaussian_coords<R: Rng + ?Sized>(rng: &mut R, dim: usize, sigma: f64) -> Vec<C64> {
    (0..dim).map(|_| complex_normal(rng) * sigma).collect()
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| complex_normal(rng))
}

/// Haar-distributed unitary via QR of a complex Gaussian matrix.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let g = gaussian_matrix(rng, n);
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    // Fix the phases so the distribution is Haar.
    let phases = DVector::from_fn(n, |k, _| {
        let d = r[(k, k)];
        if d.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            d / d.norm()
        }
    });
    q * CMatrix::from_diagonal(&phases)
}

/// Random invertible matrix with 2-norm condition number at most `max_cond`.
pub fn invertible_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize, max_cond: f64) -> CMatrix {
    loop {
        let g = gaussian_matrix(rng, n);
        if linalg::condition_number(&g) <= max_cond {
            return g;
        }
    }
}

/// Deterministic element sampler for a fixed algebra.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn complex(&mut self) -> C64 {
        complex_normal(&mut self.rng)
    }

    pub fn element(&mut self, alg: &Arc<Algebra>, sigma: f64) -> Element {
        let coords = gaussian_coords(&mut self.rng, alg.dim(), sigma);
        alg.element(coords).expect("dimension matches")
    }

    /// Gaussian element conditioned on invertibility.
    pub fn invertible(&mut self, alg: &Arc<Algebra>) -> Element {
        loop {
            let a = self.element(alg, 1.0);
            if spectral::is_invertible(&a) {
                return a;
            }
        }
    }

    /// `exp(x) exp(y)` for Gaussian `x`, `y`: always in the principal component.
    pub fn principal_component(&mut self, alg: &Arc<Algebra>) -> Element {
        let x = self.element(alg, 0.7);
        let y = self.element(alg, 0.7);
        spectral::exp_element(&x)
            .mul(&spectral::exp_element(&y))
            .expect("same algebra")
    }

    /// Uniform-radius point of the open ball `{x : ||x - center|| < radius}`.
    pub fn in_ball(&mut self, center: &Element, radius: f64) -> Element {
        let alg = center.algebra().clone();
        loop {
            let v = self.element(&alg, 1.0);
            let n = v.norm();
            if n == 0.0 {
                continue;
            }
            let rho = radius * 0.98 * self.uniform(0.0, 1.0).powf(1.0 / alg.dim() as f64);
            return center + &v.scale_real(rho / n);
        }
    }

    pub fn unitary(&mut self, n: usize) -> CMatrix {
        unitary(&mut self.rng, n)
    }

    pub fn invertible_matrix(&mut self, n: usize, max_cond: f64) -> CMatrix {
        invertible_matrix(&mut self.rng, n, max_cond)
    }

    pub fn gaussian_matrix(&mut self, n: usize) -> CMatrix {
        gaussian_matrix(&mut self.rng, n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_is_unitary() {
        let mut s = Sampler::new(11);
        for n in 1..5 {
            let u = s.unitary(n);
            assert!((u.adjoint() * &u - CMatrix::identity(n, n)).norm() < 1e-12);
        }
    }

    #[test]
    fn seeds_are_reproducible() {
        let a: Vec<C64> = gaussian_coords(&mut ChaCha8Rng::seed_from_u64(3), 5, 1.0);
        let b: Vec<C64> = gaussian_coords(&mut ChaCha8Rng::seed_from_u64(3), 5, 1.0);
        assert_eq!(a, b);
    }

    #[test]
    fn conditioned_matrices_respect_bound() {
        let mut s = Sampler::new(5);
        for _ in 0..20 {
            assert!(linalg::condition_number(&s.invertible_matrix(3, 50.0)) <= 50.0);
        }
    }
}
