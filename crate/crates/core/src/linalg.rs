//! Small dense complex linear-algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type RMatrix = DMatrix<f64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .singular_values()
        .iter()
        .fold(0.0_f64, |acc, s| acc.max(*s))
}

/// Largest and smallest singular values.
pub fn singular_extremes(m: &CMatrix) -> (f64, f64) {
    let sv = m.clone().singular_values();
    let max = sv.iter().fold(0.0_f64, |acc, s| acc.max(*s));
    let min = sv.iter().fold(f64::INFINITY, |acc, s| acc.min(*s));
    (max, min)
}

/// Largest eigenvalue of a Hermitian matrix. Only the Hermitian part is used.
pub fn hermitian_max_eigenvalue(h: &CMatrix) -> f64 {
    let sym = (h + h.adjoint()).scale(0.5);
    let n = sym.nrows();
    if n == 1 {
        return sym[(0, 0)].re;
    }
    if n == 2 {
        // Closed form; avoids the iterative solver on the hot path.
        let a = sym[(0, 0)].re;
        let d = sym[(1, 1)].re;
        let b = sym[(0, 1)].norm();
        let half_gap = 0.5 * (a - d);
        return 0.5 * (a + d) + half_gap.hypot(b);
    }
    SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .fold(f64::NEG_INFINITY, |acc, v| acc.max(*v))
}

/// Eigenvalues of a general complex square matrix (with multiplicity).
pub fn eigenvalues(m: &CMatrix) -> Vec<C64> {
    let n = m.nrows();
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![m[(0, 0)]];
    }
    let scale = m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()));
    if scale == 0.0 || !scale.is_finite() {
        return vec![C64::new(if scale == 0.0 { 0.0 } else { f64::NAN }, 0.0); n];
    }
    // Entries far below the working precision stall the QR sweeps.
    let mut w = m.map(|z| {
        let z = z / scale;
        if z.norm() < 1e-300 { C64::new(0.0, 0.0) } else { z }
    });
    for attempt in 0..4 {
        if let Some(schur) = Schur::try_new(w.clone(), f64::EPSILON, 20_000) {
            return schur.unpack().1.diagonal().iter().map(|z| z * scale).collect();
        }
        // Retry under a fixed unitary similarity.
        let theta = 0.3 + attempt as f64;
        let rot = unitary_rotation(n, theta);
        w = rot.adjoint() * w * &rot;
    }
    panic!("complex Schur decomposition failed to converge")
}

fn unitary_rotation(n: usize, theta: f64) -> CMatrix {
    let mut g = CMatrix::identity(n, n);
    let (s, c) = theta.sin_cos();
    let ph = C64::from_polar(1.0, theta * 0.7);
    g[(0, 0)] = C64::new(c, 0.0);
    g[(0, 1)] = -ph.conj() * s;
    g[(1, 0)] = ph * s;
    g[(1, 1)] = C64::new(c, 0.0);
    g
}

/// Orthonormal basis (as columns) of the right null space of `m`, using a
/// relative singular-value threshold.
pub fn null_space(m: &CMatrix, rel_tol: f64) -> CMatrix {
    let cols = m.ncols();
    if cols == 0 {
        return CMatrix::zeros(0, 0);
    }
    // Pad to at least square so the SVD exposes all right singular vectors.
    let padded = if m.nrows() < cols {
        let mut p = CMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^*");
    let smax = svd.singular_values.iter().fold(0.0_f64, |a, s| a.max(*s));
    let thresh = rel_tol * smax.max(1.0);
    let mut basis: Vec<DVector<C64>> = Vec::new();
    for (k, s) in svd.singular_values.iter().enumerate() {
        if *s <= thresh {
            basis.push(v_t.row(k).adjoint());
        }
    }
    if basis.is_empty() {
        CMatrix::zeros(cols, 0)
    } else {
        CMatrix::from_columns(&basis)
    }
}

/// Orthonormal basis of the orthogonal complement of the column span of the
/// orthonormal matrix `q` in `C^n`.
pub fn orthogonal_complement(q: &CMatrix, n: usize) -> CMatrix {
    if q.ncols() == 0 {
        return CMatrix::identity(n, n);
    }
    null_space(&q.adjoint(), 1e-10)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = CMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let s = a[(i, j)];
            if s == ZERO {
                continue;
            }
            for p in 0..br {
                for q in 0..bc {
                    out[(i * br + p, j * bc + q)] = s * b[(p, q)];
                }
            }
        }
    }
    out
}

/// Column-major vectorization, `vec(A X B) = (B^T kron A) vec(X)`.
pub fn vec_col_major(m: &CMatrix) -> DVector<C64> {
    DVector::from_iterator(m.len(), m.iter().copied())
}

pub fn unvec_col_major(v: &DVector<C64>, n: usize) -> CMatrix {
    CMatrix::from_iterator(n, n, v.iter().copied())
}

/// Entrywise complex conjugate.
pub fn conj(m: &CMatrix) -> CMatrix {
    m.map(|z| z.conj())
}

/// 2-norm condition number; infinite when singular.
pub fn condition_number(m: &CMatrix) -> f64 {
    let (max, min) = singular_extremes(m);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Maps `C^n` to `R^{2n}` by interleaving real and imaginary parts.
pub fn realify(v: &[C64]) -> DVector<f64> {
    let mut out = DVector::zeros(2 * v.len());
    for (k, z) in v.iter().enumerate() {
        out[2 * k] = z.re;
        out[2 * k + 1] = z.im;
    }
    out
}

pub fn complexify(v: &DVector<f64>) -> Vec<C64> {
    v.as_slice()
        .chunks_exact(2)
        .map(|p| C64::new(p[0], p[1]))
        .collect()
}

/// Real matrix of multiplication by `i` on the realified space.
pub fn realified_i(dim: usize) -> RMatrix {
    let mut j = RMatrix::zeros(2 * dim, 2 * dim);
    for k in 0..dim {
        j[(2 * k + 1, 2 * k)] = 1.0;
        j[(2 * k, 2 * k + 1)] = -1.0;
    }
    j
}

pub fn max_abs(v: &[C64]) -> f64 {
    v.iter().fold(0.0_f64, |a, z| a.max(z.norm()))
}
