//! Finite-dimensional unital complex algebras given by structure constants,
//! together with the norm that turns them into Banach algebras.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::{Arc, OnceLock};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, CMatrix, C64, ONE, ZERO};
use crate::radical::RadicalData;
use crate::sampling;

/// How the norm of an element is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormRule {
    /// Maximum modulus of the coordinates (function algebras on finite sets).
    Sup,
    /// Spectral norm of the concrete matrix given by the embedding.
    MatrixOperator,
    /// Spectral norm of the left regular representation.
    RegularRepOperator,
    /// `|x_u| + ||emb(x - x_u e)||` where the unit is the basis vector `u`.
    /// An algebra norm on any unitization whose ideal part is normed by a
    /// submultiplicative matrix norm.
    UnitizationSum,
}

/// Numerical tolerances used by validation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Exact algebraic identities (associativity, unit law).
    pub structural: f64,
    /// Sampled analytic identities (norm axioms).
    pub analytic: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            structural: 1e-12,
            analytic: 1e-9,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("invalid shape: {0}")]
    BadShape(String),
    #[error("basis triple ({i},{j},{k}) is not associative (defect {defect:.3e})")]
    NonAssociative {
        i: usize,
        j: usize,
        k: usize,
        defect: f64,
    },
    #[error("unit law fails on basis element {basis} (defect {defect:.3e})")]
    BadUnit { basis: usize, defect: f64 },
    #[error("norm of the unit is {0}, expected 1")]
    UnitNormNotOne(f64),
    #[error("norm is not submultiplicative: ||ab|| / (||a|| ||b||) = {ratio:.6}")]
    NormNotSubmultiplicative {
        a: Vec<C64>,
        b: Vec<C64>,
        ratio: f64,
    },
    #[error("norm rule {0:?} requires a concrete embedding")]
    MissingEmbedding(NormRule),
    #[error("unitization norm requires the unit to be a basis vector")]
    UnitNotBasisVector,
    #[error("elements belong to different algebras")]
    AlgebraMismatch,
    #[error("coordinate vector has length {got}, algebra dimension is {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Everything needed to build an [`Algebra`].
#[derive(Debug, Clone)]
pub struct AlgebraSpec {
    pub name: String,
    pub dim: usize,
    /// `c[i][j][k]` flattened row-major: index `(i * dim + j) * dim + k`.
    pub structure_constants: Vec<C64>,
    pub unit: Vec<C64>,
    pub norm_rule: NormRule,
    /// Image of each basis element as an `n x n` matrix.
    pub embedding: Option<Vec<CMatrix>>,
    /// Whether the invertible group is known to be connected, so that the
    /// principal component equals the whole invertible group.
    pub connected_invertible_group: bool,
}

/// A validated unital algebra. Immutable after construction.
pub struct Algebra {
    name: String,
    dim: usize,
    constants: Vec<C64>,
    unit: Vec<C64>,
    norm_rule: NormRule,
    embedding: Option<Vec<CMatrix>>,
    unit_index: Option<usize>,
    connected_invertible_group: bool,
    radical: OnceLock<RadicalData>,
}

impl fmt::Debug for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Algebra")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("norm_rule", &self.norm_rule)
            .finish()
    }
}

/// Seed of the sampler used for the submultiplicativity audit.
const NORM_AUDIT_SEED: u64 = 0x5EED_A16E;
const NORM_AUDIT_PAIRS: usize = 1000;

/// Checks the algebra axioms and returns the validated algebra.
pub fn validate_algebra(spec: AlgebraSpec, tol: &Tolerances) -> Result<Arc<Algebra>, AlgebraError> {
    let d = spec.dim;
    if d == 0 {
        return Err(AlgebraError::BadShape("dimension must be at least 1".into()));
    }
    if spec.structure_constants.len() != d * d * d {
        return Err(AlgebraError::BadShape(format!(
            "expected {} structure constants, got {}",
            d * d * d,
            spec.structure_constants.len()
        )));
    }
    if spec.unit.len() != d {
        return Err(AlgebraError::BadShape(format!(
            "unit has {} coordinates, expected {d}",
            spec.unit.len()
        )));
    }
    if let Some(emb) = &spec.embedding {
        if emb.len() != d {
            return Err(AlgebraError::BadShape(format!(
                "embedding has {} images, expected {d}",
                emb.len()
            )));
        }
        let n = emb[0].nrows();
        if emb.iter().any(|m| m.nrows() != n || m.ncols() != n) {
            return Err(AlgebraError::BadShape("embedding images must be square and equal-sized".into()));
        }
    }
    let needs_embedding = matches!(spec.norm_rule, NormRule::MatrixOperator | NormRule::UnitizationSum);
    if needs_embedding && spec.embedding.is_none() {
        return Err(AlgebraError::MissingEmbedding(spec.norm_rule));
    }
    let unit_index = if spec.norm_rule == NormRule::UnitizationSum {
        let idx = spec
            .unit
            .iter()
            .position(|z| *z == ONE)
            .filter(|&k| spec.unit.iter().enumerate().all(|(j, z)| j == k || *z == ZERO))
            .ok_or(AlgebraError::UnitNotBasisVector)?;
        Some(idx)
    } else {
        None
    };

    let alg = Algebra {
        name: spec.name,
        dim: d,
        constants: spec.structure_constants,
        unit: spec.unit,
        norm_rule: spec.norm_rule,
        embedding: spec.embedding,
        unit_index,
        connected_invertible_group: spec.connected_invertible_group,
        radical: OnceLock::new(),
    };
    alg.check_associativity(tol.structural)?;
    alg.check_unit(tol.structural)?;
    alg.check_norm(tol.analytic)?;
    Ok(Arc::new(alg))
}

impl Algebra {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm_rule(&self) -> NormRule {
        self.norm_rule
    }

    pub fn structure_constants(&self) -> &[C64] {
        &self.constants
    }

    pub fn unit_coords(&self) -> &[C64] {
        &self.unit
    }

    pub fn embedding(&self) -> Option<&[CMatrix]> {
        self.embedding.as_deref()
    }

    pub fn has_connected_invertible_group(&self) -> bool {
        self.connected_invertible_group
    }

    #[inline]
    pub fn constant(&self, i: usize, j: usize, k: usize) -> C64 {
        self.constants[(i * self.dim + j) * self.dim + k]
    }

    /// Product of two coordinate vectors.
    pub fn mul_coords(&self, a: &[C64], b: &[C64]) -> Vec<C64> {
        let d = self.dim;
        let mut out = vec![ZERO; d];
        for (i, ai) in a.iter().enumerate() {
            if *ai == ZERO {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if *bj == ZERO {
                    continue;
                }
                let s = ai * bj;
                let base = (i * d + j) * d;
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.constants[base + k];
                    if c != ZERO {
                        *o += s * c;
                    }
                }
            }
        }
        out
    }

    /// Matrix of `x -> a x` in coordinates.
    pub fn regular_rep_coords(&self, a: &[C64]) -> CMatrix {
        let d = self.dim;
        let mut l = CMatrix::zeros(d, d);
        for (i, ai) in a.iter().enumerate() {
            if *ai == ZERO {
                continue;
            }
            for j in 0..d {
                let base = (i * d + j) * d;
                for k in 0..d {
                    let c = self.constants[base + k];
                    if c != ZERO {
                        l[(k, j)] += ai * c;
                    }
                }
            }
        }
        l
    }

    /// Concrete matrix of `a`, when an embedding is present.
    pub fn embed_coords(&self, a: &[C64]) -> Option<CMatrix> {
        let emb = self.embedding.as_ref()?;
        let n = emb[0].nrows();
        let mut m = CMatrix::zeros(n, n);
        for (ak, ek) in a.iter().zip(emb) {
            if *ak != ZERO {
                m += ek * *ak;
            }
        }
        Some(m)
    }

    pub fn norm_coords(&self, a: &[C64]) -> f64 {
        match self.norm_rule {
            NormRule::Sup => linalg::max_abs(a),
            NormRule::MatrixOperator => linalg::spectral_norm(&self.embed_coords(a).expect("validated")),
            NormRule::RegularRepOperator => linalg::spectral_norm(&self.regular_rep_coords(a)),
            NormRule::UnitizationSum => {
                let u = self.unit_index.expect("validated");
                let mut rest = a.to_vec();
                let scalar = rest[u];
                rest[u] = ZERO;
                scalar.norm() + linalg::spectral_norm(&self.embed_coords(&rest).expect("validated"))
            }
        }
    }

    /// `||e + x|| - 1`, evaluated without the cancellation of the naive
    /// difference so that it stays accurate for tiny `x`.
    pub fn unit_excess(&self, x: &[C64]) -> f64 {
        // |u + z| - 1 for a scalar with |u| = 1 (or close to it).
        fn scalar_excess(u: C64, z: C64) -> f64 {
            let sq = (u.norm_sqr() - 1.0) + 2.0 * (u.conj() * z).re + z.norm_sqr();
            sq / ((u + z).norm() + 1.0)
        }
        fn operator_excess(e: &CMatrix, x: &CMatrix) -> f64 {
            // ||E + X||^2 - 1 = lambda_max(E*E - I + E*X + X*E + X*X).
            let n = e.nrows();
            let h = e.adjoint() * e - CMatrix::identity(n, n)
                + e.adjoint() * x
                + x.adjoint() * e
                + x.adjoint() * x;
            let lam = linalg::hermitian_max_eigenvalue(&h);
            lam / ((1.0 + lam).max(0.0).sqrt() + 1.0)
        }
        match self.norm_rule {
            NormRule::Sup => self
                .unit
                .iter()
                .zip(x)
                .map(|(u, z)| scalar_excess(*u, *z))
                .fold(f64::NEG_INFINITY, f64::max),
            NormRule::MatrixOperator => {
                let e = self.embed_coords(&self.unit).expect("validated");
                operator_excess(&e, &self.embed_coords(x).expect("validated"))
            }
            NormRule::RegularRepOperator => {
                let e = self.regular_rep_coords(&self.unit);
                operator_excess(&e, &self.regular_rep_coords(x))
            }
            NormRule::UnitizationSum => {
                let u = self.unit_index.expect("validated");
                let mut rest = x.to_vec();
                let scalar = rest[u];
                rest[u] = ZERO;
                scalar_excess(ONE, scalar) + linalg::spectral_norm(&self.embed_coords(&rest).expect("validated"))
            }
        }
    }

    /// Maximum modulus of `c[i][j][k] - c[j][i][k]`; zero iff commutative.
    pub fn commutativity_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..d {
            for j in (i + 1)..d {
                for k in 0..d {
                    worst = worst.max((self.constant(i, j, k) - self.constant(j, i, k)).norm());
                }
            }
        }
        worst
    }

    pub fn is_commutative(&self, tol: f64) -> bool {
        self.commutativity_defect() <= tol
    }

    pub(crate) fn radical_data(&self) -> &RadicalData {
        self.radical.get_or_init(|| RadicalData::compute(self))
    }

    fn check_associativity(&self, tol: f64) -> Result<(), AlgebraError> {
        let d = self.dim;
        let basis = |k: usize| {
            let mut v = vec![ZERO; d];
            v[k] = ONE;
            v
        };
        for i in 0..d {
            let ei = basis(i);
            for j in 0..d {
                let ej = basis(j);
                let eij = self.mul_coords(&ei, &ej);
                for k in 0..d {
                    let ek = basis(k);
                    let left = self.mul_coords(&eij, &ek);
                    let right = self.mul_coords(&ei, &self.mul_coords(&ej, &ek));
                    let defect = left
                        .iter()
                        .zip(&right)
                        .fold(0.0_f64, |acc, (l, r)| acc.max((l - r).norm()));
                    if defect > tol {
                        return Err(AlgebraError::NonAssociative { i, j, k, defect });
                    }
                }
            }
        }
        Ok(())
    }

    fn check_unit(&self, tol: f64) -> Result<(), AlgebraError> {
        let d = self.dim;
        for k in 0..d {
            let mut ek = vec![ZERO; d];
            ek[k] = ONE;
            let left = self.mul_coords(&self.unit, &ek);
            let right = self.mul_coords(&ek, &self.unit);
            let defect = left
                .iter()
                .zip(&right)
                .zip(&ek)
                .fold(0.0_f64, |acc, ((l, r), e)| acc.max((l - e).norm()).max((r - e).norm()));
            if defect > tol {
                return Err(AlgebraError::BadUnit { basis: k, defect });
            }
        }
        Ok(())
    }

    fn submult_ratio(&self, a: &[C64], b: &[C64]) -> f64 {
        let denom = self.norm_coords(a) * self.norm_coords(b);
        if denom == 0.0 {
            return 0.0;
        }
        self.norm_coords(&self.mul_coords(a, b)) / denom
    }

    /// Seeded random pairs followed by a local ascent from the worst ones:
    /// plain random sampling misses thin violation regions.
    fn check_norm(&self, tol: f64) -> Result<(), AlgebraError> {
        let unit_norm = self.norm_coords(&self.unit);
        if (unit_norm - 1.0).abs() > tol {
            return Err(AlgebraError::UnitNormNotOne(unit_norm));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(NORM_AUDIT_SEED);
        let mut scored: Vec<(f64, Vec<C64>, Vec<C64>)> = Vec::with_capacity(NORM_AUDIT_PAIRS);
        for _ in 0..NORM_AUDIT_PAIRS {
            let a = sampling::gaussian_coords(&mut rng, self.dim, 1.0);
            let b = sampling::gaussian_coords(&mut rng, self.dim, 1.0);
            let r = self.submult_ratio(&a, &b);
            scored.push((r, a, b));
        }
        scored.sort_by(|x, y| y.0.total_cmp(&x.0));
        for (mut best, mut a, mut b) in scored.into_iter().take(8) {
            if best > 1.0 + tol {
                return Err(AlgebraError::NormNotSubmultiplicative { a, b, ratio: best });
            }
            let mut step = 0.3;
            for _ in 0..300 {
                let da = sampling::gaussian_coords(&mut rng, self.dim, step);
                let db = sampling::gaussian_coords(&mut rng, self.dim, step);
                let na: Vec<C64> = a.iter().zip(&da).map(|(x, y)| x + y).collect();
                let nb: Vec<C64> = b.iter().zip(&db).map(|(x, y)| x + y).collect();
                let r = self.submult_ratio(&na, &nb);
                if r > best {
                    best = r;
                    a = na;
                    b = nb;
                    if best > 1.0 + tol {
                        return Err(AlgebraError::NormNotSubmultiplicative { a, b, ratio: best });
                    }
                } else {
                    step = (step * 0.97).max(1e-3);
                }
            }
        }
        Ok(())
    }

    /// Element with the given coordinates.
    pub fn element(self: &Arc<Self>, coords: Vec<C64>) -> Result<Element, AlgebraError> {
        if coords.len() != self.dim {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.dim,
                got: coords.len(),
            });
        }
        Ok(Element {
            algebra: Arc::clone(self),
            coords,
        })
    }

    pub fn unit(self: &Arc<Self>) -> Element {
        Element {
            algebra: Arc::clone(self),
            coords: self.unit.clone(),
        }
    }

    pub fn zero(self: &Arc<Self>) -> Element {
        Element {
            algebra: Arc::clone(self),
            coords: vec![ZERO; self.dim],
        }
    }

    pub fn basis(self: &Arc<Self>, k: usize) -> Element {
        let mut coords = vec![ZERO; self.dim];
        coords[k] = ONE;
        Element {
            algebra: Arc::clone(self),
            coords,
        }
    }
}

/// A coordinate vector tied to its algebra.
#[derive(Clone)]
pub struct Element {
    algebra: Arc<Algebra>,
    coords: Vec<C64>,
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", self.algebra.name, self.coords)
    }
}

impl Element {
    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn coords(&self) -> &[C64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<C64> {
        self.coords
    }

    pub fn same_algebra(&self, other: &Element) -> bool {
        Arc::ptr_eq(&self.algebra, &other.algebra)
    }

    /// Same algebra, new coordinates.
    pub fn with_coords(&self, coords: Vec<C64>) -> Element {
        assert_eq!(coords.len(), self.algebra.dim, "coordinate length");
        Element {
            algebra: Arc::clone(&self.algebra),
            coords,
        }
    }

    pub fn mul(&self, other: &Element) -> Result<Element, AlgebraError> {
        if !self.same_algebra(other) {
            return Err(AlgebraError::AlgebraMismatch);
        }
        Ok(self.with_coords(self.algebra.mul_coords(&self.coords, &other.coords)))
    }

    pub fn regular_rep(&self) -> CMatrix {
        self.algebra.regular_rep_coords(&self.coords)
    }

    pub fn norm(&self) -> f64 {
        self.algebra.norm_coords(&self.coords)
    }

    pub fn dist(&self, other: &Element) -> f64 {
        (self - other).norm()
    }

    pub fn scale(&self, s: C64) -> Element {
        self.with_coords(self.coords.iter().map(|z| z * s).collect())
    }

    pub fn scale_real(&self, s: f64) -> Element {
        self.with_coords(self.coords.iter().map(|z| z * s).collect())
    }

    /// `self + s e`.
    pub fn add_unit(&self, s: C64) -> Element {
        self.with_coords(
            self.coords
                .iter()
                .zip(&self.algebra.unit)
                .map(|(z, u)| z + s * u)
                .collect(),
        )
    }

    pub fn conj_coords(&self) -> Element {
        self.with_coords(self.coords.iter().map(|z| z.conj()).collect())
    }

    pub fn max_abs_coord(&self) -> f64 {
        linalg::max_abs(&self.coords)
    }
}

fn zip_with(a: &Element, b: &Element, f: impl Fn(C64, C64) -> C64) -> Element {
    assert!(a.same_algebra(b), "elements belong to different algebras");
    a.with_coords(a.coords.iter().zip(&b.coords).map(|(x, y)| f(*x, *y)).collect())
}

impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        zip_with(self, rhs, |x, y| x + y)
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        zip_with(self, rhs, |x, y| x - y)
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.with_coords(self.coords.iter().map(|z| -z).collect())
    }
}

impl Add for Element {
    type Output = Element;
    fn add(self, rhs: Element) -> Element {
        &self + &rhs
    }
}

impl Sub for Element {
    type Output = Element;
    fn sub(self, rhs: Element) -> Element {
        &self - &rhs
    }
}
