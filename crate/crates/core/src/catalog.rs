//! Concrete algebras, maps and scenario descriptors.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{validate_algebra, Algebra, AlgebraError, AlgebraSpec, Element, NormRule, Tolerances};
use crate::isometry::{Ball, Domain, EngineError, MapFlags, MapFn, PartialIsometry};
use crate::linalg::{self, CMatrix, C64, ONE, ZERO};
use crate::radical;
use crate::sampling::Sampler;
use crate::spectral::SubgroupDescriptor;

pub use crate::classify::Form;

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("incompatible scenario: {0}")]
    IncompatibleSpec(String),
    #[error("algebra failed validation: {0}")]
    Algebra(#[from] AlgebraError),
    #[error("fixture `{name}` failed its self-check (residual {residual:.3e})")]
    SelfCheckFailed { name: String, residual: f64 },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

fn matrix_unit(n: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    m[(i, j)] = ONE;
    m
}

fn matrix_constants(n: usize) -> Vec<C64> {
    let d = n * n;
    let mut c = vec![ZERO; d * d * d];
    // E_ij E_jl = E_il
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                let a = i * n + j;
                let b = j * n + l;
                let k = i * n + l;
                c[(a * d + b) * d + k] = ONE;
            }
        }
    }
    c
}

fn matrix_unit_coords(n: usize) -> Vec<C64> {
    let mut u = vec![ZERO; n * n];
    for i in 0..n {
        u[i * n + i] = ONE;
    }
    u
}

fn matrix_spec(n: usize, embedding: Vec<CMatrix>, name: String) -> AlgebraSpec {
    AlgebraSpec {
        name,
        dim: n * n,
        structure_constants: matrix_constants(n),
        unit: matrix_unit_coords(n),
        norm_rule: NormRule::MatrixOperator,
        embedding: Some(embedding),
        connected_invertible_group: true,
    }
}

/// `M_n` with basis `E_ij` at index `i * n + j` and the spectral norm.
pub fn make_matrix_algebra(n: usize) -> Arc<Algebra> {
    assert!(n >= 1, "n must be positive");
    let emb = (0..n * n).map(|k| matrix_unit(n, k / n, k % n)).collect();
    validate_algebra(matrix_spec(n, emb, format!("M{n}")), &Tolerances::default()).expect("matrix algebra is valid")
}

/// `M_n` normed by `X -> ||V^{-1} X V||`.
pub fn make_matrix_algebra_transported(n: usize, v: &CMatrix) -> Result<Arc<Algebra>, CatalogError> {
    let v_inv = v
        .clone()
        .try_inverse()
        .ok_or_else(|| CatalogError::IncompatibleSpec("transport matrix is singular".into()))?;
    let emb = (0..n * n).map(|k| &v_inv * matrix_unit(n, k / n, k % n) * v).collect();
    Ok(validate_algebra(
        matrix_spec(n, emb, format!("M{n}/transported")),
        &Tolerances::default(),
    )?)
}

fn function_constants(k: usize) -> Vec<C64> {
    let mut c = vec![ZERO; k * k * k];
    for i in 0..k {
        c[(i * k + i) * k + i] = ONE;
    }
    c
}

/// `C(X)` for `|X| = k`, sup norm, unit `(1, ..., 1)`.
pub fn make_function_algebra(k: usize) -> Arc<Algebra> {
    assert!(k >= 1, "k must be positive");
    let spec = AlgebraSpec {
        name: format!("C{k}"),
        dim: k,
        structure_constants: function_constants(k),
        unit: vec![ONE; k],
        norm_rule: NormRule::Sup,
        embedding: None,
        connected_invertible_group: true,
    };
    validate_algebra(spec, &Tolerances::default()).expect("function algebra is valid")
}

/// `C^2` under the regular-representation norm, declared without a
/// certificate for its invertible group.
pub fn custom_regular_algebra_c2() -> Arc<Algebra> {
    let spec = AlgebraSpec {
        name: "custom-C2".into(),
        dim: 2,
        structure_constants: function_constants(2),
        unit: vec![ONE; 2],
        norm_rule: NormRule::RegularRepOperator,
        embedding: None,
        connected_invertible_group: false,
    };
    validate_algebra(spec, &Tolerances::default()).expect("valid")
}

/// Index of each basis element `[I, E12, E13, E23]` as a 3x3 matrix unit.
const DAME_UNITS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

fn dame_embedding() -> Vec<CMatrix> {
    let mut emb = vec![CMatrix::identity(3, 3)];
    emb.extend(DAME_UNITS.iter().map(|&(i, j)| matrix_unit(3, i, j)));
    emb
}

/// Structure constants on `[I, E12, E13, E23]`; `matrix_product` selects
/// between the zero product and the matrix product on the nilpotent part.
fn dame_constants(matrix_product: bool) -> Vec<C64> {
    let d = 4;
    let mut c = vec![ZERO; d * d * d];
    for k in 0..d {
        c[k * d + k] = ONE; // I * e_k
        c[(k * d) * d + k] = ONE; // e_k * I
    }
    if matrix_product {
        // E12 E23 = E13
        c[(d + 3) * d + 2] = ONE;
    }
    c
}

fn dame_spec(name: &str, matrix_product: bool, norm_rule: NormRule) -> AlgebraSpec {
    AlgebraSpec {
        name: name.into(),
        dim: 4,
        structure_constants: dame_constants(matrix_product),
        unit: vec![ONE, ZERO, ZERO, ZERO],
        norm_rule,
        embedding: Some(dame_embedding()),
        // alpha I + m is invertible iff alpha != 0; C* x C^3 is connected.
        connected_invertible_group: true,
    }
}

/// Records why the dame pair is not normed by the operator norm.
#[derive(Debug, Clone)]
pub struct NormFallback {
    pub refuted_ratio: f64,
    pub witness: (Vec<C64>, Vec<C64>),
    pub rule: NormRule,
}

/// The commutative unitization `A` (zero product on the radical) and the
/// upper-triangular algebra `B`, identical as normed spaces.
#[derive(Debug, Clone)]
pub struct DamePair {
    pub a: Arc<Algebra>,
    pub b: Arc<Algebra>,
    pub fallback: Option<NormFallback>,
}

/// Both dame algebras under the 3x3 operator norm; fails if the audit
/// refutes submultiplicativity for either.
pub fn dame_pair_with_operator_norm() -> Result<(Arc<Algebra>, Arc<Algebra>), AlgebraError> {
    let tol = Tolerances::default();
    let a = validate_algebra(dame_spec("dame-A", false, NormRule::MatrixOperator), &tol)?;
    let b = validate_algebra(dame_spec("dame-B", true, NormRule::MatrixOperator), &tol)?;
    Ok((a, b))
}

/// The dame pair under the operator norm when that is an algebra norm for
/// both, and under `|alpha| + ||m||_op` otherwise.
pub fn make_dame_pair() -> DamePair {
    match dame_pair_with_operator_norm() {
        Ok((a, b)) => DamePair { a, b, fallback: None },
        Err(AlgebraError::NormNotSubmultiplicative { a: x, b: y, ratio }) => {
            let tol = Tolerances::default();
            let rule = NormRule::UnitizationSum;
            let a = validate_algebra(dame_spec("dame-A", false, rule), &tol).expect("unitization norm is submultiplicative");
            let b = validate_algebra(dame_spec("dame-B", true, rule), &tol).expect("unitization norm is submultiplicative");
            DamePair {
                a,
                b,
                fallback: Some(NormFallback {
                    refuted_ratio: ratio,
                    witness: (x, y),
                    rule,
                }),
            }
        }
        Err(e) => panic!("dame algebras failed validation: {e}"),
    }
}

/// Coordinates of a matrix in `M_n` (row-major entries).
pub fn matrix_to_element(alg: &Arc<Algebra>, m: &CMatrix) -> Element {
    let n = m.nrows();
    let coords = (0..n * n).map(|k| m[(k / n, k % n)]).collect();
    alg.element(coords).expect("dimension")
}

pub fn element_to_matrix(a: &Element) -> CMatrix {
    let n = (a.algebra().dim() as f64).sqrt().round() as usize;
    CMatrix::from_fn(n, n, |i, j| a.coords()[i * n + j])
}

fn full() -> Domain {
    Domain::Subgroup(SubgroupDescriptor::full())
}

const GROUP_MAP: MapFlags = MapFlags {
    claims_group_homomorphism: true,
    claims_unital: true,
};

pub fn identity_map(alg: &Arc<Algebra>) -> PartialIsometry {
    let f: MapFn = Arc::new(|a: &Element| a.clone());
    PartialIsometry::new("identity", Arc::clone(alg), Arc::clone(alg), full(), full(), f.clone())
        .with_inverse(f)
        .with_flags(GROUP_MAP)
}

/// `b -> b + u`. Maps the invertible group onto itself when `u` is radical.
pub fn translation_map(alg: &Arc<Algebra>, u: &Element) -> PartialIsometry {
    let (u1, u2) = (u.clone(), u.clone());
    PartialIsometry::new(
        "translation_by_radical",
        Arc::clone(alg),
        Arc::clone(alg),
        full(),
        full(),
        Arc::new(move |a: &Element| a + &u1),
    )
    .with_inverse(Arc::new(move |b: &Element| b - &u2))
}

/// Target norm of a similarity map.
#[derive(Debug, Clone)]
pub enum TargetNorm {
    Spectral,
    /// `X -> ||U^{-1} X U||`; turns any similarity into an isometry.
    Transported,
}

/// `M -> U phi(M) U^{-1}` on `M_n`, `phi` given by the form.
pub fn similarity_map(u: &CMatrix, form: Form, norm: TargetNorm) -> PartialIsometry {
    let n = u.nrows();
    let source = make_matrix_algebra(n);
    let target = match norm {
        TargetNorm::Spectral => make_matrix_algebra(n),
        TargetNorm::Transported => make_matrix_algebra_transported(n, u).expect("invertible U"),
    };
    similarity_between(&source, &target, u, form).expect("valid similarity")
}

/// Similarity map between two given copies of `M_n`.
pub fn similarity_between(
    source: &Arc<Algebra>,
    target: &Arc<Algebra>,
    u: &CMatrix,
    form: Form,
) -> Result<PartialIsometry, CatalogError> {
    let n = u.nrows();
    if source.dim() != n * n || target.dim() != n * n || form == Form::NoFormFits {
        return Err(CatalogError::IncompatibleSpec("similarity needs M_n on both sides".into()));
    }
    let u_inv = u
        .clone()
        .try_inverse()
        .ok_or_else(|| CatalogError::IncompatibleSpec("U is singular".into()))?;
    let (u1, ui1, t1) = (u.clone(), u_inv.clone(), Arc::clone(target));
    let (u2, ui2, s2) = (u.clone(), u_inv, Arc::clone(source));
    let forward: MapFn = Arc::new(move |a: &Element| {
        matrix_to_element(&t1, &(&u1 * form.phi(&element_to_matrix(a)) * &ui1))
    });
    let inverse: MapFn = Arc::new(move |b: &Element| {
        matrix_to_element(&s2, &form.phi(&(&ui2 * element_to_matrix(b) * &u2)))
    });
    let flags = MapFlags {
        claims_group_homomorphism: matches!(form, Form::SimilarityLinear | Form::SimilarityConjugate),
        claims_unital: true,
    };
    Ok(PartialIsometry::new(
        format!("similarity/{}", form.label()),
        Arc::clone(source),
        Arc::clone(target),
        full(),
        full(),
        forward,
    )
    .with_inverse(inverse)
    .with_flags(flags))
}

/// Entrywise conjugation of coordinates. Isometric and multiplicative for
/// algebras with real structure constants and a conjugation-invariant norm.
pub fn entrywise_conjugation_map(alg: &Arc<Algebra>) -> PartialIsometry {
    let f: MapFn = Arc::new(|a: &Element| a.conj_coords());
    PartialIsometry::new("entrywise_conjugation", Arc::clone(alg), Arc::clone(alg), full(), full(), f.clone())
        .with_inverse(f)
        .with_flags(GROUP_MAP)
}

/// `f -> (w_i f_{perm(i)})_i` on `C(X)` with unimodular weights.
pub fn swap_map(alg: &Arc<Algebra>, perm: &[usize], weights: &[C64]) -> Result<PartialIsometry, CatalogError> {
    let k = alg.dim();
    let mut seen = vec![false; k];
    if perm.len() != k || weights.len() != k || perm.iter().any(|&p| p >= k || std::mem::replace(&mut seen[p], true)) {
        return Err(CatalogError::IncompatibleSpec("perm must be a permutation of the points".into()));
    }
    if weights.iter().any(|w| (w.norm() - 1.0).abs() > 1e-12) {
        return Err(CatalogError::IncompatibleSpec("weights must be unimodular".into()));
    }
    let mut inv = vec![0; k];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    let (p1, w1) = (perm.to_vec(), weights.to_vec());
    let (w2, inv2) = (weights.to_vec(), inv);
    let forward: MapFn = Arc::new(move |f: &Element| f.with_coords((0..k).map(|i| w1[i] * f.coords()[p1[i]]).collect()));
    // g_i = w_i f_{p(i)}  =>  f_j = g_{p^{-1}(j)} / w_{p^{-1}(j)}
    let inverse: MapFn =
        Arc::new(move |g: &Element| g.with_coords((0..k).map(|j| g.coords()[inv2[j]] / w2[inv2[j]]).collect()));
    let unweighted = weights.iter().all(|w| (w - ONE).norm() <= 1e-15);
    Ok(PartialIsometry::new("swap_coordinates", Arc::clone(alg), Arc::clone(alg), full(), full(), forward)
        .with_inverse(inverse)
        .with_flags(MapFlags {
            claims_group_homomorphism: unweighted,
            claims_unital: unweighted,
        }))
}

/// The identity on coordinates, from dame `A` to dame `B`.
pub fn dame_identity_map(pair: &DamePair) -> PartialIsometry {
    let (b, a) = (Arc::clone(&pair.b), Arc::clone(&pair.a));
    PartialIsometry::new(
        "dame_identity",
        Arc::clone(&pair.a),
        Arc::clone(&pair.b),
        full(),
        full(),
        Arc::new(move |x: &Element| b.element(x.coords().to_vec()).expect("dim")),
    )
    .with_inverse(Arc::new(move |y: &Element| a.element(y.coords().to_vec()).expect("dim")))
    .with_flags(MapFlags {
        claims_group_homomorphism: false,
        claims_unital: true,
    })
}

/// On a dame algebra: `x -> D x D^{-1} + u` for `D = diag(e^{i phases})`
/// and radical `u`.
pub fn diagonal_conjugation_translation(alg: &Arc<Algebra>, phases: [f64; 3], u: &Element) -> PartialIsometry {
    let d: Vec<C64> = phases.iter().map(|p| C64::from_polar(1.0, *p)).collect();
    let factors: Vec<C64> = std::iter::once(ONE)
        .chain(DAME_UNITS.iter().map(|&(i, j)| d[i] / d[j]))
        .collect();
    let (f1, f2) = (factors.clone(), factors);
    let (u1, u2) = (u.clone(), u.clone());
    PartialIsometry::new(
        "diagonal_conjugation_translation",
        Arc::clone(alg),
        Arc::clone(alg),
        full(),
        full(),
        Arc::new(move |x: &Element| &x.with_coords(x.coords().iter().zip(&f1).map(|(z, f)| z * f).collect()) + &u1),
    )
    .with_inverse(Arc::new(move |y: &Element| {
        let z = y - &u2;
        z.with_coords(z.coords().iter().zip(&f2).map(|(z, f)| z / f).collect())
    }))
}

/// Real-affine map `a -> offset + sum_k Re(a_k) images[2k] + Im(a_k) images[2k+1]`.
pub fn affine_table_map(
    source: &Arc<Algebra>,
    target: &Arc<Algebra>,
    offset: &[C64],
    images: &[Vec<C64>],
) -> Result<PartialIsometry, CatalogError> {
    let (ds, dt) = (source.dim(), target.dim());
    if images.len() != 2 * ds || images.iter().any(|v| v.len() != dt) || offset.len() != dt {
        return Err(CatalogError::IncompatibleSpec(format!(
            "custom table needs {} images of length {dt} and an offset of length {dt}",
            2 * ds
        )));
    }
    let mut m = linalg::RMatrix::zeros(2 * dt, 2 * ds);
    for (col, img) in images.iter().enumerate() {
        m.set_column(col, &linalg::realify(img));
    }
    let off = linalg::realify(offset);
    let (m1, off1, t1) = (m.clone(), off.clone(), Arc::clone(target));
    let forward: MapFn = Arc::new(move |a: &Element| {
        t1.element(linalg::complexify(&(&m1 * linalg::realify(a.coords()) + &off1)))
            .expect("dim")
    });
    let mut t = PartialIsometry::new("custom_table", Arc::clone(source), Arc::clone(target), full(), full(), forward);
    if let Some(m_inv) = m.try_inverse() {
        let s2 = Arc::clone(source);
        t = t.with_inverse(Arc::new(move |b: &Element| {
            s2.element(linalg::complexify(&(&m_inv * (linalg::realify(b.coords()) - &off))))
                .expect("dim")
        }));
    }
    Ok(t)
}

/// Centre of the second ball of the hoo example.
pub const HOO_FAR_CENTRE: f64 = 10.0;

/// Negation of the x-coordinate on the unit ball about 0, identity on the
/// unit ball about `(0, 10)`, in `C({x, y})`.
pub fn make_hoo_on(c2: &Arc<Algebra>) -> Result<PartialIsometry, CatalogError> {
    if c2.dim() != 2 || c2.norm_rule() != NormRule::Sup {
        return Err(CatalogError::IncompatibleSpec("hoo requires C({x,y})".into()));
    }
    let f0 = c2.element(vec![ZERO, C64::new(HOO_FAR_CENTRE, 0.0)]).expect("dim");
    let balls = vec![
        Ball {
            center: c2.zero(),
            radius: 1.0,
        },
        Ball { center: f0, radius: 1.0 },
    ];
    let map: MapFn = Arc::new(|f: &Element| {
        if f.norm() < 1.0 {
            f.with_coords(vec![-f.coords()[0], f.coords()[1]])
        } else {
            f.clone()
        }
    });
    Ok(PartialIsometry::new(
        "hoo",
        Arc::clone(c2),
        Arc::clone(c2),
        Domain::Balls(balls.clone()),
        Domain::Balls(balls),
        map.clone(),
    )
    .with_inverse(map))
}

/// The hoo example on a fresh `C({x, y})`, self-checked on `10^4` pairs.
pub fn make_hoo_scenario() -> PartialIsometry {
    let t = make_hoo_on(&make_function_algebra(2)).expect("C2");
    let check = t.self_check(10_000, 0x400).expect("ball domains always sample");
    assert!(check.isometry_residual <= 1e-12, "hoo map must be isometric");
    t
}

/// Fails unless `t` is isometric to `tol` on `pairs` sampled pairs and its
/// inverse handle (if any) inverts it.
pub fn self_checked(t: PartialIsometry, pairs: usize, seed: u64, tol: f64) -> Result<PartialIsometry, CatalogError> {
    let check = t.self_check(pairs, seed)?;
    let residual = check.isometry_residual.max(check.inverse_residual.unwrap_or(0.0));
    if !(residual <= tol) || check.range_violations > 0 {
        return Err(CatalogError::SelfCheckFailed {
            name: t.name.clone(),
            residual,
        });
    }
    Ok(t)
}

/// Algebras exercised by the catalog-wide property checks.
pub fn catalog_algebras() -> Vec<Arc<Algebra>> {
    let pair = make_dame_pair();
    vec![
        make_matrix_algebra(2),
        make_matrix_algebra(3),
        make_function_algebra(1),
        make_function_algebra(2),
        make_function_algebra(3),
        pair.a,
        pair.b,
    ]
}

/// A random radical element of a dame algebra.
pub fn random_dame_radical(alg: &Arc<Algebra>, s: &mut Sampler) -> Element {
    let mut coords = vec![ZERO];
    coords.extend((0..3).map(|_| s.complex()));
    alg.element(coords).expect("dim")
}

/// Twenty isometries between open subgroups: identities, unitary
/// similarities, weighted coordinate swaps and radical translations.
pub fn catalog_isometries(seed: u64) -> Vec<PartialIsometry> {
    let mut s = Sampler::new(seed);
    let pair = make_dame_pair();
    let mut out = vec![
        identity_map(&make_matrix_algebra(2)),
        identity_map(&make_matrix_algebra(3)),
        identity_map(&make_function_algebra(2)),
        identity_map(&make_function_algebra(3)),
        identity_map(&pair.b),
    ];
    for n in [2, 3] {
        for _ in 0..2 {
            out.push(similarity_map(&s.unitary(n), Form::SimilarityLinear, TargetNorm::Spectral));
        }
        out.push(similarity_map(&s.unitary(n), Form::TransposeConjugate, TargetNorm::Spectral));
    }
    for k in [2, 3] {
        let alg = make_function_algebra(k);
        for shift in 1..=2 {
            let perm: Vec<usize> = (0..k).map(|i| (i + shift) % k).collect();
            let weights: Vec<C64> = (0..k).map(|_| C64::from_polar(1.0, s.uniform(0.0, 6.28))).collect();
            out.push(swap_map(&alg, &perm, &weights).expect("valid swap"));
        }
    }
    for _ in 0..3 {
        let u = random_dame_radical(&pair.b, &mut s);
        out.push(translation_map(&pair.b, &u));
    }
    let u = random_dame_radical(&pair.b, &mut s);
    let phases = [s.uniform(0.0, 6.28), s.uniform(0.0, 6.28), s.uniform(0.0, 6.28)];
    out.push(diagonal_conjugation_translation(&pair.b, phases, &u));
    out.push(entrywise_conjugation_map(&make_matrix_algebra(2)));
    out
}

/// `{c} U {c + s v}` for `s` on `m` equally spaced rays at each radius,
/// with `m` even so the set is symmetric about `c`. Returns the points
/// (`c` first) and the permutation induced by rotating `s` one step, which
/// is distance-preserving whenever `||v|| = 1`.
pub fn orbit_symmetric_set(c: &Element, v: &Element, radii: &[f64], m: usize, phase: f64) -> (Vec<Element>, Vec<usize>) {
    assert!(m >= 2 && m % 2 == 0, "m must be even");
    let mut points = vec![c.clone()];
    let mut perm = vec![0];
    for (r_idx, r) in radii.iter().enumerate() {
        for j in 0..m {
            let theta = phase + std::f64::consts::TAU * j as f64 / m as f64;
            points.push(c + &v.scale(C64::from_polar(*r, theta)));
            perm.push(1 + r_idx * m + (j + 1) % m);
        }
    }
    (points, perm)
}

/// `L = {c, c + v}` in `C({x, y})`: not symmetric about `c`.
pub fn asymmetric_counterexample() -> (Vec<Element>, Element, Vec<usize>) {
    let c2 = make_function_algebra(2);
    let c = c2.element(vec![ONE, C64::new(2.0, 0.0)]).expect("dim");
    let v = c2.element(vec![C64::new(0.5, 0.0), C64::new(0.0, 0.3)]).expect("dim");
    (vec![c.clone(), &c + &v], c, vec![0, 1])
}

// ---------------------------------------------------------------------------
// Scenario descriptors

/// Algebra section of a scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlgebraDescriptor {
    Matrix {
        n: usize,
        /// Rows of `V` for the norm `||V^{-1} X V||`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        transport: Option<Vec<Vec<C64>>>,
    },
    Function {
        k: usize,
    },
    DameA,
    DameB,
    Custom {
        name: String,
        dim: usize,
        structure_constants: Vec<C64>,
        unit: Vec<C64>,
        norm_rule: NormRule,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        embedding: Option<Vec<Vec<Vec<C64>>>>,
        #[serde(default)]
        connected_invertible_group: bool,
    },
}

/// Map section of a scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapKind {
    Identity,
    TranslationByRadical {
        u: Vec<C64>,
    },
    Similarity {
        u: Vec<Vec<C64>>,
        form: Form,
    },
    Hoo,
    DameIdentity,
    SwapCoordinates {
        perm: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<C64>>,
    },
    EntrywiseConjugation,
    DiagonalConjugationTranslation {
        phases: [f64; 3],
        u: Vec<C64>,
    },
    /// Real-affine map from images of the realified basis vectors.
    CustomTable {
        offset: Vec<C64>,
        images: Vec<Vec<C64>>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioTolerances {
    pub structural: f64,
    pub analytic: f64,
    pub engine: f64,
}

impl Default for ScenarioTolerances {
    fn default() -> Self {
        ScenarioTolerances {
            structural: 1e-12,
            analytic: 1e-9,
            engine: 1e-8,
        }
    }
}

/// Flags a scenario may declare about its map or algebras.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeclaredFlags {
    pub claims_group_homomorphism: Option<bool>,
    pub source_commutative: Option<bool>,
    pub target_semisimple: Option<bool>,
}

/// In-memory form of a scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub id: String,
    pub source_algebra: AlgebraDescriptor,
    pub target_algebra: AlgebraDescriptor,
    pub map: MapKind,
    pub checks: Vec<String>,
    /// Expected verdict per check name.
    #[serde(default)]
    pub expect: BTreeMap<String, String>,
    #[serde(default)]
    pub tolerances: ScenarioTolerances,
    #[serde(default)]
    pub flags: DeclaredFlags,
    #[serde(default)]
    pub seed: u64,
}

fn rows_to_matrix(rows: &[Vec<C64>]) -> Result<CMatrix, CatalogError> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(CatalogError::IncompatibleSpec("matrix must be square and non-empty".into()));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// Builds (and validates) the algebra a descriptor names.
pub fn build_algebra(desc: &AlgebraDescriptor, tol: &ScenarioTolerances) -> Result<Arc<Algebra>, CatalogError> {
    match desc {
        AlgebraDescriptor::Matrix { n, transport: None } if *n >= 1 => Ok(make_matrix_algebra(*n)),
        AlgebraDescriptor::Matrix { n, transport: Some(v) } if *n >= 1 => {
            let v = rows_to_matrix(v)?;
            if v.nrows() != *n {
                return Err(CatalogError::IncompatibleSpec("transport has wrong size".into()));
            }
            make_matrix_algebra_transported(*n, &v)
        }
        AlgebraDescriptor::Function { k } if *k >= 1 => Ok(make_function_algebra(*k)),
        AlgebraDescriptor::Matrix { .. } | AlgebraDescriptor::Function { .. } => {
            Err(CatalogError::IncompatibleSpec("sizes must be positive".into()))
        }
        AlgebraDescriptor::DameA => Ok(make_dame_pair().a),
        AlgebraDescriptor::DameB => Ok(make_dame_pair().b),
        AlgebraDescriptor::Custom {
            name,
            dim,
            structure_constants,
            unit,
            norm_rule,
            embedding,
            connected_invertible_group,
        } => {
            let embedding = embedding
                .as_ref()
                .map(|mats| mats.iter().map(|m| rows_to_matrix(m)).collect::<Result<Vec<_>, _>>())
                .transpose()?;
            let spec = AlgebraSpec {
                name: name.clone(),
                dim: *dim,
                structure_constants: structure_constants.clone(),
                unit: unit.clone(),
                norm_rule: *norm_rule,
                embedding,
                connected_invertible_group: *connected_invertible_group,
            };
            Ok(validate_algebra(
                spec,
                &Tolerances {
                    structural: tol.structural,
                    analytic: tol.analytic,
                },
            )?)
        }
    }
}

/// Pairs with the seed of the 10^3-pair fixture audit.
const FIXTURE_AUDIT_PAIRS: usize = 1000;

/// Builds the scenario's map. Maps that are isometric by construction are
/// audited on 10^3 pairs before they are returned.
pub fn make_map(spec: &ScenarioSpec) -> Result<PartialIsometry, CatalogError> {
    let tol = &spec.tolerances;
    let (source, target) = match (&spec.source_algebra, &spec.target_algebra) {
        // The dame pair is built once so both sides share one construction.
        (AlgebraDescriptor::DameA, AlgebraDescriptor::DameB) => {
            let pair = make_dame_pair();
            (pair.a, pair.b)
        }
        (s, t) if s == t && !matches!(s, AlgebraDescriptor::Matrix { transport: Some(_), .. }) => {
            let a = build_algebra(s, tol)?;
            (Arc::clone(&a), a)
        }
        (s, t) => (build_algebra(s, tol)?, build_algebra(t, tol)?),
    };
    let same = Arc::ptr_eq(&source, &target);
    let need_same = |what: &str| {
        if same {
            Ok(())
        } else {
            Err(CatalogError::IncompatibleSpec(format!("{what} needs identical source and target")))
        }
    };
    let (mut t, audited) = match &spec.map {
        MapKind::Identity => {
            need_same("identity")?;
            (identity_map(&source), true)
        }
        MapKind::TranslationByRadical { u } => {
            need_same("translation")?;
            let u = source
                .element(u.clone())
                .map_err(|e| CatalogError::IncompatibleSpec(e.to_string()))?;
            if radical::radical_distance(&u) > tol.analytic {
                return Err(CatalogError::IncompatibleSpec("translation vector is not radical".into()));
            }
            (translation_map(&source, &u), true)
        }
        MapKind::Similarity { u, form } => {
            let u = rows_to_matrix(u)?;
            let unitary = (u.adjoint() * &u - CMatrix::identity(u.nrows(), u.nrows())).norm() <= 1e-12;
            let transported = matches!(spec.target_algebra, AlgebraDescriptor::Matrix { transport: Some(_), .. });
            (similarity_between(&source, &target, &u, *form)?, unitary || transported)
        }
        MapKind::Hoo => {
            need_same("hoo")?;
            (make_hoo_on(&source)?, true)
        }
        MapKind::DameIdentity => {
            if !(spec.source_algebra == AlgebraDescriptor::DameA && spec.target_algebra == AlgebraDescriptor::DameB) {
                return Err(CatalogError::IncompatibleSpec("dame_identity requires the dame pair".into()));
            }
            let pair = DamePair {
                a: Arc::clone(&source),
                b: Arc::clone(&target),
                fallback: None,
            };
            (dame_identity_map(&pair), true)
        }
        MapKind::SwapCoordinates { perm, weights } => {
            need_same("swap_coordinates")?;
            if source.norm_rule() != NormRule::Sup {
                return Err(CatalogError::IncompatibleSpec("swap_coordinates requires C(X)".into()));
            }
            let w = weights.clone().unwrap_or_else(|| vec![ONE; source.dim()]);
            (swap_map(&source, perm, &w)?, true)
        }
        MapKind::EntrywiseConjugation => {
            need_same("entrywise_conjugation")?;
            (entrywise_conjugation_map(&source), true)
        }
        MapKind::DiagonalConjugationTranslation { phases, u } => {
            need_same("diagonal_conjugation_translation")?;
            if !matches!(spec.source_algebra, AlgebraDescriptor::DameA | AlgebraDescriptor::DameB) {
                return Err(CatalogError::IncompatibleSpec("requires a dame algebra".into()));
            }
            let u = source
                .element(u.clone())
                .map_err(|e| CatalogError::IncompatibleSpec(e.to_string()))?;
            if radical::radical_distance(&u) > tol.analytic {
                return Err(CatalogError::IncompatibleSpec("translation vector is not radical".into()));
            }
            (diagonal_conjugation_translation(&source, *phases, &u), true)
        }
        MapKind::CustomTable { offset, images } => (affine_table_map(&source, &target, offset, images)?, false),
    };
    if let Some(h) = spec.flags.claims_group_homomorphism {
        t.flags.claims_group_homomorphism = h;
    }
    if audited {
        t = self_checked(t, FIXTURE_AUDIT_PAIRS, spec.seed ^ 0xF1C5, tol.analytic)?;
    }
    Ok(t)
}
