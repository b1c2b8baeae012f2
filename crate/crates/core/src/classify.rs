//! Multiplicativity analysis and the four-form classification of isometries
//! of `M_n^{-1}`.

use std::sync::Arc;

use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::algebra::{Algebra, Element};
use crate::isometry::{self, Domain, EngineConfig, EngineError, ExtensionReport, ExtensionVerdict, MapFn, PartialIsometry};
use crate::linalg::{self, CMatrix, C64};
use crate::radical;
use crate::sampling::Sampler;
use crate::spectral::{self, SpectralError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifyError {
    #[error("more than one form fits: {0:?}")]
    AmbiguousForm(Vec<Form>),
    #[error("recovered U is singular (condition number {0:.3e})")]
    SingularRecoveredU(f64),
    #[error("only {found} of {wanted} valid pairs found")]
    SamplerExhausted { found: usize, wanted: usize },
    #[error("invalid input: {0}")]
    BadInput(String),
    #[error("map is not a group homomorphism (residual {residual:.3e})")]
    HomomorphismClaimFalse { residual: f64, witness: Vec<Vec<C64>> },
    #[error("declared flag contradicts computation: {0}")]
    FlagContradiction(String),
    #[error("hypothesis not declared: {0}")]
    HypothesisNotDeclared(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// The four shapes `S(M) = S(E) U phi(M) U^{-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Form {
    SimilarityLinear,
    TransposeLinear,
    SimilarityConjugate,
    TransposeConjugate,
    NoFormFits,
}

impl Form {
    pub const HYPOTHESES: [Form; 4] = [
        Form::SimilarityLinear,
        Form::TransposeLinear,
        Form::SimilarityConjugate,
        Form::TransposeConjugate,
    ];

    /// `phi(M)`: identity, transpose, entrywise conjugate or conjugate transpose.
    pub fn phi(self, m: &CMatrix) -> CMatrix {
        match self {
            Form::SimilarityLinear | Form::NoFormFits => m.clone(),
            Form::TransposeLinear => m.transpose(),
            Form::SimilarityConjugate => linalg::conj(m),
            Form::TransposeConjugate => m.adjoint(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Form::SimilarityLinear => "SimilarityLinear",
            Form::TransposeLinear => "TransposeLinear",
            Form::SimilarityConjugate => "SimilarityConjugate",
            Form::TransposeConjugate => "TransposeConjugate",
            Form::NoFormFits => "NoFormFits",
        }
    }

    pub fn from_label(s: &str) -> Option<Form> {
        Form::HYPOTHESES
            .into_iter()
            .chain([Form::NoFormFits])
            .find(|f| f.label() == s)
    }
}

pub fn serialize_matrix<S: Serializer>(m: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
    let rows: Vec<Vec<C64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
    rows.serialize(s)
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationResult {
    pub form: Form,
    /// Frobenius norm 1, first non-negligible entry positive real.
    #[serde(serialize_with = "serialize_matrix")]
    pub u: CMatrix,
    /// `S(E)`.
    #[serde(serialize_with = "serialize_matrix")]
    pub scale: CMatrix,
    pub residual: f64,
    pub condition_number: f64,
    /// Residual of each hypothesis in the order of [`Form::HYPOTHESES`].
    pub hypothesis_residuals: [f64; 4],
}

/// Passing threshold on the normalized smallest singular value.
pub const FORM_THRESHOLD: f64 = 1e-8;

/// Fixes the gauge of a nullspace vector: Frobenius norm 1, first entry
/// above `1e-12` (relative) positive real.
pub fn normalize_u(u: &CMatrix) -> CMatrix {
    let f = u.norm();
    if f == 0.0 {
        return u.clone();
    }
    let u = u.unscale(f);
    let max = u.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
    // Row-major scan.
    let lead = u
        .row_iter()
        .flat_map(|r| r.iter().copied().collect::<Vec<_>>())
        .find(|z| z.norm() > 1e-12 * max)
        .unwrap_or(linalg::ONE);
    let phase = lead.conj() / lead.norm();
    u.map(|z| z * phase)
}

/// Smallest singular value over the largest and the matching right
/// singular vector.
fn smallest_singular(k: &CMatrix) -> (f64, nalgebra::DVector<C64>) {
    let svd = k.clone().svd(false, true);
    let sv = &svd.singular_values;
    let v_t = svd.v_t.expect("requested");
    let (imin, smin) = sv
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, s)| if *s < acc.1 { (i, *s) } else { acc });
    let smax = sv.iter().fold(0.0_f64, |a, s| a.max(*s));
    let v = v_t.row(imin).adjoint();
    (if smax > 0.0 { smin / smax } else { 0.0 }, v)
}

/// Recovers which of the four forms `S` has, and `U`, from samples of
/// `M_n^{-1}`.
pub fn classify_matrix_isometry(
    s: &dyn Fn(&CMatrix) -> CMatrix,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<ClassificationResult, ClassifyError> {
    if n < 2 {
        return Err(ClassifyError::BadInput("n must be at least 2".into()));
    }
    if samples < 2 * n * n {
        return Err(ClassifyError::BadInput(format!("need at least {} samples", 2 * n * n)));
    }
    let scale = s(&CMatrix::identity(n, n));
    let scale_inv = scale
        .clone()
        .try_inverse()
        .ok_or_else(|| ClassifyError::BadInput("S(E) is singular".into()))?;
    let mut sampler = Sampler::new(seed);
    let ms: Vec<CMatrix> = (0..samples).map(|_| sampler.invertible_matrix(n, 1e3)).collect();
    let rs: Vec<CMatrix> = ms.iter().map(|m| &scale_inv * s(m)).collect();

    let id = CMatrix::identity(n, n);
    let n2 = n * n;
    let mut residuals = [0.0; 4];
    let mut vectors = Vec::with_capacity(4);
    for (h, form) in Form::HYPOTHESES.into_iter().enumerate() {
        // vec(R U - U phi(M)) = (I (x) R - phi(M)^T (x) I) vec(U), column-major.
        let mut k = CMatrix::zeros(samples * n2, n2);
        for (i, (m, r)) in ms.iter().zip(&rs).enumerate() {
            let block = linalg::kron(&id, r) - linalg::kron(&form.phi(m).transpose(), &id);
            k.view_mut((i * n2, 0), (n2, n2)).copy_from(&block);
        }
        let (res, v) = smallest_singular(&k);
        residuals[h] = res;
        vectors.push(v);
    }

    let passing: Vec<usize> = (0..4).filter(|&h| residuals[h] <= FORM_THRESHOLD).collect();
    if passing.len() > 1 {
        return Err(ClassifyError::AmbiguousForm(
            passing.iter().map(|&h| Form::HYPOTHESES[h]).collect(),
        ));
    }
    let best = (0..4)
        .min_by(|&a, &b| residuals[a].total_cmp(&residuals[b]))
        .expect("four hypotheses");
    let u = normalize_u(&linalg::unvec_col_major(&vectors[best], n));
    let cond = linalg::condition_number(&u);
    let form = match passing.first() {
        Some(&h) => {
            if !(cond <= 1e12) {
                return Err(ClassifyError::SingularRecoveredU(cond));
            }
            Form::HYPOTHESES[h]
        }
        None => Form::NoFormFits,
    };
    Ok(ClassificationResult {
        form,
        u,
        scale,
        residual: residuals[best],
        condition_number: cond,
        hypothesis_residuals: residuals,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MultVerdict {
    Multiplicative,
    AntiMultiplicative,
    Both,
    Neither,
}

impl MultVerdict {
    pub fn label(self) -> &'static str {
        match self {
            MultVerdict::Multiplicative => "Multiplicative",
            MultVerdict::AntiMultiplicative => "AntiMultiplicative",
            MultVerdict::Both => "Both",
            MultVerdict::Neither => "Neither",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MultiplicativityReport {
    pub mult_residual: f64,
    pub antimult_residual: f64,
    pub mult_witness: Vec<Vec<C64>>,
    pub antimult_witness: Vec<Vec<C64>>,
    pub pairs: usize,
    pub verdict: MultVerdict,
}

/// `max ||T(ab) - T(a)T(b)||` and `max ||T(ab) - T(b)T(a)||` over pairs
/// drawn by `draw` whose product passes `admit`.
pub fn check_multiplicativity(
    map: &dyn Fn(&Element) -> Element,
    target: &Arc<Algebra>,
    draw: &mut dyn FnMut() -> Result<Element, EngineError>,
    admit: &dyn Fn(&Element) -> Result<bool, EngineError>,
    pairs: usize,
    tol: f64,
) -> Result<MultiplicativityReport, ClassifyError> {
    let mut mult = (0.0_f64, Vec::new());
    let mut anti = (0.0_f64, Vec::new());
    let mut found = 0;
    let mut attempts = 0;
    while found < pairs {
        if attempts >= 100 * pairs {
            return Err(ClassifyError::SamplerExhausted { found, wanted: pairs });
        }
        attempts += 1;
        let a = draw()?;
        let b = draw()?;
        let ab = a.mul(&b).expect("same algebra");
        if !admit(&ab)? {
            continue;
        }
        found += 1;
        let (ta, tb, tab) = (map(&a), map(&b), map(&ab));
        let m = tab.dist(&ta.mul(&tb).expect("target"));
        let w = tab.dist(&tb.mul(&ta).expect("target"));
        let pts = || vec![a.coords().to_vec(), b.coords().to_vec()];
        if m > mult.0 || m.is_nan() {
            mult = (m, pts());
        }
        if w > anti.0 || w.is_nan() {
            anti = (w, pts());
        }
    }
    let m_ok = mult.0 <= tol;
    let a_ok = anti.0 <= tol;
    let verdict = match (m_ok, a_ok) {
        (true, true) if target.is_commutative(1e-12) => MultVerdict::Both,
        (true, _) => MultVerdict::Multiplicative,
        (false, true) => MultVerdict::AntiMultiplicative,
        (false, false) => MultVerdict::Neither,
    };
    Ok(MultiplicativityReport {
        mult_residual: mult.0,
        antimult_residual: anti.0,
        mult_witness: mult.1,
        antimult_witness: anti.1,
        pairs,
        verdict,
    })
}

/// [`check_multiplicativity`] for a partial isometry on its own domain.
pub fn check_map_multiplicativity(
    t: &PartialIsometry,
    pairs: usize,
    seed: u64,
    tol: f64,
) -> Result<MultiplicativityReport, ClassifyError> {
    let mut s = Sampler::new(seed);
    let source = Arc::clone(&t.source);
    let domain = t.domain.clone();
    let mut draw = || domain.sample(&source, &mut s);
    let dom = t.domain.clone();
    check_multiplicativity(
        &|a| t.apply(a),
        &t.target,
        &mut draw,
        &|x| dom.contains(x),
        pairs,
        tol,
    )
}

/// Multiplicativity of a linear candidate on Gaussian pairs of the whole
/// algebra.
fn extension_multiplicativity(
    cand: &isometry::LinearCandidate,
    target: &Arc<Algebra>,
    pairs: usize,
    seed: u64,
    tol: f64,
) -> Result<MultiplicativityReport, ClassifyError> {
    let mut s = Sampler::new(seed);
    let source = Arc::clone(&cand.source);
    let mut draw = || Ok(s.element(&source, 1.0));
    check_multiplicativity(&|a| cand.apply(a), target, &mut draw, &|_| Ok(true), pairs, tol)
}

#[derive(Debug, Clone, Serialize)]
pub struct GroupIsoReport {
    pub homomorphism_residual: f64,
    pub unital_residual: f64,
    pub u0_norm: f64,
    pub extension: ExtensionReport,
    pub extension_multiplicativity: MultiplicativityReport,
    /// `max ||T((a - re)(b - re)) - T(a - re) T(b - re)||`.
    pub r_shift_residual: f64,
    pub verdict: String,
}

pub const GROUP_ISO_PASS: &str = "ExtendsToIsometricIsomorphism";

/// Group-isomorphism corollary: verify the homomorphism claim, check
/// `u0 = 0`, extend, and check that the extension is multiplicative.
pub fn group_iso_extension_pipeline(t: &PartialIsometry, cfg: &EngineConfig) -> Result<GroupIsoReport, ClassifyError> {
    if !t.flags.claims_group_homomorphism {
        return Err(ClassifyError::HypothesisNotDeclared("claims_group_homomorphism".into()));
    }
    let hom = check_map_multiplicativity(t, 200, cfg.seed ^ 0x6809, cfg.tol)?;
    let e_a = t.source.unit();
    let te = t.apply(&e_a);
    let unital_residual = te.dist(&t.target.unit());
    if hom.mult_residual > cfg.tol || unital_residual > cfg.tol {
        let (residual, witness) = if hom.mult_residual > cfg.tol {
            (hom.mult_residual, hom.mult_witness.clone())
        } else {
            (unital_residual, vec![e_a.coords().to_vec()])
        };
        return Err(ClassifyError::HomomorphismClaimFalse { residual, witness });
    }
    let u0 = isometry::estimate_u0(t)?;
    let u0_norm = u0.norm();
    let (cand, extension) = isometry::extend_isometry(t, cfg)?;
    let ext_mult = extension_multiplicativity(&cand, &t.target, 200, cfg.seed ^ 0x3417, cfg.tol)?;

    let mut s = Sampler::new(cfg.seed ^ 0x5817);
    let mut r_shift = 0.0_f64;
    for _ in 0..cfg.samples {
        let a = s.element(&t.source, 1.0);
        let b = s.element(&t.source, 1.0);
        let r = 2.0 * a.norm().max(b.norm()) + 1.0;
        let ar = a.add_unit(C64::new(-r, 0.0));
        let br = b.add_unit(C64::new(-r, 0.0));
        let prod = ar.mul(&br).expect("same");
        if t.domain.contains(&ar)? && t.domain.contains(&br)? && t.domain.contains(&prod)? {
            let d = t.apply(&prod).dist(&t.apply(&ar).mul(&t.apply(&br)).expect("target"));
            r_shift = r_shift.max(d / (r * r));
        }
    }
    let pass = u0_norm <= cfg.tol
        && extension.verdict == ExtensionVerdict::ExtendsAsTheorem
        && ext_mult.mult_residual <= cfg.tol
        && r_shift <= cfg.tol;
    Ok(GroupIsoReport {
        homomorphism_residual: hom.mult_residual,
        unital_residual,
        u0_norm,
        extension,
        extension_multiplicativity: ext_mult,
        r_shift_residual: r_shift,
        verdict: if pass { GROUP_ISO_PASS.into() } else { "Fails".into() },
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ComsemReport {
    pub source_commutativity_defect: f64,
    pub target_radical_dim: usize,
    pub source_radical_dim: usize,
    pub extension: ExtensionReport,
    pub extension_multiplicativity: MultiplicativityReport,
    pub target_commutativity_defect: f64,
    pub extension_is_isomorphism: bool,
    pub target_commutative: bool,
    pub source_semisimple: bool,
}

impl ComsemReport {
    pub fn all_pass(&self) -> bool {
        self.extension_is_isomorphism && self.target_commutative && self.source_semisimple
    }
}

/// Commutative-source / semisimple-target corollary: normalize by `T(e)`,
/// extend, and check the three conclusions separately.
pub fn comsem_pipeline(
    t: &PartialIsometry,
    source_commutative: bool,
    target_semisimple: bool,
    cfg: &EngineConfig,
) -> Result<ComsemReport, ClassifyError> {
    let source_defect = t.source.commutativity_defect();
    let target_rad = radical::dickson_radical(&t.target).dim_radical;
    if source_commutative != (source_defect <= 1e-12) {
        return Err(ClassifyError::FlagContradiction(format!(
            "source declared commutative={source_commutative}, defect {source_defect:.3e}"
        )));
    }
    if target_semisimple != (target_rad == 0) {
        return Err(ClassifyError::FlagContradiction(format!(
            "target declared semisimple={target_semisimple}, radical dimension {target_rad}"
        )));
    }
    if !source_commutative {
        return Err(ClassifyError::HypothesisNotDeclared("source commutative".into()));
    }
    if !target_semisimple {
        return Err(ClassifyError::HypothesisNotDeclared("target semisimple".into()));
    }
    let te = t.apply(&t.source.unit());
    let te_inv = spectral::invert(&te)?;
    let left: MapFn = Arc::new(move |b: &Element| te_inv.mul(b).expect("target"));
    let left_inv: MapFn = Arc::new(move |b: &Element| te.mul(b).expect("target"));
    let mut normalized = t.post_compose(format!("{}/normalized", t.name), left, Some(left_inv));
    normalized.range = Domain::Subgroup(spectral::SubgroupDescriptor::full());
    let (cand, extension) = isometry::extend_isometry(&normalized, cfg)?;
    let ext_mult = extension_multiplicativity(&cand, &t.target, 200, cfg.seed ^ 0xC0, cfg.tol)?;
    let target_defect = t.target.commutativity_defect();
    let source_rad = radical::dickson_radical(&t.source).dim_radical;
    Ok(ComsemReport {
        source_commutativity_defect: source_defect,
        target_radical_dim: target_rad,
        source_radical_dim: source_rad,
        extension_is_isomorphism: extension.verdict == ExtensionVerdict::ExtendsAsTheorem
            && ext_mult.mult_residual <= cfg.tol,
        extension,
        extension_multiplicativity: ext_mult,
        target_commutativity_defect: target_defect,
        target_commutative: target_defect <= 1e-12,
        source_semisimple: source_rad == 0,
    })
}
