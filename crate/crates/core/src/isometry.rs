//! Extension of invertible-group isometries to real-linear isometries.
//!
//! For an isometry `T` between open subgroups the engine extracts
//! `u0 = lim_{a -> 0} T(a)`, sets `T0 = T - u0` and assembles
//!
//! ```text
//! T~0(a) = T0(a + 2||a|| e) - T0(2||a|| e)
//! ```
//!
//! on the realified basis directions. Linearity, isometry and agreement with
//! `T` are then measured on fresh samples rather than assumed.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{Algebra, Element};
use crate::linalg::{self, RMatrix, C64, ONE};
use crate::numrange;
use crate::radical;
use crate::sampling::Sampler;
use crate::spectral::{self, SpectralError, SubgroupDescriptor};

pub type MapFn = Arc<dyn Fn(&Element) -> Element + Send + Sync>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("T(2^-k e) does not converge (difference ratio {ratio:.3})")]
    NoLimit { ratio: f64 },
    #[error("extension formula needs a point outside the domain: {point:?}")]
    DomainViolation { point: Vec<C64> },
    #[error("segment leaves the domain at r = {r}")]
    SegmentLeavesDomain { r: f64 },
    #[error("set is not symmetric about c: reflection of point {index} is missing")]
    NotSymmetric { index: usize },
    #[error("map is not isometric on points {i} and {j} (defect {defect:.3e})")]
    NotIsometric { i: usize, j: usize, defect: f64 },
    #[error("centre is not a member of the set")]
    CentreNotInSet,
    #[error("map on the set is not a permutation")]
    NotAPermutation,
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// An open ball `{ x : ||x - center|| < radius }`.
#[derive(Debug, Clone)]
pub struct Ball {
    pub center: Element,
    pub radius: f64,
}

/// Where a partial isometry is defined.
#[derive(Debug, Clone)]
pub enum Domain {
    Subgroup(SubgroupDescriptor),
    /// Union of open balls. Not a group; only used for negative examples.
    Balls(Vec<Ball>),
}

impl Domain {
    pub fn contains(&self, a: &Element) -> Result<bool, EngineError> {
        match self {
            Domain::Subgroup(d) => Ok(spectral::in_subgroup(a, d)?),
            Domain::Balls(balls) => Ok(balls.iter().any(|b| a.dist(&b.center) < b.radius)),
        }
    }

    pub fn is_subgroup(&self) -> bool {
        matches!(self, Domain::Subgroup(_))
    }

    /// Draws a point of the domain.
    pub fn sample(&self, alg: &Arc<Algebra>, s: &mut Sampler) -> Result<Element, EngineError> {
        match self {
            Domain::Subgroup(d) => {
                for _ in 0..10_000 {
                    let a = s.invertible(alg);
                    if spectral::in_subgroup(&a, d)? {
                        return Ok(a);
                    }
                }
                Err(EngineError::DomainViolation { point: Vec::new() })
            }
            Domain::Balls(balls) => {
                let b = &balls[s.index(balls.len())];
                Ok(s.in_ball(&b.center, b.radius))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct MapFlags {
    pub claims_group_homomorphism: bool,
    pub claims_unital: bool,
}

/// A map defined on a subset of the invertible group of `source`.
#[derive(Clone)]
pub struct PartialIsometry {
    pub name: String,
    pub source: Arc<Algebra>,
    pub target: Arc<Algebra>,
    pub domain: Domain,
    pub range: Domain,
    pub flags: MapFlags,
    forward: MapFn,
    inverse: Option<MapFn>,
}

impl fmt::Debug for PartialIsometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PartialIsometry")
            .field("name", &self.name)
            .field("source", &self.source.name())
            .field("target", &self.target.name())
            .field("domain", &self.domain)
            .field("has_inverse", &self.inverse.is_some())
            .finish()
    }
}

/// Result of a fixture self-check.
#[derive(Debug, Clone, Serialize)]
pub struct FixtureCheck {
    /// max | ||T(a) - T(b)|| - ||a - b|| | over the sampled pairs.
    pub isometry_residual: f64,
    pub isometry_witness: Vec<Vec<C64>>,
    /// Sampled images outside the declared range.
    pub range_violations: usize,
    pub inverse_residual: Option<f64>,
}

impl PartialIsometry {
    pub fn new(
        name: impl Into<String>,
        source: Arc<Algebra>,
        target: Arc<Algebra>,
        domain: Domain,
        range: Domain,
        forward: MapFn,
    ) -> Self {
        PartialIsometry {
            name: name.into(),
            source,
            target,
            domain,
            range,
            flags: MapFlags::default(),
            forward,
            inverse: None,
        }
    }

    pub fn with_inverse(mut self, inverse: MapFn) -> Self {
        self.inverse = Some(inverse);
        self
    }

    pub fn with_flags(mut self, flags: MapFlags) -> Self {
        self.flags = flags;
        self
    }

    pub fn apply(&self, a: &Element) -> Element {
        (self.forward)(a)
    }

    pub fn apply_inverse(&self, b: &Element) -> Option<Element> {
        self.inverse.as_ref().map(|f| f(b))
    }

    pub fn has_inverse(&self) -> bool {
        self.inverse.is_some()
    }

    pub fn forward_fn(&self) -> MapFn {
        Arc::clone(&self.forward)
    }

    /// Composes with a left factor: `a -> g(T(a))`.
    pub fn post_compose(&self, name: impl Into<String>, g: MapFn, g_inv: Option<MapFn>) -> PartialIsometry {
        let f = Arc::clone(&self.forward);
        let g2 = Arc::clone(&g);
        let forward: MapFn = Arc::new(move |a: &Element| g2(&f(a)));
        let inverse = match (&self.inverse, g_inv) {
            (Some(inv), Some(gi)) => {
                let inv = Arc::clone(inv);
                Some(Arc::new(move |b: &Element| inv(&gi(b))) as MapFn)
            }
            _ => None,
        };
        PartialIsometry {
            name: name.into(),
            source: Arc::clone(&self.source),
            target: Arc::clone(&self.target),
            domain: self.domain.clone(),
            range: self.range.clone(),
            flags: self.flags,
            forward,
            inverse,
        }
    }

    /// Samples pairs of domain points and measures how far `T` is from an
    /// isometry into its declared range.
    pub fn self_check(&self, pairs: usize, seed: u64) -> Result<FixtureCheck, EngineError> {
        let mut s = Sampler::new(seed);
        let mut worst = 0.0_f64;
        let mut witness = Vec::new();
        let mut range_violations = 0;
        let mut inverse_residual: Option<f64> = None;
        for _ in 0..pairs {
            let a = self.domain.sample(&self.source, &mut s)?;
            let b = self.domain.sample(&self.source, &mut s)?;
            let ta = self.apply(&a);
            let tb = self.apply(&b);
            let d = a.dist(&b);
            let defect = (ta.dist(&tb) - d).abs() / d.max(1.0);
            if defect > worst {
                worst = defect;
                witness = vec![a.coords().to_vec(), b.coords().to_vec()];
            }
            if !self.range.contains(&ta)? {
                range_violations += 1;
            }
            if let Some(back) = self.apply_inverse(&ta) {
                let r = back.dist(&a) / a.norm().max(1.0);
                inverse_residual = Some(inverse_residual.unwrap_or(0.0).max(r));
            }
        }
        Ok(FixtureCheck {
            isometry_residual: worst,
            isometry_witness: witness,
            range_violations,
            inverse_residual,
        })
    }
}

/// Engine parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EngineConfig {
    /// Bound on every residual for a positive verdict.
    pub tol: f64,
    /// Fresh samples per residual.
    pub samples: usize,
    pub seed: u64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            tol: 1e-8,
            samples: 40,
            seed: 0,
        }
    }
}

/// `lim_{k -> inf} T(2^-k e)`, by Richardson extrapolation of the last two
/// terms of `k = 10..=30` after checking that successive differences
/// contract.
pub fn estimate_u0(t: &PartialIsometry) -> Result<Element, EngineError> {
    let e = t.source.unit();
    let mut values = Vec::with_capacity(21);
    for k in 10..=30 {
        let x = e.scale_real(2f64.powi(-k));
        if !t.domain.contains(&x)? {
            return Err(EngineError::DomainViolation {
                point: x.coords().to_vec(),
            });
        }
        values.push(t.apply(&x));
    }
    let diffs: Vec<f64> = values.windows(2).map(|w| w[1].dist(&w[0])).collect();
    let floor = 1e-13 * (1.0 + values.last().expect("non-empty").norm());
    for w in diffs.windows(2) {
        if w[0] > floor && w[1] > 0.9 * w[0] + floor {
            return Err(EngineError::NoLimit { ratio: w[1] / w[0] });
        }
    }
    let n = values.len();
    Ok(&values[n - 1].scale_real(2.0) - &values[n - 2])
}

/// The assembled real-linear map plus its offset.
#[derive(Debug, Clone)]
pub struct LinearCandidate {
    /// Acts on interleaved (re, im) coordinates.
    pub matrix_real: RMatrix,
    pub offset: Element,
    pub source: Arc<Algebra>,
}

impl LinearCandidate {
    pub fn apply(&self, a: &Element) -> Element {
        let y = &self.matrix_real * linalg::realify(a.coords());
        self.offset.with_coords(linalg::complexify(&y))
    }

    /// Solves `cand(x) = b` when the realified matrix is square and invertible.
    pub fn solve(&self, b: &Element) -> Option<Element> {
        if !self.matrix_real.is_square() {
            return None;
        }
        let x = self.matrix_real.clone().lu().solve(&linalg::realify(b.coords()))?;
        self.source.element(linalg::complexify(&x)).ok()
    }

    fn commutator_defects(&self) -> (f64, f64) {
        let js = linalg::realified_i(self.source.dim());
        let jt = linalg::realified_i(self.offset.algebra().dim());
        let m = &self.matrix_real;
        let scale = m.norm().max(1.0);
        let lin = (m * &js - &jt * m).norm() / scale;
        let anti = (m * &js + &jt * m).norm() / scale;
        (lin, anti)
    }

    pub fn is_complex_linear(&self, tol: f64) -> bool {
        self.commutator_defects().0 <= tol
    }

    pub fn is_conjugate_linear(&self, tol: f64) -> bool {
        self.commutator_defects().1 <= tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailureWitness {
    pub check: String,
    pub discrepancy: f64,
    pub points: Vec<Vec<C64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ExtensionVerdict {
    ExtendsAsTheorem,
    FailsExtension(FailureWitness),
}

impl ExtensionVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            ExtensionVerdict::ExtendsAsTheorem => "ExtendsAsTheorem",
            ExtensionVerdict::FailsExtension(_) => "FailsExtension",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtensionReport {
    pub u0: Vec<C64>,
    pub u0_in_radical: bool,
    pub u0_radical_distance: f64,
    pub additivity_residual: f64,
    pub homogeneity_residual: f64,
    pub isometry_residual: f64,
    pub agreement_residual: f64,
    /// `None` when the map has no inverse handle.
    pub surjectivity_probe_residual: Option<f64>,
    pub complex_linear: bool,
    pub conjugate_linear: bool,
    /// Smallest scale at which the formula's points fit in the domain (1 for
    /// subgroup domains).
    pub assembly_scale: f64,
    pub witnesses: BTreeMap<String, Vec<Vec<C64>>>,
    pub verdict: ExtensionVerdict,
}

/// Evaluates `T0(a + 2||a|| e) - T0(2||a|| e)`. On ball domains the points
/// are shrunk by powers of two until they fit and the value is rescaled.
fn formula(t: &PartialIsometry, u0: &Element, a: &Element) -> Result<(Element, f64), EngineError> {
    let n = a.norm();
    if n == 0.0 {
        return Ok((t.target.zero(), 1.0));
    }
    let p = a.add_unit(C64::new(2.0 * n, 0.0));
    let q = t.source.unit().scale_real(2.0 * n);
    let t0 = |x: &Element| &t.apply(x) - u0;
    if t.domain.is_subgroup() {
        for x in [&p, &q] {
            if !t.domain.contains(x)? {
                return Err(EngineError::DomainViolation {
                    point: x.coords().to_vec(),
                });
            }
        }
        return Ok((&t0(&p) - &t0(&q), 1.0));
    }
    for m in 0..=40 {
        let s = 2f64.powi(-m);
        let (sp, sq) = (p.scale_real(s), q.scale_real(s));
        if t.domain.contains(&sp)? && t.domain.contains(&sq)? {
            return Ok(((&t0(&sp) - &t0(&sq)).scale_real(1.0 / s), s));
        }
    }
    Err(EngineError::DomainViolation {
        point: p.coords().to_vec(),
    })
}

/// Builds the candidate from the realified basis directions and verifies it.
pub fn extend_isometry(
    t: &PartialIsometry,
    cfg: &EngineConfig,
) -> Result<(LinearCandidate, ExtensionReport), EngineError> {
    let u0 = estimate_u0(t)?;
    let ds = t.source.dim();
    let dt = t.target.dim();
    let mut m = RMatrix::zeros(2 * dt, 2 * ds);
    let mut min_scale = 1.0_f64;
    for k in 0..ds {
        for (col, unit) in [(2 * k, ONE), (2 * k + 1, linalg::I)] {
            let a = t.source.basis(k).scale(unit);
            let n = a.norm();
            let (img, s) = formula(t, &u0, &a.scale_real(1.0 / n))?;
            min_scale = min_scale.min(s);
            m.set_column(col, &(linalg::realify(img.coords()) * n));
        }
    }
    let cand = LinearCandidate {
        matrix_real: m,
        offset: u0,
        source: Arc::clone(&t.source),
    };
    let mut report = verify_linear_isometry(&cand, t, cfg)?;
    report.assembly_scale = min_scale;
    Ok((cand, report))
}

struct Worst {
    value: f64,
    points: Vec<Vec<C64>>,
}

impl Worst {
    fn new() -> Self {
        Worst {
            value: 0.0,
            points: Vec::new(),
        }
    }

    fn offer(&mut self, value: f64, points: &[&Element]) {
        if value > self.value || (value.is_nan() && !self.value.is_nan()) {
            self.value = value;
            self.points = points.iter().map(|p| p.coords().to_vec()).collect();
        }
    }
}

/// Measures the candidate against `T` on fresh samples.
pub fn verify_linear_isometry(
    cand: &LinearCandidate,
    t: &PartialIsometry,
    cfg: &EngineConfig,
) -> Result<ExtensionReport, EngineError> {
    let mut s = Sampler::new(cfg.seed ^ 0x9E37_79B9_7F4A_7C15);
    let u0 = &cand.offset;
    let t0 = |x: &Element| &t.apply(x) - u0;
    let eval = |a: &Element| -> Result<Option<Element>, EngineError> {
        match formula(t, u0, a) {
            Ok((v, _)) => Ok(Some(v)),
            Err(EngineError::DomainViolation { .. }) if !t.domain.is_subgroup() => Ok(None),
            Err(e) => Err(e),
        }
    };

    let mut additivity = Worst::new();
    let mut homogeneity = Worst::new();
    let mut isometry = Worst::new();
    let mut agreement = Worst::new();

    // Homogeneity of the unit-norm basis directions at scales 1/2 and 2.
    for k in 0..t.source.dim() {
        for unit in [ONE, linalg::I] {
            let a = t.source.basis(k).scale(unit);
            let a = a.scale_real(1.0 / a.norm());
            if let Some(fa) = eval(&a)? {
                for sc in [0.5, 2.0] {
                    let sa = a.scale_real(sc);
                    if let Some(fsa) = eval(&sa)? {
                        homogeneity.offer(fsa.dist(&fa.scale_real(sc)), &[&a]);
                    }
                }
            }
        }
    }

    for _ in 0..cfg.samples {
        let a = s.element(&t.source, 1.0);
        let b = s.element(&t.source, 1.0);
        let r = s.uniform(-3.0, 3.0);

        // The formula-defined map and the assembled matrix.
        let ca = cand.apply(&a);
        let cb = cand.apply(&b);
        let cab = cand.apply(&(&a + &b));
        additivity.offer(cab.dist(&(&ca + &cb)), &[&a, &b]);
        homogeneity.offer(cand.apply(&a.scale_real(r)).dist(&ca.scale_real(r)), &[&a]);
        isometry.offer((ca.norm() - a.norm()).abs(), &[&a]);
        if let (Some(fa), Some(fb), Some(fab)) = (eval(&a)?, eval(&b)?, eval(&(&a + &b))?) {
            additivity.offer(fab.dist(&(&fa + &fb)), &[&a, &b]);
            isometry.offer((fa.norm() - a.norm()).abs(), &[&a]);
            if let Some(fra) = eval(&a.scale_real(r))? {
                homogeneity.offer(fra.dist(&fa.scale_real(r)), &[&a]);
            }
        }

        // T0 must be additive on domain triples because it agrees there
        // with a linear map.
        let x = t.domain.sample(&t.source, &mut s)?;
        let y = t.domain.sample(&t.source, &mut s)?;
        let xy = &x + &y;
        if t.domain.contains(&xy)? {
            let defect = t0(&xy).dist(&(&t0(&x) + &t0(&y)));
            additivity.offer(defect, &[&x, &y]);
        }
        agreement.offer(cand.apply(&x).dist(&t0(&x)), &[&x]);
        agreement.offer(cand.apply(&y).dist(&t0(&y)), &[&y]);
    }

    let surjectivity = surjectivity_probe(cand, t, &mut s, cfg.samples)?;

    let u0_radical_distance = radical::radical_distance(u0);
    let u0_in_radical = u0_radical_distance <= cfg.tol;
    let tol = cfg.tol;

    let mut witnesses = BTreeMap::new();
    let named = [
        ("additivity", &additivity),
        ("homogeneity", &homogeneity),
        ("isometry", &isometry),
        ("agreement", &agreement),
    ];
    let mut verdict = ExtensionVerdict::ExtendsAsTheorem;
    for (name, w) in named {
        if !w.points.is_empty() {
            witnesses.insert(name.to_string(), w.points.clone());
        }
        if !(w.value <= tol) && verdict == ExtensionVerdict::ExtendsAsTheorem {
            verdict = ExtensionVerdict::FailsExtension(FailureWitness {
                check: name.to_string(),
                discrepancy: w.value,
                points: w.points.clone(),
            });
        }
    }
    if let Some((value, points)) = &surjectivity {
        witnesses.insert("surjectivity".to_string(), points.clone());
        if !(*value <= tol) && verdict == ExtensionVerdict::ExtendsAsTheorem {
            verdict = ExtensionVerdict::FailsExtension(FailureWitness {
                check: "surjectivity".into(),
                discrepancy: *value,
                points: points.clone(),
            });
        }
    }
    if !u0_in_radical && verdict == ExtensionVerdict::ExtendsAsTheorem {
        verdict = ExtensionVerdict::FailsExtension(FailureWitness {
            check: "u0_in_radical".into(),
            discrepancy: u0_radical_distance,
            points: vec![u0.coords().to_vec()],
        });
    }

    Ok(ExtensionReport {
        u0: u0.coords().to_vec(),
        u0_in_radical,
        u0_radical_distance,
        additivity_residual: additivity.value,
        homogeneity_residual: homogeneity.value,
        isometry_residual: isometry.value,
        agreement_residual: agreement.value,
        surjectivity_probe_residual: surjectivity.map(|(v, _)| v),
        complex_linear: cand.is_complex_linear(tol),
        conjugate_linear: cand.is_conjugate_linear(tol),
        assembly_scale: 1.0,
        witnesses,
        verdict,
    })
}

/// For `b'` in the target picks `r > max(||b'||, ||T0(e)^{-1} b'||)` and
/// checks `cand(f) = b'` for `f = T0^{-1}(b' + T0(r e)) - r e`.
fn surjectivity_probe(
    cand: &LinearCandidate,
    t: &PartialIsometry,
    s: &mut Sampler,
    samples: usize,
) -> Result<Option<(f64, Vec<Vec<C64>>)>, EngineError> {
    if !t.has_inverse() {
        return Ok(None);
    }
    let u0 = &cand.offset;
    let e = t.source.unit();
    if !t.domain.contains(&e)? {
        return Ok(None);
    }
    let t0e = &t.apply(&e) - u0;
    let t0e_inv = match spectral::invert(&t0e) {
        Ok(x) => x,
        Err(_) => return Ok(None),
    };
    let mut worst = Worst::new();
    let mut probed = 0;
    for _ in 0..samples {
        let bp = s.element(&t.target, 1.0);
        let r = 1.5 * bp.norm().max(t0e_inv.mul(&bp).expect("same algebra").norm()) + 1e-3;
        let re = e.scale_real(r);
        if !t.domain.contains(&re)? {
            continue;
        }
        let y = &(&bp + &t.apply(&re)) - u0;
        let y_shifted = &y + u0;
        if !t.range.contains(&y_shifted)? {
            continue;
        }
        let pre = t.apply_inverse(&y_shifted).expect("inverse present");
        let f = &pre - &re;
        worst.offer(cand.apply(&f).dist(&bp), &[&bp, &f]);
        probed += 1;
    }
    Ok((probed > 0).then_some((worst.value, worst.points)))
}

/// `max sup Im W(+-(P(a) - a)), sup Im W(+-i(P(a) - a))` with
/// `P = cand^{-1} o T0`, for one domain point `a`.
pub fn proof_numrange_probe(cand: &LinearCandidate, t: &PartialIsometry, a: &Element) -> Option<f64> {
    let t0a = &t.apply(a) - &cand.offset;
    let pa = cand.solve(&t0a)?;
    let d = &pa - a;
    let values = [
        numrange::sup_im_numrange(&d),
        numrange::sup_im_numrange(&-&d),
        numrange::sup_im_numrange(&d.scale(linalg::I)),
        numrange::sup_im_numrange(&d.scale(-linalg::I)),
    ];
    Some(values.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v)))
}

/// `||T((f+g)/2) - (T(f) + T(g))/2||`, after checking that the segment from
/// `f` to `g` stays in the domain on a 64-point grid.
pub fn midpoint_check(t: &PartialIsometry, f: &Element, g: &Element) -> Result<f64, EngineError> {
    for j in 0..64 {
        let r = j as f64 / 63.0;
        let p = &f.scale_real(1.0 - r) + &g.scale_real(r);
        if !t.domain.contains(&p)? {
            return Err(EngineError::SegmentLeavesDomain { r });
        }
    }
    let mid = (f + g).scale_real(0.5);
    let avg = (&t.apply(f) + &t.apply(g)).scale_real(0.5);
    Ok(t.apply(&mid).dist(&avg))
}

/// For a finite set `L` symmetric about `c` and a distance-preserving
/// permutation of `L`, returns `||T(c) - c||`.
pub fn reflection_fixed_point_check(points: &[Element], c: &Element, perm: &[usize]) -> Result<f64, EngineError> {
    const SET_TOL: f64 = 1e-12;
    const DIST_TOL: f64 = 1e-9;
    let n = points.len();
    let c_idx = points
        .iter()
        .position(|p| p.dist(c) <= SET_TOL)
        .ok_or(EngineError::CentreNotInSet)?;
    for (i, z) in points.iter().enumerate() {
        let reflected = &c.scale_real(2.0) - z;
        if !points.iter().any(|p| p.dist(&reflected) <= SET_TOL) {
            return Err(EngineError::NotSymmetric { index: i });
        }
    }
    if perm.len() != n {
        return Err(EngineError::NotAPermutation);
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(EngineError::NotAPermutation);
        }
        seen[p] = true;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let before = points[i].dist(&points[j]);
            let after = points[perm[i]].dist(&points[perm[j]]);
            let defect = (after - before).abs();
            if defect > DIST_TOL {
                return Err(EngineError::NotIsometric { i, j, defect });
            }
        }
    }
    Ok(points[perm[c_idx]].dist(c))
}

/// Convenience: the realified matrix of a complex-linear coordinate map.
pub fn realify_linear(m: &linalg::CMatrix) -> RMatrix {
    let (r, c) = m.shape();
    let mut out = RMatrix::zeros(2 * r, 2 * c);
    for i in 0..r {
        for j in 0..c {
            let z = m[(i, j)];
            out[(2 * i, 2 * j)] = z.re;
            out[(2 * i, 2 * j + 1)] = -z.im;
            out[(2 * i + 1, 2 * j)] = z.im;
            out[(2 * i + 1, 2 * j + 1)] = z.re;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::linalg::ZERO;

    #[test]
    fn identity_extends_with_zero_offset() {
        let m2 = catalog::make_matrix_algebra(2);
        let t = catalog::identity_map(&m2);
        let u0 = estimate_u0(&t).unwrap();
        assert!(u0.norm() < 1e-15);
        let (cand, report) = extend_isometry(&t, &EngineConfig::default()).unwrap();
        assert!((&cand.matrix_real - RMatrix::identity(8, 8)).norm() < 1e-10);
        assert_eq!(report.verdict, ExtensionVerdict::ExtendsAsTheorem);
        assert!(report.complex_linear);
        assert!(report.additivity_residual <= 1e-10);
        assert!(report.agreement_residual <= 1e-10);
    }

    #[test]
    fn translation_offset_is_recovered() {
        let b = catalog::make_dame_pair().b;
        let u = b.element(vec![ZERO, C64::new(0.3, -0.2), C64::new(1.0, 0.5), ZERO]).unwrap();
        let t = catalog::translation_map(&b, &u);
        let u0 = estimate_u0(&t).unwrap();
        assert!(u0.dist(&u) < 1e-9);
        let (_, report) = extend_isometry(&t, &EngineConfig::default()).unwrap();
        assert!(report.u0_in_radical);
        assert!(report.agreement_residual <= 1e-10);
        assert_eq!(report.verdict, ExtensionVerdict::ExtendsAsTheorem);
    }

    #[test]
    fn non_isometric_similarity_is_rejected() {
        let u = linalg::CMatrix::from_row_slice(2, 2, &[ONE, ONE, ZERO, ONE]);
        let t = catalog::similarity_map(&u, catalog::Form::SimilarityLinear, catalog::TargetNorm::Spectral);
        let (_, report) = extend_isometry(&t, &EngineConfig::default()).unwrap();
        assert!(report.agreement_residual <= 1e-9);
        match &report.verdict {
            ExtensionVerdict::FailsExtension(w) => assert_eq!(w.check, "isometry"),
            v => panic!("unexpected verdict {v:?}"),
        }
    }

    #[test]
    fn hoo_map_fails_extension() {
        let t = catalog::make_hoo_scenario();
        let (cand, report) = extend_isometry(&t, &EngineConfig::default()).unwrap();
        let c2 = &t.source;
        let f = c2.element(vec![C64::new(0.5, 0.0), C64::new(10.0, 0.0)]).unwrap();
        let image = cand.apply(&f);
        assert!((image.coords()[0] - C64::new(-0.5, 0.0)).norm() < 1e-9);
        assert!((t.apply(&f).dist(&image) - 1.0).abs() < 1e-9);
        match &report.verdict {
            ExtensionVerdict::FailsExtension(w) => {
                assert_eq!(w.check, "additivity");
                assert!(w.discrepancy >= 0.5);
                assert_eq!(w.points.len(), 2);
            }
            v => panic!("unexpected verdict {v:?}"),
        }
    }

    #[test]
    fn conjugation_is_real_but_not_complex_linear() {
        let m2 = catalog::make_matrix_algebra(2);
        let t = catalog::entrywise_conjugation_map(&m2);
        let (_, report) = extend_isometry(&t, &EngineConfig::default()).unwrap();
        assert_eq!(report.verdict, ExtensionVerdict::ExtendsAsTheorem);
        assert!(!report.complex_linear);
        assert!(report.conjugate_linear);
    }

    #[test]
    fn midpoint_examples() {
        let m2 = catalog::make_matrix_algebra(2);
        let t = catalog::identity_map(&m2);
        let mut s = Sampler::new(1);
        let f = s.invertible(&m2);
        let g = f.add_unit(C64::new(0.1, 0.0));
        assert!(midpoint_check(&t, &f, &g).unwrap() < 1e-15);

        let hoo = catalog::make_hoo_scenario();
        let c2 = &hoo.source;
        let f = c2.element(vec![C64::new(0.2, 0.0), C64::new(0.1, 0.0)]).unwrap();
        let g = c2.element(vec![C64::new(0.1, 0.0), C64::new(10.2, 0.0)]).unwrap();
        assert!(matches!(
            midpoint_check(&hoo, &f, &g),
            Err(EngineError::SegmentLeavesDomain { .. })
        ));
    }

    #[test]
    fn three_point_reflection() {
        let c2 = catalog::make_function_algebra(2);
        let c = c2.element(vec![C64::new(1.0, 0.0), C64::new(2.0, 0.0)]).unwrap();
        let v = c2.element(vec![C64::new(0.5, 0.0), C64::new(0.0, 0.3)]).unwrap();
        let pts = vec![&c - &v, c.clone(), &c + &v];
        assert!(reflection_fixed_point_check(&pts, &c, &[2, 1, 0]).unwrap() < 1e-15);
        let asym = vec![c.clone(), &c + &v];
        assert_eq!(
            reflection_fixed_point_check(&asym, &c, &[0, 1]),
            Err(EngineError::NotSymmetric { index: 1 })
        );
        assert!(matches!(
            reflection_fixed_point_check(&pts, &c, &[1, 0, 2]),
            Err(EngineError::NotIsometric { .. })
        ));
    }
}
