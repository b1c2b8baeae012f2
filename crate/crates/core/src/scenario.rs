//! Scenario files, the batch runner and the report format.
//!
//! A scenario names two algebras, a map and a list of checks; the runner
//! executes the checks in order and compares each verdict with the
//! scenario's `expect` table. Reports contain no timing unless asked for,
//! so identical inputs give identical bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{Algebra, Element};
use crate::catalog::{self, CatalogError, ScenarioSpec, ScenarioTolerances};
use crate::classify::{self, ClassifyError};
use crate::isometry::{self, EngineConfig, EngineError, ExtensionVerdict, PartialIsometry};
use crate::linalg::{C64, ZERO};
use crate::numrange;
use crate::radical::{self, RadicalVerdict};
use crate::sampling::Sampler;

pub const CHECK_NAMES: [&str; 10] = [
    "self_check",
    "u0",
    "extend",
    "midpoint",
    "multiplicativity",
    "classify",
    "radical",
    "numrange",
    "group_iso",
    "comsem",
];

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
    #[error("fixture self-check failed: {0}")]
    FixtureSelfCheckFailed(String),
    #[error("incompatible scenario: {0}")]
    IncompatibleSpec(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

impl From<CatalogError> for ScenarioError {
    fn from(e: CatalogError) -> Self {
        match e {
            CatalogError::IncompatibleSpec(m) => ScenarioError::IncompatibleSpec(m),
            other => ScenarioError::FixtureSelfCheckFailed(other.to_string()),
        }
    }
}

/// Outcome of one check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub verdict: String,
    pub expected: Option<String>,
    /// `None` when the scenario does not state an expectation.
    pub matches: Option<bool>,
    pub residuals: BTreeMap<String, f64>,
    pub witnesses: BTreeMap<String, Vec<Vec<C64>>>,
    pub notes: BTreeMap<String, String>,
}

impl CheckRecord {
    fn new(name: &str) -> Self {
        CheckRecord {
            name: name.to_string(),
            verdict: String::new(),
            expected: None,
            matches: None,
            residuals: BTreeMap::new(),
            witnesses: BTreeMap::new(),
            notes: BTreeMap::new(),
        }
    }

    fn residual(&mut self, key: &str, v: f64) {
        self.residuals.insert(key.to_string(), v);
    }

    fn witness(&mut self, key: &str, pts: Vec<Vec<C64>>) {
        if !pts.is_empty() {
            self.witnesses.insert(key.to_string(), pts);
        }
    }

    fn note(&mut self, key: &str, v: impl Into<String>) {
        self.notes.insert(key.to_string(), v.into());
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub scenario_id: String,
    pub seed: u64,
    pub tolerances: ScenarioTolerances,
    pub checks: Vec<CheckRecord>,
    pub all_match: bool,
    pub wall_time_ms: Option<f64>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Shipped scenarios, embedded at build time.
pub const SHIPPED: [(&str, &str); 13] = [
    ("identity_m2", include_str!("../scenarios/identity_m2.json")),
    ("unitary_conj_m3", include_str!("../scenarios/unitary_conj_m3.json")),
    ("swap_c2", include_str!("../scenarios/swap_c2.json")),
    ("dame_translation", include_str!("../scenarios/dame_translation.json")),
    ("dame_identity", include_str!("../scenarios/dame_identity.json")),
    ("hoo", include_str!("../scenarios/hoo.json")),
    ("classify_transpose_n3", include_str!("../scenarios/classify_transpose_n3.json")),
    ("comsem_function", include_str!("../scenarios/comsem_function.json")),
    ("comsem_dame", include_str!("../scenarios/comsem_dame.json")),
    ("group_iso_unitary", include_str!("../scenarios/group_iso_unitary.json")),
    ("group_iso_translation", include_str!("../scenarios/group_iso_translation.json")),
    ("similarity_nonisometric", include_str!("../scenarios/similarity_nonisometric.json")),
    ("conjugation_m2", include_str!("../scenarios/conjugation_m2.json")),
];

/// A scenario whose custom algebra has one wrong structure constant.
pub const BROKEN_FIXTURE: &str = include_str!("../scenarios/broken_custom.json");

pub fn parse_scenario(json: &str) -> Result<ScenarioSpec, ScenarioError> {
    let spec: ScenarioSpec = serde_json::from_str(json).map_err(|e| ScenarioError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    for c in &spec.checks {
        if !CHECK_NAMES.contains(&c.as_str()) {
            return Err(ScenarioError::UnknownCheck(c.clone()));
        }
    }
    Ok(spec)
}

pub fn run_scenario_file(path: &Path, seed: Option<u64>, timing: bool) -> Result<Report, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    run_scenario_str(&text, seed, timing)
}

pub fn run_scenario_str(json: &str, seed: Option<u64>, timing: bool) -> Result<Report, ScenarioError> {
    let mut spec = parse_scenario(json)?;
    if let Some(s) = seed {
        spec.seed = s;
    }
    run_scenario(&spec, timing)
}

/// Executes every check of `spec` in declared order.
pub fn run_scenario(spec: &ScenarioSpec, timing: bool) -> Result<Report, ScenarioError> {
    let start = std::time::Instant::now();
    let t = catalog::make_map(spec)?;
    let cfg = EngineConfig {
        tol: spec.tolerances.engine,
        samples: 40,
        seed: spec.seed,
    };
    let mut checks = Vec::with_capacity(spec.checks.len());
    for name in &spec.checks {
        let mut rec = CheckRecord::new(name);
        match name.as_str() {
            "self_check" => self_check(&t, spec, &mut rec),
            "u0" => u0_check(&t, &mut rec),
            "extend" => extend_check(&t, &cfg, &mut rec),
            "midpoint" => midpoint(&t, spec, &mut rec),
            "multiplicativity" => multiplicativity(&t, &cfg, &mut rec),
            "classify" => classify_check(&t, spec, &mut rec),
            "radical" => radical_check(&t, spec, &mut rec),
            "numrange" => numrange_check(&t, &cfg, &mut rec),
            "group_iso" => group_iso(&t, &cfg, &mut rec),
            "comsem" => comsem(&t, spec, &cfg, &mut rec),
            other => return Err(ScenarioError::UnknownCheck(other.to_string())),
        }
        if let Some(exp) = spec.expect.get(name) {
            rec.matches = Some(*exp == rec.verdict);
            rec.expected = Some(exp.clone());
        }
        checks.push(rec);
    }
    let all_match = checks.iter().all(|c| c.matches != Some(false));
    Ok(Report {
        scenario_id: spec.id.clone(),
        seed: spec.seed,
        tolerances: spec.tolerances,
        checks,
        all_match,
        wall_time_ms: timing.then(|| start.elapsed().as_secs_f64() * 1e3),
    })
}

fn coords(e: &Element) -> Vec<C64> {
    e.coords().to_vec()
}

fn engine_label(e: &EngineError) -> &'static str {
    match e {
        EngineError::NoLimit { .. } => "NoLimit",
        EngineError::DomainViolation { .. } => "DomainViolation",
        EngineError::SegmentLeavesDomain { .. } => "SegmentLeavesDomain",
        EngineError::NotSymmetric { .. } => "NotSymmetric",
        EngineError::NotIsometric { .. } => "NotIsometric",
        EngineError::CentreNotInSet => "CentreNotInSet",
        EngineError::NotAPermutation => "NotAPermutation",
        EngineError::Spectral(_) => "SpectralError",
    }
}

fn classify_label(e: &ClassifyError) -> &'static str {
    match e {
        ClassifyError::AmbiguousForm(_) => "AmbiguousForm",
        ClassifyError::SingularRecoveredU(_) => "SingularRecoveredU",
        ClassifyError::SamplerExhausted { .. } => "SamplerExhausted",
        ClassifyError::BadInput(_) => "BadInput",
        ClassifyError::HomomorphismClaimFalse { .. } => "HomomorphismClaimFalse",
        ClassifyError::FlagContradiction(_) => "FlagContradiction",
        ClassifyError::HypothesisNotDeclared(_) => "HypothesisNotDeclared",
        ClassifyError::Engine(e) => engine_label(e),
        ClassifyError::Spectral(_) => "SpectralError",
    }
}

fn fail_with(rec: &mut CheckRecord, label: &str, message: String) {
    rec.verdict = label.to_string();
    rec.note("error", message);
}

fn pass_fail(ok: bool) -> String {
    if ok { "Pass" } else { "Fail" }.to_string()
}

fn self_check(t: &PartialIsometry, spec: &ScenarioSpec, rec: &mut CheckRecord) {
    match t.self_check(1000, spec.seed ^ 0x5E1F) {
        Ok(c) => {
            rec.residual("isometry_residual", c.isometry_residual);
            rec.residual("range_violations", c.range_violations as f64);
            if let Some(r) = c.inverse_residual {
                rec.residual("inverse_residual", r);
            }
            rec.witness("isometry", c.isometry_witness);
            let tol = spec.tolerances.analytic;
            rec.verdict = pass_fail(
                c.isometry_residual <= tol && c.range_violations == 0 && c.inverse_residual.unwrap_or(0.0) <= tol,
            );
        }
        Err(e) => fail_with(rec, engine_label(&e), e.to_string()),
    }
}

fn u0_check(t: &PartialIsometry, rec: &mut CheckRecord) {
    match isometry::estimate_u0(t) {
        Ok(u0) => {
            rec.residual("u0_norm", u0.norm());
            rec.residual("u0_radical_distance", radical::radical_distance(&u0));
            rec.witness("u0", vec![coords(&u0)]);
            rec.verdict = "Converged".into();
        }
        Err(e) => fail_with(rec, engine_label(&e), e.to_string()),
    }
}

fn extend_check(t: &PartialIsometry, cfg: &EngineConfig, rec: &mut CheckRecord) {
    match isometry::extend_isometry(t, cfg) {
        Ok((_, r)) => {
            rec.residual("additivity_residual", r.additivity_residual);
            rec.residual("homogeneity_residual", r.homogeneity_residual);
            rec.residual("isometry_residual", r.isometry_residual);
            rec.residual("agreement_residual", r.agreement_residual);
            rec.residual("u0_radical_distance", r.u0_radical_distance);
            rec.residual("assembly_scale", r.assembly_scale);
            match r.surjectivity_probe_residual {
                Some(v) => rec.residual("surjectivity_probe_residual", v),
                None => rec.note("surjectivity", "not probed"),
            }
            rec.note("complex_linear", r.complex_linear.to_string());
            rec.note("conjugate_linear", r.conjugate_linear.to_string());
            rec.witness("u0", vec![r.u0.clone()]);
            for (k, v) in &r.witnesses {
                rec.witness(k, v.clone());
            }
            if let ExtensionVerdict::FailsExtension(w) = &r.verdict {
                rec.note("failed_check", w.check.clone());
                rec.residual("failure_discrepancy", w.discrepancy);
                rec.witness("failure", w.points.clone());
            }
            rec.verdict = r.verdict.label().into();
        }
        Err(e) => fail_with(rec, engine_label(&e), e.to_string()),
    }
}

/// Segments between nearby domain points; both ends stay in one component
/// of a ball domain.
fn midpoint(t: &PartialIsometry, spec: &ScenarioSpec, rec: &mut CheckRecord) {
    let mut s = Sampler::new(spec.seed ^ 0x3D);
    let mut worst = 0.0_f64;
    let mut witness = Vec::new();
    let (mut tested, mut skipped) = (0usize, 0usize);
    while tested < 100 && tested + skipped < 1000 {
        let f = match t.domain.sample(&t.source, &mut s) {
            Ok(f) => f,
            Err(e) => return fail_with(rec, engine_label(&e), e.to_string()),
        };
        let g = &f + &s.element(&t.source, 0.1 * f.norm().min(1.0));
        match isometry::midpoint_check(t, &f, &g) {
            Ok(r) => {
                tested += 1;
                if r > worst {
                    worst = r;
                    witness = vec![coords(&f), coords(&g)];
                }
            }
            Err(EngineError::SegmentLeavesDomain { .. }) => skipped += 1,
            Err(e) => return fail_with(rec, engine_label(&e), e.to_string()),
        }
    }
    rec.residual("midpoint_residual", worst);
    rec.residual("segments", tested as f64);
    rec.residual("skipped_segments", skipped as f64);
    rec.witness("midpoint", witness);
    rec.verdict = if tested == 0 {
        "NoSegments".into()
    } else {
        pass_fail(worst <= spec.tolerances.analytic)
    };
}

fn multiplicativity(t: &PartialIsometry, cfg: &EngineConfig, rec: &mut CheckRecord) {
    match classify::check_map_multiplicativity(t, 200, cfg.seed ^ 0x77, cfg.tol) {
        Ok(r) => {
            rec.residual("mult_residual", r.mult_residual);
            rec.residual("antimult_residual", r.antimult_residual);
            rec.witness("mult", r.mult_witness);
            rec.witness("antimult", r.antimult_witness);
            rec.verdict = r.verdict.label().into();
        }
        Err(e) => fail_with(rec, classify_label(&e), e.to_string()),
    }
}

fn classify_check(t: &PartialIsometry, spec: &ScenarioSpec, rec: &mut CheckRecord) {
    let is_matrix = |a: &Arc<Algebra>| matches!(a.embedding(), Some(e) if e[0].nrows() * e[0].nrows() == a.dim());
    if !is_matrix(&t.source) || !is_matrix(&t.target) || t.source.dim() != t.target.dim() {
        return fail_with(rec, "BadInput", "classify needs M_n on both sides".into());
    }
    let n = (t.source.dim() as f64).sqrt().round() as usize;
    let s = |m: &crate::linalg::CMatrix| {
        catalog::element_to_matrix(&t.apply(&catalog::matrix_to_element(&t.source, m)))
    };
    match classify::classify_matrix_isometry(&s, n, 4 * n * n, spec.seed ^ 0xC1A5) {
        Ok(r) => {
            rec.residual("residual", r.residual);
            rec.residual("condition_number", r.condition_number);
            for (h, v) in classify::Form::HYPOTHESES.iter().zip(r.hypothesis_residuals) {
                rec.residual(&format!("hypothesis_{}", h.label()), v);
            }
            rec.witness("u", r.u.row_iter().map(|row| row.iter().copied().collect()).collect());
            rec.witness("scale", r.scale.row_iter().map(|row| row.iter().copied().collect()).collect());
            rec.verdict = r.form.label().into();
        }
        Err(e) => fail_with(rec, classify_label(&e), e.to_string()),
    }
}

/// Dickson membership against the spectral test on basis elements, radical
/// combinations and Gaussian elements.
pub fn radical_cross_oracle(alg: &Arc<Algebra>, samples: usize, seed: u64) -> (usize, Vec<Vec<C64>>) {
    let mut s = Sampler::new(seed);
    let rad = radical::dickson_radical(alg);
    let mut disagreements = 0;
    let mut witness = Vec::new();
    for i in 0..samples {
        let a = if i % 2 == 0 && rad.dim_radical > 0 {
            rad.basis
                .iter()
                .fold(alg.zero(), |acc, u| &acc + &u.scale(s.complex()))
        } else {
            s.element(alg, 1.0)
        };
        let member = radical::in_dickson_radical(&a, 1e-9);
        let trials = if member { 200 } else { 500 };
        let consistent = matches!(
            radical::radical_test_seeded(&a, seed ^ (i as u64).wrapping_mul(0x9E37), trials),
            RadicalVerdict::ConsistentWithRadical { .. }
        );
        if member != consistent {
            disagreements += 1;
            witness.push(coords(&a));
        }
    }
    (disagreements, witness)
}

fn radical_check(t: &PartialIsometry, spec: &ScenarioSpec, rec: &mut CheckRecord) {
    let src = radical::dickson_radical(&t.source).dim_radical;
    let tgt = radical::dickson_radical(&t.target).dim_radical;
    rec.residual("source_radical_dim", src as f64);
    rec.residual("target_radical_dim", tgt as f64);
    let (d1, w1) = radical_cross_oracle(&t.source, 100, spec.seed ^ 0xA1);
    let (d2, w2) = if Arc::ptr_eq(&t.source, &t.target) {
        (0, Vec::new())
    } else {
        radical_cross_oracle(&t.target, 100, spec.seed ^ 0xA2)
    };
    rec.residual("disagreements", (d1 + d2) as f64);
    rec.witness("disagreement", w1.into_iter().chain(w2).collect());
    rec.verdict = if d1 + d2 == 0 { "Agree" } else { "Disagree" }.into();
}

fn numrange_check(t: &PartialIsometry, cfg: &EngineConfig, rec: &mut CheckRecord) {
    let mut s = Sampler::new(cfg.seed ^ 0x4E);
    let mut failures = Vec::new();
    for alg in [&t.source, &t.target] {
        for _ in 0..200 {
            let b = s.element(alg, 1.0);
            if !numrange::check_norm_numradius(&b) {
                failures.push(coords(&b));
            }
        }
    }
    rec.residual("norm_bound_failures", failures.len() as f64);
    rec.witness("norm_bound", failures.clone());
    let mut ok = failures.is_empty();
    if let Ok((cand, _)) = isometry::extend_isometry(t, cfg) {
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..5 {
            if let Ok(a) = t.domain.sample(&t.source, &mut s) {
                if let Some(v) = isometry::proof_numrange_probe(&cand, t, &a) {
                    worst = worst.max(v);
                }
            }
        }
        if worst.is_finite() {
            rec.residual("proof_probe_sup_im", worst);
            ok &= worst <= 1e-6;
        }
    }
    rec.verdict = pass_fail(ok);
}

fn group_iso(t: &PartialIsometry, cfg: &EngineConfig, rec: &mut CheckRecord) {
    match classify::group_iso_extension_pipeline(t, cfg) {
        Ok(r) => {
            rec.residual("homomorphism_residual", r.homomorphism_residual);
            rec.residual("unital_residual", r.unital_residual);
            rec.residual("u0_norm", r.u0_norm);
            rec.residual("extension_mult_residual", r.extension_multiplicativity.mult_residual);
            rec.residual("r_shift_residual", r.r_shift_residual);
            rec.residual("additivity_residual", r.extension.additivity_residual);
            rec.residual("agreement_residual", r.extension.agreement_residual);
            rec.verdict = r.verdict;
        }
        Err(ClassifyError::HomomorphismClaimFalse { residual, witness }) => {
            rec.residual("homomorphism_residual", residual);
            rec.witness("homomorphism", witness);
            rec.verdict = "HomomorphismClaimFalse".into();
        }
        Err(e) => fail_with(rec, classify_label(&e), e.to_string()),
    }
}

fn comsem(t: &PartialIsometry, spec: &ScenarioSpec, cfg: &EngineConfig, rec: &mut CheckRecord) {
    let a_comm = spec.flags.source_commutative.unwrap_or(true);
    let b_ss = spec.flags.target_semisimple.unwrap_or(true);
    match classify::comsem_pipeline(t, a_comm, b_ss, cfg) {
        Ok(r) => {
            rec.residual("extension_mult_residual", r.extension_multiplicativity.mult_residual);
            rec.residual("target_commutativity_defect", r.target_commutativity_defect);
            rec.residual("source_radical_dim", r.source_radical_dim as f64);
            rec.note("extension_is_isomorphism", r.extension_is_isomorphism.to_string());
            rec.note("target_commutative", r.target_commutative.to_string());
            rec.note("source_semisimple", r.source_semisimple.to_string());
            rec.verdict = if r.all_pass() { "AllPass" } else { "Fails" }.into();
        }
        Err(e) => fail_with(rec, classify_label(&e), e.to_string()),
    }
}

/// Fixed-width table of every check of every report.
pub fn summary_table(reports: &[Report]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<26} {:<17} {:<30} {:<30} {}", "scenario", "check", "verdict", "expected", "status");
    for r in reports {
        for c in &r.checks {
            let status = match c.matches {
                Some(true) => "ok",
                Some(false) => "MISMATCH",
                None => "-",
            };
            let _ = writeln!(
                out,
                "{:<26} {:<17} {:<30} {:<30} {}",
                r.scenario_id,
                c.name,
                c.verdict,
                c.expected.as_deref().unwrap_or("-"),
                status
            );
        }
    }
    out
}

/// One entry of the self-test's property section.
#[derive(Debug, Clone, Serialize)]
pub struct PropertyRecord {
    pub name: String,
    pub pass: bool,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelftestReport {
    pub seed: Option<u64>,
    pub scenarios: Vec<Report>,
    pub scenario_errors: BTreeMap<String, String>,
    pub properties: Vec<PropertyRecord>,
    pub all_pass: bool,
    pub wall_time_ms: Option<f64>,
}

impl SelftestReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Runs the shipped scenarios (concurrently; output order is fixed) and the
/// property checks.
pub fn selftest(seed: Option<u64>, timing: bool) -> SelftestReport {
    let start = std::time::Instant::now();
    let results: Vec<(String, Result<Report, ScenarioError>)> = std::thread::scope(|scope| {
        let handles: Vec<_> = SHIPPED
            .iter()
            .map(|(id, json)| (id.to_string(), scope.spawn(move || run_scenario_str(json, seed, timing))))
            .collect();
        handles
            .into_iter()
            .map(|(id, h)| (id, h.join().expect("scenario thread")))
            .collect()
    });
    let mut scenarios = Vec::new();
    let mut scenario_errors = BTreeMap::new();
    for (id, r) in results {
        match r {
            Ok(rep) => scenarios.push(rep),
            Err(e) => {
                scenario_errors.insert(id, e.to_string());
            }
        }
    }
    let properties = property_suite(seed.unwrap_or(0));
    let all_pass = scenario_errors.is_empty()
        && scenarios.iter().all(|r| r.all_match)
        && properties.iter().all(|p| p.pass);
    SelftestReport {
        seed,
        scenarios,
        scenario_errors,
        properties,
        all_pass,
        wall_time_ms: timing.then(|| start.elapsed().as_secs_f64() * 1e3),
    }
}

fn property_suite(seed: u64) -> Vec<PropertyRecord> {
    let mut out = Vec::new();
    let mut push = |name: &str, pass: bool, value: f64| {
        out.push(PropertyRecord {
            name: name.into(),
            pass,
            value,
        })
    };

    let gate = run_scenario_str(BROKEN_FIXTURE, None, false);
    push(
        "fixture_gate_rejects_wrong_constant",
        matches!(gate, Err(ScenarioError::FixtureSelfCheckFailed(_))),
        0.0,
    );

    let m2 = catalog::make_matrix_algebra(2);
    let diag_i = m2.element(vec![C64::new(0.0, 1.0), ZERO, ZERO, ZERO]).expect("dim");
    let v = numrange::sup_im_numrange(&diag_i);
    push("sup_im_numrange_diag_i", (v - 1.0).abs() <= 1e-6, v);

    let mut worst_rt = 0.0_f64;
    let mut rt_ok = true;
    let mut s = Sampler::new(seed ^ 0x7217);
    for n in [2, 3] {
        for form in classify::Form::HYPOTHESES {
            let u = s.invertible_matrix(n, 50.0);
            let ui = u.clone().try_inverse().expect("invertible");
            let map = |m: &crate::linalg::CMatrix| &u * form.phi(m) * &ui;
            match classify::classify_matrix_isometry(&map, n, 2 * n * n + 4, seed ^ n as u64) {
                Ok(r) => {
                    let err = (&r.u - classify::normalize_u(&u)).norm();
                    worst_rt = worst_rt.max(err);
                    rt_ok &= r.form == form && err <= 1e-6;
                }
                Err(_) => rt_ok = false,
            }
        }
    }
    push("classification_round_trip", rt_ok, worst_rt);

    let mut disagreements = 0;
    for (i, alg) in catalog::catalog_algebras().iter().enumerate() {
        disagreements += radical_cross_oracle(alg, 20, seed ^ (0xB0 + i as u64)).0;
    }
    push("radical_cross_oracle", disagreements == 0, disagreements as f64);

    let c3 = catalog::make_function_algebra(3);
    let c = c3
        .element(vec![C64::new(2.0, 0.0), C64::new(0.0, 3.0), C64::new(-1.0, 1.0)])
        .expect("dim");
    let (pts, perm) = catalog::orbit_symmetric_set(&c, &c3.basis(1), &[0.3, 0.7, 1.1], 6, 0.2);
    let refl = isometry::reflection_fixed_point_check(&pts, &c, &perm);
    push(
        "reflection_fixed_point",
        matches!(refl, Ok(r) if r <= 1e-9),
        refl.unwrap_or(f64::NAN),
    );

    let mut hoo_ok = true;
    for k in 0..3 {
        let t = catalog::make_hoo_scenario();
        let cfg = EngineConfig {
            seed: seed ^ k,
            ..EngineConfig::default()
        };
        hoo_ok &= matches!(
            isometry::extend_isometry(&t, &cfg),
            Ok((_, r)) if matches!(&r.verdict, ExtensionVerdict::FailsExtension(w) if w.check == "additivity" && w.discrepancy >= 0.5)
        );
    }
    push("hoo_negative_control", hoo_ok, 0.0);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_scenarios_parse() {
        for (id, json) in SHIPPED {
            let spec = parse_scenario(json).unwrap_or_else(|e| panic!("{id}: {e}"));
            assert_eq!(spec.id, id);
            for name in &spec.checks {
                assert!(spec.expect.contains_key(name), "{id}: no expectation for {name}");
            }
        }
    }

    #[test]
    fn parse_errors_carry_positions() {
        match parse_scenario("{\n  \"id\": 3\n}") {
            Err(ScenarioError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_checks_are_rejected() {
        let json = SHIPPED[0].1.replace("\"self_check\"", "\"no_such_check\"");
        assert!(matches!(parse_scenario(&json), Err(ScenarioError::UnknownCheck(c)) if c == "no_such_check"));
    }

    #[test]
    fn broken_fixture_is_caught() {
        assert!(matches!(
            run_scenario_str(BROKEN_FIXTURE, None, false),
            Err(ScenarioError::FixtureSelfCheckFailed(_))
        ));
    }

    #[test]
    fn dame_identity_scenario_matches() {
        let json = SHIPPED.iter().find(|(id, _)| *id == "dame_identity").unwrap().1;
        let r = run_scenario_str(json, None, false).unwrap();
        assert!(r.all_match, "{}", summary_table(&[r.clone()]));
        let m = r.checks.iter().find(|c| c.name == "multiplicativity").unwrap();
        assert!(m.residuals["mult_residual"] >= 0.99);
    }

    #[test]
    fn reports_are_deterministic() {
        let json = SHIPPED.iter().find(|(id, _)| *id == "hoo").unwrap().1;
        let a = run_scenario_str(json, Some(7), false).unwrap().to_json();
        let b = run_scenario_str(json, Some(7), false).unwrap().to_json();
        assert_eq!(a, b);
        assert!(a.contains("\"wall_time_ms\": null"));
    }
}
