//! Acceptance suite. Prints one line per criterion and exits non-zero if
//! any criterion fails.

use std::time::Instant;

use isoext::catalog::{self, Form};
use isoext::classify::{self, ClassifyError, MultVerdict};
use isoext::isometry::{self, EngineConfig, EngineError, ExtensionVerdict, PartialIsometry};
use isoext::linalg::{self, CMatrix, C64, ZERO};
use isoext::numrange;
use isoext::radical;
use isoext::sampling::Sampler;
use isoext::scenario;
use isoext::spectral;
use isoext::Element;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Positive extension on twenty catalog isometries.
fn criterion_1() -> Outcome {
    let cfg = EngineConfig {
        seed: 101,
        ..EngineConfig::default()
    };
    let maps = catalog::catalog_isometries(2024);
    ensure(maps.len() == 20, || format!("{} maps", maps.len()))?;
    let mut worst = 0.0_f64;
    for t in &maps {
        let (_, r) = isometry::extend_isometry(t, &cfg).map_err(|e| format!("{}: {e}", t.name))?;
        ensure(r.verdict == ExtensionVerdict::ExtendsAsTheorem, || format!("{}: {:?}", t.name, r.verdict))?;
        for v in [
            r.additivity_residual,
            r.homogeneity_residual,
            r.isometry_residual,
            r.agreement_residual,
            r.u0_radical_distance,
        ] {
            ensure(v <= 1e-8, || format!("{}: residual {v:.3e}", t.name))?;
            worst = worst.max(v);
        }
    }
    // Injected radical offsets are recovered.
    let b = catalog::make_dame_pair().b;
    let mut s = Sampler::new(77);
    let mut u_err = 0.0_f64;
    for _ in 0..5 {
        let u = catalog::random_dame_radical(&b, &mut s);
        let t = catalog::translation_map(&b, &u);
        let (cand, _) = isometry::extend_isometry(&t, &cfg).map_err(|e| e.to_string())?;
        let err = linalg::max_abs(&(&cand.offset - &u).into_coords());
        ensure(err <= 1e-9, || format!("u0 error {err:.3e}"))?;
        u_err = u_err.max(err);
    }
    Ok(format!("20 maps, worst residual {worst:.2e}, u0 error {u_err:.2e}"))
}

/// The two-ball example fails extension with an additivity witness.
fn criterion_2() -> Outcome {
    let mut min_disc = f64::INFINITY;
    for seed in 0..10u64 {
        let t = catalog::make_hoo_scenario();
        let cfg = EngineConfig {
            seed,
            ..EngineConfig::default()
        };
        let (_, r) = isometry::extend_isometry(&t, &cfg).map_err(|e| e.to_string())?;
        match &r.verdict {
            ExtensionVerdict::FailsExtension(w) if w.check == "additivity" && w.points.len() == 2 => {
                // Independent recomputation of the witness discrepancy.
                let a = t.source.element(w.points[0].clone()).unwrap();
                let b = t.source.element(w.points[1].clone()).unwrap();
                let d = t.apply(&(&a + &b)).dist(&(&t.apply(&a) + &t.apply(&b)));
                ensure((d - w.discrepancy).abs() <= 1e-12 && d >= 0.5, || format!("seed {seed}: {d}"))?;
                min_disc = min_disc.min(d);
            }
            v => return Err(format!("seed {seed}: {v:?}")),
        }
    }
    // The report carries the witness pair and it survives serialization.
    let json = scenario::SHIPPED.iter().find(|(id, _)| *id == "hoo").unwrap().1;
    let rep = scenario::run_scenario_str(json, Some(3), false).map_err(|e| e.to_string())?;
    let ext = rep.checks.iter().find(|c| c.name == "extend").unwrap();
    let w = ext.witnesses.get("failure").ok_or("no witness in report")?;
    ensure(w.len() == 2 && ext.notes["failed_check"] == "additivity", || "bad witness".into())?;
    let parsed: serde_json::Value = serde_json::from_str(&rep.to_json()).unwrap();
    let back = &parsed["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "extend")
        .unwrap()["witnesses"]["failure"];
    for (p, q) in w.iter().zip(back.as_array().unwrap()) {
        for (z, zz) in p.iter().zip(q.as_array().unwrap()) {
            let re = zz[0].as_f64().unwrap();
            let im = zz[1].as_f64().unwrap();
            ensure(re.to_bits() == z.re.to_bits() && im.to_bits() == z.im.to_bits(), || {
                "witness did not round-trip".into()
            })?;
        }
    }
    Ok(format!("10 seeds, min discrepancy {min_disc:.3}"))
}

/// Radical elements are quasi-nilpotent against the principal component;
/// non-radical elements have a witness.
fn criterion_3() -> Outcome {
    let pair = catalog::make_dame_pair();
    let mut worst_rad = 0.0_f64;
    let mut s = Sampler::new(303);
    for alg in [&pair.a, &pair.b] {
        let rad = radical::dickson_radical(alg);
        ensure(rad.dim_radical == 3, || format!("radical dim {}", rad.dim_radical))?;
        for u in &rad.basis {
            for _ in 0..200 {
                let b = s.principal_component(alg);
                let r = spectral::spectral_radius(&b.mul(u).unwrap());
                ensure(r <= 1e-8, || format!("r(bu) = {r:.3e}"))?;
                worst_rad = worst_rad.max(r);
            }
        }
    }
    let mut max_trials = 0;
    let algebras = [
        catalog::make_matrix_algebra(2),
        catalog::make_matrix_algebra(3),
        pair.a.clone(),
        pair.b.clone(),
    ];
    for alg in &algebras {
        for _ in 0..50 {
            let a = s.element(alg, 1.0);
            ensure(!radical::in_dickson_radical(&a, 1e-9), || "sampled a radical element".into())?;
            let found = (1..=500).find(|_| {
                let b = s.principal_component(alg);
                spectral::spectral_radius(&b.mul(&a).unwrap()) >= 0.05
            });
            let k = found.ok_or_else(|| format!("no witness in {} for {:?}", alg.name(), a))?;
            max_trials = max_trials.max(k);
        }
    }
    Ok(format!("max r(bu) {worst_rad:.2e}, witnesses within {max_trials} trials"))
}

fn unit_direction(alg: &std::sync::Arc<isoext::Algebra>, s: &mut Sampler) -> Element {
    let v = s.element(alg, 1.0);
    v.scale_real(1.0 / v.norm())
}

/// Midpoints are preserved; reflection-symmetric sets have their centre fixed.
fn criterion_4() -> Outcome {
    let mut s = Sampler::new(404);
    let mut worst_mid = 0.0_f64;
    for t in catalog::catalog_isometries(4040) {
        let mut tested = 0;
        let mut attempts = 0;
        while tested < 100 {
            attempts += 1;
            ensure(attempts < 1000, || format!("{}: too few segments", t.name))?;
            let f = t.domain.sample(&t.source, &mut s).map_err(|e| e.to_string())?;
            let g = &f + &s.element(&t.source, 0.3);
            match isometry::midpoint_check(&t, &f, &g) {
                Ok(r) => {
                    ensure(r <= 1e-9, || format!("{}: midpoint residual {r:.3e}", t.name))?;
                    worst_mid = worst_mid.max(r);
                    tested += 1;
                }
                Err(EngineError::SegmentLeavesDomain { .. }) => {}
                Err(e) => return Err(e.to_string()),
            }
        }
    }

    // Symmetric orbit sets, pushed through catalog isometries.
    let maps = catalog::catalog_isometries(4041);
    let mut worst_refl = 0.0_f64;
    for k in 0..20 {
        let t: &PartialIsometry = &maps[k % maps.len()];
        let c = t.domain.sample(&t.source, &mut s).map_err(|e| e.to_string())?;
        let v = unit_direction(&t.source, &mut s);
        let radii: Vec<f64> = (0..4).map(|_| s.uniform(0.05, 0.5)).collect();
        let (pts, perm) = catalog::orbit_symmetric_set(&c, &v, &radii, 2 * (1 + k % 4), s.uniform(0.0, 6.0));
        let image: Vec<Element> = pts.iter().map(|p| t.apply(p)).collect();
        let r = isometry::reflection_fixed_point_check(&image, &t.apply(&c), &perm).map_err(|e| format!("set {k}: {e}"))?;
        ensure(r <= 1e-9, || format!("set {k}: {r:.3e}"))?;
        worst_refl = worst_refl.max(r);
    }
    let (pts, c, perm) = catalog::asymmetric_counterexample();
    let asym = isometry::reflection_fixed_point_check(&pts, &c, &perm);
    ensure(matches!(asym, Err(EngineError::NotSymmetric { .. })), || format!("{asym:?}"))?;
    Ok(format!("midpoint {worst_mid:.2e}, reflection {worst_refl:.2e}, asymmetric set rejected"))
}

/// Numerical-range machinery.
fn criterion_5() -> Outcome {
    let m2 = catalog::make_matrix_algebra(2);
    let diag_i = m2.element(vec![C64::new(0.0, 1.0), ZERO, ZERO, ZERO]).unwrap();
    let v = numrange::sup_im_numrange(&diag_i);
    ensure((v - 1.0).abs() <= 1e-6, || format!("diag(i,0): {v}"))?;

    let mut s = Sampler::new(505);
    let mut worst_herm = 0.0_f64;
    for n in [2, 3] {
        let alg = catalog::make_matrix_algebra(n);
        for _ in 0..50 {
            let g = s.gaussian_matrix(n);
            let h = (&g + g.adjoint()).scale(0.5);
            let w = numrange::sup_im_numrange(&catalog::matrix_to_element(&alg, &h)).abs();
            ensure(w <= 1e-8, || format!("Hermitian sup Im W = {w:.3e}"))?;
            worst_herm = worst_herm.max(w);
        }
    }

    for alg in catalog::catalog_algebras() {
        for _ in 0..1000 {
            let b = s.element(&alg, 1.0);
            ensure(numrange::check_norm_numradius(&b), || format!("{}: {:?}", alg.name(), b))?;
        }
    }

    let maps = catalog::catalog_isometries(5050);
    let mut worst_probe = f64::NEG_INFINITY;
    for run in 0..50 {
        let t = &maps[run % maps.len()];
        let cfg = EngineConfig {
            seed: run as u64,
            samples: 10,
            ..EngineConfig::default()
        };
        let (cand, _) = isometry::extend_isometry(t, &cfg).map_err(|e| e.to_string())?;
        let a = t.domain.sample(&t.source, &mut s).map_err(|e| e.to_string())?;
        let p = isometry::proof_numrange_probe(&cand, t, &a).ok_or("candidate not invertible")?;
        ensure(p <= 1e-6, || format!("{}: sup Im W = {p:.3e}", t.name))?;
        worst_probe = worst_probe.max(p);
    }
    Ok(format!(
        "diag(i,0) -> {v:.9}, Hermitian {worst_herm:.1e}, 7000 norm bounds, probe {worst_probe:.1e}"
    ))
}

/// The dame pair.
fn criterion_6() -> Outcome {
    let pair = catalog::make_dame_pair();
    let t = catalog::dame_identity_map(&pair);
    let r = classify::check_map_multiplicativity(&t, 200, 606, 1e-8).map_err(|e| e.to_string())?;
    ensure(r.verdict == MultVerdict::Neither, || format!("{:?}", r.verdict))?;
    ensure(r.mult_residual >= 0.99 && r.antimult_residual >= 0.99, || {
        format!("residuals {} {}", r.mult_residual, r.antimult_residual)
    })?;
    // E13 is the difference of the two products on the fixed witness.
    let e13 = pair.b.basis(2);
    ensure((e13.norm() - 1.0).abs() <= 1e-15, || "||E13|| != 1".into())?;
    for alg in [&pair.a, &pair.b] {
        let d = radical::dickson_radical(alg).dim_radical;
        ensure(d == 3, || format!("{}: radical dim {d}", alg.name()))?;
    }
    let c = classify::comsem_pipeline(&t, true, true, &EngineConfig::default());
    ensure(matches!(c, Err(ClassifyError::FlagContradiction(_))), || format!("{c:?}"))?;
    Ok(format!(
        "Neither, residuals {:.3}/{:.3}, radicals 3/3, FlagContradiction",
        r.mult_residual, r.antimult_residual
    ))
}

/// Matrix classification round trip.
fn criterion_7() -> Outcome {
    let mut s = Sampler::new(707);
    let mut worst_err = 0.0_f64;
    let mut min_gap = f64::INFINITY;
    let mut min_noisy = f64::INFINITY;
    for n in [2, 3, 4] {
        for form in Form::HYPOTHESES {
            for k in 0..10 {
                let u = s.invertible_matrix(n, 50.0);
                let ui = u.clone().try_inverse().unwrap();
                let map = |m: &CMatrix| &u * form.phi(m) * &ui;
                let seed = (n * 100 + k) as u64;
                let r = classify::classify_matrix_isometry(&map, n, 2 * n * n + 8, seed).map_err(|e| e.to_string())?;
                ensure(r.form == form, || format!("n={n} {form:?}: got {:?}", r.form))?;
                let target = classify::normalize_u(&u);
                let err = (&r.u - &target).norm() / target.norm();
                ensure(err <= 1e-6, || format!("n={n} {form:?}: U error {err:.3e}"))?;
                worst_err = worst_err.max(err);
                let h = Form::HYPOTHESES.iter().position(|f| *f == form).unwrap();
                let truth = r.hypothesis_residuals[h].max(f64::MIN_POSITIVE);
                let false_min = (0..4)
                    .filter(|&j| j != h)
                    .map(|j| r.hypothesis_residuals[j])
                    .fold(f64::INFINITY, f64::min);
                let gap = false_min / truth;
                ensure(gap >= 1e4, || format!("n={n} {form:?}: gap {gap:.3e}"))?;
                min_gap = min_gap.min(gap);

                let noise = std::cell::RefCell::new(Sampler::new(seed ^ 0xABC));
                let noisy = |m: &CMatrix| &u * form.phi(m) * &ui + noise.borrow_mut().gaussian_matrix(n).scale(0.1);
                let r = classify::classify_matrix_isometry(&noisy, n, 2 * n * n + 8, seed).map_err(|e| e.to_string())?;
                ensure(r.form == Form::NoFormFits, || format!("n={n} {form:?}: noisy map gave {:?}", r.form))?;
                min_noisy = min_noisy.min(r.residual);
            }
        }
    }
    Ok(format!(
        "120 maps, U error {worst_err:.1e}, min gap {min_gap:.1e}, noisy min residual {min_noisy:.3}"
    ))
}

/// Trace-form membership agrees with the spectral test.
fn criterion_8() -> Outcome {
    let mut total = 0;
    for (i, alg) in catalog::catalog_algebras().iter().enumerate() {
        let (d, w) = scenario::radical_cross_oracle(alg, 100, 800 + i as u64);
        ensure(d == 0, || format!("{}: {d} disagreements, e.g. {:?}", alg.name(), w.first()))?;
        total += 100;
    }
    Ok(format!("{total} elements, 0 disagreements"))
}

/// Self-test reports are byte-identical for a fixed seed.
fn criterion_9() -> Outcome {
    let a = scenario::selftest(Some(9), false);
    let b = scenario::selftest(Some(9), false);
    ensure(a.all_pass, || format!("selftest failed: {:?}", a.scenario_errors))?;
    let (ja, jb) = (a.to_json(), b.to_json());
    ensure(ja == jb, || "reports differ".into())?;
    Ok(format!("{} bytes identical", ja.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 extension of catalog isometries", criterion_1),
        ("2 two-ball negative control", criterion_2),
        ("3 radical quasi-nilpotence", criterion_3),
        ("4 midpoints and reflections", criterion_4),
        ("5 numerical range", criterion_5),
        ("6 dame pair", criterion_6),
        ("7 matrix classification", criterion_7),
        ("8 radical cross-oracle", criterion_8),
        ("9 determinism", criterion_9),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (name, f) in criteria {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  criterion {name:<36} ({secs:5.2}s)  {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  criterion {name:<36} ({secs:5.2}s)  {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed, {:.1}s", 9 - failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
