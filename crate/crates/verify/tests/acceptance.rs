//! Acceptance criteria, one `PASS`/`FAIL` line each. Runs without the libtest harness so every
//! verdict is printed and the criteria run one after another (wall-clock budgets are measured
//! without contention). Exits non-zero when any criterion fails.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use renv_cli::{emit_series, flatten};
use renv_core::analysis::{c11_crosscheck, hessian_quadform, CheckReport, DiffConfig};
use renv_core::envelope::{
    dist_sq, half_dist_sq, lasry_lions_field, EnvelopeParams, Field, InfConvolution, LocalizationMode, SolverConfig,
};
use renv_core::manifold::{Manifold, Point};
use renv_core::numeric::{curvature_check, ConformalMetric};
use renv_core::theorems::{gap_order_report, run_suite, SuiteId, SuiteSpec};
use renv_verify::{run_all, verdict, Verdict};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Point at distance `d` from the origin along the first frame axis.
fn along(m: &Manifold<f64>, d: f64) -> Point<f64> {
    let o = m.origin();
    let mut u = vec![0.0; m.dim()];
    u[0] = d;
    m.exp(&o, &m.combine(&o, &m.orthonormal_frame(&o), &u)).unwrap()
}

fn all_reports<'a>(r: &'a CheckReport, out: &mut Vec<&'a CheckReport>) {
    out.push(r);
    for c in &r.children {
        all_reports(c, out);
    }
}

// Reference coefficients of the K = -1 example f = d(., x0)^2 checked by criteria 1 and 2.
fn stated_inf(l: f64) -> f64 {
    (2.0 + l) / (2.0 * (1.0 + l) * (1.0 + l))
}
fn stated_argmin(l: f64) -> f64 {
    l / (1.0 + l)
}
fn stated_ll(l: f64, mu: f64) -> f64 {
    let lp = (1.0 + l) * (1.0 + l) / (2.0 + l);
    1.0 / (2.0 * (lp - mu))
}

const DISTANCES: [f64; 3] = [0.5, 1.0, 2.0];
const LAMBDAS: [f64; 2] = [0.5, 1.0];

fn criterion_01_hyperbolic_inf_convolution() -> Verdict {
    let m = Manifold::hyperbolic(2, -1.0).unwrap();
    let f = dist_sq(&m, &m.origin());
    let t = Instant::now();
    let (mut worst_c, mut worst_a) = (0.0_f64, 0.0_f64);
    for l in LAMBDAS {
        let inf = InfConvolution::new(&f, l, LocalizationMode::Auto, SolverConfig::default());
        for d in DISTANCES {
            let x = along(&m, d);
            let e = inf.solve(&x).unwrap();
            worst_c = worst_c.max(rel(e.value / (d * d), stated_inf(l)));
            worst_a = worst_a.max(rel(m.dist(&x, &e.point).unwrap(), stated_argmin(l) * d));
        }
    }
    let dt = t.elapsed();
    let ok = worst_c <= 1e-3 && worst_a <= 1e-3 && dt <= Duration::from_secs(10);
    verdict(
        "hyperbolic f_lambda coefficient and argmin distance within 1e-3, <= 10 s",
        ok,
        format!("worst coefficient rel err {worst_c:.3e}, worst argmin rel err {worst_a:.3e}, {dt:.2?}"),
    )
}

fn criterion_02_hyperbolic_lasry_lions() -> Verdict {
    let m = Manifold::hyperbolic(2, -1.0).unwrap();
    let f = dist_sq(&m, &m.origin());
    let q = 2.0;
    let t = Instant::now();
    let mut worst = 0.0_f64;
    for l in LAMBDAS {
        let mu = l / (2.0 * q);
        let ll = lasry_lions_field(&f, &EnvelopeParams::new(l, mu, q).unwrap(), &SolverConfig::default()).unwrap();
        for d in DISTANCES {
            let v = ll.value(&along(&m, d)).unwrap();
            worst = worst.max(rel(v / (d * d), stated_ll(l, mu)));
        }
    }
    let dt = t.elapsed();
    let ok = worst <= 5e-3 && dt <= Duration::from_secs(60);
    verdict(
        "hyperbolic (f_lambda)^mu coefficient within 5e-3, <= 60 s",
        ok,
        format!("worst rel err {worst:.3e}, {dt:.2?}"),
    )
}

fn criterion_03_flat_oracle() -> Verdict {
    let m = Manifold::euclidean(2).unwrap();
    let f = half_dist_sq(&m, &m.origin());
    let (l, mu) = (1.0, 0.25);
    let inf = InfConvolution::new(&f, l, LocalizationMode::Auto, SolverConfig::default());
    let ll = lasry_lions_field(&f, &EnvelopeParams::new(l, mu, 2.0).unwrap(), &SolverConfig::default()).unwrap();
    let mut worst = 0.0_f64;
    for i in 0..20 {
        let (r, th) = (0.1 + 0.1 * i as f64, 2.4 * i as f64);
        let x = m.point(&[r * th.cos(), r * th.sin()]).unwrap();
        let n2 = r * r;
        worst = worst.max((inf.value(&x).unwrap() - n2 / (2.0 * (1.0 + l))).abs());
        worst = worst.max((ll.value(&x).unwrap() - n2 / (2.0 * (1.0 + l - mu))).abs());
    }
    verdict(
        "flat quadratic f_lambda and (f_lambda)^mu within 1e-6 at 20 points",
        worst <= 1e-6,
        format!("worst abs err {worst:.3e}"),
    )
}

fn criterion_04_gap_order() -> Verdict {
    let mut slopes = Vec::new();
    for m in [Manifold::sphere(2, 1.0).unwrap(), Manifold::hyperbolic(2, -1.0).unwrap()] {
        let rep = gap_order_report(&m, &DiffConfig::default()).unwrap();
        for r in rep.rows.iter().filter(|r| r.label.ends_with("/slope")) {
            slopes.push((format!("{} {}", m.name(), r.label), r.value_numeric));
        }
    }
    let ok = slopes.len() == 4 && slopes.iter().all(|(_, s)| (1.9..=2.1).contains(s));
    let detail = slopes.iter().map(|(k, s)| format!("{k} {s:.4}")).collect::<Vec<_>>().join(", ");
    verdict("dexp and inverse-exp gap slopes in [1.9, 2.1] on K = +1 and K = -1", ok, detail)
}

fn criterion_05_convexity_lemma() -> Verdict {
    let mut spec = SuiteSpec::new(SuiteId::ConvexityLemma);
    spec.samples = 10_000;
    spec.constants = [Some(2.0), Some(4.0), Some(1.0)];
    let t = Instant::now();
    let rep = run_suite(&spec).unwrap();
    spec.constants[1] = Some(0.0);
    let ablation = run_suite(&spec).unwrap();
    let dt = t.elapsed();
    let ok = rep.pass && !ablation.pass && dt <= Duration::from_secs(30);
    verdict(
        "convexity lemma passes with 1e4 samples (A=2, B=4, C=1), B=0 ablation fails, <= 30 s",
        ok,
        format!(
            "worst {:.3e} vs slack {:.3e}; ablation worst {:.3e}; {dt:.2?}",
            rep.worst_violation, rep.slack, ablation.worst_violation
        ),
    )
}

/// The sphere bump pipeline, run once and shared with the determinism check.
fn regularization_run() -> &'static (CheckReport, Duration) {
    static RUN: OnceLock<(CheckReport, Duration)> = OnceLock::new();
    RUN.get_or_init(|| {
        let t = Instant::now();
        let rep = run_suite(&SuiteSpec::new(SuiteId::Regularization)).unwrap();
        (rep, t.elapsed())
    })
}

fn criterion_06_sphere_pipeline() -> Verdict {
    let (rep, dt) = regularization_run();
    let mut all = Vec::new();
    all_reports(rep, &mut all);
    let checks = |name: &str| all.iter().filter(|r| r.suite == name).map(|r| r.pass).collect::<Vec<_>>();
    let semiconvex = checks("regularization/b-semiconvex");
    let semiconcave = checks("regularization/b-semiconcave");
    let q = 2.0;
    let mut lips = Vec::new();
    for r in all.iter().filter(|r| r.suite == "regularization/c-grad-lip") {
        let row = &r.rows[0];
        lips.push((row.lambda, row.value_numeric, 1.05 * q / (row.lambda / 4.0)));
    }
    let mut errs: Vec<(f64, f64)> = all
        .iter()
        .filter(|r| r.suite == "regularization/d-uniform-error")
        .map(|r| (r.rows[0].lambda, r.rows[0].value_numeric))
        .collect();
    errs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let decreasing = errs.windows(2).all(|w| w[1].1 < w[0].1);
    let ok = !semiconvex.is_empty()
        && semiconvex.iter().chain(&semiconcave).all(|&p| p)
        && lips.len() == 3
        && lips.iter().all(|&(_, v, b)| v <= b)
        && errs.len() == 3
        && decreasing
        && *dt <= Duration::from_secs(300);
    let lip_s = lips
        .iter()
        .map(|(l, v, b)| format!("{l}: {v:.1}<={b:.0}"))
        .collect::<Vec<_>>()
        .join(" ");
    let err_s = errs.iter().map(|(l, e)| format!("{l}: {e:.3e}")).collect::<Vec<_>>().join(" ");
    verdict(
        "sphere bump pipeline: semiconvex/semiconcave with q/(2mu), grad-Lip <= 1.05 q/mu, error strictly decreasing, <= 5 min",
        ok,
        format!(
            "{} semiconvex + {} semiconcave checks, grad-Lip [{lip_s}], sup error [{err_s}], {dt:.1?}",
            semiconvex.len(),
            semiconcave.len()
        ),
    )
}

fn criterion_07_lipschitz_preservation() -> Verdict {
    let rep = run_suite(&SuiteSpec::new(SuiteId::LipschitzPreservation)).unwrap();
    let est = |l: f64| rep.params[&format!("lip[{l}]")];
    let (a, b, c) = (est(0.05), est(0.02), est(0.01));
    let ok = a <= 1.05 && b <= 1.05 && (0.95..=1.05).contains(&c);
    verdict(
        "Lip(f_lambda) <= 1.05 for lambda <= 0.05 and >= 0.95 at lambda = 0.01 (min{2, d(., p1)}, K = -1)",
        ok,
        format!("Lip at 0.05/0.02/0.01: {a:.5} {b:.5} {c:.5}"),
    )
}

fn criterion_08_warped_curvature() -> Verdict {
    let metric = ConformalMetric::<f64>::warped();
    let metric = metric.clone().with_region(metric.x2_min, 200.0).unwrap();
    let mut worst = 0.0_f64;
    for i in 0..10 {
        let x2 = 0.5 + 3.5 * i as f64 / 9.0;
        let k = curvature_check(&metric, &Point::new(&[0.0, x2]), 1e-2).unwrap();
        worst = worst.max(rel(k, -2.0 * x2 * x2));
    }
    verdict(
        "warped circumference-deficit curvature matches -2 x2^2 within 1e-3 at 10 heights",
        worst <= 1e-3,
        format!("worst rel err {worst:.3e}"),
    )
}

fn criterion_09_hessian_growth() -> Verdict {
    let m = Manifold::hyperbolic(2, -1.0).unwrap();
    let o = m.origin();
    let f = dist_sq(&m, &o);
    let tangential = |d: f64| {
        let x = along(&m, d);
        let frame = m.orthonormal_frame(&x);
        let c = m.frame_coords(&frame, &m.log(&x, &o).unwrap());
        let n = (c[0] * c[0] + c[1] * c[1]).sqrt();
        let perp = m.combine(&x, &frame, &[-c[1] / n, c[0] / n]);
        hessian_quadform(&f, &x, &perp, &DiffConfig::default()).unwrap()
    };
    let ratio = tangential(6.0) / tangential(1.0);
    let predicted = (6.0 / 6f64.tanh()) / (1.0 / 1f64.tanh());
    verdict(
        "tangential Hessian of d^2 on K = -1, ratio d=6 vs d=1 >= 3",
        ratio >= 3.0,
        format!("ratio {ratio:.4} (closed form {predicted:.4})"),
    )
}

fn criterion_10_c11_coherence() -> Verdict {
    let cfg = DiffConfig {
        n_samples: 64,
        ..DiffConfig::default()
    };
    let mut spreads = Vec::new();
    for m in [
        Manifold::euclidean(2).unwrap(),
        Manifold::sphere(2, 1.0).unwrap(),
        Manifold::hyperbolic(2, -1.0).unwrap(),
    ] {
        let o = m.origin();
        let (_, est) = c11_crosscheck(&half_dist_sq(&m, &o), &o, 1.0, f64::NAN, &cfg).unwrap();
        spreads.push((m.name(), est.spread(), est.as_array()));
    }
    let ok = spreads.iter().all(|(_, s, _)| *s <= 0.15);
    let detail = spreads
        .iter()
        .map(|(n, s, a)| format!("{n} spread {s:.4} {a:.4?}"))
        .collect::<Vec<_>>()
        .join("; ");
    verdict(
        "C^{1,1} constants of d^2/2 agree within 15% on the three constant-curvature spaces",
        ok,
        detail,
    )
}

fn criterion_11_determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let mut differing = Vec::new();
    for id in SuiteId::ALL {
        let spec = SuiteSpec::new(id);
        let first = match id {
            SuiteId::Regularization => regularization_run().0.clone(),
            _ => run_suite(&spec).unwrap(),
        };
        let second = run_suite(&spec).unwrap();
        let (a, b) = (dir.path().join(format!("{id}-1.csv")), dir.path().join(format!("{id}-2.csv")));
        emit_series(Some(&a), &flatten(&first)).unwrap();
        emit_series(Some(&b), &flatten(&second)).unwrap();
        if std::fs::read(&a).unwrap() != std::fs::read(&b).unwrap() {
            differing.push(id.name());
        }
    }
    verdict(
        "every suite re-run with the same seed gives byte-identical CSV",
        differing.is_empty(),
        format!("{} suites, differing: {differing:?}", SuiteId::ALL.len()),
    )
}

fn main() {
    let criteria: [fn() -> Verdict; 11] = [
        criterion_01_hyperbolic_inf_convolution,
        criterion_02_hyperbolic_lasry_lions,
        criterion_03_flat_oracle,
        criterion_04_gap_order,
        criterion_05_convexity_lemma,
        criterion_06_sphere_pipeline,
        criterion_07_lipschitz_preservation,
        criterion_08_warped_curvature,
        criterion_09_hessian_growth,
        criterion_10_c11_coherence,
        criterion_11_determinism,
    ];
    let failed = run_all(&criteria);
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
