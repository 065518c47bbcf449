use proptest::prelude::*;

use super::*;
use crate::analysis::{CheckReport, DiffConfig, Region};
use crate::envelope::{bump, constant, truncated_dist, SolverConfig};
use crate::error::Error;
use crate::manifold::{Manifold, Point};

fn sphere() -> Manifold<f64> {
    Manifold::sphere(2, 1.0).unwrap()
}

fn hyper() -> Manifold<f64> {
    Manifold::hyperbolic(2, -1.0).unwrap()
}

fn at(m: &Manifold<f64>, x: &Point<f64>, u: [f64; 2]) -> Point<f64> {
    m.exp(x, &m.combine(x, &m.orthonormal_frame(x), &u)).unwrap()
}

fn child<'a>(r: &'a CheckReport, suite: &str) -> &'a CheckReport {
    r.children.iter().find(|c| c.suite == suite).unwrap_or_else(|| panic!("no child {suite}"))
}

/// Plain bisection for the largest `t` in `(0, hi)` where a decreasing-then-failing predicate holds.
fn bisect(ok: impl Fn(f64) -> bool, hi: f64) -> f64 {
    let (mut a, mut b) = (1e-9, hi);
    for _ in 0..100 {
        let m = 0.5 * (a + b);
        if ok(m) {
            a = m;
        } else {
            b = m;
        }
    }
    a
}

#[test]
fn epsilon_is_root_of_quadratic() {
    // h_eps(2) = 2 <=> 8e + 1 - e^2 = 2(1 - 4e + 3e^2) <=> 7e^2 - 16e + 1 = 0.
    let root = (16.0 - (256.0f64 - 28.0).sqrt()) / 14.0;
    let (eps, _) = admissible_r(2.0, 1.0).unwrap();
    assert!((eps - root).abs() < 1e-9, "{eps} vs {root}");
    assert!((h_eps_at_two(root) - 2.0).abs() < 1e-12);
}

#[test]
fn radius_for_q2_k1() {
    let (eps, r) = admissible_r(2.0, 1.0).unwrap();
    assert_eq!(binding_condition(2.0).unwrap(), 0);
    // Binding condition alone, by an independent bisection.
    let t = bisect(|t| t * t.sin() * t.cos() / t.sinh().powi(2) >= 1.0 - eps, 1.0);
    assert!((r - t / 2.0).abs() < 1e-9, "{r} vs {}", t / 2.0);
    // Small-t expansion: 1 - (4/3) t^2 = 1 - eps gives 2R close to sqrt(eps).
    assert!((r - 0.125).abs() < 5e-3, "{r}");
    // The other two conditions hold over (0, 2R].
    for i in 1..=200 {
        let l = 2.0 * r * i as f64 / 200.0;
        assert!(l / l.sin() <= 1.0 + eps);
        assert!(l / l.tanh() <= 1.0 + eps);
    }
    assert!(2.0 * r < std::f64::consts::FRAC_PI_4);
}

#[test]
fn epsilon_is_capped_for_large_q() {
    let (eps, r) = admissible_r(1e6, 1.0).unwrap();
    assert_eq!(eps, 0.25);
    assert!(2.0 * r < std::f64::consts::FRAC_PI_4);
}

#[test]
fn radius_rejects_bad_input() {
    assert!(matches!(admissible_r(1.0, 1.0), Err(Error::NoFeasibleEpsilon { .. })));
    assert!(matches!(admissible_r(0.5, 1.0), Err(Error::NoFeasibleEpsilon { .. })));
    assert!(admissible_r(2.0, 0.0).is_err());
    assert!(admissible_r(2.0, -1.0).is_err());
}

#[test]
fn radius_monotone_on_grid() {
    let qs = [1.2, 1.5, 2.0, 3.0, 5.0];
    let ks = [0.25, 0.5, 1.0, 2.0, 4.0];
    for &q in &qs {
        let rs: Vec<f64> = ks.iter().map(|&k| admissible_r(q, k).unwrap().1).collect();
        assert!(rs.windows(2).all(|w| w[1] <= w[0]), "q = {q}: {rs:?}");
    }
    for &k in &ks {
        let rs: Vec<f64> = qs.iter().map(|&q| admissible_r(q, k).unwrap().1).collect();
        assert!(rs.windows(2).all(|w| w[1] >= w[0]), "K0 = {k}: {rs:?}");
    }
}

#[test]
fn lemma_constants() {
    let k = LemmaConstants::minimal(2.0, 1.0);
    assert_eq!((k.a, k.b, k.c), (2.0, 4.0, 1.0));
    assert!(k.satisfies(2.0));
    assert!(!LemmaConstants { b: 0.0, ..k }.satisfies(2.0));
    assert!(!LemmaConstants { a: 1.5, ..k }.satisfies(2.0));
}

fn lemma_report(m: &Manifold<f64>, consts: LemmaConstants<f64>, n: usize) -> CheckReport {
    let (_, r) = admissible_r(2.0, 1.0).unwrap();
    let o = m.origin();
    let y0 = at(m, &o, [0.5 * r, 0.0]);
    let z0 = at(m, &o, [-0.3 * r, 0.0]);
    verify_convexity_lemma(m, 2.0, 1.0, consts, &o, &y0, &z0, n, &DiffConfig::default()).unwrap()
}

#[test]
fn convexity_lemma_sphere_and_ablation() {
    let s = sphere();
    let rep = lemma_report(&s, LemmaConstants::minimal(2.0, 1.0), 2000);
    assert!(rep.pass, "{:?}", rep.worst_violation);
    assert_eq!(rep.children.len(), 2);
    assert_eq!(rep.params["constants_admissible"], 1.0);

    let ablated = lemma_report(&s, LemmaConstants { a: 2.0, b: 0.0, c: 1.0 }, 2000);
    assert!(!ablated.pass);
    assert_eq!(ablated.params["constants_admissible"], 0.0);
    assert!(!ablated.notes.is_empty());
}

#[test]
fn convexity_lemma_flat() {
    // On R^n, phi is a quadratic form; with A = 2, B = 4, C = 1 its matrix
    // [[A + B, -A], [-A, A - C]] = [[6, -2], [-2, 1]] is positive definite.
    let (a, b, c) = (2.0f64, 4.0, 1.0);
    let (tr, det) = (a + b + a - c, (a + b) * (a - c) - a * a);
    assert!(tr > 0.0 && det > 0.0);
    let e = Manifold::euclidean(2).unwrap();
    let rep = lemma_report(&e, LemmaConstants { a, b, c }, 1000);
    assert!(rep.pass);
    // A < C makes the y-block concave.
    let bad = lemma_report(&e, LemmaConstants { a: 0.5, b: 4.0, c: 1.0 }, 1000);
    assert!(!bad.pass);
}

#[test]
fn convexity_lemma_checks_curvature_and_anchors() {
    let s = Manifold::sphere(2, 4.0).unwrap();
    let o = s.origin();
    let cfg = DiffConfig::default();
    let k = LemmaConstants::minimal(2.0, 1.0);
    assert!(verify_convexity_lemma(&s, 2.0, 1.0, k, &o, &o, &o, 10, &cfg).is_err());
    let u = sphere();
    let far = at(&u, &u.origin(), [0.5, 0.0]);
    assert!(verify_convexity_lemma(&u, 2.0, 1.0, k, &u.origin(), &far, &u.origin(), 10, &cfg).is_err());
}

#[test]
fn nonpositive_constants_formula() {
    let (eps, n, a0, b0) = nonpositive_constants(1.0, 1.0, 1.0).unwrap();
    let t = 2.0f64;
    assert!((1.0 - eps - (t / t.sinh()).powi(2)).abs() < 1e-14);
    assert!((n - t * t.cosh() / t.sinh()).abs() < 1e-14);
    // s = max(C0 N, 1) = N here.
    assert!((a0 - 4.0 * n / (1.0 - eps)).abs() < 1e-12);
    let e1 = 1.0 - eps;
    let want = 0.5 * (4.0 * a0 * a0 / (e1 * (e1 * a0 - 2.0 * n)) - a0);
    assert!((b0 - want).abs() < 1e-9 * want);
    // A0 exceeds 2s / (1 - eps), so B0 is finite and positive.
    assert!(a0 > 2.0 * n / e1 && b0 > 0.0);
    assert!(nonpositive_constants(0.0, 1.0, 1.0).is_err());
}

#[test]
fn nonpositive_lemma_examples() {
    let h = hyper();
    let o = h.origin();
    let y0 = at(&h, &o, [0.5, 0.0]);
    let cfg = DiffConfig::default();
    let base = verify_nonpositive_lemma(&h, 1.0, 1.0, 1.0, &o, &y0, 1000, &cfg).unwrap();
    assert!(base.pass, "{}", base.worst_violation);
    let doubled = verify_nonpositive_lemma(&h, 1.0, 1.0, 2.0, &o, &y0, 1000, &cfg).unwrap();
    assert!(doubled.pass);
    assert_eq!(doubled.params["B"], 2.0 * doubled.params["B0"]);
    let degenerate = verify_nonpositive_lemma(&h, 1.0, 0.0, 1.0, &o, &y0, 1000, &cfg).unwrap();
    assert!(degenerate.pass);
    assert!(verify_nonpositive_lemma(&sphere(), 0.1, 1.0, 1.0, &sphere().origin(), &sphere().origin(), 10, &cfg).is_err());
}

#[test]
fn stated_coefficients() {
    assert!((stated::inf_coefficient(1.0) - 0.375).abs() < 1e-15);
    assert!((stated::argmin_fraction(1.0) - 0.5).abs() < 1e-15);
    assert!((stated::lambda_prime(1.0) - 4.0 / 3.0).abs() < 1e-15);
    assert!((stated::ll_coefficient(1.0, 0.25) - 6.0 / 13.0).abs() < 1e-15);
}

/// Golden-section minimum of `g` on `[a, b]`.
fn golden(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let c = b - r * (b - a);
        let d = a + r * (b - a);
        if g(c) < g(d) {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

#[test]
fn exact_coefficients_match_line_search() {
    // Along the geodesic through x and x0, d(y, x0) = |d - s| for y at distance s from x.
    for &lambda in &[0.5, 1.0, 2.0] {
        for &d in &[0.5, 1.0, 3.0] {
            let g = |s: f64| (d - s).powi(2) + s * s / (2.0 * lambda);
            let s = golden(g, 0.0, d);
            assert!((g(s) / (d * d) - exact::inf_coefficient(lambda)).abs() < 1e-9);
            assert!((s / d - exact::argmin_fraction(lambda)).abs() < 1e-6);
            for &mu in &[0.1, 0.25] {
                let k = exact::inf_coefficient(lambda);
                let h = |s: f64| -(k * (d + s).powi(2) - s * s / (2.0 * mu));
                let s = golden(h, 0.0, 10.0 * d);
                assert!((-h(s) / (d * d) - exact::ll_coefficient(lambda, mu)).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn hyperbolic_counterexample_small() {
    let tol = CounterexampleTolerances::default();
    let rep =
        counterexample_hyperbolic(&[(1.0, 0.25)], &[1.0], &tol, &SolverConfig::default(), &DiffConfig::default()).unwrap();
    let exact_rep = child(&rep, "counterexample-hyperbolic/exact");
    assert!(exact_rep.pass);
    let stated_rep = child(&rep, "counterexample-hyperbolic/stated");
    assert!(!stated_rep.pass);
    let ll = stated_rep.rows.iter().find(|r| r.label == "ll/d^2").unwrap();
    assert!((ll.value_reference - 6.0 / 13.0).abs() < 1e-15);
    assert!((ll.value_numeric - 0.4).abs() < 1e-6);
    let hess = child(&rep, "counterexample-hyperbolic/hessian");
    assert!(hess.pass);
    let oracle = (6.0 / 6f64.tanh()) / (1.0 / 1f64.tanh());
    assert!((oracle - 4.57).abs() < 5e-3);
    for r in &hess.rows {
        assert!((r.value_numeric - oracle).abs() / oracle < 1e-3, "{}", r.value_numeric);
    }
    assert!(!rep.pass);
}

#[test]
fn hyperbolic_counterexample_rejects_large_mu() {
    let tol = CounterexampleTolerances::default();
    let r = counterexample_hyperbolic(&[(1.0, 1.5)], &[1.0], &tol, &SolverConfig::default(), &DiffConfig::default());
    assert!(r.is_err());
}

#[test]
fn warped_curvature_and_metadata() {
    let plan = WarpedPlan::<f64> { heights: Vec::new(), ..WarpedPlan::default() };
    let rep = counterexample_warped(&plan).unwrap();
    let curv = child(&rep, "counterexample-warped/curvature");
    assert!(curv.pass, "{}", curv.worst_violation);
    assert_eq!(curv.rows.len(), 20);
    assert!(child(&rep, "counterexample-warped/metadata").pass);
    let m = Manifold::warped();
    for (x2, k) in [(1.0f64, -2.0f64), (2.0, -8.0)] {
        let p = Point::new(&[0.0, x2]);
        let g: f64 = crate::numeric::gauss_curvature(&crate::numeric::ConformalMetric::warped(), &p).unwrap();
        assert!((g - k).abs() < 1e-9, "{g}");
    }
    let f = truncated_dist(&m, &m.origin(), 2.0);
    assert_eq!(f.regularity.bound, Some(2.0));
}

fn small_plan(m: &Manifold<f64>, lambdas: Vec<f64>) -> RegularizationPlan<f64> {
    let o = m.origin();
    let c = at(m, &o, [0.1, 0.0]);
    let mut plan = RegularizationPlan::new(2.0, 1.0, lambdas, &c);
    plan.grid_center = o;
    plan.grid_radius = 0.1;
    plan.concavity_samples = 16;
    plan.convexity_samples = 6;
    plan.lip_pairs = 2;
    plan
}

#[test]
fn regularization_of_constant_is_exact() {
    let s = sphere();
    let f = constant(&s, 0.7);
    let plan = small_plan(&s, vec![0.02, 0.01]);
    let rep = verify_regularization(&f, &plan).unwrap();
    for per in rep.children.iter().filter(|c| c.suite.starts_with("regularization/lambda=")) {
        let d = child(per, "regularization/d-uniform-error");
        assert_eq!(d.params["sup_error"], 0.0);
    }
}

#[test]
fn regularization_needs_bound() {
    let s = sphere();
    let f = crate::envelope::dist_sq(&s, &s.origin());
    assert!(matches!(verify_regularization(&f, &small_plan(&s, vec![0.01])), Err(Error::MissingMetadata(_))));
}

#[test]
fn regularization_checker_is_sensitive() {
    let s = sphere();
    let f = bump(&s, &s.origin(), 0.3);
    let b_pass = |scale: f64| {
        let mut plan = small_plan(&s, vec![0.04]);
        plan.constant_scale = scale;
        plan.concavity_samples = 4;
        plan.convexity_samples = 12;
        let rep = verify_regularization(&f, &plan).unwrap();
        let per = child(&rep, "regularization/lambda=0.04");
        child(per, "regularization/b-semiconvex").pass && child(per, "regularization/b-semiconcave").pass
    };
    // Hessian of the bump on this ball lies in about [-44, -23]; q/(20 mu) = 10 cannot absorb it.
    assert!(!b_pass(0.1));
    assert!(b_pass(1.1));
}

#[test]
fn lipschitz_preservation_small() {
    let h = hyper();
    let p = h.origin();
    let f = truncated_dist(&h, &p, 2.0);
    let region = Region::ball(&p, 1.5);
    let cfg = DiffConfig { n_pairs: 32, ..DiffConfig::default() };
    let rep = verify_lipschitz_preservation(&f, &[0.05, 0.01], &region, (1.05, 0.05), (0.95, 0.01), &SolverConfig::light(), &cfg)
        .unwrap();
    assert!(rep.pass);
    assert_eq!(rep.rows.len(), 3);
}

#[test]
fn envelope_properties_and_convergence() {
    let s = sphere();
    let o = s.origin();
    let f = crate::envelope::dist_sq(&s, &o);
    let h = crate::envelope::affine(&s, vec![(1.0, f.clone()), (1.0, bump(&s, &o, 0.3))], 0.0);
    let rep = verify_envelope_properties(
        &f,
        &h,
        (0.1, 0.2),
        Some((0.0, o.clone())),
        &Region::ball(&o, 1.0),
        16,
        &SolverConfig::light(),
        &DiffConfig::default(),
    )
    .unwrap();
    assert!(rep.pass);
    assert_eq!(rep.children.len(), 4);
    assert!(verify_envelope_properties(&f, &h, (0.2, 0.1), None, &Region::ball(&o, 1.0), 4, &SolverConfig::light(), &DiffConfig::default())
        .is_err());

    let conv = verify_bounded_convergence(&[0.2, 0.1], 1.0, 0.25, 1e-3, &SolverConfig::default(), &DiffConfig::default()).unwrap();
    assert!(conv.pass);
    let ratio = conv.rows.iter().find(|r| r.label == "halving_ratio").unwrap();
    assert!((ratio.value_numeric - 2.0 * 1.2 / 1.4).abs() < 1e-4);
}

#[test]
fn polar_grid_spacing() {
    for m in [sphere(), hyper(), Manifold::euclidean(2).unwrap()] {
        let o = m.origin();
        let g = polar_grid(&m, &o, 0.3, 0.05).unwrap();
        assert!(g.iter().all(|p| m.dist(&o, p).unwrap() <= 0.3 + 1e-12));
        // Every point of the ball has a grid point within one spacing.
        for u in [[0.07, 0.11], [-0.2, 0.13], [0.0, -0.29]] {
            let x = at(&m, &o, u);
            let near = g.iter().map(|p| m.dist(&x, p).unwrap()).fold(f64::INFINITY, f64::min);
            assert!(near <= 0.05, "{near}");
        }
    }
    assert_eq!(polar_grid(&sphere(), &sphere().origin(), 0.0, 0.05).unwrap().len(), 1);
}

#[test]
fn suite_ids_round_trip() {
    for id in SuiteId::ALL {
        assert_eq!(id.name().parse::<SuiteId>().unwrap(), id);
        assert_eq!(id.to_string(), id.name());
    }
    assert!("nope".parse::<SuiteId>().is_err());
    assert!(ManifoldSpec::parse("torus", 2, None).is_err());
    assert_eq!(ManifoldSpec::parse("hyperbolic", 2, None).unwrap(), ManifoldSpec::Hyperbolic { n: 2, k: -1.0 });
}

#[test]
fn suite_spec_validation() {
    let mut s = SuiteSpec::new(SuiteId::Regularization);
    assert!(s.validate().is_ok());
    assert_eq!(s.mus_for(0.04), vec![0.01]);
    s.mus = vec![0.6];
    s.lambdas = vec![1.0];
    assert!(matches!(s.validate(), Err(Error::ParamConstraintViolated(_))));
    let mut z = SuiteSpec::new(SuiteId::C11);
    z.samples = 0;
    assert!(z.validate().is_err());
}

#[test]
fn field_ids() {
    let s = sphere();
    for id in ["const", "const:2.5", "dist", "dist2", "half-dist2", "min-dist", "truncated-dist2:0.1", "bump", "bump:0.2", "bump-plus-dist2"] {
        field_by_id(&s, id).unwrap_or_else(|e| panic!("{id}: {e}"));
    }
    assert!(field_by_id(&s, "bump:x").is_err());
    assert!(field_by_id(&s, "nope").is_err());
    let c = field_by_id(&s, "const:2.5").unwrap();
    assert_eq!(crate::envelope::Field::value(&c, &s.origin()).unwrap(), 2.5);
}

#[test]
fn suites_are_deterministic() {
    let mut spec = SuiteSpec::new(SuiteId::ConvexityLemma);
    spec.samples = 300;
    let a = run_suite(&spec).unwrap();
    let b = run_suite(&spec).unwrap();
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
    spec.seed += 1;
    let c = run_suite(&spec).unwrap();
    assert_eq!(c.seed, spec.seed);
    assert_ne!(format!("{a:?}"), format!("{c:?}"));

    let spec = SuiteSpec::new(SuiteId::GapOrder);
    assert_eq!(format!("{:?}", run_suite(&spec).unwrap()), format!("{:?}", run_suite(&spec).unwrap()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn radius_scales_with_curvature(q in 1.05f64..8.0, k in 0.01f64..100.0) {
        let (e1, r1) = admissible_r(q, 1.0).unwrap();
        let (ek, rk) = admissible_r(q, k).unwrap();
        prop_assert_eq!(e1, ek);
        prop_assert!((rk - r1 / k.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn minimal_constants_are_admissible(q in 1.01f64..10.0, c in 0.0f64..10.0) {
        prop_assert!(LemmaConstants::minimal(q, c).satisfies(q));
    }

    #[test]
    fn epsilon_satisfies_bound(q in 1.01f64..3.0) {
        let (eps, _) = admissible_r(q, 1.0).unwrap();
        prop_assert!(eps > 0.0 && eps <= 0.25);
        prop_assert!(h_eps_at_two(eps) <= q + 1e-9);
        if eps < 0.25 {
            prop_assert!(h_eps_at_two(eps + 1e-9) > q - 1e-6);
        }
    }
}
