use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::analysis::{CheckReport, DiffConfig, Region};
use crate::envelope::{dist_sq, Field, InfConvolution, LocalizationMode, SolverConfig};
use crate::error::{domain, Result};
use crate::manifold::{Manifold, Point};
use crate::scalar::Real;

use super::counterexamples::exact;
use super::grid::polar_grid;
use super::regularization::row;

/// Envelope invariants on seeded points of `region`, for `lambda1 < lambda2`:
/// `f_lambda <= f`, `f_lambda2 <= f_lambda1`, `f_lambda <= h_lambda` (requires `f <= h`),
/// and, when `infimum = (inf f, argmin)` is given, `inf f_lambda = inf f`.
#[allow(clippy::too_many_arguments)]
pub fn verify_envelope_properties<T: Real, F: Field<T>, H: Field<T>>(
    f: &F,
    h: &H,
    (lambda1, lambda2): (T, T),
    infimum: Option<(T, Point<T>)>,
    region: &Region<T>,
    n: usize,
    solver: &SolverConfig,
    cfg: &DiffConfig,
) -> Result<CheckReport> {
    if !(lambda1 < lambda2) {
        return Err(domain("need lambda1 < lambda2"));
    }
    let m = f.manifold();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let pts: Vec<Point<T>> = (0..n).map(|_| region.sample(m, &mut rng)).collect::<Result<_>>()?;
    let f1 = InfConvolution::new(f, lambda1, LocalizationMode::Auto, *solver);
    let f2 = InfConvolution::new(f, lambda2, LocalizationMode::Auto, *solver);
    let h1 = InfConvolution::new(h, lambda1, LocalizationMode::Auto, *solver);
    let mut below = CheckReport::new("envelope-properties/below-f", m.name(), cfg.seed);
    let mut mono = CheckReport::new("envelope-properties/monotone-in-lambda", m.name(), cfg.seed);
    let mut order = CheckReport::new("envelope-properties/order-preserving", m.name(), cfg.seed);
    let mut inf_rep = CheckReport::new("envelope-properties/same-infimum", m.name(), cfg.seed);
    let (l1, l2) = (lambda1.f64(), lambda2.f64());
    let mut min_f1 = f64::INFINITY;
    for (i, x) in pts.iter().enumerate() {
        let fx = f.value(x)?.f64();
        let hx = h.value(x)?.f64();
        if fx > hx + cfg.slack.tau(fx, hx) {
            return Err(domain("order check needs f <= h"));
        }
        let a = f1.value(x)?.f64();
        let b = f2.value(x)?.f64();
        let c = h1.value(x)?.f64();
        min_f1 = min_f1.min(a);
        below.push_row(row("f_lambda<=f", i, l1, 0.0, 0.0, a, fx, a <= fx + cfg.slack.tau(a, fx)), a - fx, cfg.slack.tau(a, fx));
        mono.push_row(row("f_lambda2<=f_lambda1", i, l2, 0.0, 0.0, b, a, b <= a + cfg.slack.tau(a, b)), b - a, cfg.slack.tau(a, b));
        order.push_row(row("f_lambda<=h_lambda", i, l1, 0.0, 0.0, a, c, a <= c + cfg.slack.tau(a, c)), a - c, cfg.slack.tau(a, c));
    }
    if let Some((inf, argmin)) = infimum {
        let inf = inf.f64();
        let at = f1.value(&argmin)?.f64();
        let tau = cfg.slack.tau(at, inf);
        inf_rep.push_row(row("f_lambda(argmin)=inf", 0, l1, 0.0, 0.0, at, inf, (at - inf).abs() <= tau), (at - inf).abs(), tau);
        let tau = cfg.slack.tau(min_f1, inf);
        inf_rep.push_row(row("min f_lambda>=inf", 1, l1, 0.0, 0.0, min_f1, inf, min_f1 >= inf - tau), inf - min_f1, tau);
    } else {
        inf_rep.notes.push("infimum unknown; not checked".into());
    }
    let mut rep = CheckReport::new("envelope-properties", m.name(), cfg.seed)
        .param("lambda1", l1)
        .param("lambda2", l2)
        .param("samples", n as f64);
    rep.notes.push(format!("region {}", region.describe()));
    for c in [below, mono, order, inf_rep] {
        rep.push_child(c);
    }
    Ok(rep)
}

/// Uniform convergence on `B(x0, radius)` for `f = d(., x0)^2` on `K = -1`: the grid maximum of
/// `f - f_lambda` is compared with the closed form `radius^2 (1 - 1/(1 + 2 lambda))`, and
/// for consecutive `lambda` and `lambda/2` the error ratio must reach `2(1+lambda)/(1+2 lambda)`
/// up to `ratio_slack` (the exact ratio, just short of halving).
pub fn verify_bounded_convergence<T: Real>(
    lambdas: &[T],
    radius: T,
    spacing: T,
    ratio_slack: f64,
    solver: &SolverConfig,
    cfg: &DiffConfig,
) -> Result<CheckReport> {
    let m = Manifold::hyperbolic(2, -T::one())?;
    let x0 = m.origin();
    let f = dist_sq(&m, &x0);
    let grid = polar_grid(&m, &x0, radius, spacing)?;
    let mut rep = CheckReport::new("bounded-convergence", m.name(), cfg.seed)
        .param("radius", radius.f64())
        .param("spacing", spacing.f64())
        .param("grid_points", grid.len() as f64);
    let r2 = radius.f64().powi(2);
    let mut errs = Vec::with_capacity(lambdas.len());
    for (i, &lambda) in lambdas.iter().enumerate() {
        let fl = InfConvolution::new(&f, lambda, LocalizationMode::Auto, *solver);
        let mut worst = 0.0_f64;
        for x in &grid {
            worst = worst.max((f.value(x)? - fl.value(x)?).f64());
        }
        let l = lambda.f64();
        let want = r2 * (1.0 - exact::inf_coefficient(l));
        let rel = (worst - want).abs() / want;
        rep.push_row(row("sup_error", i, l, 0.0, 0.0, worst, want, rel <= 1e-3), rel, 1e-3);
        errs.push((l, worst));
    }
    for (i, w) in errs.windows(2).enumerate() {
        let (la, ea) = w[0];
        let (lb, eb) = w[1];
        if (lb - la / 2.0).abs() > 1e-12 * la {
            continue;
        }
        let ratio = ea / eb;
        let target = 2.0 * (1.0 + la) / (1.0 + 2.0 * la) - ratio_slack;
        rep.push_row(row("halving_ratio", i, la, 0.0, 0.0, ratio, target, ratio >= target), target - ratio, 0.0);
    }
    Ok(rep)
}
