use crate::analysis::{hessian_quadform, CheckReport, DiffConfig};
use crate::envelope::{dist_sq, truncated_dist, truncated_dist_sq, Field, InfConvolution, LocalizationMode, Memo, SolverConfig, SupConvolution};
use crate::error::{domain, Result};
use crate::manifold::{Manifold, Point, Tangent};
use crate::numeric::{curvature_check, gauss_curvature, ConformalMetric};
use crate::scalar::Real;

use super::regularization::row;

/// Tolerances of the hyperbolic counterexample comparisons (relative).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CounterexampleTolerances {
    pub inf_convolution: f64,
    pub argmin: f64,
    pub lasry_lions: f64,
    /// Minimal Hessian ratio between `d = 6` and `d = 1`.
    pub hessian_ratio: f64,
}

impl Default for CounterexampleTolerances {
    fn default() -> Self {
        Self { inf_convolution: 1e-3, argmin: 1e-3, lasry_lions: 5e-3, hessian_ratio: 3.0 }
    }
}

/// Coefficients of `d(., x0)^2` in the reference closed forms of the hyperbolic example.
pub mod stated {
    /// `f_lambda / d^2 = (2 + lambda) / (2 (1 + lambda)^2)`.
    pub fn inf_coefficient(lambda: f64) -> f64 {
        (2.0 + lambda) / (2.0 * (1.0 + lambda).powi(2))
    }
    /// `d(x, y_x) / d(x, x0) = lambda / (1 + lambda)`.
    pub fn argmin_fraction(lambda: f64) -> f64 {
        lambda / (1.0 + lambda)
    }
    /// `lambda' = (1 + lambda)^2 / (2 + lambda)`.
    pub fn lambda_prime(lambda: f64) -> f64 {
        (1.0 + lambda).powi(2) / (2.0 + lambda)
    }
    /// `(f_lambda)^mu / d^2 = 1 / (2 (lambda' - mu))`.
    pub fn ll_coefficient(lambda: f64, mu: f64) -> f64 {
        1.0 / (2.0 * (lambda_prime(lambda) - mu))
    }
}

/// The same coefficients from minimizing `s^2 + (d - s)^2 / (2 lambda)` along the geodesic to `x0`
/// (and the analogous maximization for the sup-convolution).
pub mod exact {
    pub fn inf_coefficient(lambda: f64) -> f64 {
        1.0 / (1.0 + 2.0 * lambda)
    }
    pub fn argmin_fraction(lambda: f64) -> f64 {
        2.0 * lambda / (1.0 + 2.0 * lambda)
    }
    pub fn ll_coefficient(lambda: f64, mu: f64) -> f64 {
        1.0 / (1.0 + 2.0 * lambda - 2.0 * mu)
    }
}

/// Unit tangents at `x`: radial (away from `x0`) and one orthogonal to it.
pub(crate) fn radial_frame<T: Real>(m: &Manifold<T>, x: &Point<T>, x0: &Point<T>) -> Result<(Tangent<T>, Tangent<T>)> {
    let toward = m.log(x, x0)?;
    let radial = toward.scaled(-T::one() / toward.norm());
    let frame = m.orthonormal_frame(x);
    let c = m.frame_coords(&frame, &radial);
    let mut perp = vec![T::zero(); c.len()];
    perp[0] = -c[1];
    perp[1] = c[0];
    Ok((radial, m.combine(x, &frame, &perp)))
}

#[allow(clippy::too_many_arguments)]
fn compare(rep: &mut CheckReport, label: &str, id: usize, lambda: f64, mu: f64, num: f64, reference: f64, tol: f64) {
    let err = (num - reference).abs() / reference.abs();
    let r = row(label, id, lambda, mu, 0.0, num, reference, err <= tol);
    rep.push_row(r, err, tol);
}

/// The hyperbolic example `f = d(., x0)^2` on `K = -1`.
///
/// Child `stated` compares the numeric envelopes with the reference coefficients; child
/// `exact` with the coefficients obtained by minimizing along the geodesic; child `hessian`
/// checks the tangential Hessian of `f` and of `(f_lambda)^mu` grows between `d = 1` and `d = 6`.
pub fn counterexample_hyperbolic<T: Real>(
    pairs: &[(T, T)],
    distances: &[T],
    tol: &CounterexampleTolerances,
    solver: &SolverConfig,
    diff: &DiffConfig,
) -> Result<CheckReport> {
    let m = Manifold::hyperbolic(2, -T::one())?;
    let x0 = m.origin();
    let f = dist_sq(&m, &x0);
    let frame = m.orthonormal_frame(&x0);
    let at = |d: T| m.exp(&x0, &m.combine(&x0, &frame, &[d, T::zero()]));
    let mut stated_rep = CheckReport::new("counterexample-hyperbolic/stated", m.name(), diff.seed);
    let mut exact_rep = CheckReport::new("counterexample-hyperbolic/exact", m.name(), diff.seed);
    let mut id = 0;
    for &(lambda, mu) in pairs {
        let (l, muf) = (lambda.f64(), mu.f64());
        if !(muf < stated::lambda_prime(l)) {
            return Err(domain("need mu < lambda' = (1 + lambda)^2 / (2 + lambda)"));
        }
        let inf = InfConvolution::new(&f, lambda, LocalizationMode::Auto, *solver);
        let sup = SupConvolution::new(Memo::new(InfConvolution::new(&f, lambda, LocalizationMode::Auto, *solver)), mu, LocalizationMode::Auto, *solver);
        for &d in distances {
            let x = at(d)?;
            let df = d.f64();
            let e = inf.solve(&x)?;
            let coef = e.value.f64() / (df * df);
            let arg = m.dist(&x, &e.point)?.f64();
            let ll = sup.value(&x)?.f64() / (df * df);
            compare(&mut stated_rep, "f_lambda/d^2", id, l, muf, coef, stated::inf_coefficient(l), tol.inf_convolution);
            compare(&mut stated_rep, "argmin_distance", id, l, muf, arg, stated::argmin_fraction(l) * df, tol.argmin);
            compare(&mut stated_rep, "ll/d^2", id, l, muf, ll, stated::ll_coefficient(l, muf), tol.lasry_lions);
            compare(&mut exact_rep, "f_lambda/d^2", id, l, muf, coef, exact::inf_coefficient(l), tol.inf_convolution);
            compare(&mut exact_rep, "argmin_distance", id, l, muf, arg, exact::argmin_fraction(l) * df, tol.argmin);
            compare(&mut exact_rep, "ll/d^2", id, l, muf, ll, exact::ll_coefficient(l, muf), tol.lasry_lions);
            id += 1;
        }
    }

    let mut hess = CheckReport::new("counterexample-hyperbolic/hessian", m.name(), diff.seed);
    let tangential = |g: &dyn Field<T>, d: f64| -> Result<f64> {
        let x = at(T::lit(d))?;
        let (_, perp) = radial_frame(&m, &x, &x0)?;
        Ok(hessian_quadform(&g, &x, &perp, diff)?.f64())
    };
    let oracle = (6.0 / 6f64.tanh()) / (1.0 / 1f64.tanh());
    let ratio_f = tangential(&f, 6.0)? / tangential(&f, 1.0)?;
    let r = row("hessian_ratio/f", 0, 0.0, 0.0, 0.0, ratio_f, oracle, ratio_f >= tol.hessian_ratio);
    hess.push_row(r, tol.hessian_ratio - ratio_f, 0.0);
    if let Some(&(lambda, mu)) = pairs.first() {
        let sup = SupConvolution::new(Memo::new(InfConvolution::new(&f, lambda, LocalizationMode::Auto, *solver)), mu, LocalizationMode::Auto, *solver);
        let ratio = tangential(&sup, 6.0)? / tangential(&sup, 1.0)?;
        let r = row("hessian_ratio/ll", 1, lambda.f64(), mu.f64(), 0.0, ratio, oracle, ratio >= tol.hessian_ratio);
        hess.push_row(r, tol.hessian_ratio - ratio, 0.0);
    }
    hess.set("closed_form_ratio", oracle);

    let mut rep = CheckReport::new("counterexample-hyperbolic", m.name(), diff.seed);
    rep.push_child(stated_rep);
    rep.push_child(exact_rep);
    rep.push_child(hess);
    Ok(rep)
}

/// Settings of the warped half-plane example.
#[derive(Clone, Debug, PartialEq)]
pub struct WarpedPlan<T> {
    /// Points where the curvature formula is checked.
    pub points: Vec<Point<T>>,
    /// Circle radius of the circumference-deficit estimate.
    pub circle_radius: T,
    pub curvature_tol: f64,
    /// Heights of the centers `p = (0, h)`.
    pub heights: Vec<T>,
    /// The Hessian is taken at distance `offset` above `p`, across the vertical ray.
    pub offset: T,
    /// Cap of `min(cap, d(., p)^2)`.
    pub cap: T,
    pub lambda: T,
    pub mu: T,
    pub min_ratio: f64,
    /// Upper edge of the working region (the evaluation point at height 4 sits near 20).
    pub region_top: T,
    pub solver: SolverConfig,
    pub diff: DiffConfig,
}

impl<T: Real> Default for WarpedPlan<T> {
    fn default() -> Self {
        let lambda = T::lit(1e-3);
        let mut solver = SolverConfig::light();
        solver.refine_starts = 1;
        Self {
            points: (0..10).map(|i| Point::new(&[T::lit(0.3 * i as f64 - 1.5), T::lit(0.5 + 3.5 * i as f64 / 9.0)])).collect(),
            circle_radius: T::lit(1e-2),
            curvature_tol: 1e-3,
            heights: vec![T::one(), T::lit(2.0), T::lit(4.0)],
            offset: T::lit(0.2),
            cap: T::lit(0.0625),
            lambda,
            mu: lambda / T::lit(4.0),
            min_ratio: 2.0,
            region_top: T::lit(200.0),
            solver,
            diff: DiffConfig::default(),
        }
    }
}

/// The warped half-plane `g = |dx|^2 / x2^4`.
///
/// Child `curvature`: the analytic and circumference-deficit curvature agree with `-2 x2^2`.
/// Child `metadata`: `min(2, d(., p))` carries `N = 2`, `Lip = 1`.
/// Child `hessian-growth`: the Hessian of `(f_lambda)^mu` for `f = min(cap, d(., p)^2)`, taken
/// across the vertical ray at `offset` above `p = (0, h)`, grows with `h`; the ratio between
/// the highest and the lowest center is at least `min_ratio`.
pub fn counterexample_warped<T: Real>(plan: &WarpedPlan<T>) -> Result<CheckReport> {
    let metric = ConformalMetric::warped().with_region(ConformalMetric::<T>::warped().x2_min, plan.region_top)?;
    let m = Manifold::conformal(metric.clone());
    let seed = plan.diff.seed;

    let mut curv = CheckReport::new("counterexample-warped/curvature", m.name(), seed)
        .param("circle_radius", plan.circle_radius.f64());
    for (i, p) in plan.points.iter().enumerate() {
        let x2 = p.coords[1].f64();
        let oracle = -2.0 * x2 * x2;
        let analytic = gauss_curvature(&metric, p)?.f64();
        let deficit = curvature_check(&metric, p, plan.circle_radius)?.f64();
        for (label, v) in [("curvature/analytic", analytic), ("curvature/deficit", deficit)] {
            let err = ((v - oracle) / oracle).abs();
            curv.push_row(row(label, i, 0.0, 0.0, 0.0, v, oracle, err <= plan.curvature_tol), err, plan.curvature_tol);
        }
    }

    let mut meta = CheckReport::new("counterexample-warped/metadata", m.name(), seed);
    let p1 = m.origin();
    let g = truncated_dist(&m, &p1, T::lit(2.0));
    let reg = g.regularity();
    for (i, (label, got, want)) in
        [("bound", reg.bound, 2.0), ("lipschitz", reg.lipschitz, 1.0)].into_iter().enumerate()
    {
        let got = got.map_or(f64::NAN, |v| v.f64());
        let err = (got - want).abs();
        meta.push_row(row(label, i, 0.0, 0.0, 0.0, got, want, err == 0.0), err, 0.0);
    }

    let mut growth = CheckReport::new("counterexample-warped/hessian-growth", m.name(), seed)
        .param("lambda", plan.lambda.f64())
        .param("mu", plan.mu.f64())
        .param("offset", plan.offset.f64())
        .param("cap", plan.cap.f64());
    let mut hs = Vec::with_capacity(plan.heights.len());
    for (i, &h) in plan.heights.iter().enumerate() {
        let p = m.point(&[T::zero(), h])?;
        let up = m.combine(&p, &m.orthonormal_frame(&p), &[T::zero(), plan.offset]);
        let x = m.exp(&p, &up)?;
        let across = m.combine(&x, &m.orthonormal_frame(&x), &[T::one(), T::zero()]);
        let f = truncated_dist_sq(&m, &p, plan.cap);
        let inner = Memo::new(InfConvolution::new(&f, plan.lambda, LocalizationMode::Auto, plan.solver));
        let ll = SupConvolution::new(inner, plan.mu, LocalizationMode::Auto, plan.solver);
        let hess = hessian_quadform(&ll, &x, &across, &plan.diff)?.f64();
        let base = hessian_quadform(&f, &x, &across, &plan.diff)?.f64();
        let k = gauss_curvature(&metric, &x)?.f64();
        growth.notes.push(format!("h = {}: x = {:?}, K(x) = {k}, Hess f = {base}", h, x.to_f64()));
        growth.rows.push(row("hessian", i, plan.lambda, plan.mu, T::zero(), hess, base, true));
        hs.push(hess);
    }
    if let (Some(&lo), Some(&hi)) = (hs.first(), hs.last()) {
        let ratio = hi / lo;
        growth.set("ratio", ratio);
        let r = row("hessian_ratio", hs.len(), plan.lambda, plan.mu, T::zero(), ratio, plan.min_ratio, ratio >= plan.min_ratio);
        growth.push_row(r, plan.min_ratio - ratio, 0.0);
    }

    let mut rep = CheckReport::new("counterexample-warped", m.name(), seed);
    rep.push_child(curv);
    rep.push_child(meta);
    rep.push_child(growth);
    Ok(rep)
}
