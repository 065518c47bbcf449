use crate::analysis::{
    grad_lip_estimate, lipschitz_estimate, semiconcavity_check, semiconvexity_check, CheckReport, DiffConfig, Region, Row,
};
use crate::envelope::{lasry_lions_field, EnvelopeParams, Field, InfConvolution, LocalizationMode, SolverConfig};
use crate::error::{Error, Result};
use crate::manifold::Point;
use crate::scalar::Real;

use super::grid::polar_grid;
use super::lemma::admissible_r;

/// Budgets and grids for [`verify_regularization`].
#[derive(Clone, Debug, PartialEq)]
pub struct RegularizationPlan<T> {
    pub q: T,
    pub k0: T,
    /// Processed in decreasing order.
    pub lambdas: Vec<T>,
    /// Centers of the balls `B(c, R/2)` on which the local checks run.
    pub centers: Vec<Point<T>>,
    /// Anchor and radius of the uniform-error grid.
    pub grid_center: Point<T>,
    pub grid_radius: T,
    pub grid_spacing: T,
    pub concavity_samples: usize,
    pub convexity_samples: usize,
    pub lip_pairs: usize,
    /// Multiplies the semiconvexity/semiconcavity constant `q/(2 mu)` of check (b).
    pub constant_scale: T,
    pub solver: SolverConfig,
    pub diff: DiffConfig,
}

impl<T: Real> RegularizationPlan<T> {
    pub fn new(q: T, k0: T, lambdas: Vec<T>, center: &Point<T>) -> Self {
        Self {
            q,
            k0,
            lambdas,
            centers: vec![center.clone()],
            grid_center: center.clone(),
            grid_radius: T::lit(0.3),
            grid_spacing: T::lit(0.05),
            concavity_samples: 128,
            convexity_samples: 24,
            lip_pairs: 8,
            constant_scale: T::one(),
            solver: SolverConfig::light(),
            diff: DiffConfig::default(),
        }
    }
}

fn threshold_report(suite: &str, manifold: String, seed: u64, value: f64, bound: f64) -> CheckReport {
    let mut r = CheckReport::new(suite, manifold, seed).param("estimate", value).param("bound", bound);
    r.samples_attempted = 1;
    r.samples_evaluated = 1;
    r.conclude(value - bound, 0.0);
    r
}

/// For each `lambda` (with `mu = lambda/(2q)`):
/// (a) `f_lambda` semiconcave with `q/(2 lambda)`, (b) `(f_lambda)^mu` semiconvex and
/// semiconcave with `q/(2 mu)`, (c) `Lip(grad (f_lambda)^mu) <= 1.05 q/mu`, (d) grid maximum
/// of `|(f_lambda)^mu - f|` within `omega(2 sqrt(N lambda)) + omega(2 sqrt(N mu))`; and
/// the grid error strictly decreasing along the grid.
///
/// Needs the field's bound `N`; `lambda0 = R^2 / (4N)` is echoed and grids exceeding it are flagged.
pub fn verify_regularization<T: Real, F: Field<T> + Send>(f: &F, plan: &RegularizationPlan<T>) -> Result<CheckReport> {
    let m = f.manifold();
    let reg = f.regularity();
    let big_n = reg.bound.ok_or_else(|| Error::MissingMetadata("regularization needs a bound N".into()))?;
    let (eps, r) = admissible_r(plan.q, plan.k0)?;
    let lambda0 = r * r / (T::lit(4.0) * big_n);
    let seed = plan.diff.seed;
    let mut rep = CheckReport::new("regularization", m.name(), seed)
        .param("q", plan.q.f64())
        .param("K0", plan.k0.f64())
        .param("eps", eps.f64())
        .param("R", r.f64())
        .param("N", big_n.f64())
        .param("lambda0", lambda0.f64());
    let mut lambdas = plan.lambdas.clone();
    lambdas.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let grid = polar_grid(m, &plan.grid_center, plan.grid_radius, plan.grid_spacing)?;
    let base: Vec<T> = grid.iter().map(|x| f.value(x)).collect::<Result<_>>()?;
    let omega = |t: T| reg.lipschitz.map(|l| (l * t).f64());
    let two = T::lit(2.0);
    let mut errors = Vec::with_capacity(lambdas.len());

    for (li, &lambda) in lambdas.iter().enumerate() {
        let params = EnvelopeParams::new(lambda, lambda / (two * plan.q), plan.q)?;
        let mu = params.mu;
        if lambda > lambda0 {
            rep.notes.push(format!("lambda = {lambda} exceeds lambda0 = R^2/(4N) = {lambda0}"));
        }
        let mut per = CheckReport::new(format!("regularization/lambda={lambda}"), m.name(), seed)
            .param("lambda", lambda.f64())
            .param("mu", mu.f64());
        let f_lambda = InfConvolution::new(f, lambda, LocalizationMode::Auto, plan.solver);
        let ll = lasry_lions_field(f, &params, &plan.solver)?;
        let half_r = r / two;
        let c_conc = plan.q / (two * lambda);
        let c_ll = plan.q / (two * mu) * plan.constant_scale;
        let mut lip_max = 0.0_f64;
        for c in &plan.centers {
            let mut a = semiconcavity_check(&f_lambda, c_conc, c, half_r, plan.concavity_samples, &plan.diff)?;
            a.suite = "regularization/a-semiconcave-f_lambda".into();
            per.push_child(a);
            let mut bx = semiconvexity_check(&ll, c_ll, c, half_r, plan.convexity_samples, &plan.diff)?;
            bx.suite = "regularization/b-semiconvex".into();
            per.push_child(bx);
            let mut bc = semiconcavity_check(&ll, c_ll, c, half_r, plan.convexity_samples, &plan.diff)?;
            bc.suite = "regularization/b-semiconcave".into();
            per.push_child(bc);
            let lip_cfg = DiffConfig { n_pairs: plan.lip_pairs, ..plan.diff };
            lip_max = lip_max.max(grad_lip_estimate(&ll, &Region::ball(c, half_r), &lip_cfg)?.f64());
        }
        let lip_bound = 1.05 * (plan.q / mu).f64();
        let mut lc = threshold_report("regularization/c-grad-lip", m.name(), seed, lip_max, lip_bound);
        // Recorded only: the finite-dimensional sharp constant is 2C with C = q/(2 mu).
        lc.set("ratio_to_2C", lip_max / (plan.q / mu).f64());
        lc.rows.push(row("grad_lip", 0, lambda, mu, plan.q, lip_max, lip_bound, lip_max <= lip_bound));
        per.push_child(lc);

        let mut worst = 0.0_f64;
        for (x, fx) in grid.iter().zip(&base) {
            worst = worst.max((ll.value(x)? - *fx).abs().f64());
        }
        let bound = omega(two * (big_n * lambda).sqrt()).zip(omega(two * (big_n * mu).sqrt())).map(|(a, b)| a + b);
        let mut d = CheckReport::new("regularization/d-uniform-error", m.name(), seed)
            .param("grid_points", grid.len() as f64)
            .param("grid_spacing", plan.grid_spacing.f64());
        d.samples_attempted = grid.len();
        d.samples_evaluated = grid.len();
        match bound {
            Some(b) => {
                d.set("bound", b);
                d.conclude(worst - b, 0.0);
                d.rows.push(row("sup_error", li, lambda, mu, plan.q, worst, b, worst <= b));
            }
            None => {
                d.notes.push("no Lipschitz metadata: modulus bound not asserted".into());
                d.conclude(f64::NEG_INFINITY, 0.0);
                d.rows.push(row("sup_error", li, lambda, mu, plan.q, worst, f64::NAN, true));
            }
        }
        d.set("sup_error", worst);
        per.push_child(d);
        errors.push((lambda, mu, worst));
        rep.push_child(per);
    }

    let mut mono = CheckReport::new("regularization/error-decreasing", m.name(), seed);
    let mut worst_step = f64::NEG_INFINITY;
    for (i, w) in errors.windows(2).enumerate() {
        let step = w[1].2 - w[0].2;
        worst_step = worst_step.max(step);
        mono.rows.push(row("error_step", i, w[1].0, w[1].1, plan.q, w[1].2, w[0].2, step < 0.0));
    }
    mono.samples_attempted = errors.len().saturating_sub(1);
    mono.samples_evaluated = mono.samples_attempted;
    // Strict decrease: every step must be negative, i.e. below the smallest negative slack.
    mono.conclude(worst_step, -f64::MIN_POSITIVE);
    rep.push_child(mono);
    Ok(rep)
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn row<T: Real>(label: &str, id: usize, lambda: T, mu: T, q: T, num: f64, reference: f64, pass: bool) -> Row {
    Row {
        label: label.into(),
        point_id: id,
        lambda: lambda.f64(),
        mu: mu.f64(),
        q: q.f64(),
        value_numeric: num,
        value_reference: reference,
        pass,
    }
}

/// Estimated `Lip(f_lambda)` on `region` for each `lambda`, checked against
/// `upper * Lip(f)` when `lambda <= upper_below` and `lower * Lip(f)` when `lambda <= lower_below`.
#[allow(clippy::too_many_arguments)]
pub fn verify_lipschitz_preservation<T: Real, F: Field<T>>(
    f: &F,
    lambdas: &[T],
    region: &Region<T>,
    (upper, upper_below): (f64, f64),
    (lower, lower_below): (f64, f64),
    solver: &SolverConfig,
    cfg: &DiffConfig,
) -> Result<CheckReport> {
    let m = f.manifold();
    let lip = f
        .regularity()
        .lipschitz
        .ok_or_else(|| Error::MissingMetadata("Lipschitz preservation needs Lip(f)".into()))?
        .f64();
    let mut rep = CheckReport::new("lipschitz-preservation", m.name(), cfg.seed).param("lip_f", lip);
    for (i, &lambda) in lambdas.iter().enumerate() {
        let fl = InfConvolution::new(f, lambda, LocalizationMode::Auto, *solver);
        let est = lipschitz_estimate(&fl, region, cfg)?.f64();
        let l = lambda.f64();
        if l <= upper_below {
            let b = upper * lip;
            rep.push_row(row("lip_upper", i, lambda, T::zero(), T::zero(), est, b, est <= b), est - b, 0.0);
        }
        if l <= lower_below {
            let b = lower * lip;
            rep.push_row(row("lip_lower", i, lambda, T::zero(), T::zero(), est, b, est >= b), b - est, 0.0);
        }
        rep.set(&format!("lip[{l}]"), est);
    }
    Ok(rep)
}
