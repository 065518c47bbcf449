use renv_core::analysis::{CheckReport, Row};
use renv_core::envelope::{lasry_lions_field, EnvelopeParams, Field, InfConvolution, LocalizationMode, SolverConfig};
use renv_core::manifold::{Manifold, Point};
use renv_core::theorems::{field_by_id, polar_grid, run_suite, ManifoldSpec, SuiteId, SuiteSpec};
use renv_core::{Error, Slack};

use crate::config::{Command, RunConfig};
use crate::CliError;

/// Reports produced by the configured command.
pub fn execute(cfg: &RunConfig) -> Result<Vec<CheckReport>, CliError> {
    match &cfg.command {
        Command::Eval => Ok(vec![eval(cfg)?]),
        Command::Converge => Ok(vec![converge(cfg)?]),
        Command::Verify(id) | Command::Counterexample(id) => Ok(vec![run_suite(&suite_spec(cfg, *id))?]),
        Command::Sweep(ids) => ids
            .iter()
            .map(|&id| {
                let mut spec = SuiteSpec::new(id);
                spec.seed = cfg.seed;
                if let Some(n) = cfg.samples {
                    spec.samples = n;
                }
                Ok(run_suite(&spec)?)
            })
            .collect(),
    }
}

/// The suite's defaults, overridden by whatever the configuration sets.
pub fn suite_spec(cfg: &RunConfig, id: SuiteId) -> SuiteSpec {
    let mut s = SuiteSpec::new(id);
    if let Some(m) = &cfg.manifold {
        s.manifold = *m;
    }
    if let Some(f) = &cfg.field {
        s.field = f.clone();
    }
    if !cfg.lambdas.is_empty() {
        s.lambdas = cfg.lambdas.clone();
    }
    if !cfg.mus.is_empty() {
        s.mus = cfg.mus.clone();
    }
    if let Some(q) = cfg.q {
        s.q = q;
    }
    if let Some(k) = cfg.k0 {
        s.k0 = k;
    }
    if cfg.radius.is_some() {
        s.radius = cfg.radius;
    }
    if let Some(n) = cfg.samples {
        s.samples = n;
    }
    if !cfg.distances.is_empty() {
        s.distances = cfg.distances.clone();
    }
    for (slot, v) in s.constants.iter_mut().zip(cfg.constants) {
        if v.is_some() {
            *slot = v;
        }
    }
    s.seed = cfg.seed;
    s
}

fn manifold(cfg: &RunConfig) -> Result<Manifold<f64>, CliError> {
    Ok(cfg.manifold.unwrap_or(ManifoldSpec::Euclidean { n: 2 }).build()?)
}

/// Evaluation points, with their distance from the origin when given by `--point-d`.
type Points = Vec<(Point<f64>, Option<f64>)>;

fn points(m: &Manifold<f64>, cfg: &RunConfig) -> Result<Points, CliError> {
    let o = m.origin();
    let frame = m.orthonormal_frame(&o);
    let mut out = Vec::new();
    for &d in &cfg.point_d {
        let mut u = vec![0.0; m.dim()];
        u[0] = d;
        out.push((m.exp(&o, &m.combine(&o, &frame, &u))?, Some(d)));
    }
    if !cfg.point.is_empty() {
        out.push((m.point(&cfg.point)?, None));
    }
    Ok(out)
}

/// `c d(., x0)^2` fields with their coefficient `c`.
fn quadratic_coefficient(field: &str) -> Option<f64> {
    match field {
        "dist2" => Some(1.0),
        "half-dist2" => Some(0.5),
        _ => None,
    }
}

/// Closed forms known for the library fields: constants, and `c d(., x0)^2` on flat or
/// negatively curved constant-curvature spaces (on spheres while the optimal geodesic
/// stays short of the antipode). The extremal point lies on the geodesic through `x0`,
/// so `f_lambda = c' d^2` with `c' = c / (1 + 2 lambda c)` and `(f_lambda)^mu = c'' d^2`
/// with `c'' = c' / (1 - 2 mu c')`.
fn closed_form(m: &Manifold<f64>, field: &str, lambda: f64, mu: Option<f64>, x: &Point<f64>) -> Result<Option<f64>, Error> {
    if let Some(rest) = field.strip_prefix("const") {
        let c = match rest.strip_prefix(':') {
            Some(v) => v.parse().map_err(|_| Error::Domain(format!("bad constant in '{field}'")))?,
            None if rest.is_empty() => 1.0,
            None => return Ok(None),
        };
        return Ok(Some(c));
    }
    let Some(c) = quadratic_coefficient(field) else { return Ok(None) };
    let Some(k) = m.curvature() else { return Ok(None) };
    let d = m.dist(x, &m.origin())?;
    let inf = c / (1.0 + 2.0 * lambda * c);
    let coef = match mu {
        None => inf,
        Some(mu) => {
            if !(2.0 * mu * inf < 1.0) {
                return Ok(None);
            }
            let outer = inf / (1.0 - 2.0 * mu * inf);
            // The maximizer sits at distance 2 mu outer d beyond x, away from x0.
            if k > 0.0 && d + 2.0 * mu * outer * d >= std::f64::consts::PI / k.sqrt() {
                return Ok(None);
            }
            outer
        }
    };
    Ok(Some(coef * d * d))
}

#[allow(clippy::too_many_arguments)]
fn row(label: &str, id: usize, lambda: f64, mu: Option<f64>, q: f64, num: f64, reference: f64, pass: bool) -> Row {
    Row {
        label: label.into(),
        point_id: id,
        lambda,
        mu: mu.unwrap_or(0.0),
        q,
        value_numeric: num,
        value_reference: reference,
        pass,
    }
}

/// `f_lambda` or `(f_lambda)^mu` at the configured points. With a closed form the
/// reference is that value (relative tolerance `tol`); otherwise the reference is `f(x)`
/// and the row checks `f_lambda <= f`, resp. `f_lambda <= (f_lambda)^mu <= f`.
fn eval(cfg: &RunConfig) -> Result<CheckReport, CliError> {
    let m = manifold(cfg)?;
    let field = cfg.field.clone().unwrap_or_else(|| "dist2".into());
    let f = field_by_id(&m, &field)?;
    let pts = points(&m, cfg)?;
    let q = cfg.q_or_default();
    let solver = SolverConfig::default();
    let slack = Slack::default();
    let mut rep = CheckReport::new("eval", m.name(), cfg.seed).param("q", q).param("tol", cfg.tol);
    rep.notes.push(format!("field {}", f.label()));
    let mut id = 0;
    for (lambda, mu) in cfg.pairs()? {
        let inner = InfConvolution::new(&f, lambda, LocalizationMode::Auto, solver);
        let outer = match mu {
            Some(mu) => Some(lasry_lions_field(&f, &EnvelopeParams::new(lambda, mu, q)?, &solver)?),
            None => None,
        };
        for (x, d) in &pts {
            let fl = inner.value(x)?;
            let value = match &outer {
                Some(ll) => ll.value(x)?,
                None => fl,
            };
            let label = match (mu, d) {
                (None, Some(d)) => format!("f_lambda@d={d}"),
                (None, None) => "f_lambda@point".to_string(),
                (Some(_), Some(d)) => format!("lasry_lions@d={d}"),
                (Some(_), None) => "lasry_lions@point".to_string(),
            };
            let (reference, pass, margin, tol) = match closed_form(&m, &field, lambda, mu, x)? {
                Some(r) => {
                    let tol = cfg.tol * r.abs().max(1.0);
                    let err = (value - r).abs();
                    (r, err <= tol, err, tol)
                }
                None => {
                    let fx = f.value(x)?;
                    let tau = slack.tau(value, fx);
                    let over = (value - fx).max(fl - value);
                    (fx, over <= tau, over, tau)
                }
            };
            rep.push_row(row(&label, id, lambda, mu, q, value, reference, pass), margin, tol);
            id += 1;
        }
    }
    Ok(rep)
}

/// Grid rows `(lambda, point)` of `f_lambda` (or `(f_lambda)^mu`) against `f` on
/// `B(origin, radius)`, plus per-`lambda` sup-error rows that must not increase as `lambda` decreases.
fn converge(cfg: &RunConfig) -> Result<CheckReport, CliError> {
    let m = manifold(cfg)?;
    let field = cfg.field.clone().unwrap_or_else(|| "bump".into());
    let f = field_by_id(&m, &field)?;
    let radius = cfg.radius.unwrap_or(0.5);
    let spacing = cfg.spacing.unwrap_or(0.05);
    if !(radius > 0.0 && spacing > 0.0) {
        return Err(CliError::Usage("--radius and --spacing must be positive".into()));
    }
    let grid = polar_grid(&m, &m.origin(), radius, spacing)?;
    let base: Vec<f64> = grid.iter().map(|x| f.value(x)).collect::<Result<_, _>>()?;
    let q = cfg.q_or_default();
    let solver = SolverConfig::light();
    let slack = Slack::default();
    let mut pairs = cfg.pairs()?;
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut rep = CheckReport::new("converge", m.name(), cfg.seed)
        .param("radius", radius)
        .param("spacing", spacing)
        .param("grid_points", grid.len() as f64);
    rep.notes.push(format!("field {}", f.label()));
    let mut prev: Option<f64> = None;
    for (k, &(lambda, mu)) in pairs.iter().enumerate() {
        let inner = InfConvolution::new(&f, lambda, LocalizationMode::Auto, solver);
        let outer = match mu {
            Some(mu) => Some(lasry_lions_field(&f, &EnvelopeParams::new(lambda, mu, q)?, &solver)?),
            None => None,
        };
        let mut worst = 0.0_f64;
        for (i, (x, &fx)) in grid.iter().zip(&base).enumerate() {
            let fl = inner.value(x)?;
            let value = match &outer {
                Some(ll) => ll.value(x)?,
                None => fl,
            };
            let tau = slack.tau(value, fx);
            let over = (value - fx).max(fl - value);
            rep.push_row(row("value", i, lambda, mu, q, value, fx, over <= tau), over, tau);
            worst = worst.max((value - fx).abs());
        }
        // Reference: the previous (larger) lambda's error; the first row compares with itself.
        let limit = prev.unwrap_or(worst);
        rep.push_row(row("sup_error", grid.len() + k, lambda, mu, q, worst, limit, worst <= limit), worst - limit, 0.0);
        prev = Some(worst);
    }
    Ok(rep)
}
