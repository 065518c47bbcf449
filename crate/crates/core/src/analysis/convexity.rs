use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::envelope::{Field, FnField};
use crate::error::{Error, Result};
use crate::manifold::Point;
use crate::scalar::Real;

use super::config::DiffConfig;
use super::report::CheckReport;
use super::sampling::Region;

/// Tests `F(m) <= (F(p) + F(q))/2 + tau` at geodesic midpoints of seeded pairs in `region`.
///
/// Pairs whose connecting geodesic is not unique (cut locus) are counted as
/// attempted but not evaluated.
pub fn midpoint_convexity_check<T: Real, F: Field<T>>(
    f: &F,
    region: &Region<T>,
    n_samples: usize,
    cfg: &DiffConfig,
) -> Result<CheckReport> {
    midpoint_strong_convexity_check(f, region, n_samples, 0.0, cfg)
}

/// As [`midpoint_convexity_check`] with the strong-convexity margin:
/// `F(m) <= (F(p) + F(q))/2 - kappa d(p, q)^2 / 8 + tau`.
pub fn midpoint_strong_convexity_check<T: Real, F: Field<T>>(
    f: &F,
    region: &Region<T>,
    n_samples: usize,
    kappa: f64,
    cfg: &DiffConfig,
) -> Result<CheckReport> {
    let m = f.manifold();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pairs: Vec<(Point<T>, Point<T>)> = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let p = region.sample(m, &mut rng)?;
        let q = region.sample(m, &mut rng)?;
        pairs.push((p, q));
    }
    let outcomes: Vec<Result<Option<(f64, f64)>>> = pairs
        .par_iter()
        .map(|(p, q)| {
            let mid = match m.midpoint(p, q) {
                Ok(x) => x,
                Err(Error::CutLocusExceeded { .. }) => return Ok(None),
                Err(e) => return Err(e),
            };
            let fm = f.value(&mid)?.f64();
            let mut avg = (f.value(p)?.f64() + f.value(q)?.f64()) / 2.0;
            if kappa != 0.0 {
                avg -= kappa * m.dist(p, q)?.f64().powi(2) / 8.0;
            }
            Ok(Some((fm - avg, cfg.slack.tau(fm, avg))))
        })
        .collect();
    let mut report = CheckReport::new("midpoint-convexity", m.name(), cfg.seed)
        .param("samples", n_samples as f64)
        .param("kappa", kappa)
        .param("slack_abs", cfg.slack.abs)
        .param("slack_rel", cfg.slack.rel);
    report.notes.push(format!("region {}", region.describe()));
    report.samples_attempted = n_samples;
    // Argmax of the margin; the first maximizer wins so the result is order-independent.
    let mut worst: Option<(usize, f64)> = None;
    for (i, o) in outcomes.into_iter().enumerate() {
        if let Some((v, tau)) = o? {
            report.samples_evaluated += 1;
            report.absorb(v, tau);
            let m = v - tau;
            let better = match worst {
                None => true,
                Some((_, w)) => !w.is_nan() && (m.is_nan() || m > w),
            };
            if better {
                worst = Some((i, m));
            }
        }
    }
    let worst_idx = worst.map(|(i, _)| i);
    if let Some(i) = worst_idx {
        report.witnesses = vec![pairs[i].0.to_f64(), pairs[i].1.to_f64()];
    }
    if report.samples_evaluated == 0 {
        report.notes.push("no pair had a unique connecting geodesic".into());
    }
    Ok(report)
}

/// `f + C d(., x0)^2` is midpoint-convex on `B(x0, R)`.
pub fn semiconvexity_check<T: Real, F: Field<T>>(
    f: &F,
    c: T,
    x0: &Point<T>,
    r: T,
    n: usize,
    cfg: &DiffConfig,
) -> Result<CheckReport> {
    let m = f.manifold();
    let g = FnField::new(m, |x: &Point<T>| {
        let d = m.dist(x, x0)?;
        Ok(f.value(x)? + c * d * d)
    });
    let mut rep = midpoint_convexity_check(&g, &Region::ball(x0, r), n, cfg)?;
    rep.suite = "semiconvexity".into();
    rep.set("C", c.f64());
    rep.set("R", r.f64());
    Ok(rep)
}

/// `f - C d(., x0)^2` is midpoint-concave on `B(x0, R)`.
pub fn semiconcavity_check<T: Real, F: Field<T>>(
    f: &F,
    c: T,
    x0: &Point<T>,
    r: T,
    n: usize,
    cfg: &DiffConfig,
) -> Result<CheckReport> {
    let m = f.manifold();
    let g = FnField::new(m, |x: &Point<T>| {
        let d = m.dist(x, x0)?;
        Ok(c * d * d - f.value(x)?)
    });
    let mut rep = midpoint_convexity_check(&g, &Region::ball(x0, r), n, cfg)?;
    rep.suite = "semiconcavity".into();
    rep.set("C", c.f64());
    rep.set("R", r.f64());
    Ok(rep)
}
