//! Ready-made fields with their metadata.

use crate::manifold::{Manifold, Point};
use crate::scalar::Real;

use super::field::{bump_profile, Expr, Quadratic, Regularity, ScalarField, ScalarMap};

fn quad<T: Real>(c: T, center: &Point<T>) -> Option<Quadratic<T>> {
    Some(Quadratic { c, center: center.clone() })
}

pub fn constant<T: Real>(m: &Manifold<T>, c: T) -> ScalarField<T> {
    let o = m.origin();
    let two = T::lit(2.0);
    ScalarField {
        name: format!("const({c})"),
        manifold: m.clone(),
        expr: Expr::Const(c),
        regularity: Regularity {
            bound: Some(c.abs()),
            lipschitz: Some(T::zero()),
            minorant: quad((-two * c).max(T::zero()), &o),
            majorant: quad((two * c).max(T::zero()), &o),
        },
        infimum: Some((c, o)),
    }
}

/// `d(., x0)`.
pub fn dist<T: Real>(m: &Manifold<T>, x0: &Point<T>) -> ScalarField<T> {
    ScalarField {
        name: "dist".into(),
        manifold: m.clone(),
        expr: Expr::Dist(x0.clone()),
        regularity: Regularity {
            bound: None,
            lipschitz: Some(T::one()),
            minorant: quad(T::zero(), x0),
            // d <= (1 + d^2) / 2
            majorant: quad(T::one(), x0),
        },
        infimum: Some((T::zero(), x0.clone())),
    }
}

/// `d(., x0)^2`.
pub fn dist_sq<T: Real>(m: &Manifold<T>, x0: &Point<T>) -> ScalarField<T> {
    ScalarField {
        name: "dist2".into(),
        manifold: m.clone(),
        expr: Expr::Map(ScalarMap::Square, Box::new(Expr::Dist(x0.clone()))),
        regularity: Regularity {
            bound: None,
            lipschitz: None,
            minorant: quad(T::zero(), x0),
            majorant: quad(T::lit(2.0), x0),
        },
        infimum: Some((T::zero(), x0.clone())),
    }
}

/// `d(., x0)^2 / 2`.
pub fn half_dist_sq<T: Real>(m: &Manifold<T>, x0: &Point<T>) -> ScalarField<T> {
    let mut f = affine(m, vec![(T::lit(0.5), dist_sq(m, x0))], T::zero());
    f.name = "half-dist2".into();
    f.infimum = Some((T::zero(), x0.clone()));
    f
}

/// `min{cap, d(., p)}`.
pub fn truncated_dist<T: Real>(m: &Manifold<T>, p: &Point<T>, cap: T) -> ScalarField<T> {
    let mut f = min_dist(m, std::slice::from_ref(p), cap);
    f.name = format!("min({cap}, dist)");
    f
}

/// `min{cap, min_i d(., p_i)}`.
pub fn min_dist<T: Real>(m: &Manifold<T>, points: &[Point<T>], cap: T) -> ScalarField<T> {
    let mut terms = vec![Expr::Const(cap)];
    terms.extend(points.iter().map(|p| Expr::Dist(p.clone())));
    let anchor = points.first().cloned().unwrap_or_else(|| m.origin());
    ScalarField {
        name: format!("min({cap}, dist to {} points)", points.len()),
        manifold: m.clone(),
        expr: Expr::Min(terms),
        regularity: Regularity {
            bound: Some(cap.abs()),
            lipschitz: Some(T::one()),
            minorant: quad((-T::lit(2.0) * cap).max(T::zero()), &anchor),
            majorant: quad(T::lit(2.0) * cap.max(T::zero()), &anchor),
        },
        infimum: points.first().map(|p| (T::zero().min(cap), p.clone())),
    }
}

/// `min{cap, d(., p)^2}`: quadratic near `p`, bounded overall.
pub fn truncated_dist_sq<T: Real>(m: &Manifold<T>, p: &Point<T>, cap: T) -> ScalarField<T> {
    let two = T::lit(2.0);
    ScalarField {
        name: format!("min({cap}, dist2)"),
        manifold: m.clone(),
        expr: Expr::Min(vec![Expr::Const(cap), Expr::Map(ScalarMap::Square, Box::new(Expr::Dist(p.clone())))]),
        regularity: Regularity {
            bound: Some(cap),
            lipschitz: Some(two * cap.sqrt()),
            minorant: quad(T::zero(), p),
            majorant: quad((two * cap).min(two), p),
        },
        infimum: Some((T::zero(), p.clone())),
    }
}

/// Largest slope of the bump profile on `[0, 1)`.
fn bump_slope<T: Real>() -> T {
    let n = 20_000;
    let mut best = 0.0_f64;
    for i in 1..n {
        let s = i as f64 / n as f64;
        let d = bump_profile(s) * 2.0 * s / ((1.0 - s * s) * (1.0 - s * s));
        best = best.max(d);
    }
    // The grid brackets the maximum to well below this margin.
    T::lit(best * 1.001)
}

/// `exp(1 - 1/(1 - (d/r)^2))` inside `B(center, r)`, zero outside; peak value 1 at the center.
pub fn bump<T: Real>(m: &Manifold<T>, center: &Point<T>, radius: T) -> ScalarField<T> {
    ScalarField {
        name: format!("bump(r={radius})"),
        manifold: m.clone(),
        expr: Expr::Map(ScalarMap::Bump { radius }, Box::new(Expr::Dist(center.clone()))),
        regularity: Regularity {
            bound: Some(T::one()),
            // Modulus of continuity: omega(t) = lipschitz * t.
            lipschitz: Some(bump_slope::<T>() / radius),
            minorant: quad(T::zero(), center),
            majorant: quad(T::lit(2.0), center),
        },
        infimum: None,
    }
}

/// `sum_i a_i f_i + b`, with metadata combined conservatively.
///
/// Quadratic bounds survive only when all terms share a center.
pub fn affine<T: Real>(m: &Manifold<T>, terms: Vec<(T, ScalarField<T>)>, b: T) -> ScalarField<T> {
    let two = T::lit(2.0);
    let mut bound = Some(b.abs());
    let mut lip = Some(T::zero());
    let mut lo_c = Some((-two * b).max(T::zero()));
    let mut hi_c = Some((two * b).max(T::zero()));
    let center = terms
        .iter()
        .find_map(|(_, f)| f.regularity.minorant.as_ref().or(f.regularity.majorant.as_ref()).map(|q| q.center.clone()))
        .unwrap_or_else(|| m.origin());
    let same = |q: &Option<Quadratic<T>>| q.as_ref().filter(|q| q.center == center).map(|q| q.c);
    for (a, f) in &terms {
        let r = &f.regularity;
        bound = bound.zip(r.bound).map(|(s, n)| s + a.abs() * n);
        lip = lip.zip(r.lipschitz).map(|(s, l)| s + a.abs() * l);
        let (lo, hi) = if *a >= T::zero() { (&r.minorant, &r.majorant) } else { (&r.majorant, &r.minorant) };
        lo_c = lo_c.zip(same(lo)).map(|(s, c)| s + a.abs() * c);
        hi_c = hi_c.zip(same(hi)).map(|(s, c)| s + a.abs() * c);
    }
    let names: Vec<String> = terms.iter().map(|(a, f)| format!("{a}*{}", f.name)).collect();
    ScalarField {
        name: format!("{} + {b}", names.join(" + ")),
        manifold: m.clone(),
        expr: Expr::Affine(terms.into_iter().map(|(a, f)| (a, f.expr)).collect(), b),
        regularity: Regularity {
            bound,
            lipschitz: lip,
            minorant: lo_c.map(|c| Quadratic { c, center: center.clone() }),
            majorant: hi_c.map(|c| Quadratic { c, center: center.clone() }),
        },
        infimum: None,
    }
}

/// The standard fields anchored at `x0` (and `p1`, a second point), by name.
pub fn field_library<T: Real>(m: &Manifold<T>, x0: &Point<T>, p1: &Point<T>) -> Vec<ScalarField<T>> {
    vec![
        constant(m, T::lit(0.5)),
        dist(m, x0),
        dist_sq(m, x0),
        half_dist_sq(m, x0),
        truncated_dist(m, p1, T::lit(2.0)),
        min_dist(m, &[x0.clone(), p1.clone()], T::lit(2.0)),
        truncated_dist_sq(m, x0, T::lit(0.25)),
        bump(m, x0, T::lit(0.3)),
        affine(m, vec![(T::lit(-1.0), bump(m, x0, T::lit(0.5))), (T::lit(0.5), dist(m, x0))], T::lit(1.0)),
    ]
}
