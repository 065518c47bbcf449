use crate::analysis::{midpoint_convexity_check, midpoint_strong_convexity_check, CheckReport, DiffConfig, Region};
use crate::envelope::FnField;
use crate::error::{domain, Error, Result};
use crate::manifold::{Manifold, Point};
use crate::scalar::Real;

/// `h_eps(2) = (8 eps + 1 - eps^2) / (2 (1 - eps)^2 - 1 + eps^2)`.
pub fn h_eps_at_two(eps: f64) -> f64 {
    (8.0 * eps + 1.0 - eps * eps) / (2.0 * (1.0 - eps).powi(2) - 1.0 + eps * eps)
}

const EPS_CAP: f64 = 0.25;

/// Largest `t` in `(0, hi]` with `ok(t)`, for `ok` true near 0 and monotone.
fn largest_true(ok: impl Fn(f64) -> bool, hi: f64) -> f64 {
    if ok(hi) {
        return hi;
    }
    let (mut lo, mut hi) = (0.0, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// `(eps, R)` for which the convexity lemma holds with exponent `q` under `|K| <= K0`.
///
/// `eps` is the largest value below 1/4 with `h_eps(2) <= q`; `R` is the largest radius
/// such that, for `t = sqrt(K0) l` with `l` in `(0, 2R]`,
/// `t sin t cos t / sinh^2 t >= 1 - eps`, `t / sin t <= 1 + eps` and `t coth t <= 1 + eps`,
/// with `2R < pi / (4 sqrt(K0))`.
pub fn admissible_r<T: Real>(q: T, k0: T) -> Result<(T, T)> {
    let (q, k0) = (q.f64(), k0.f64());
    if !(q > 1.0) {
        return Err(Error::NoFeasibleEpsilon { q });
    }
    if !(k0 > 0.0) {
        return Err(domain("K0 must be positive"));
    }
    let eps = if h_eps_at_two(EPS_CAP) <= q {
        EPS_CAP
    } else {
        let (mut lo, mut hi) = (0.0, EPS_CAP);
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if h_eps_at_two(mid) <= q {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    let cap = std::f64::consts::FRAC_PI_4;
    let t1 = largest_true(|t| t * t.sin() * t.cos() / t.sinh().powi(2) >= 1.0 - eps, cap);
    let t2 = largest_true(|t| t / t.sin() <= 1.0 + eps, cap);
    let t3 = largest_true(|t| t / t.tanh() <= 1.0 + eps, cap);
    let t = t1.min(t2).min(t3);
    // Keep 2R strictly inside pi / (4 sqrt K0).
    let t = if t >= cap { cap * (1.0 - 1e-12) } else { t };
    Ok((T::lit(eps), T::lit(t / (2.0 * k0.sqrt()))))
}

/// Which of the three smallness conditions on `R` is the binding one.
pub fn binding_condition(q: f64) -> Result<usize> {
    let (eps, _) = admissible_r(q, 1.0)?;
    let cap = std::f64::consts::FRAC_PI_4;
    let ts = [
        largest_true(|t| t * t.sin() * t.cos() / t.sinh().powi(2) >= 1.0 - eps, cap),
        largest_true(|t| t / t.sin() <= 1.0 + eps, cap),
        largest_true(|t| t / t.tanh() <= 1.0 + eps, cap),
    ];
    Ok((0..3).min_by(|&a, &b| ts[a].total_cmp(&ts[b])).unwrap_or(0))
}

/// The constants of `phi(x, y) = A d(x, y)^2 + B d(x, x0)^2 - C d(y, y0)^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LemmaConstants<T> {
    pub a: T,
    pub b: T,
    pub c: T,
}

impl<T: Real> LemmaConstants<T> {
    /// The smallest admissible choice: `A = 2C`, `B = qA`.
    pub fn minimal(q: T, c: T) -> Self {
        let a = T::lit(2.0) * c;
        Self { a, b: q * a, c }
    }

    pub fn satisfies(&self, q: T) -> bool {
        self.a >= T::lit(2.0) * self.c && self.b >= q * self.a
    }
}

/// Midpoint convexity of `phi` on `B(x0, R) x B(x0, R)` (part 1) and of
/// `B d(., z0)^2 - C d(., y0)^2` on `B(x0, R)` (part 2), with `R` from [`admissible_r`]
/// (further capped by half the convexity radius of `m`).
///
/// Constants violating `A >= 2C`, `B >= qA` are accepted and flagged, so ablations can be run.
#[allow(clippy::too_many_arguments)]
pub fn verify_convexity_lemma<T: Real>(
    m: &Manifold<T>,
    q: T,
    k0: T,
    consts: LemmaConstants<T>,
    x0: &Point<T>,
    y0: &Point<T>,
    z0: &Point<T>,
    n: usize,
    cfg: &DiffConfig,
) -> Result<CheckReport> {
    let (eps, r) = admissible_r(q, k0)?;
    let r = r.min(m.convexity_radius() / T::lit(2.0));
    if m.curvature_bound() > k0 * (T::one() + T::lit(1e-12)) {
        return Err(domain("manifold curvature exceeds K0"));
    }
    for (name, p) in [("y0", y0), ("z0", z0)] {
        if m.dist(x0, p)? >= r {
            return Err(domain(format!("{name} must lie in B(x0, R), R = {r}")));
        }
    }
    let LemmaConstants { a, b, c } = consts;
    let prod = Manifold::product(m.clone(), m.clone());
    let phi = FnField::new(&prod, |p: &Point<T>| {
        let (x, y) = prod.split(p);
        let dxy = m.dist(&x, &y)?;
        let dx = m.dist(&x, x0)?;
        let dy = m.dist(&y, y0)?;
        Ok(a * dxy * dxy + b * dx * dx - c * dy * dy)
    });
    let region = Region::Product(Box::new(Region::ball(x0, r)), Box::new(Region::ball(x0, r)));
    let mut part1 = midpoint_convexity_check(&phi, &region, n, cfg)?;
    part1.suite = "convexity-lemma/part1".into();

    let psi = FnField::new(m, |x: &Point<T>| {
        let dz = m.dist(x, z0)?;
        let dy = m.dist(x, y0)?;
        Ok(b * dz * dz - c * dy * dy)
    });
    let mut part2 = midpoint_convexity_check(&psi, &Region::ball(x0, r), n, cfg)?;
    part2.suite = "convexity-lemma/part2".into();

    let mut rep = CheckReport::new("convexity-lemma", m.name(), cfg.seed)
        .param("q", q.f64())
        .param("K0", k0.f64())
        .param("eps", eps.f64())
        .param("R", r.f64())
        .param("A", a.f64())
        .param("B", b.f64())
        .param("C", c.f64())
        .param("samples", n as f64);
    let ok = consts.satisfies(q);
    rep.set("constants_admissible", if ok { 1.0 } else { 0.0 });
    if !ok {
        rep.notes.push("constants violate A >= 2C, B >= qA (ablation)".into());
    }
    rep.push_child(part1);
    rep.push_child(part2);
    Ok(rep)
}

/// `(eps, N, A0, B0)` for the nonpositive-curvature lemma on `B(x0, R)` with `-K0 <= K <= 0`.
///
/// `1 - eps = (t / sinh t)^2` and `N = t coth t` at `t = 2R sqrt(K0)` (flat and hyperbolic
/// comparison over the longest segment in the ball); `A0 = 4s / (1 - eps)` with
/// `s = max(C0 N, 1)`, and `B0 = (4 A0^2 / ((1 - eps)((1 - eps) A0 - 2s)) - A0) / 2`.
pub fn nonpositive_constants<T: Real>(r: T, k0: T, c0: T) -> Result<(T, T, T, T)> {
    if !(r > T::zero() && k0 > T::zero() && c0 >= T::zero()) {
        return Err(domain("need R > 0, K0 > 0, C0 >= 0"));
    }
    let t = T::lit(2.0) * r * k0.sqrt();
    let one_minus_eps = (t / t.sinh()).powi(2);
    let eps = T::one() - one_minus_eps;
    let n = t / t.tanh();
    let s = (c0 * n).max(T::one());
    let a0 = T::lit(4.0) * s / one_minus_eps;
    let b0 = (T::lit(4.0) * a0 * a0 / (one_minus_eps * (one_minus_eps * a0 - T::lit(2.0) * s)) - a0) / T::lit(2.0);
    Ok((eps, n, a0, b0))
}

/// Strong midpoint convexity of `A0 d(x, y)^2 + B0 d(x, x0)^2 - C0 d(y, y0)^2` on
/// `B(x0, R) x B(x0, R)` with modulus `(1 - eps) A0`. `b_scale` multiplies `B0`.
#[allow(clippy::too_many_arguments)]
pub fn verify_nonpositive_lemma<T: Real>(
    m: &Manifold<T>,
    r: T,
    c0: T,
    b_scale: T,
    x0: &Point<T>,
    y0: &Point<T>,
    n: usize,
    cfg: &DiffConfig,
) -> Result<CheckReport> {
    let k = m.curvature().ok_or_else(|| domain("needs constant nonpositive curvature"))?;
    if k > T::zero() {
        return Err(domain("needs nonpositive curvature"));
    }
    if !(T::lit(2.0) * r < m.injectivity_radius().min(m.convexity_radius())) {
        return Err(domain("need 2R < min(i(M), c(M))"));
    }
    if m.dist(x0, y0)? >= r {
        return Err(domain("y0 must lie in B(x0, R)"));
    }
    let k0 = (-k).max(T::lit(1e-300));
    let (eps, big_n, a0, b0) = nonpositive_constants(r, k0, c0)?;
    let b = b0 * b_scale;
    let prod = Manifold::product(m.clone(), m.clone());
    let phi = FnField::new(&prod, |p: &Point<T>| {
        let (x, y) = prod.split(p);
        let dxy = m.dist(&x, &y)?;
        let dx = m.dist(&x, x0)?;
        let dy = m.dist(&y, y0)?;
        Ok(a0 * dxy * dxy + b * dx * dx - c0 * dy * dy)
    });
    let region = Region::Product(Box::new(Region::ball(x0, r)), Box::new(Region::ball(x0, r)));
    let kappa = ((T::one() - eps) * a0).f64();
    let mut rep = midpoint_strong_convexity_check(&phi, &region, n, kappa, cfg)?;
    rep.suite = "nonpositive-lemma".into();
    for (k, v) in [("R", r), ("C0", c0), ("eps", eps), ("N", big_n), ("A0", a0), ("B0", b0), ("B", b)] {
        rep.set(k, v.f64());
    }
    Ok(rep)
}
