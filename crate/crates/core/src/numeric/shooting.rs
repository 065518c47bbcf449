use crate::error::{domain, Error, Result};
use crate::manifold::{Point, Tangent};
use crate::scalar::Real;

use super::integrator::rk4;
use super::ConformalMetric;

fn pair<T: Real>(c: &[T]) -> [T; 2] {
    [c[0], c[1]]
}

fn step_count<T: Real>(metric: &ConformalMetric<T>, len: T) -> usize {
    let n = (len * T::from_usize_lossy(metric.integrator.steps_per_unit)).ceil();
    n.to_usize().unwrap_or(usize::MAX).max(1)
}

fn guard<T: Real, const N: usize>(metric: &ConformalMetric<T>) -> impl Fn(&[T; N]) -> Result<()> + '_ {
    move |s: &[T; N]| metric.check(s[1])
}

/// Integrates `s -> exp_x(s v)` over `s in [0, 1]`; returns position and velocity.
pub(crate) fn flow<T: Real>(metric: &ConformalMetric<T>, x: [T; 2], v: [T; 2]) -> Result<([T; 2], [T; 2])> {
    metric.check(x[1])?;
    let len = metric.norm(x[1], &v);
    if len == T::zero() {
        return Ok((x, v));
    }
    let n = step_count(metric, len);
    let h = T::one() / T::from_usize_lossy(n);
    let s = rk4(
        [x[0], x[1], v[0], v[1]],
        n,
        h,
        |s| {
            let a = metric.accel(s[1], [s[2], s[3]]);
            [s[2], s[3], a[0], a[1]]
        },
        guard(metric),
    )?;
    Ok(([s[0], s[1]], [s[2], s[3]]))
}

/// Like [`flow`] with one variational column: returns the endpoint and `d endpoint / d eps`
/// for initial data `(x + eps dx0, v + eps dv0)`.
pub(crate) fn flow_variation<T: Real>(
    metric: &ConformalMetric<T>,
    x: [T; 2],
    v: [T; 2],
    dx0: [T; 2],
    dv0: [T; 2],
) -> Result<([T; 2], [T; 2], [T; 2])> {
    metric.check(x[1])?;
    let len = metric.norm(x[1], &v);
    if len == T::zero() {
        return Ok((x, v, dx0));
    }
    let n = step_count(metric, len);
    let h = T::one() / T::from_usize_lossy(n);
    let s = rk4(
        [x[0], x[1], v[0], v[1], dx0[0], dx0[1], dv0[0], dv0[1]],
        n,
        h,
        |s| {
            let vv = [s[2], s[3]];
            let a = metric.accel(s[1], vv);
            let da = metric.accel_variation(s[1], vv, [s[4], s[5]], [s[6], s[7]]);
            [s[2], s[3], a[0], a[1], s[6], s[7], da[0], da[1]]
        },
        guard(metric),
    )?;
    Ok(([s[0], s[1]], [s[2], s[3]], [s[4], s[5]]))
}

/// Endpoint of `exp_x(w)` and its 2x2 Jacobian with respect to `w` (column-major).
fn flow_jacobian<T: Real>(metric: &ConformalMetric<T>, x: [T; 2], w: [T; 2]) -> Result<([T; 2], [[T; 2]; 2])> {
    metric.check(x[1])?;
    let len = metric.norm(x[1], &w);
    if len == T::zero() {
        return Ok((x, [[T::zero(); 2]; 2]));
    }
    let n = step_count(metric, len);
    let h = T::one() / T::from_usize_lossy(n);
    let z = T::zero();
    let o = T::one();
    let s = rk4(
        [x[0], x[1], w[0], w[1], z, z, o, z, z, z, z, o],
        n,
        h,
        |s| {
            let vv = [s[2], s[3]];
            let a = metric.accel(s[1], vv);
            let d1 = metric.accel_variation(s[1], vv, [s[4], s[5]], [s[6], s[7]]);
            let d2 = metric.accel_variation(s[1], vv, [s[8], s[9]], [s[10], s[11]]);
            [s[2], s[3], a[0], a[1], s[6], s[7], d1[0], d1[1], s[10], s[11], d2[0], d2[1]]
        },
        guard(metric),
    )?;
    Ok(([s[0], s[1]], [[s[4], s[5]], [s[8], s[9]]]))
}

/// Shoots the geodesic from `x` with initial velocity `v` for time `t`.
///
/// With unit `v`, `t` is metric arclength. Returns `gamma(t)` and `gamma'(t)`.
pub fn geodesic_shoot<T: Real>(
    metric: &ConformalMetric<T>,
    x: &Point<T>,
    v: &Tangent<T>,
    t: T,
) -> Result<(Point<T>, Tangent<T>)> {
    if t < T::zero() {
        return Err(domain("shooting time must be nonnegative"));
    }
    let vt = [v.comps[0] * t, v.comps[1] * t];
    let (p, vel) = flow(metric, pair(&x.coords), vt)?;
    let end = Point::new(&p);
    // The flow ran with velocity v t over unit time; rescale back to velocity v.
    let vel = if t == T::zero() { pair(&v.comps) } else { [vel[0] / t, vel[1] / t] };
    let norm = metric.norm(p[1], &vel);
    Ok((end.clone(), Tangent::from_parts(end, vel.iter().copied().collect(), norm)))
}

fn residual<T: Real>(a: [T; 2], b: [T; 2]) -> T {
    (a[0] - b[0]).abs().max((a[1] - b[1]).abs())
}

/// Inverse of `exp_x` by damped Newton on the shooting map.
pub fn log_numeric<T: Real>(metric: &ConformalMetric<T>, x: &Point<T>, y: &Point<T>) -> Result<Tangent<T>> {
    let xa = pair(&x.coords);
    let ya = pair(&y.coords);
    metric.check(xa[1])?;
    metric.check(ya[1])?;
    let tangent = |w: [T; 2]| Tangent::from_parts(x.clone(), w.iter().copied().collect(), metric.norm(xa[1], &w));
    if xa == ya {
        return Ok(tangent([T::zero(); 2]));
    }
    let cfg = &metric.integrator;
    let tol = T::lit(cfg.newton_tol) * (T::one() + ya[0].abs().max(ya[1].abs()));

    // Chart difference rescaled by x2(x)/x2(y); exact along vertical rays.
    let r = xa[1] / ya[1];
    let mut w = [(ya[0] - xa[0]) * r, (ya[1] - xa[1]) * r];
    let mut state = None;
    for _ in 0..40 {
        match flow_jacobian(metric, xa, w) {
            Ok(s) => {
                state = Some(s);
                break;
            }
            Err(Error::LeftWorkingRegion { .. }) => w = [w[0] / T::lit(2.0), w[1] / T::lit(2.0)],
            Err(e) => return Err(e),
        }
    }
    let Some((mut end, mut jac)) = state else {
        return Err(Error::ShootingDiverged { iterations: 0, residual: f64::INFINITY });
    };
    let mut res = residual(end, ya);
    let mut iterations = 0;
    while res > tol && iterations < cfg.newton_max_iter {
        iterations += 1;
        let r0 = ya[0] - end[0];
        let r1 = ya[1] - end[1];
        let det = jac[0][0] * jac[1][1] - jac[1][0] * jac[0][1];
        if det == T::zero() || !det.is_finite() {
            break;
        }
        let dw = [(jac[1][1] * r0 - jac[1][0] * r1) / det, (jac[0][0] * r1 - jac[0][1] * r0) / det];
        let mut alpha = T::one();
        let mut accepted = false;
        while alpha > T::lit(1e-6) {
            let trial = [w[0] + alpha * dw[0], w[1] + alpha * dw[1]];
            if let Ok((e, j)) = flow_jacobian(metric, xa, trial) {
                let rt = residual(e, ya);
                if rt < res {
                    w = trial;
                    end = e;
                    jac = j;
                    res = rt;
                    accepted = true;
                    break;
                }
            }
            alpha = alpha / T::lit(2.0);
        }
        if !accepted {
            break;
        }
    }
    if res > tol {
        // Newton stalled: direct search on the endpoint error, then polish with Newton once more.
        let (w2, r2) = pattern_search(metric, xa, ya, w, res)?;
        w = w2;
        res = r2;
        if res > tol {
            if let Ok((e, j)) = flow_jacobian(metric, xa, w) {
                let det = j[0][0] * j[1][1] - j[1][0] * j[0][1];
                let r0 = ya[0] - e[0];
                let r1 = ya[1] - e[1];
                let trial = [w[0] + (j[1][1] * r0 - j[1][0] * r1) / det, w[1] + (j[0][0] * r1 - j[0][1] * r0) / det];
                if let Ok((e2, _)) = flow(metric, xa, trial) {
                    let rt = residual(e2, ya);
                    if rt < res {
                        w = trial;
                        res = rt;
                    }
                }
            }
        }
        if res > tol.max(T::lit(1e-8)) {
            return Err(Error::ShootingDiverged { iterations, residual: res.f64() });
        }
    }
    Ok(tangent(w))
}

fn pattern_search<T: Real>(
    metric: &ConformalMetric<T>,
    xa: [T; 2],
    ya: [T; 2],
    mut w: [T; 2],
    mut res: T,
) -> Result<([T; 2], T)> {
    let mut step = (w[0].abs() + w[1].abs()) * T::lit(0.1) + T::lit(1e-6);
    let floor = T::lit(1e-14) * (T::one() + w[0].abs() + w[1].abs());
    let dirs = [[T::one(), T::zero()], [-T::one(), T::zero()], [T::zero(), T::one()], [T::zero(), -T::one()]];
    for _ in 0..400 {
        if step < floor {
            break;
        }
        let mut improved = false;
        for d in &dirs {
            let trial = [w[0] + step * d[0], w[1] + step * d[1]];
            if let Ok((e, _)) = flow(metric, xa, trial) {
                let r = residual(e, ya);
                if r < res {
                    res = r;
                    w = trial;
                    improved = true;
                }
            }
        }
        if !improved {
            step = step / T::lit(2.0);
        }
    }
    Ok((w, res))
}

/// Parallel transport along the integrated geodesic from `x` to `y`.
pub fn transport_numeric<T: Real>(
    metric: &ConformalMetric<T>,
    x: &Point<T>,
    y: &Point<T>,
    h: &Tangent<T>,
) -> Result<Tangent<T>> {
    if x == y {
        return Ok(h.clone());
    }
    let w = log_numeric(metric, x, y)?;
    let xa = pair(&x.coords);
    let len = w.norm();
    let n = step_count(metric, len);
    let step = T::one() / T::from_usize_lossy(n);
    let s = rk4(
        [xa[0], xa[1], w.comps[0], w.comps[1], h.comps[0], h.comps[1]],
        n,
        step,
        |s| {
            let v = [s[2], s[3]];
            let a = metric.accel(s[1], v);
            let g = metric.christoffel(s[1], v, [s[4], s[5]]);
            [s[2], s[3], a[0], a[1], -g[0], -g[1]]
        },
        guard(metric),
    )?;
    let out = [s[4], s[5]];
    let norm = metric.norm(y.coords[1], &out);
    Ok(Tangent::from_parts(y.clone(), out.iter().copied().collect(), norm))
}

/// `d(exp_x)_v (h)` from the variational equation.
pub fn dexp_numeric<T: Real>(
    metric: &ConformalMetric<T>,
    x: &Point<T>,
    v: &Tangent<T>,
    h: &Tangent<T>,
) -> Result<Tangent<T>> {
    let (p, _, j) = flow_variation(metric, pair(&x.coords), pair(&v.comps), [T::zero(); 2], pair(&h.comps))?;
    let norm = metric.norm(p[1], &j);
    Ok(Tangent::from_parts(Point::new(&p), j.iter().copied().collect(), norm))
}
