use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::manifold::{Manifold, Point, Tangent};
use crate::scalar::{sinc_k_minus_one, Real};

use super::config::DiffConfig;
use super::derivatives::operator_norm;
use super::report::CheckReport;
use super::sampling::{random_unit_tangent, Region};

/// Directions used for the sampled operator norm in two dimensions.
pub const GAP_DIRECTIONS: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GapKind {
    /// `|| d exp_x(v) - L_{xy} ||`
    Dexp,
    /// `|| d(exp_x^{-1})(y) o L_{xy} - I ||`
    Invexp,
}

fn check_cut<T: Real>(m: &Manifold<T>, v: &Tangent<T>) -> Result<()> {
    let limit = m.cut_limit();
    if v.norm() >= limit {
        return Err(Error::CutLocusExceeded { norm: v.norm().f64(), limit: limit.f64() });
    }
    Ok(())
}

/// Closed form on constant curvature; `None` elsewhere.
pub fn closed_form_gap<T: Real>(m: &Manifold<T>, v: &Tangent<T>, kind: GapKind) -> Option<T> {
    let k = m.curvature()?;
    if k == T::zero() || m.dim() < 2 {
        return Some(T::zero());
    }
    let theta = k.abs().sqrt() * v.norm();
    let sign = if k > T::zero() { 1 } else { -1 };
    let s1 = sinc_k_minus_one(theta, sign);
    Some(match kind {
        GapKind::Dexp => s1.abs(),
        GapKind::Invexp => (s1 / (T::one() + s1)).abs(),
    })
}

/// Matrix of `L_{xy}^{-1} o d exp_x(v)` in the orthonormal frame at `x`.
pub fn dexp_matrix<T: Real>(m: &Manifold<T>, x: &Point<T>, v: &Tangent<T>) -> Result<Vec<Vec<T>>> {
    check_cut(m, v)?;
    let y = m.exp(x, v)?;
    let frame = m.orthonormal_frame(x);
    let moved: Vec<Tangent<T>> = frame.iter().map(|e| m.parallel_transport(x, &y, e)).collect::<Result<_>>()?;
    let n = frame.len();
    let mut d = vec![vec![T::zero(); n]; n];
    for j in 0..n {
        let dj = m.dexp(x, v, &frame[j])?;
        for i in 0..n {
            d[i][j] = m.inner(&y, &moved[i].comps, &dj.comps);
        }
    }
    Ok(d)
}

pub(crate) fn invert<T: Real>(a: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
    let n = a.len();
    let mut w: Vec<Vec<T>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { T::one() } else { T::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| w[i][c].abs().partial_cmp(&w[j][c].abs()).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap_or(c);
        if w[p][c].abs() < T::epsilon() {
            return Err(Error::Domain("singular differential (conjugate point)".into()));
        }
        w.swap(c, p);
        let piv = w[c][c];
        for e in w[c].iter_mut() {
            *e = *e / piv;
        }
        for r in 0..n {
            if r != c {
                let f = w[r][c];
                let pivot = w[c].clone();
                for (a, t) in w[r].iter_mut().zip(pivot) {
                    *a = *a - f * t;
                }
            }
        }
    }
    Ok(w.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Gap computed from the sampled differential, on any manifold.
pub fn sampled_gap<T: Real>(m: &Manifold<T>, x: &Point<T>, v: &Tangent<T>, kind: GapKind) -> Result<T> {
    let d = dexp_matrix(m, x, v)?;
    let mut g = match kind {
        GapKind::Dexp => d,
        GapKind::Invexp => invert(&d)?,
    };
    for (i, row) in g.iter_mut().enumerate() {
        row[i] = row[i] - T::one();
    }
    Ok(operator_norm(&g, GAP_DIRECTIONS))
}

/// `|| d exp_x(v) - L_{x, exp_x v} ||`, closed form when the curvature is constant.
pub fn dexp_transport_gap<T: Real>(m: &Manifold<T>, x: &Point<T>, v: &Tangent<T>) -> Result<T> {
    check_cut(m, v)?;
    match closed_form_gap(m, v, GapKind::Dexp) {
        Some(g) => Ok(g),
        None => sampled_gap(m, x, v, GapKind::Dexp),
    }
}

/// `|| d(exp_x^{-1})(y) o L_{xy} - I ||` with `y = exp_x(v)`.
pub fn invexp_transport_gap<T: Real>(m: &Manifold<T>, x: &Point<T>, v: &Tangent<T>) -> Result<T> {
    check_cut(m, v)?;
    match closed_form_gap(m, v, GapKind::Invexp) {
        Some(g) => Ok(g),
        None => sampled_gap(m, x, v, GapKind::Invexp),
    }
}

/// `(t, gap)` pairs along `t * dir` and the least-squares slope of `log gap` against `log t`.
#[derive(Clone, Debug, PartialEq)]
pub struct GapFit {
    pub points: Vec<(f64, f64)>,
    pub slope: f64,
}

/// Fits the order of the transport gap along `dir`; `sampled` forces the sampled differential.
pub fn gap_order_fit<T: Real>(
    m: &Manifold<T>,
    x: &Point<T>,
    dir: &Tangent<T>,
    ts: &[f64],
    kind: GapKind,
    sampled: bool,
) -> Result<GapFit> {
    if ts.len() < 2 {
        return Err(Error::Domain("need at least two step sizes".into()));
    }
    let unit = dir.scaled(T::one() / dir.norm());
    let mut points = Vec::with_capacity(ts.len());
    for &t in ts {
        let v = unit.scaled(T::lit(t));
        let g = if sampled {
            check_cut(m, &v)?;
            sampled_gap(m, x, &v, kind)?
        } else {
            match kind {
                GapKind::Dexp => dexp_transport_gap(m, x, &v)?,
                GapKind::Invexp => invexp_transport_gap(m, x, &v)?,
            }
        };
        points.push((t, g.f64()));
    }
    if points.iter().any(|&(_, g)| g <= 0.0) {
        return Err(Error::Domain("gap vanishes; no order to fit".into()));
    }
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    Ok(GapFit { points, slope: sxy / sxx })
}

/// Samples `x, z` with `d(x, z) <= r` and `w in T_z M` with `|w| <= r`, and checks
/// `d(exp_x(L_{zx} w), exp_z(w)) <= (1 + eps) d(x, z)`.
///
/// The smallest `eps` that would have passed every sample is echoed as `eps_min`.
pub fn exp_comparison_check<T: Real>(
    m: &Manifold<T>,
    eps: f64,
    r: T,
    n: usize,
    cfg: &DiffConfig,
) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let o = m.origin();
    let region = Region::ball(&o, r);
    let mut rep = CheckReport::new("exp-comparison", m.name(), cfg.seed)
        .param("eps", eps)
        .param("r", r.f64())
        .param("samples", n as f64);
    rep.samples_attempted = n;
    let mut eps_min = f64::NEG_INFINITY;
    for _ in 0..n {
        let x = region.sample(m, &mut rng)?;
        let s = T::lit(rand::Rng::gen_range(&mut rng, 0.05..=1.0)) * r;
        let z = m.exp(&x, &random_unit_tangent(m, &x, &mut rng).scaled(s))?;
        let wr = T::lit(rand::Rng::gen::<f64>(&mut rng)) * r;
        let w = random_unit_tangent(m, &z, &mut rng).scaled(wr);
        let d = m.dist(&x, &z)?.f64();
        if d == 0.0 {
            continue;
        }
        let a = m.exp(&x, &m.parallel_transport(&z, &x, &w)?)?;
        let b = m.exp(&z, &w)?;
        let lhs = m.dist(&a, &b)?.f64();
        let rhs = (1.0 + eps) * d;
        rep.samples_evaluated += 1;
        eps_min = eps_min.max(lhs / d - 1.0);
        let before = rep.margin();
        rep.absorb(lhs - rhs, cfg.slack.tau(lhs, rhs));
        if rep.margin() > before {
            rep.witnesses = vec![x.to_f64(), z.to_f64()];
        }
    }
    rep.set("eps_min", eps_min.max(0.0));
    Ok(rep)
}
