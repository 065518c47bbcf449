use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::envelope::Field;
use crate::error::Result;
use crate::manifold::Point;
use crate::scalar::Real;

use super::config::DiffConfig;
use super::derivatives::{hessian_matrix, num_gradient, operator_norm};
use super::report::{CheckReport, Row};
use super::sampling::{spread_directions, Region};

/// Offset for the gradient-quotient estimator.
pub const QUOTIENT_T: f64 = 1e-3;
/// Radius for the chart Taylor and chart-gradient estimators.
pub const CHART_R: f64 = 1e-2;
/// Maximal relative spread between the four estimates.
pub const C11_SPREAD: f64 = 0.15;
const C11_DIRECTIONS: usize = 32;

/// The four estimated C^{1,1} constants.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct C11Estimates {
    /// `|L grad f(exp_x tu) - grad f(x)| / t` at small `t`.
    pub quotient: f64,
    /// `2 |f(exp_x ru) - f(x) - r <grad f(x), u>| / r^2`.
    pub taylor: f64,
    /// `|grad F(ru) - grad F(0)| / r` for the chart function `F = f o exp_x`.
    pub chart_gradient: f64,
    /// Largest `|eigenvalue|` of the Hessian.
    pub hessian: f64,
}

impl C11Estimates {
    pub fn as_array(&self) -> [f64; 4] {
        [self.quotient, self.taylor, self.chart_gradient, self.hessian]
    }

    /// `(max - min) / max`.
    pub fn spread(&self) -> f64 {
        let a = self.as_array();
        let hi = a.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = a.iter().copied().fold(f64::INFINITY, f64::min);
        if hi > 0.0 {
            (hi - lo) / hi
        } else {
            0.0
        }
    }
}

fn max4(a: C11Estimates, b: C11Estimates) -> C11Estimates {
    C11Estimates {
        quotient: a.quotient.max(b.quotient),
        taylor: a.taylor.max(b.taylor),
        chart_gradient: a.chart_gradient.max(b.chart_gradient),
        hessian: a.hessian.max(b.hessian),
    }
}

fn estimates_at<T: Real, F: Field<T>>(f: &F, x: &Point<T>, dirs: &[Vec<T>], cfg: &DiffConfig) -> Result<C11Estimates> {
    let m = f.manifold();
    let frame = m.orthonormal_frame(x);
    let g0 = num_gradient(f, x, cfg)?;
    let f0 = f.value(x)?;
    let t = T::lit(QUOTIENT_T);
    let r = T::lit(CHART_R);
    let h = T::lit(cfg.grad_step());
    let chart = |u: &[T]| -> Result<T> { f.value(&m.exp(x, &m.combine(x, &frame, u))?) };
    let chart_grad = |u: &[T]| -> Result<Vec<T>> {
        (0..u.len())
            .map(|i| {
                let mut p = u.to_vec();
                let mut q = u.to_vec();
                p[i] = p[i] + h;
                q[i] = q[i] - h;
                Ok((chart(&p)? - chart(&q)?) / (T::lit(2.0) * h))
            })
            .collect()
    };
    let cg0 = chart_grad(&vec![T::zero(); frame.len()])?;
    let mut e = C11Estimates::default();
    for d in dirs {
        let u = m.combine(x, &frame, d);

        let y = m.exp(x, &u.scaled(t))?;
        let back = m.parallel_transport(&y, x, &num_gradient(f, &y, cfg)?)?;
        e.quotient = e.quotient.max((m.sub(&back, &g0)?.norm() / t).f64());

        let fr = f.value(&m.exp(x, &u.scaled(r))?)?;
        let lin = r * m.inner(x, &g0.comps, &u.comps);
        e.taylor = e.taylor.max((T::lit(2.0) * (fr - f0 - lin).abs() / (r * r)).f64());

        let ur: Vec<T> = d.iter().map(|&c| c * r).collect();
        let cg = chart_grad(&ur)?;
        let diff = cg.iter().zip(&cg0).fold(T::zero(), |s, (&a, &b)| s + (a - b) * (a - b)).sqrt();
        e.chart_gradient = e.chart_gradient.max((diff / r).f64());
    }
    e.hessian = operator_norm(&hessian_matrix(f, x, cfg)?, cfg.directions).f64();
    Ok(e)
}

/// Estimates the C^{1,1} constant of `f` on `B(x0, R)` four independent ways at shared
/// sample points; passes when their relative spread is at most 15%.
///
/// `c_claim` is echoed as the reference value of every row but does not affect the verdict.
pub fn c11_crosscheck<T: Real, F: Field<T>>(
    f: &F,
    x0: &Point<T>,
    r: T,
    c_claim: f64,
    cfg: &DiffConfig,
) -> Result<(CheckReport, C11Estimates)> {
    let m = f.manifold();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let region = Region::ball(x0, r);
    let pts: Vec<Point<T>> = (0..cfg.n_samples.max(1)).map(|_| region.sample(m, &mut rng)).collect::<Result<_>>()?;
    let dirs = spread_directions::<T>(m.dim(), C11_DIRECTIONS);
    let per_point: Vec<Result<C11Estimates>> = pts.par_iter().map(|x| estimates_at(f, x, &dirs, cfg)).collect();
    let mut est = C11Estimates::default();
    for e in per_point {
        est = max4(est, e?);
    }
    let mut rep = CheckReport::new("c11-crosscheck", m.name(), cfg.seed)
        .param("R", r.f64())
        .param("C_claim", c_claim)
        .param("quotient", est.quotient)
        .param("taylor", est.taylor)
        .param("chart_gradient", est.chart_gradient)
        .param("hessian", est.hessian);
    rep.samples_attempted = pts.len();
    rep.samples_evaluated = pts.len();
    let labels = ["quotient", "taylor", "chart_gradient", "hessian"];
    for (i, (label, v)) in labels.iter().zip(est.as_array()).enumerate() {
        rep.rows.push(Row {
            label: label.to_string(),
            point_id: i,
            lambda: 0.0,
            mu: 0.0,
            q: 0.0,
            value_numeric: v,
            value_reference: c_claim,
            pass: true,
        });
    }
    rep.conclude(est.spread(), C11_SPREAD);
    Ok((rep, est))
}
