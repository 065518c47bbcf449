use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::envelope::Field;
use crate::error::Result;
use crate::manifold::{Manifold, Point, Tangent};
use crate::scalar::Real;

use super::config::DiffConfig;
use super::sampling::{unit_direction, Region};

/// `f(exp_x(v))`.
fn along<T: Real, F: Field<T>>(f: &F, x: &Point<T>, v: &Tangent<T>) -> Result<T> {
    f.value(&f.manifold().exp(x, v)?)
}

/// Gradient of `f` at `x` by central differences of `f o exp_x` along the orthonormal frame.
pub fn num_gradient<T: Real, F: Field<T>>(f: &F, x: &Point<T>, cfg: &DiffConfig) -> Result<Tangent<T>> {
    let m = f.manifold();
    let frame = m.orthonormal_frame(x);
    let h = T::lit(cfg.grad_step());
    let mut g = Vec::with_capacity(frame.len());
    for e in &frame {
        let plus = along(f, x, &e.scaled(h))?;
        let minus = along(f, x, &e.scaled(-h))?;
        g.push((plus - minus) / (T::lit(2.0) * h));
    }
    Ok(m.combine(x, &frame, &g))
}

/// Second derivative of `t -> f(exp_x(t v))` at 0: a second difference at `h_hess`,
/// Richardson-extrapolated with `h_hess / 2`.
pub fn hessian_quadform<T: Real, F: Field<T>>(f: &F, x: &Point<T>, v: &Tangent<T>, cfg: &DiffConfig) -> Result<T> {
    let f0 = f.value(x)?;
    let second = |t: T| -> Result<T> {
        let p = along(f, x, &v.scaled(t))?;
        let q = along(f, x, &v.scaled(-t))?;
        Ok((p - T::lit(2.0) * f0 + q) / (t * t))
    };
    let t = T::lit(cfg.h_hess);
    let coarse = second(t)?;
    let fine = second(t / T::lit(2.0))?;
    Ok((T::lit(4.0) * fine - coarse) / T::lit(3.0))
}

/// Hessian matrix of `f` at `x` in the orthonormal frame, from quadratic-form evaluations.
pub fn hessian_matrix<T: Real, F: Field<T>>(f: &F, x: &Point<T>, cfg: &DiffConfig) -> Result<Vec<Vec<T>>> {
    let m = f.manifold();
    let frame = m.orthonormal_frame(x);
    let n = frame.len();
    let mut h = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        h[i][i] = hessian_quadform(f, x, &frame[i], cfg)?;
    }
    let r = T::lit(std::f64::consts::FRAC_1_SQRT_2);
    for i in 0..n {
        for j in (i + 1)..n {
            let mut u = vec![T::zero(); n];
            u[i] = r;
            u[j] = r;
            let q = hessian_quadform(f, x, &m.combine(x, &frame, &u), cfg)?;
            // q = (H_ii + H_jj)/2 + H_ij
            let hij = q - (h[i][i] + h[j][j]) / T::lit(2.0);
            h[i][j] = hij;
            h[j][i] = hij;
        }
    }
    Ok(h)
}

/// Operator norm of a small square matrix: direction sampling in 2-D, power iteration otherwise.
pub fn operator_norm<T: Real>(a: &[Vec<T>], directions: usize) -> T {
    let n = a.len();
    let apply = |u: &[T]| -> Vec<T> {
        (0..n).map(|i| (0..n).fold(T::zero(), |s, j| s + a[i][j] * u[j])).collect::<Vec<T>>()
    };
    let norm = |u: &[T]| u.iter().fold(T::zero(), |s, &x| s + x * x).sqrt();
    if n == 2 {
        return super::sampling::spread_directions::<T>(2, directions)
            .iter()
            .map(|u| norm(&apply(u)))
            .fold(T::zero(), T::max);
    }
    // Power iteration on A^T A from a fixed start.
    let mut u: Vec<T> = (0..n).map(|i| T::one() + T::lit(0.1 * i as f64)).collect();
    let mut est = T::zero();
    for _ in 0..200 {
        let au = apply(&u);
        let atau: Vec<T> = (0..n).map(|j| (0..n).fold(T::zero(), |s, i| s + a[i][j] * au[i])).collect();
        let s = norm(&atau);
        if s == T::zero() {
            return T::zero();
        }
        u = atau.iter().map(|&x| x / s).collect();
        est = norm(&apply(&u));
    }
    est
}

/// Pairs `(x, y)` in a ball with `d(x, y)` log-uniform in `[1e-3, radius]`.
pub fn sample_pairs<T: Real>(
    m: &Manifold<T>,
    region: &Region<T>,
    n_pairs: usize,
    seed: u64,
) -> Result<Vec<(Point<T>, Point<T>)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = match region {
        Region::Ball { radius, .. } => radius.f64(),
        Region::Product(..) => 1.0,
    };
    let lo = 1e-3_f64.min(radius);
    let mut out = Vec::with_capacity(n_pairs);
    let mut tries = 0;
    while out.len() < n_pairs && tries < 50 * n_pairs {
        tries += 1;
        let x = region.sample(m, &mut rng)?;
        let u = unit_direction::<T>(m.dim(), &mut rng);
        let s = (lo.ln() + rand::Rng::gen::<f64>(&mut rng) * (radius.ln() - lo.ln())).exp();
        let v = m.combine(&x, &m.orthonormal_frame(&x), &u).scaled(T::lit(s));
        let y = m.exp(&x, &v)?;
        if region.contains(m, &y)? {
            out.push((x, y));
        }
    }
    Ok(out)
}

/// Largest `|grad f(x) - L_{yx} grad f(y)| / d(x, y)` over seeded pairs in the region.
pub fn grad_lip_estimate<T: Real, F: Field<T>>(f: &F, region: &Region<T>, cfg: &DiffConfig) -> Result<T> {
    let m = f.manifold();
    let pairs = sample_pairs(m, region, cfg.n_pairs.max(1), cfg.seed)?;
    let quotients: Vec<Result<T>> = pairs
        .par_iter()
        .map(|(x, y)| {
            let gx = num_gradient(f, x, cfg)?;
            let gy = num_gradient(f, y, cfg)?;
            let back = m.parallel_transport(y, x, &gy)?;
            Ok(m.sub(&gx, &back)?.norm() / m.dist(x, y)?)
        })
        .collect();
    let mut best = T::zero();
    for q in quotients {
        best = best.max(q?);
    }
    Ok(best)
}

/// Largest `|f(x) - f(y)| / d(x, y)` over seeded pairs in the region.
pub fn lipschitz_estimate<T: Real, F: Field<T>>(f: &F, region: &Region<T>, cfg: &DiffConfig) -> Result<T> {
    let m = f.manifold();
    let pairs = sample_pairs(m, region, cfg.n_pairs.max(1), cfg.seed)?;
    let quotients: Vec<Result<T>> = pairs
        .par_iter()
        .map(|(x, y)| Ok((f.value(x)? - f.value(y)?).abs() / m.dist(x, y)?))
        .collect();
    let mut best = T::zero();
    for q in quotients {
        best = best.max(q?);
    }
    Ok(best)
}
