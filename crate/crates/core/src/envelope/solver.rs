//! Deterministic derivative-free minimization over a closed ball in a chart.

use std::cmp::Ordering;

use crate::error::{domain, Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    /// Radii in the polar grid.
    pub n_r: usize,
    /// Directions per angular coordinate.
    pub n_dir: usize,
    pub refine_iters: usize,
    pub shrink: f64,
    pub tol: f64,
    /// Grid candidates refined by coordinate search, taken best first among points
    /// more than two radial spacings apart so that separate basins get a start.
    pub refine_starts: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { n_r: 16, n_dir: 32, refine_iters: 60, shrink: 0.5, tol: 1e-10, refine_starts: 3 }
    }
}

impl SolverConfig {
    /// Coarser grid for nested (sup of inf) evaluations inside large sweeps.
    pub fn light() -> Self {
        Self { n_r: 8, n_dir: 16, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_r == 0 || self.n_dir == 0 || self.refine_iters == 0 || self.refine_starts == 0 {
            return Err(domain("solver counts must be positive"));
        }
        if !(self.tol > 0.0) || !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(domain("solver needs tol > 0 and shrink in (0, 1)"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum<T> {
    pub u: Vec<T>,
    pub value: T,
}

fn norm_sq<T: Real>(u: &[T]) -> T {
    u.iter().fold(T::zero(), |s, &a| s + a * a)
}

/// Total order: value, then chart norm, then lexicographic coordinates.
fn order<T: Real>(a: &Minimum<T>, b: &Minimum<T>) -> Ordering {
    a.value
        .partial_cmp(&b.value)
        .unwrap_or(Ordering::Equal)
        .then_with(|| norm_sq(&a.u).partial_cmp(&norm_sq(&b.u)).unwrap_or(Ordering::Equal))
        .then_with(|| {
            a.u.iter()
                .zip(&b.u)
                .map(|(x, y)| x.partial_cmp(y).unwrap_or(Ordering::Equal))
                .find(|o| *o != Ordering::Equal)
                .unwrap_or(Ordering::Equal)
        })
}

/// Unit directions of the polar grid in dimension `n <= 3`.
fn directions<T: Real>(n: usize, n_dir: usize) -> Result<Vec<Vec<T>>> {
    let tau = T::lit(2.0) * T::PI();
    Ok(match n {
        1 => vec![vec![T::one()], vec![-T::one()]],
        2 => (0..n_dir)
            .map(|j| {
                let a = tau * T::from_usize_lossy(j) / T::from_usize_lossy(n_dir);
                vec![a.cos(), a.sin()]
            })
            .collect(),
        3 => {
            let n_pol = (n_dir / 2).max(1);
            let mut out = vec![vec![T::zero(), T::zero(), T::one()], vec![T::zero(), T::zero(), -T::one()]];
            for k in 0..n_pol {
                let th = T::PI() * (T::from_usize_lossy(k) + T::lit(0.5)) / T::from_usize_lossy(n_pol);
                for j in 0..n_dir {
                    let ph = tau * T::from_usize_lossy(j) / T::from_usize_lossy(n_dir);
                    out.push(vec![th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()]);
                }
            }
            out
        }
        _ => return Err(domain(format!("grid solver supports chart dimension 1..=3, got {n}"))),
    })
}

/// Evaluates the objective, treating excursions from a working region as infeasible.
fn eval<T: Real>(g: &impl Fn(&[T]) -> Result<T>, u: &[T]) -> Result<Option<T>> {
    match g(u) {
        Ok(v) if v.is_nan() => Err(domain("objective returned NaN")),
        Ok(v) => Ok(Some(v)),
        Err(Error::LeftWorkingRegion { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn clamp_to_ball<T: Real>(u: &mut [T], rho: T) {
    let n = norm_sq(u).sqrt();
    if n > rho {
        let s = rho / n;
        for a in u.iter_mut() {
            *a = *a * s;
        }
    }
}

/// One exploratory sweep: each coordinate in turn, keeping any improving step.
fn explore<T: Real>(g: &impl Fn(&[T]) -> Result<T>, from: &Minimum<T>, step: T, rho: T) -> Result<Minimum<T>> {
    let mut cur = from.clone();
    for i in 0..cur.u.len() {
        for s in [T::one(), -T::one()] {
            let mut u = cur.u.clone();
            u[i] = u[i] + s * step;
            clamp_to_ball(&mut u, rho);
            if let Some(v) = eval(g, &u)? {
                if v < cur.value {
                    cur = Minimum { u, value: v };
                    break;
                }
            }
        }
    }
    Ok(cur)
}

/// Hooke-Jeeves pattern search: exploratory sweeps, extrapolated along each
/// successful displacement; the step shrinks when a sweep from the base fails.
fn hooke_jeeves<T: Real>(
    g: &impl Fn(&[T]) -> Result<T>,
    start: Minimum<T>,
    rho: T,
    h0: T,
    min_step: T,
    shrink: T,
    budget: usize,
) -> Result<Minimum<T>> {
    let mut base = start;
    let mut step = h0;
    let mut sweeps = 0;
    while sweeps < budget {
        let next = explore(g, &base, step, rho)?;
        sweeps += 1;
        if !(next.value < base.value) {
            step = step * shrink;
            if step < min_step {
                break;
            }
            continue;
        }
        let mut prev = std::mem::replace(&mut base, next);
        while sweeps < budget {
            let mut u: Vec<T> = base.u.iter().zip(&prev.u).map(|(&a, &b)| a + a - b).collect();
            clamp_to_ball(&mut u, rho);
            let Some(v) = eval(g, &u)? else { break };
            let trial = explore(g, &Minimum { u, value: v }, step, rho)?;
            sweeps += 1;
            if !(trial.value < base.value) {
                break;
            }
            prev = std::mem::replace(&mut base, trial);
        }
    }
    Ok(base)
}

/// Minimizes `g` over the closed ball of radius `rho` in `R^n`.
///
/// Stage one scans a polar grid (center, `n_r` radii, `n_dir` directions per
/// angular coordinate). Stage two runs a Hooke-Jeeves pattern search from the
/// best `refine_starts` mutually separated grid points, projecting trial points back onto the
/// ball so boundary minima are reachable. Points where `g` reports leaving the
/// working region are skipped.
pub fn minimize_over_ball<T: Real>(
    g: impl Fn(&[T]) -> Result<T>,
    n: usize,
    rho: T,
    cfg: &SolverConfig,
) -> Result<Minimum<T>> {
    cfg.validate()?;
    if !(rho >= T::zero()) {
        return Err(domain("ball radius must be nonnegative"));
    }
    let center = vec![T::zero(); n];
    let mut grid: Vec<Minimum<T>> = Vec::new();
    if let Some(v) = eval(&g, &center)? {
        grid.push(Minimum { u: center.clone(), value: v });
    }
    if rho > T::zero() {
        let dirs = directions::<T>(n, cfg.n_dir)?;
        for i in 1..=cfg.n_r {
            let r = rho * T::from_usize_lossy(i) / T::from_usize_lossy(cfg.n_r);
            for d in &dirs {
                let u: Vec<T> = d.iter().map(|&a| a * r).collect();
                if let Some(v) = eval(&g, &u)? {
                    grid.push(Minimum { u, value: v });
                }
            }
        }
    }
    if grid.is_empty() {
        return Err(Error::LeftWorkingRegion { x2: f64::NAN });
    }
    grid.sort_by(order);
    if rho == T::zero() {
        return Ok(grid.swap_remove(0));
    }

    let h0 = rho / T::from_usize_lossy(cfg.n_r);
    let min_step = rho * T::lit(cfg.tol.sqrt() * 1e-2);
    let shrink = T::lit(cfg.shrink);
    let mut best = grid[0].clone();
    let sep = (h0 + h0) * (h0 + h0);
    let mut starts: Vec<&Minimum<T>> = Vec::with_capacity(cfg.refine_starts);
    for g in &grid {
        if starts.len() == cfg.refine_starts {
            break;
        }
        let far = starts.iter().all(|s| {
            let d2 = s.u.iter().zip(&g.u).fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b));
            d2 > sep
        });
        if far {
            starts.push(g);
        }
    }
    for start in starts {
        let cur = hooke_jeeves(&g, start.clone(), rho, h0, min_step, shrink, cfg.refine_iters)?;
        if order(&cur, &best) == Ordering::Less {
            best = cur;
        }
    }
    Ok(best)
}
