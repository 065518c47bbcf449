use crate::error::Result;
use crate::manifold::Point;
use crate::scalar::Real;

use super::shooting::flow_variation;
use super::ConformalMetric;

pub const CURVATURE_DIRECTIONS: usize = 256;

/// Gauss curvature `-exp(-2 phi) * laplacian(phi) = -power * x2^(2 power - 2)`.
pub fn gauss_curvature<T: Real>(metric: &ConformalMetric<T>, p: &Point<T>) -> Result<T> {
    let x2 = p.coords[1];
    metric.check(x2)?;
    Ok(-metric.ddphi(x2) / metric.metric_coeff(x2))
}

/// Curvature from the circumference deficit of the geodesic circle of radius `r`:
/// `K ~ 3 (2 pi r - C(r)) / (pi r^3)`.
///
/// The circle's length is the integral over directions of the Jacobi field
/// `d gamma_theta(r) / d theta`, sampled at evenly spaced angles (the trapezoid
/// rule is spectrally accurate for the periodic integrand).
pub fn curvature_check<T: Real>(metric: &ConformalMetric<T>, p: &Point<T>, r: T) -> Result<T> {
    let x = [p.coords[0], p.coords[1]];
    metric.check(x[1])?;
    let s = r / metric.factor(x[1]);
    let n = CURVATURE_DIRECTIONS;
    let mut total = T::zero();
    for j in 0..n {
        let th = T::lit(2.0) * T::PI() * T::from_usize_lossy(j) / T::from_usize_lossy(n);
        let (c, sn) = (th.cos(), th.sin());
        let (end, _, jac) = flow_variation(metric, x, [s * c, s * sn], [T::zero(); 2], [-s * sn, s * c])?;
        total = total + metric.norm(end[1], &jac);
    }
    let circ = T::lit(2.0) * T::PI() * total / T::from_usize_lossy(n);
    let two_pi_r = T::lit(2.0) * T::PI() * r;
    Ok(T::lit(3.0) * (two_pi_r - circ) / (T::PI() * r * r * r))
}
