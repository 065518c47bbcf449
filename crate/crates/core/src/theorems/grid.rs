use crate::analysis::spread_directions;
use crate::error::Result;
use crate::manifold::{Manifold, Point};
use crate::scalar::Real;

/// Geodesic polar grid on `B(center, radius)`: rings every `spacing`, and along each ring
/// points no more than `spacing` apart (measured along the geodesic circle).
pub fn polar_grid<T: Real>(m: &Manifold<T>, center: &Point<T>, radius: T, spacing: T) -> Result<Vec<Point<T>>> {
    let frame = m.orthonormal_frame(center);
    let (r, h) = (radius.f64(), spacing.f64());
    let mut radii: Vec<f64> = (1..).map(|j| j as f64 * h).take_while(|&s| s < r - 1e-12).collect();
    if r > 0.0 {
        radii.push(r);
    }
    // Circumference growth relative to the flat circle; exact for hyperbolic, an overestimate for the sphere.
    let growth = |s: f64| match m.curvature().map(|k| k.f64()) {
        Some(k) if k < 0.0 => (k.abs().sqrt() * s).sinh() / (k.abs().sqrt() * s),
        _ => 1.0,
    };
    let mut out = vec![center.clone()];
    for s in radii {
        let dirs: Vec<Vec<T>> = if m.dim() == 2 {
            let count = ((2.0 * std::f64::consts::PI * s * growth(s)) / h).ceil().max(3.0) as usize;
            spread_directions(2, count)
        } else {
            let count = ((4.0 * std::f64::consts::PI * (s * growth(s)).powi(2)) / (h * h)).ceil().max(2.0) as usize;
            spread_directions(m.dim(), count)
        };
        for u in dirs {
            let v = m.combine(center, &frame, &u).scaled(T::lit(s));
            out.push(m.exp(center, &v)?);
        }
    }
    Ok(out)
}
