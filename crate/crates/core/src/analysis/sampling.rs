use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::manifold::{Manifold, Point, Tangent};
use crate::scalar::Real;

/// Where sample points are drawn: a geodesic ball, or a product of balls on a product manifold.
#[derive(Clone, Debug, PartialEq)]
pub enum Region<T> {
    Ball { center: Point<T>, radius: T },
    Product(Box<Region<T>>, Box<Region<T>>),
}

impl<T: Real> Region<T> {
    pub fn ball(center: &Point<T>, radius: T) -> Self {
        Self::Ball { center: center.clone(), radius }
    }

    pub fn describe(&self) -> String {
        match self {
            Self::Ball { center, radius } => format!("B({:?}, {})", center.to_f64(), radius),
            Self::Product(a, b) => format!("{} x {}", a.describe(), b.describe()),
        }
    }

    pub fn contains(&self, m: &Manifold<T>, p: &Point<T>) -> Result<bool> {
        match self {
            Self::Ball { center, radius } => Ok(m.dist(center, p)? <= *radius),
            Self::Product(a, b) => {
                let (pa, pb) = m.split(p);
                let (ma, mb) = factors(m);
                Ok(a.contains(ma, &pa)? && b.contains(mb, &pb)?)
            }
        }
    }

    /// Draws a point, uniform in the chart ball's volume measure.
    pub fn sample(&self, m: &Manifold<T>, rng: &mut impl Rng) -> Result<Point<T>> {
        match self {
            Self::Ball { center, radius } => {
                let u = unit_direction::<T>(m.dim(), rng);
                let s: f64 = rng.gen::<f64>().powf(1.0 / m.dim() as f64);
                let frame = m.orthonormal_frame(center);
                let v = m.combine(center, &frame, &u).scaled(*radius * T::lit(s));
                m.exp(center, &v)
            }
            Self::Product(a, b) => {
                let (ma, mb) = factors(m);
                let pa = a.sample(ma, rng)?;
                let pb = b.sample(mb, rng)?;
                Ok(Manifold::join(&pa, &pb))
            }
        }
    }
}

fn factors<T: Real>(m: &Manifold<T>) -> (&Manifold<T>, &Manifold<T>) {
    match m {
        Manifold::Product(a, b) => (a, b),
        _ => panic!("product region on a non-product manifold"),
    }
}

/// Uniform direction on the unit sphere of `R^n`.
pub fn unit_direction<T: Real>(n: usize, rng: &mut impl Rng) -> Vec<T> {
    loop {
        let g: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let s = g.iter().map(|a| a * a).sum::<f64>().sqrt();
        if s > 1e-12 {
            return g.into_iter().map(|a| T::lit(a / s)).collect();
        }
    }
}

/// Uniform unit tangent at `x`.
pub fn random_unit_tangent<T: Real>(m: &Manifold<T>, x: &Point<T>, rng: &mut impl Rng) -> Tangent<T> {
    let u = unit_direction::<T>(m.dim(), rng);
    m.combine(x, &m.orthonormal_frame(x), &u)
}

/// Evenly spread unit directions: a circle for `n = 2`, a Fibonacci lattice for `n = 3`.
pub fn spread_directions<T: Real>(n: usize, count: usize) -> Vec<Vec<T>> {
    match n {
        1 => vec![vec![T::one()], vec![-T::one()]],
        2 => (0..count)
            .map(|j| {
                let a = 2.0 * std::f64::consts::PI * j as f64 / count as f64;
                vec![T::lit(a.cos()), T::lit(a.sin())]
            })
            .collect(),
        3 => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|j| {
                    let z = 1.0 - 2.0 * (j as f64 + 0.5) / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let a = golden * j as f64;
                    vec![T::lit(r * a.cos()), T::lit(r * a.sin()), T::lit(z)]
                })
                .collect()
        }
        _ => (0..n)
            .flat_map(|i| {
                [1.0, -1.0].into_iter().map(move |s| {
                    let mut e = vec![T::zero(); n];
                    e[i] = T::lit(s);
                    e
                })
            })
            .collect(),
    }
}
