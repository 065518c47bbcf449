//! Model spaces: Euclidean, sphere, hyperboloid, conformal half-planes and products.

mod space_form;

pub use space_form::{SpaceForm, CUT_GUARD};

use smallvec::SmallVec;

use crate::error::{domain, Error, Result};
use crate::numeric::{self, ConformalMetric};
use crate::scalar::Real;

pub type Coords<T> = SmallVec<[T; 6]>;

/// A point in ambient (sphere, hyperboloid), Cartesian (Euclidean) or half-plane
/// coordinates. Product points concatenate the factor coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Point<T> {
    pub coords: Coords<T>,
}

impl<T: Real> Point<T> {
    pub fn new(coords: &[T]) -> Self {
        Self { coords: coords.iter().copied().collect() }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(|c| c.f64()).collect()
    }
}

/// Tangent vector with its base point and cached Riemannian norm.
#[derive(Clone, Debug, PartialEq)]
pub struct Tangent<T> {
    pub base: Point<T>,
    pub comps: Coords<T>,
    norm: T,
}

impl<T: Real> Tangent<T> {
    pub fn norm(&self) -> T {
        self.norm
    }

    pub(crate) fn from_parts(base: Point<T>, comps: Coords<T>, norm: T) -> Self {
        Self { base, comps, norm }
    }

    pub fn scaled(&self, s: T) -> Self {
        Self {
            base: self.base.clone(),
            comps: self.comps.iter().map(|&c| c * s).collect(),
            norm: self.norm * s.abs(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Euclidean,
    Sphere,
    Hyperbolic,
    WarpedHalfPlane,
    PoincareHalfPlane,
    Product,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Manifold<T> {
    Euclidean(usize),
    SpaceForm(SpaceForm<T>),
    Conformal(ConformalMetric<T>),
    Product(Box<Manifold<T>>, Box<Manifold<T>>),
}

impl<T: Real> Manifold<T> {
    pub fn euclidean(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(domain("dimension must be positive"));
        }
        Ok(Self::Euclidean(n))
    }

    pub fn sphere(n: usize, k: T) -> Result<Self> {
        if !(k > T::zero()) {
            return Err(domain("sphere curvature must be positive"));
        }
        SpaceForm::new(n, k).map(Self::SpaceForm)
    }

    /// Hyperbolic space of constant curvature `k < 0`, hyperboloid model.
    pub fn hyperbolic(n: usize, k: T) -> Result<Self> {
        if !(k < T::zero()) {
            return Err(domain("hyperbolic curvature must be negative"));
        }
        SpaceForm::new(n, k).map(Self::SpaceForm)
    }

    pub fn warped() -> Self {
        Self::Conformal(ConformalMetric::warped())
    }

    pub fn conformal(metric: ConformalMetric<T>) -> Self {
        Self::Conformal(metric)
    }

    pub fn product(a: Self, b: Self) -> Self {
        Self::Product(Box::new(a), Box::new(b))
    }

    pub fn kind(&self) -> Kind {
        match self {
            Self::Euclidean(_) => Kind::Euclidean,
            Self::SpaceForm(s) if s.is_sphere() => Kind::Sphere,
            Self::SpaceForm(_) => Kind::Hyperbolic,
            Self::Conformal(m) if m.is_warped() => Kind::WarpedHalfPlane,
            Self::Conformal(_) => Kind::PoincareHalfPlane,
            Self::Product(..) => Kind::Product,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::Euclidean(n) => format!("euclidean{n}"),
            Self::SpaceForm(s) if s.is_sphere() => format!("sphere{}(K={})", s.n, s.k),
            Self::SpaceForm(s) => format!("hyperbolic{}(K={})", s.n, s.k),
            Self::Conformal(m) if m.is_warped() => {
                format!("warped(x2 in [{}, {}])", m.x2_min, m.x2_max)
            }
            Self::Conformal(m) => format!("halfplane(k={}, x2 in [{}, {}])", m.power, m.x2_min, m.x2_max),
            Self::Product(a, b) => format!("{}x{}", a.name(), b.name()),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Euclidean(n) => *n,
            Self::SpaceForm(s) => s.n,
            Self::Conformal(_) => 2,
            Self::Product(a, b) => a.dim() + b.dim(),
        }
    }

    /// Number of stored coordinates per point.
    pub fn ambient_dim(&self) -> usize {
        match self {
            Self::Euclidean(n) => *n,
            Self::SpaceForm(s) => s.n + 1,
            Self::Conformal(_) => 2,
            Self::Product(a, b) => a.ambient_dim() + b.ambient_dim(),
        }
    }

    /// Constant sectional curvature, when there is one.
    pub fn curvature(&self) -> Option<T> {
        match self {
            Self::Euclidean(_) => Some(T::zero()),
            Self::SpaceForm(s) => Some(s.k),
            _ => None,
        }
    }

    /// `K0`: supremum of `|K|` over the working region.
    pub fn curvature_bound(&self) -> T {
        match self {
            Self::Euclidean(_) => T::zero(),
            Self::SpaceForm(s) => s.k.abs(),
            Self::Conformal(m) => m.curvature_bound(),
            Self::Product(a, b) => a.curvature_bound().max(b.curvature_bound()),
        }
    }

    pub fn injectivity_radius(&self) -> T {
        match self {
            Self::SpaceForm(s) => s.injectivity_radius(),
            Self::Product(a, b) => a.injectivity_radius().min(b.injectivity_radius()),
            _ => T::infinity(),
        }
    }

    pub fn convexity_radius(&self) -> T {
        match self {
            Self::SpaceForm(s) => s.convexity_radius(),
            Self::Product(a, b) => a.convexity_radius().min(b.convexity_radius()),
            _ => T::infinity(),
        }
    }

    /// Largest tangent norm accepted by `exp`: `i(M) - CUT_GUARD`.
    pub fn cut_limit(&self) -> T {
        self.injectivity_radius() - T::lit(CUT_GUARD)
    }

    pub fn origin(&self) -> Point<T> {
        match self {
            Self::Euclidean(n) => Point { coords: smallvec::smallvec![T::zero(); *n] },
            Self::SpaceForm(s) => Point { coords: s.origin() },
            Self::Conformal(_) => Point::new(&[T::zero(), T::one()]),
            Self::Product(a, b) => Self::join(&a.origin(), &b.origin()),
        }
    }

    pub fn point(&self, coords: &[T]) -> Result<Point<T>> {
        let p = Point::new(coords);
        self.validate(&p)?;
        Ok(p)
    }

    pub fn validate(&self, p: &Point<T>) -> Result<()> {
        if p.coords.len() != self.ambient_dim() {
            return Err(domain(format!(
                "{} expects {} coordinates, got {}",
                self.name(),
                self.ambient_dim(),
                p.coords.len()
            )));
        }
        match self {
            Self::Euclidean(_) => {
                if p.coords.iter().all(|c| c.is_finite()) {
                    Ok(())
                } else {
                    Err(domain("non-finite coordinate"))
                }
            }
            Self::SpaceForm(s) => s.validate(&p.coords),
            Self::Conformal(m) => {
                let x2 = p.coords[1];
                if !(x2 > T::zero()) || !p.coords[0].is_finite() {
                    return Err(domain("half-plane points need x2 > 0"));
                }
                m.check(x2)
            }
            Self::Product(a, b) => {
                let (p1, p2) = self.split(p);
                a.validate(&p1)?;
                b.validate(&p2)
            }
        }
    }

    /// Builds a product point from factor points.
    pub fn join(p1: &Point<T>, p2: &Point<T>) -> Point<T> {
        let mut c = p1.coords.clone();
        c.extend_from_slice(&p2.coords);
        Point { coords: c }
    }

    /// Splits a product point into its factors.
    pub fn split(&self, p: &Point<T>) -> (Point<T>, Point<T>) {
        match self {
            Self::Product(a, _) => {
                let k = a.ambient_dim();
                (Point::new(&p.coords[..k]), Point::new(&p.coords[k..]))
            }
            _ => panic!("split called on a non-product manifold"),
        }
    }

    pub fn split_tangent(&self, v: &Tangent<T>) -> (Tangent<T>, Tangent<T>) {
        match self {
            Self::Product(a, b) => {
                let (x1, x2) = self.split(&v.base);
                let k = a.ambient_dim();
                (a.tangent(&x1, &v.comps[..k]), b.tangent(&x2, &v.comps[k..]))
            }
            _ => panic!("split_tangent called on a non-product manifold"),
        }
    }

    pub fn join_tangent(&self, v1: &Tangent<T>, v2: &Tangent<T>) -> Tangent<T> {
        let base = Self::join(&v1.base, &v2.base);
        let mut comps = v1.comps.clone();
        comps.extend_from_slice(&v2.comps);
        let norm = (v1.norm * v1.norm + v2.norm * v2.norm).sqrt();
        Tangent { base, comps, norm }
    }

    /// Riemannian inner product of two component vectors at `x`.
    pub fn inner(&self, x: &Point<T>, a: &[T], b: &[T]) -> T {
        match self {
            Self::Euclidean(_) => a.iter().zip(b).fold(T::zero(), |s, (&u, &v)| s + u * v),
            Self::SpaceForm(s) => s.form(a, b),
            Self::Conformal(m) => m.inner(x.coords[1], a, b),
            Self::Product(f, g) => {
                let (x1, x2) = self.split(x);
                let k = f.ambient_dim();
                f.inner(&x1, &a[..k], &b[..k]) + g.inner(&x2, &a[k..], &b[k..])
            }
        }
    }

    /// Wraps components as a tangent at `x` without checking tangency.
    pub fn tangent(&self, x: &Point<T>, comps: &[T]) -> Tangent<T> {
        let norm = self.inner(x, comps, comps).max(T::zero()).sqrt();
        Tangent { base: x.clone(), comps: comps.iter().copied().collect(), norm }
    }

    /// Projects an ambient vector onto the tangent space at `x`.
    pub fn project(&self, x: &Point<T>, ambient: &[T]) -> Tangent<T> {
        match self {
            Self::SpaceForm(s) => {
                let c = s.project(&x.coords, ambient);
                self.tangent(x, &c)
            }
            Self::Product(a, b) => {
                let (x1, x2) = self.split(x);
                let k = a.ambient_dim();
                let t1 = a.project(&x1, &ambient[..k]);
                let t2 = b.project(&x2, &ambient[k..]);
                self.join_tangent(&t1, &t2)
            }
            _ => self.tangent(x, ambient),
        }
    }

    /// Checked tangent construction.
    pub fn try_tangent(&self, x: &Point<T>, comps: &[T]) -> Result<Tangent<T>> {
        self.validate(x)?;
        if comps.len() != self.ambient_dim() {
            return Err(domain("tangent has the wrong number of components"));
        }
        self.check_tangent_comps(x, comps)?;
        Ok(self.tangent(x, comps))
    }

    fn check_tangent_comps(&self, x: &Point<T>, comps: &[T]) -> Result<()> {
        match self {
            Self::SpaceForm(s) => s.check_tangent(&x.coords, comps),
            Self::Product(a, b) => {
                let (x1, x2) = self.split(x);
                let k = a.ambient_dim();
                a.check_tangent_comps(&x1, &comps[..k])?;
                b.check_tangent_comps(&x2, &comps[k..])
            }
            _ => Ok(()),
        }
    }

    pub fn zero(&self, x: &Point<T>) -> Tangent<T> {
        Tangent { base: x.clone(), comps: smallvec::smallvec![T::zero(); self.ambient_dim()], norm: T::zero() }
    }

    fn check_base(&self, x: &Point<T>, v: &Tangent<T>) -> Result<()> {
        if v.base != *x {
            return Err(domain("tangent is not based at the given point"));
        }
        Ok(())
    }

    pub fn exp(&self, x: &Point<T>, v: &Tangent<T>) -> Result<Point<T>> {
        self.check_base(x, v)?;
        self.validate(x)?;
        self.exp_unchecked(x, v)
    }

    fn exp_unchecked(&self, x: &Point<T>, v: &Tangent<T>) -> Result<Point<T>> {
        match self {
            Self::Euclidean(_) => Ok(Point {
                coords: x.coords.iter().zip(&v.comps).map(|(&a, &b)| a + b).collect(),
            }),
            Self::SpaceForm(s) => Ok(Point { coords: s.exp(&x.coords, &v.comps, v.norm)? }),
            Self::Conformal(m) => numeric::geodesic_shoot(m, x, v, T::one()).map(|(p, _)| p),
            Self::Product(a, b) => {
                let (v1, v2) = self.split_tangent(v);
                Ok(Self::join(&a.exp_unchecked(&v1.base, &v1)?, &b.exp_unchecked(&v2.base, &v2)?))
            }
        }
    }

    pub fn log(&self, x: &Point<T>, y: &Point<T>) -> Result<Tangent<T>> {
        self.validate(x)?;
        self.validate(y)?;
        self.log_unchecked(x, y)
    }

    fn log_unchecked(&self, x: &Point<T>, y: &Point<T>) -> Result<Tangent<T>> {
        match self {
            Self::Euclidean(_) => {
                let c: Coords<T> = x.coords.iter().zip(&y.coords).map(|(&a, &b)| b - a).collect();
                Ok(self.tangent(x, &c))
            }
            Self::SpaceForm(s) => {
                let c = s.log(&x.coords, &y.coords)?;
                Ok(self.tangent(x, &c))
            }
            Self::Conformal(m) => numeric::log_numeric(m, x, y),
            Self::Product(a, b) => {
                let (x1, x2) = self.split(x);
                let (y1, y2) = self.split(y);
                Ok(self.join_tangent(&a.log_unchecked(&x1, &y1)?, &b.log_unchecked(&x2, &y2)?))
            }
        }
    }

    pub fn dist(&self, x: &Point<T>, y: &Point<T>) -> Result<T> {
        match self {
            Self::Euclidean(_) => Ok(x
                .coords
                .iter()
                .zip(&y.coords)
                .fold(T::zero(), |s, (&a, &b)| s + (a - b) * (a - b))
                .sqrt()),
            Self::SpaceForm(s) => Ok(s.dist(&x.coords, &y.coords)),
            Self::Conformal(_) => {
                if x == y {
                    return Ok(T::zero());
                }
                self.log(x, y).map(|v| v.norm)
            }
            Self::Product(a, b) => {
                let (x1, x2) = self.split(x);
                let (y1, y2) = self.split(y);
                let d1 = a.dist(&x1, &y1)?;
                let d2 = b.dist(&x2, &y2)?;
                Ok((d1 * d1 + d2 * d2).sqrt())
            }
        }
    }

    /// Parallel transport of `h` (based at `x`) along the minimizing geodesic to `y`.
    pub fn parallel_transport(&self, x: &Point<T>, y: &Point<T>, h: &Tangent<T>) -> Result<Tangent<T>> {
        self.check_base(x, h)?;
        match self {
            Self::Euclidean(_) => Ok(Tangent { base: y.clone(), comps: h.comps.clone(), norm: h.norm }),
            Self::SpaceForm(s) => {
                let c = s.transport(&x.coords, &y.coords, &h.comps)?;
                Ok(self.tangent(y, &c))
            }
            Self::Conformal(m) => numeric::transport_numeric(m, x, y, h),
            Self::Product(a, b) => {
                let (x1, x2) = self.split(x);
                let (y1, y2) = self.split(y);
                let (h1, h2) = self.split_tangent(h);
                Ok(self.join_tangent(&a.parallel_transport(&x1, &y1, &h1)?, &b.parallel_transport(&x2, &y2, &h2)?))
            }
        }
    }

    /// `d(exp_x)_v (h)`, based at `exp_x(v)`.
    pub fn dexp(&self, x: &Point<T>, v: &Tangent<T>, h: &Tangent<T>) -> Result<Tangent<T>> {
        self.check_base(x, v)?;
        self.check_base(x, h)?;
        match self {
            Self::Euclidean(_) => {
                let y = self.exp(x, v)?;
                Ok(Tangent { base: y, comps: h.comps.clone(), norm: h.norm })
            }
            Self::SpaceForm(s) => {
                let (y, c) = s.dexp(&x.coords, &v.comps, v.norm, &h.comps)?;
                let y = Point { coords: y };
                Ok(self.tangent(&y, &c))
            }
            Self::Conformal(m) => numeric::dexp_numeric(m, x, v, h),
            Self::Product(a, b) => {
                let (v1, v2) = self.split_tangent(v);
                let (h1, h2) = self.split_tangent(h);
                Ok(self.join_tangent(&a.dexp(&v1.base, &v1, &h1)?, &b.dexp(&v2.base, &v2, &h2)?))
            }
        }
    }

    /// Deterministic orthonormal basis of the tangent space at `x`.
    pub fn orthonormal_frame(&self, x: &Point<T>) -> Vec<Tangent<T>> {
        match self {
            Self::Euclidean(n) => (0..*n)
                .map(|i| {
                    let mut c: Coords<T> = smallvec::smallvec![T::zero(); *n];
                    c[i] = T::one();
                    Tangent { base: x.clone(), comps: c, norm: T::one() }
                })
                .collect(),
            Self::SpaceForm(s) => s
                .frame(&x.coords)
                .into_iter()
                .map(|c| Tangent { base: x.clone(), comps: c, norm: T::one() })
                .collect(),
            Self::Conformal(m) => {
                let s = T::one() / m.factor(x.coords[1]);
                vec![
                    Tangent { base: x.clone(), comps: smallvec::smallvec![s, T::zero()], norm: T::one() },
                    Tangent { base: x.clone(), comps: smallvec::smallvec![T::zero(), s], norm: T::one() },
                ]
            }
            Self::Product(a, b) => {
                let (x1, x2) = self.split(x);
                let z1 = a.zero(&x1);
                let z2 = b.zero(&x2);
                let mut out: Vec<Tangent<T>> =
                    a.orthonormal_frame(&x1).iter().map(|e| self.join_tangent(e, &z2)).collect();
                out.extend(b.orthonormal_frame(&x2).iter().map(|e| self.join_tangent(&z1, e)));
                out
            }
        }
    }

    /// `sum_i u_i e_i` for a frame `e` at `x`.
    pub fn combine(&self, x: &Point<T>, frame: &[Tangent<T>], u: &[T]) -> Tangent<T> {
        let mut c: Coords<T> = smallvec::smallvec![T::zero(); self.ambient_dim()];
        for (e, &ui) in frame.iter().zip(u) {
            for (ci, &ei) in c.iter_mut().zip(&e.comps) {
                *ci = *ci + ui * ei;
            }
        }
        // Orthonormal frame: the chart norm is the Riemannian norm.
        let norm = u.iter().fold(T::zero(), |s, &a| s + a * a).sqrt();
        Tangent { base: x.clone(), comps: c, norm }
    }

    /// Components of `v` in an orthonormal frame at its base.
    pub fn frame_coords(&self, frame: &[Tangent<T>], v: &Tangent<T>) -> Vec<T> {
        frame.iter().map(|e| self.inner(&v.base, &e.comps, &v.comps)).collect()
    }

    /// Point at parameter `t` along `s -> exp_x(s v)`.
    pub fn geodesic(&self, x: &Point<T>, v: &Tangent<T>, t: T) -> Result<Point<T>> {
        self.exp(x, &v.scaled(t))
    }

    pub fn midpoint(&self, p: &Point<T>, q: &Point<T>) -> Result<Point<T>> {
        let v = self.log(p, q)?;
        self.exp(p, &v.scaled(T::lit(0.5)))
    }

    /// Difference of two tangents at the same base, as a tangent.
    pub fn sub(&self, a: &Tangent<T>, b: &Tangent<T>) -> Result<Tangent<T>> {
        if a.base != b.base {
            return Err(Error::Domain("tangents live at different points".into()));
        }
        let c: Coords<T> = a.comps.iter().zip(&b.comps).map(|(&u, &v)| u - v).collect();
        Ok(self.tangent(&a.base, &c))
    }
}
