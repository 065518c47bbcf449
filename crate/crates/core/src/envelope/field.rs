use crate::error::Result;
use crate::manifold::{Manifold, Point};
use crate::scalar::Real;

/// Quadratic envelope `(c/2) (1 + d(., center)^2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Quadratic<T> {
    pub c: T,
    pub center: Point<T>,
}

/// What is known about a field's size and smoothness.
///
/// `minorant` means `f >= -(c/2)(1 + d(., x0)^2)`; `majorant` means
/// `f <= (c/2)(1 + d(., x0)^2)`. The majorant is the minorant of `-f`, which is
/// what localizes a sup-convolution.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Regularity<T> {
    pub bound: Option<T>,
    pub lipschitz: Option<T>,
    pub minorant: Option<Quadratic<T>>,
    pub majorant: Option<Quadratic<T>>,
}

impl<T: Real> Regularity<T> {
    pub fn negated(&self) -> Self {
        Self {
            bound: self.bound,
            lipschitz: self.lipschitz,
            minorant: self.majorant.clone(),
            majorant: self.minorant.clone(),
        }
    }
}

/// A real-valued function on a manifold.
pub trait Field<T: Real>: Sync {
    fn manifold(&self) -> &Manifold<T>;

    fn value(&self, x: &Point<T>) -> Result<T>;

    fn regularity(&self) -> Regularity<T> {
        Regularity::default()
    }

    fn label(&self) -> String {
        "field".into()
    }
}

impl<T: Real, F: Field<T> + ?Sized> Field<T> for &F {
    fn manifold(&self) -> &Manifold<T> {
        (**self).manifold()
    }
    fn value(&self, x: &Point<T>) -> Result<T> {
        (**self).value(x)
    }
    fn regularity(&self) -> Regularity<T> {
        (**self).regularity()
    }
    fn label(&self) -> String {
        (**self).label()
    }
}

impl<T: Real, F: Field<T> + ?Sized + Send> Field<T> for Box<F> {
    fn manifold(&self) -> &Manifold<T> {
        (**self).manifold()
    }
    fn value(&self, x: &Point<T>) -> Result<T> {
        (**self).value(x)
    }
    fn regularity(&self) -> Regularity<T> {
        (**self).regularity()
    }
    fn label(&self) -> String {
        (**self).label()
    }
}

/// `-f`.
#[derive(Clone, Debug)]
pub struct Negated<F>(pub F);

impl<T: Real, F: Field<T>> Field<T> for Negated<F> {
    fn manifold(&self) -> &Manifold<T> {
        self.0.manifold()
    }
    fn value(&self, x: &Point<T>) -> Result<T> {
        self.0.value(x).map(|v| -v)
    }
    fn regularity(&self) -> Regularity<T> {
        self.0.regularity().negated()
    }
    fn label(&self) -> String {
        format!("-({})", self.0.label())
    }
}

/// Adapts a closure into a [`Field`] (no metadata unless supplied).
pub struct FnField<'m, T, G> {
    pub manifold: &'m Manifold<T>,
    pub f: G,
    pub regularity: Regularity<T>,
}

impl<'m, T: Real, G> FnField<'m, T, G>
where
    G: Fn(&Point<T>) -> Result<T> + Sync,
{
    pub fn new(manifold: &'m Manifold<T>, f: G) -> Self {
        Self { manifold, f, regularity: Regularity::default() }
    }
}

impl<T: Real, G> Field<T> for FnField<'_, T, G>
where
    G: Fn(&Point<T>) -> Result<T> + Sync,
{
    fn manifold(&self) -> &Manifold<T> {
        self.manifold
    }
    fn value(&self, x: &Point<T>) -> Result<T> {
        (self.f)(x)
    }
    fn regularity(&self) -> Regularity<T> {
        self.regularity.clone()
    }
}

/// Scalar maps applied to a subexpression.
#[derive(Clone, Debug, PartialEq)]
pub enum ScalarMap<T> {
    Square,
    /// `s -> exp(1 - 1/(1 - (s/r)^2))` for `s < r`, else 0.
    Bump { radius: T },
}

impl<T: Real> ScalarMap<T> {
    pub fn apply(&self, s: T) -> T {
        match self {
            Self::Square => s * s,
            Self::Bump { radius } => bump_profile(s / *radius),
        }
    }
}

pub(crate) fn bump_profile<T: Real>(s: T) -> T {
    let s = s.abs();
    if s >= T::one() {
        T::zero()
    } else {
        (T::one() - T::one() / (T::one() - s * s)).exp()
    }
}

/// Closed-form expression over distances, constants, minima, affine sums and scalar maps.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr<T> {
    Const(T),
    Dist(Point<T>),
    Map(ScalarMap<T>, Box<Expr<T>>),
    Min(Vec<Expr<T>>),
    Affine(Vec<(T, Expr<T>)>, T),
}

impl<T: Real> Expr<T> {
    pub fn eval(&self, m: &Manifold<T>, x: &Point<T>) -> Result<T> {
        Ok(match self {
            Self::Const(c) => *c,
            Self::Dist(p) => m.dist(x, p)?,
            Self::Map(f, e) => f.apply(e.eval(m, x)?),
            Self::Min(es) => {
                let mut best = T::infinity();
                for e in es {
                    best = best.min(e.eval(m, x)?);
                }
                best
            }
            Self::Affine(terms, b) => {
                let mut s = *b;
                for (a, e) in terms {
                    s = s + *a * e.eval(m, x)?;
                }
                s
            }
        })
    }
}

/// A closed-form field with metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField<T> {
    pub name: String,
    pub manifold: Manifold<T>,
    pub expr: Expr<T>,
    pub regularity: Regularity<T>,
    /// Known infimum and one point attaining it, when available.
    pub infimum: Option<(T, Point<T>)>,
}

impl<T: Real> Field<T> for ScalarField<T> {
    fn manifold(&self) -> &Manifold<T> {
        &self.manifold
    }
    fn value(&self, x: &Point<T>) -> Result<T> {
        self.expr.eval(&self.manifold, x)
    }
    fn regularity(&self) -> Regularity<T> {
        self.regularity.clone()
    }
    fn label(&self) -> String {
        self.name.clone()
    }
}
