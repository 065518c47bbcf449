use crate::error::{Error, Result};
use crate::manifold::{Manifold, Point};
use crate::scalar::Real;

use super::field::{Field, Negated, Quadratic, Regularity};
use super::memo::Memo;
use super::params::{EnvelopeParams, LocalizationMode};
use super::solver::{minimize_over_ball, SolverConfig};

/// Radius of a ball around `x` guaranteed to contain the minimizers defining `f_lambda(x)`.
///
/// Bounded fields: `2 sqrt(N lambda)`. Lipschitz fields: `2 lambda Lip`.
/// Quadratically minorized fields: the largest `rho` with
/// `rho^2 / (2 lambda) - (c/2)(1 + (D + rho)^2) <= f(x)`, `D = d(x, x0)`
/// (the competitor `y = x` against the minorant and the triangle inequality).
pub fn localization_radius<T: Real, F: Field<T>>(f: &F, x: &Point<T>, lambda: T, mode: LocalizationMode) -> Result<T> {
    let reg = f.regularity();
    let two = T::lit(2.0);
    let bounded = reg.bound.map(|n| two * (n * lambda).sqrt());
    let lipschitz = reg.lipschitz.map(|l| two * lambda * l);
    let quadratic = |q: &Quadratic<T>| -> Result<T> {
        if !(two * lambda * q.c < T::one()) {
            return Err(Error::LambdaTooLarge { lambda: lambda.f64(), limit: (T::one() / (two * q.c)).f64() });
        }
        let fx = f.value(x)?;
        let d = f.manifold().dist(x, &q.center)?;
        let half = T::lit(0.5);
        let a = half * (T::one() / lambda - q.c);
        let b = q.c * d;
        let c0 = (half * q.c * (T::one() + d * d) + fx).max(T::zero());
        Ok((b + (b * b + T::lit(4.0) * a * c0).sqrt()) / (two * a))
    };
    let missing = |what: &str| Error::MissingMetadata(format!("{} has no {what}", f.label()));
    match mode {
        LocalizationMode::Bounded => bounded.ok_or_else(|| missing("bound")),
        LocalizationMode::Lipschitz => lipschitz.ok_or_else(|| missing("Lipschitz constant")),
        LocalizationMode::Quadratic => quadratic(reg.minorant.as_ref().ok_or_else(|| missing("quadratic minorant"))?),
        LocalizationMode::Auto => {
            let cheap = match (bounded, lipschitz) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            };
            match (&reg.minorant, cheap) {
                (None, None) => Err(missing("localization metadata")),
                (None, Some(r)) => Ok(r),
                (Some(q), None) => quadratic(q),
                // A quadratic ball that is unavailable at this lambda does not block the others.
                (Some(q), Some(r)) => Ok(quadratic(q).map_or(r, |s| s.min(r))),
            }
        }
    }
}

/// Result of one envelope evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct Envelope<T> {
    pub value: T,
    /// Minimizer (inf-convolution) or maximizer (sup-convolution).
    pub point: Point<T>,
    pub radius: T,
}

fn chart_ball_limit<T: Real>(m: &Manifold<T>) -> T {
    // exp_x maps the open ball of radius i(M) onto all of a sphere, so shrinking the
    // localization ball to just inside the cut guard loses no competitor.
    m.cut_limit() - T::lit(crate::manifold::CUT_GUARD)
}

/// `f_lambda(x) = inf_y f(y) + d(x, y)^2 / (2 lambda)`, minimized in the exponential chart at `x`.
pub fn inf_convolve<T: Real, F: Field<T>>(
    f: &F,
    lambda: T,
    x: &Point<T>,
    mode: LocalizationMode,
    cfg: &SolverConfig,
) -> Result<Envelope<T>> {
    if !(lambda > T::zero()) {
        return Err(Error::Domain("lambda must be positive".into()));
    }
    let m = f.manifold();
    m.validate(x)?;
    let radius = localization_radius(f, x, lambda, mode)?.min(chart_ball_limit(m));
    let frame = m.orthonormal_frame(x);
    let inv = T::one() / (T::lit(2.0) * lambda);
    let objective = |u: &[T]| -> Result<T> {
        let v = m.combine(x, &frame, u);
        let y = m.exp(x, &v)?;
        Ok(f.value(&y)? + v.norm() * v.norm() * inv)
    };
    let best = minimize_over_ball(objective, m.dim(), radius, cfg)?;
    let point = m.exp(x, &m.combine(x, &frame, &best.u))?;
    Ok(Envelope { value: best.value, point, radius })
}

/// `g^mu(x) = sup_y g(y) - d(x, y)^2 / (2 mu)`, computed as `-(-g)_mu(x)`.
pub fn sup_convolve<T: Real, F: Field<T>>(
    g: &F,
    mu: T,
    x: &Point<T>,
    mode: LocalizationMode,
    cfg: &SolverConfig,
) -> Result<Envelope<T>> {
    let e = inf_convolve(&Negated(g), mu, x, mode, cfg)?;
    Ok(Envelope { value: -e.value, ..e })
}

/// Metadata inherited by `f_lambda` from `f`.
///
/// Bounds and Lipschitz constants carry over; a minorant with constant `c` gives
/// one with `2c` (valid for `lambda <= 1/(2c)`); a majorant improves to
/// `max(2 f(x0), 1/lambda)` by testing `y = x0` in the infimum.
fn envelope_regularity<T: Real, F: Field<T>>(f: &F, lambda: T) -> Regularity<T> {
    let reg = f.regularity();
    let two = T::lit(2.0);
    let minorant = reg
        .minorant
        .as_ref()
        .filter(|q| two * lambda * q.c <= T::one())
        .map(|q| Quadratic { c: two * q.c, center: q.center.clone() });
    let majorant = reg.majorant.as_ref().map(|q| {
        let via_center = f
            .value(&q.center)
            .map(|v| (two * v).max(T::one() / lambda))
            .unwrap_or(T::infinity());
        Quadratic { c: q.c.min(via_center), center: q.center.clone() }
    });
    Regularity { bound: reg.bound, lipschitz: reg.lipschitz, minorant, majorant }
}

/// The inf-convolution `f_lambda` as a field.
pub struct InfConvolution<F, T> {
    pub base: F,
    pub lambda: T,
    pub mode: LocalizationMode,
    pub cfg: SolverConfig,
    regularity: Regularity<T>,
}

impl<F: Field<T>, T: Real> InfConvolution<F, T> {
    pub fn new(base: F, lambda: T, mode: LocalizationMode, cfg: SolverConfig) -> Self {
        let regularity = envelope_regularity(&base, lambda);
        Self { base, lambda, mode, cfg, regularity }
    }

    pub fn solve(&self, x: &Point<T>) -> Result<Envelope<T>> {
        inf_convolve(&self.base, self.lambda, x, self.mode, &self.cfg)
    }
}

impl<F: Field<T>, T: Real> Field<T> for InfConvolution<F, T> {
    fn manifold(&self) -> &Manifold<T> {
        self.base.manifold()
    }
    fn value(&self, x: &Point<T>) -> Result<T> {
        self.solve(x).map(|e| e.value)
    }
    fn regularity(&self) -> Regularity<T> {
        self.regularity.clone()
    }
    fn label(&self) -> String {
        format!("({})_{}", self.base.label(), self.lambda)
    }
}

/// The sup-convolution `g^mu` as a field.
pub struct SupConvolution<F, T> {
    pub base: F,
    pub mu: T,
    pub mode: LocalizationMode,
    pub cfg: SolverConfig,
    regularity: Regularity<T>,
}

impl<F: Field<T>, T: Real> SupConvolution<F, T> {
    pub fn new(base: F, mu: T, mode: LocalizationMode, cfg: SolverConfig) -> Self {
        let regularity = envelope_regularity(&Negated(&base), mu).negated();
        Self { base, mu, mode, cfg, regularity }
    }

    pub fn solve(&self, x: &Point<T>) -> Result<Envelope<T>> {
        sup_convolve(&self.base, self.mu, x, self.mode, &self.cfg)
    }
}

impl<F: Field<T>, T: Real> Field<T> for SupConvolution<F, T> {
    fn manifold(&self) -> &Manifold<T> {
        self.base.manifold()
    }
    fn value(&self, x: &Point<T>) -> Result<T> {
        self.solve(x).map(|e| e.value)
    }
    fn regularity(&self) -> Regularity<T> {
        self.regularity.clone()
    }
    fn label(&self) -> String {
        format!("({})^{}", self.base.label(), self.mu)
    }
}

/// `(f_lambda)^mu`, with the inner envelope memoized so repeated outer queries share work.
pub type LasryLions<F, T> = SupConvolution<Memo<InfConvolution<F, T>, T>, T>;

pub fn lasry_lions_field<T: Real, F: Field<T> + Send>(
    f: F,
    params: &EnvelopeParams<T>,
    cfg: &SolverConfig,
) -> Result<LasryLions<F, T>> {
    params.check_composition()?;
    let inner = Memo::new(InfConvolution::new(f, params.lambda, params.mode, *cfg));
    Ok(SupConvolution::new(inner, params.mu, params.mode, *cfg))
}

/// `(f_lambda)^mu(x)`.
pub fn lasry_lions<T: Real, F: Field<T> + Send>(
    f: F,
    params: &EnvelopeParams<T>,
    x: &Point<T>,
    cfg: &SolverConfig,
) -> Result<T> {
    lasry_lions_field(f, params, cfg)?.value(x)
}
