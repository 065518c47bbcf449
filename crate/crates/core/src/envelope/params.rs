use crate::error::{domain, Error, Result};
use crate::scalar::Real;

/// Which localization ball bounds the inner minimization.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LocalizationMode {
    /// Smallest radius among the modes the field's metadata supports.
    #[default]
    Auto,
    Bounded,
    Lipschitz,
    Quadratic,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnvelopeParams<T> {
    pub lambda: T,
    pub mu: T,
    pub q: T,
    pub mode: LocalizationMode,
}

impl<T: Real> EnvelopeParams<T> {
    pub fn new(lambda: T, mu: T, q: T) -> Result<Self> {
        let p = Self { lambda, mu, q, mode: LocalizationMode::Auto };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > T::zero() && self.mu > T::zero()) {
            return Err(domain("lambda and mu must be positive"));
        }
        if !(self.q > T::one()) {
            return Err(domain("q must exceed 1"));
        }
        Ok(())
    }

    /// Largest `mu` the composition allows: `lambda / (2q)`.
    pub fn mu_max(&self) -> T {
        self.lambda / (T::lit(2.0) * self.q)
    }

    /// Enforces `mu <= lambda / (2q)`, up to rounding in the caller's decimal inputs.
    pub fn check_composition(&self) -> Result<()> {
        self.validate()?;
        if self.mu > self.mu_max() * (T::one() + T::lit(1e-12)) {
            return Err(Error::ParamConstraintViolated(format!(
                "mu = {} exceeds lambda/(2q) = {}",
                self.mu,
                self.mu_max()
            )));
        }
        Ok(())
    }
}
