//! Integrated geometry for conformally flat half-planes `g = x2^(-2k) * delta`.
//!
//! `k = 2` is the warped half-plane with unbounded negative curvature; `k = 1` is the
//! Poincaré half-plane, which has a closed-form twin on the hyperboloid and is used
//! to cross-validate the integrators.

mod curvature;
mod integrator;
mod shooting;

pub use curvature::{curvature_check, gauss_curvature, CURVATURE_DIRECTIONS};
pub use integrator::rk4;
pub use shooting::{dexp_numeric, geodesic_shoot, log_numeric, transport_numeric};

use crate::error::{domain, Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig {
    /// RK4 steps per unit of metric arclength.
    pub steps_per_unit: usize,
    pub newton_max_iter: usize,
    pub newton_tol: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { steps_per_unit: 1000, newton_max_iter: 50, newton_tol: 1e-10 }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.steps_per_unit < 100 {
            return Err(domain("integrator needs at least 100 steps per unit arclength"));
        }
        if !(self.newton_tol > 0.0) || self.newton_max_iter == 0 {
            return Err(domain("Newton tolerance and iteration budget must be positive"));
        }
        Ok(())
    }
}

/// Metric `delta_ij * exp(2 phi)` with `phi = -power * ln(x2)` on the box `x2 in [x2_min, x2_max]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConformalMetric<T> {
    pub power: T,
    pub x2_min: T,
    pub x2_max: T,
    pub integrator: IntegratorConfig,
}

impl<T: Real> ConformalMetric<T> {
    pub fn new(power: T, x2_min: T, x2_max: T, integrator: IntegratorConfig) -> Result<Self> {
        integrator.validate()?;
        if !(power > T::zero()) || !(x2_min > T::zero()) || !(x2_max > x2_min) {
            return Err(domain("need power > 0 and 0 < x2_min < x2_max"));
        }
        Ok(Self { power, x2_min, x2_max, integrator })
    }

    /// `g = delta / x2^4` on the default region `x2 in [0.2, 50]`.
    pub fn warped() -> Self {
        Self::new(T::lit(2.0), T::lit(0.2), T::lit(50.0), IntegratorConfig::default())
            .expect("default warped metric")
    }

    /// Poincaré half-plane (`K = -1`) on `x2 in [0.05, 50]`.
    pub fn poincare() -> Self {
        Self::new(T::one(), T::lit(0.05), T::lit(50.0), IntegratorConfig::default())
            .expect("default Poincaré metric")
    }

    pub fn with_region(mut self, x2_min: T, x2_max: T) -> Result<Self> {
        if !(x2_min > T::zero()) || !(x2_max > x2_min) {
            return Err(domain("need 0 < x2_min < x2_max"));
        }
        self.x2_min = x2_min;
        self.x2_max = x2_max;
        Ok(self)
    }

    pub fn with_integrator(mut self, integrator: IntegratorConfig) -> Result<Self> {
        integrator.validate()?;
        self.integrator = integrator;
        Ok(self)
    }

    pub fn is_warped(&self) -> bool {
        self.power == T::lit(2.0)
    }

    pub fn phi(&self, x2: T) -> T {
        -self.power * x2.ln()
    }

    /// `exp(phi) = x2^(-power)`: converts coordinate lengths to metric lengths.
    pub fn factor(&self, x2: T) -> T {
        x2.powf(-self.power)
    }

    /// Metric coefficient `exp(2 phi)`.
    pub fn metric_coeff(&self, x2: T) -> T {
        let f = self.factor(x2);
        f * f
    }

    /// `d phi / d x2`.
    pub(crate) fn dphi(&self, x2: T) -> T {
        -self.power / x2
    }

    /// `d^2 phi / d x2^2`.
    pub(crate) fn ddphi(&self, x2: T) -> T {
        self.power / (x2 * x2)
    }

    pub fn contains(&self, x2: T) -> bool {
        x2 >= self.x2_min && x2 <= self.x2_max
    }

    pub fn check(&self, x2: T) -> Result<()> {
        if self.contains(x2) {
            Ok(())
        } else {
            Err(Error::LeftWorkingRegion { x2: x2.f64() })
        }
    }

    pub fn norm(&self, x2: T, v: &[T]) -> T {
        (v[0] * v[0] + v[1] * v[1]).sqrt() * self.factor(x2)
    }

    pub fn inner(&self, x2: T, a: &[T], b: &[T]) -> T {
        (a[0] * b[0] + a[1] * b[1]) * self.metric_coeff(x2)
    }

    /// Supremum of `|K|` over the working region.
    pub fn curvature_bound(&self) -> T {
        let e = T::lit(2.0) * self.power - T::lit(2.0);
        let hi = self.power * self.x2_max.powf(e);
        let lo = self.power * self.x2_min.powf(e);
        hi.max(lo)
    }

    /// Geodesic acceleration in coordinates: `-2 (dphi . v) v + |v|^2 dphi`.
    pub(crate) fn accel(&self, x2: T, v: [T; 2]) -> [T; 2] {
        let p = self.dphi(x2);
        let vv = v[0] * v[0] + v[1] * v[1];
        let two = T::lit(2.0);
        [-two * p * v[1] * v[0], -two * p * v[1] * v[1] + vv * p]
    }

    /// Linearization of `accel` applied to `(dx, dv)`.
    pub(crate) fn accel_variation(&self, x2: T, v: [T; 2], dx: [T; 2], dv: [T; 2]) -> [T; 2] {
        let p = self.dphi(x2);
        let pp = self.ddphi(x2);
        let two = T::lit(2.0);
        let vv = v[0] * v[0] + v[1] * v[1];
        // d/dx2 part
        let gx = [pp * (-two * v[1] * v[0]), pp * (-two * v[1] * v[1] + vv)];
        // d/dv part: [[-2p v2, -2p v1], [2p v1, -2p v2]]
        let gv = [
            -two * p * v[1] * dv[0] - two * p * v[0] * dv[1],
            two * p * v[0] * dv[0] - two * p * v[1] * dv[1],
        ];
        [gx[0] * dx[1] + gv[0], gx[1] * dx[1] + gv[1]]
    }

    /// Christoffel contraction `Gamma(v, h)` for the transport equation `h' = -Gamma(v, h)`.
    pub(crate) fn christoffel(&self, x2: T, v: [T; 2], h: [T; 2]) -> [T; 2] {
        let p = self.dphi(x2);
        let gh = p * h[1];
        let gv = p * v[1];
        let vh = v[0] * h[0] + v[1] * h[1];
        [gh * v[0] + gv * h[0], gh * v[1] + gv * h[1] - vh * p]
    }
}
