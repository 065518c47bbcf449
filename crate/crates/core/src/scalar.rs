use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar the geometry and envelope code is generic over.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Tolerance used to validate that points lie on their model, relative to unit scale.
    #[inline]
    fn membership_tol() -> Self {
        Self::epsilon() * Self::lit(4096.0)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Slack added to every inequality check: `abs + rel * max(|a|, |b|)`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Slack {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Slack {
    fn default() -> Self {
        Self { abs: 1e-9, rel: 1e-7 }
    }
}

impl Slack {
    pub fn tau(&self, a: f64, b: f64) -> f64 {
        self.abs + self.rel * a.abs().max(b.abs())
    }
}

/// `sin(t)/t` for sphere-like curvature, `sinh(t)/t` for hyperbolic, with a series near zero.
pub fn sinc_k<T: Real>(t: T, sign: i8) -> T {
    if t.abs() < T::lit(1e-3) {
        let t2 = t * t;
        let s = T::lit(f64::from(sign));
        T::one() - s * t2 / T::lit(6.0) + t2 * t2 / T::lit(120.0)
    } else if sign > 0 {
        t.sin() / t
    } else {
        t.sinh() / t
    }
}

/// `sinc_k(t) - 1` computed without cancellation for small arguments.
pub fn sinc_k_minus_one<T: Real>(t: T, sign: i8) -> T {
    if t.abs() < T::lit(1e-2) {
        let t2 = t * t;
        let s = T::lit(f64::from(sign));
        -s * t2 / T::lit(6.0) + t2 * t2 / T::lit(120.0) - s * t2 * t2 * t2 / T::lit(5040.0)
    } else {
        sinc_k(t, sign) - T::one()
    }
}
