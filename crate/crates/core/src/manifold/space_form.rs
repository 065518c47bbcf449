//! Sphere and hyperboloid in one parametrization.
//!
//! Points satisfy `<p,p> = 1/K` where the ambient form is Euclidean for `K > 0`
//! and Minkowski (last coordinate negative) for `K < 0`. With that convention
//! exp, log, transport and dexp share one set of formulas, differing only in
//! whether the radial functions are circular or hyperbolic.

use crate::error::{domain, Error, Result};
use crate::scalar::{sinc_k, Real};

use super::Coords;

/// Distance subtracted from the injectivity radius on every cut-locus precondition.
pub const CUT_GUARD: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct SpaceForm<T> {
    pub(crate) n: usize,
    pub(crate) k: T,
}

impl<T: Real> SpaceForm<T> {
    pub fn new(n: usize, k: T) -> Result<Self> {
        if n == 0 {
            return Err(domain("dimension must be positive"));
        }
        if !(k.is_finite() && k != T::zero()) {
            return Err(domain(format!("space form needs finite nonzero curvature, got {k}")));
        }
        Ok(Self { n, k })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn curvature(&self) -> T {
        self.k
    }

    pub fn is_sphere(&self) -> bool {
        self.k > T::zero()
    }

    fn sign(&self) -> i8 {
        if self.is_sphere() {
            1
        } else {
            -1
        }
    }

    /// `sqrt(|K|)`.
    pub fn a(&self) -> T {
        self.k.abs().sqrt()
    }

    pub fn injectivity_radius(&self) -> T {
        if self.is_sphere() {
            T::PI() / self.a()
        } else {
            T::infinity()
        }
    }

    pub fn convexity_radius(&self) -> T {
        if self.is_sphere() {
            T::FRAC_PI_2() / self.a()
        } else {
            T::infinity()
        }
    }

    pub fn cut_limit(&self) -> T {
        self.injectivity_radius() - T::lit(CUT_GUARD)
    }

    /// Ambient bilinear form.
    pub fn form(&self, u: &[T], v: &[T]) -> T {
        let n = self.n;
        let mut s = T::zero();
        for i in 0..n {
            s = s + u[i] * v[i];
        }
        if self.is_sphere() {
            s + u[n] * v[n]
        } else {
            s - u[n] * v[n]
        }
    }

    pub fn origin(&self) -> Coords<T> {
        let mut c: Coords<T> = smallvec::smallvec![T::zero(); self.n + 1];
        c[self.n] = T::one() / self.a();
        c
    }

    pub fn validate(&self, p: &[T]) -> Result<()> {
        if p.len() != self.n + 1 || p.iter().any(|c| !c.is_finite()) {
            return Err(domain(format!("expected {} finite ambient coordinates", self.n + 1)));
        }
        let r = self.k * self.form(p, p) - T::one();
        let scale = T::one() + self.a() * p[self.n].abs();
        if r.abs() > T::membership_tol() * scale * scale {
            return Err(domain(format!("point is off the model (K<p,p> - 1 = {:e})", r.f64())));
        }
        if !self.is_sphere() && p[self.n] <= T::zero() {
            return Err(domain("hyperboloid point on the lower sheet"));
        }
        Ok(())
    }

    fn renormalize(&self, p: &mut Coords<T>) {
        if !self.is_sphere() {
            // Rescaling by sqrt(K<p,p>) cancels catastrophically far from the origin;
            // solving for the last coordinate does not.
            let n = self.n;
            let s = p[..n].iter().fold(T::zero(), |s, &c| s + c * c);
            p[n] = (s + T::one() / self.k.abs()).sqrt();
            return;
        }
        let s = (self.k * self.form(p, p)).sqrt();
        for c in p.iter_mut() {
            *c = *c / s;
        }
    }

    /// Removes the component of an ambient vector normal to the model at `x`.
    pub fn project(&self, x: &[T], h: &[T]) -> Coords<T> {
        let c = self.k * self.form(h, x);
        h.iter().zip(x).map(|(&hi, &xi)| hi - c * xi).collect()
    }

    pub fn norm(&self, v: &[T]) -> T {
        self.form(v, v).max(T::zero()).sqrt()
    }

    pub fn check_tangent(&self, x: &[T], v: &[T]) -> Result<()> {
        let o = self.form(x, v) * self.a();
        let scale = T::one() + self.norm(v) + self.a() * x[self.n].abs();
        if o.abs() > T::membership_tol() * scale * scale {
            return Err(domain(format!("vector is not tangent at the base point (<x,v> = {:e})", o.f64())));
        }
        Ok(())
    }

    pub fn exp(&self, x: &[T], v: &[T], vnorm: T) -> Result<Coords<T>> {
        if vnorm >= self.cut_limit() {
            return Err(Error::CutLocusExceeded {
                norm: vnorm.f64(),
                limit: self.cut_limit().f64(),
            });
        }
        let th = self.a() * vnorm;
        let c = if self.is_sphere() { th.cos() } else { th.cosh() };
        let s = sinc_k(th, self.sign());
        let mut p: Coords<T> = x.iter().zip(v).map(|(&xi, &vi)| c * xi + s * vi).collect();
        self.renormalize(&mut p);
        Ok(p)
    }

    /// `<x-y, x-y>` clamped at zero; equals `(4/|K|) S(d a / 2)^2`.
    fn chord_sq(&self, x: &[T], y: &[T]) -> T {
        let d: Coords<T> = x.iter().zip(y).map(|(&a, &b)| a - b).collect();
        self.form(&d, &d).max(T::zero())
    }

    pub fn dist(&self, x: &[T], y: &[T]) -> T {
        let half = self.a() * self.chord_sq(x, y).sqrt() / T::lit(2.0);
        let two = T::lit(2.0);
        if self.is_sphere() {
            two * half.min(T::one()).asin() / self.a()
        } else {
            two * half.asinh() / self.a()
        }
    }

    /// `K<x,y>`, i.e. cos/cosh of `a d(x,y)`, computed from the chord to avoid cancellation.
    fn cos_xy(&self, x: &[T], y: &[T]) -> T {
        T::one() - self.k * self.chord_sq(x, y) / T::lit(2.0)
    }

    pub fn log(&self, x: &[T], y: &[T]) -> Result<Coords<T>> {
        let d = self.dist(x, y);
        if d >= self.cut_limit() {
            return Err(Error::CutLocusExceeded {
                norm: d.f64(),
                limit: self.cut_limit().f64(),
            });
        }
        let half_k_chord = self.k * self.chord_sq(x, y) / T::lit(2.0);
        // w = y - K<x,y> x = (y - x) + (K|x-y|^2/2) x
        let w: Coords<T> = x.iter().zip(y).map(|(&xi, &yi)| (yi - xi) + half_k_chord * xi).collect();
        let wn = self.norm(&w);
        if wn == T::zero() || d == T::zero() {
            return Ok(smallvec::smallvec![T::zero(); self.n + 1]);
        }
        let scale = d / wn;
        // Remove the residual normal component left by rounding.
        Ok(self.project(x, &w.iter().map(|&wi| scale * wi).collect::<Coords<T>>()))
    }

    pub fn transport(&self, x: &[T], y: &[T], h: &[T]) -> Result<Coords<T>> {
        let d = self.dist(x, y);
        if d >= self.cut_limit() {
            return Err(Error::CutLocusExceeded {
                norm: d.f64(),
                limit: self.cut_limit().f64(),
            });
        }
        let c = self.k * self.form(y, h) / (T::one() + self.cos_xy(x, y));
        Ok(h.iter()
            .zip(x.iter().zip(y))
            .map(|(&hi, (&xi, &yi))| hi - c * (xi + yi))
            .collect())
    }

    /// Differential of `exp_x` at `v` applied to `h`, based at `exp_x(v)`.
    pub fn dexp(&self, x: &[T], v: &[T], vnorm: T, h: &[T]) -> Result<(Coords<T>, Coords<T>)> {
        let y = self.exp(x, v, vnorm)?;
        if vnorm == T::zero() {
            return Ok((y, h.iter().copied().collect()));
        }
        let along = self.form(h, v) / (vnorm * vnorm);
        let scale = sinc_k(self.a() * vnorm, self.sign());
        let split: Coords<T> = h
            .iter()
            .zip(v)
            .map(|(&hi, &vi)| along * vi + scale * (hi - along * vi))
            .collect();
        let out = self.transport(x, &y, &split)?;
        Ok((y, out))
    }

    pub fn frame(&self, x: &[T]) -> Vec<Coords<T>> {
        if !self.is_sphere() {
            return self.transported_frame(x);
        }
        // Seed with the ambient basis minus the axis most aligned with x (ties go to the
        // later axis); the remaining axes always project onto a basis of the tangent space.
        let mut skip = 0;
        for i in 0..=self.n {
            if x[i].abs() >= x[skip].abs() {
                skip = i;
            }
        }
        let mut out: Vec<Coords<T>> = Vec::with_capacity(self.n);
        for i in (0..=self.n).filter(|&i| i != skip) {
            let mut e: Coords<T> = smallvec::smallvec![T::zero(); self.n + 1];
            e[i] = T::one();
            let mut u = self.project(x, &e);
            for b in &out {
                let c = self.form(&u, b);
                for (ui, &bi) in u.iter_mut().zip(b) {
                    *ui = *ui - c * bi;
                }
            }
            let nu = self.norm(&u);
            for ui in u.iter_mut() {
                *ui = *ui / nu;
            }
            out.push(u);
        }
        out
    }

    /// Hyperboloid only: the ambient spatial basis at the origin, parallel transported to `x`,
    /// `e_i + a^2 x_i / (1 + a x_n) (o + x)`. Projecting ambient axes instead cancels
    /// catastrophically once `x_n` is large.
    fn transported_frame(&self, x: &[T]) -> Vec<Coords<T>> {
        let n = self.n;
        let a = self.a();
        let denom = T::one() + a * x[n];
        (0..n)
            .map(|i| {
                let c = a * a * x[i] / denom;
                let mut e: Coords<T> = x.iter().map(|&xj| c * xj).collect();
                e[n] = e[n] + c / a;
                e[i] = e[i] + T::one();
                e
            })
            .collect()
    }
}
