use crate::error::Result;
use crate::scalar::Real;

/// Fixed-step classical Runge-Kutta for an autonomous system.
///
/// `guard` runs after every step so integrations can abort as soon as the
/// state leaves its domain.
pub fn rk4<T: Real, const N: usize>(
    mut y: [T; N],
    steps: usize,
    h: T,
    f: impl Fn(&[T; N]) -> [T; N],
    guard: impl Fn(&[T; N]) -> Result<()>,
) -> Result<[T; N]> {
    let half = h / T::lit(2.0);
    let sixth = h / T::lit(6.0);
    let two = T::lit(2.0);
    let axpy = |base: &[T; N], s: T, k: &[T; N]| -> [T; N] {
        let mut o = *base;
        for i in 0..N {
            o[i] = o[i] + s * k[i];
        }
        o
    };
    for _ in 0..steps {
        let k1 = f(&y);
        let k2 = f(&axpy(&y, half, &k1));
        let k3 = f(&axpy(&y, half, &k2));
        let k4 = f(&axpy(&y, h, &k3));
        for i in 0..N {
            y[i] = y[i] + sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]);
        }
        guard(&y)?;
    }
    Ok(y)
}
