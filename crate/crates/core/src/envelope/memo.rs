use std::collections::HashMap;
use std::sync::Mutex;

use crate::error::Result;
use crate::manifold::{Manifold, Point};
use crate::scalar::Real;

use super::field::{Field, Regularity};

/// Caches field values by point.
///
/// Keys are the exact coordinate bits by default, so cached values are
/// indistinguishable from recomputation. With `quantum` set, coordinates are
/// rounded to that grid first, trading an error of about `Lip * quantum` for
/// more hits.
pub struct Memo<F, T> {
    inner: F,
    quantum: Option<f64>,
    cache: Mutex<HashMap<Vec<u64>, T>>,
}

impl<F, T: Real> Memo<F, T> {
    pub fn new(inner: F) -> Self {
        Self { inner, quantum: None, cache: Mutex::new(HashMap::new()) }
    }

    pub fn quantized(inner: F, quantum: f64) -> Self {
        Self { inner, quantum: Some(quantum), cache: Mutex::new(HashMap::new()) }
    }

    pub fn inner(&self) -> &F {
        &self.inner
    }

    pub fn len(&self) -> usize {
        self.cache.lock().map(|c| c.len()).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn key(&self, x: &Point<T>) -> Vec<u64> {
        x.coords
            .iter()
            .map(|c| match self.quantum {
                None => c.f64().to_bits(),
                Some(q) => ((c.f64() / q).round() as i64) as u64,
            })
            .collect()
    }
}

impl<F: Field<T> + Send, T: Real> Field<T> for Memo<F, T> {
    fn manifold(&self) -> &Manifold<T> {
        self.inner.manifold()
    }

    fn value(&self, x: &Point<T>) -> Result<T> {
        let key = self.key(x);
        if let Some(v) = self.cache.lock().ok().and_then(|c| c.get(&key).copied()) {
            return Ok(v);
        }
        // Computed outside the lock; concurrent misses compute the same value.
        let v = self.inner.value(x)?;
        if let Ok(mut c) = self.cache.lock() {
            c.insert(key, v);
        }
        Ok(v)
    }

    fn regularity(&self) -> Regularity<T> {
        self.inner.regularity()
    }

    fn label(&self) -> String {
        self.inner.label()
    }
}
