use crate::scalar::Slack;

/// Default seed echoed by every report.
pub const DEFAULT_SEED: u64 = 3_735_928_559;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiffConfig {
    /// Base central-difference step; the step used is `h_grad * (1 + local_scale)`.
    pub h_grad: f64,
    pub local_scale: f64,
    /// Second-difference step (Richardson-extrapolated with half of it).
    pub h_hess: f64,
    pub n_samples: usize,
    pub n_pairs: usize,
    /// Directions used for sampled operator norms.
    pub directions: usize,
    pub slack: Slack,
    pub seed: u64,
}

impl Default for DiffConfig {
    fn default() -> Self {
        Self {
            h_grad: 1e-5,
            local_scale: 0.0,
            h_hess: 1e-3,
            n_samples: 256,
            n_pairs: 256,
            directions: 256,
            slack: Slack::default(),
            seed: DEFAULT_SEED,
        }
    }
}

impl DiffConfig {
    pub fn grad_step(&self) -> f64 {
        self.h_grad * (1.0 + self.local_scale)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_samples(mut self, n: usize) -> Self {
        self.n_samples = n;
        self.n_pairs = n;
        self
    }

    pub fn validate(&self) -> crate::Result<()> {
        if !(self.h_grad > 0.0 && self.h_hess >= self.grad_step() && self.local_scale >= 0.0) {
            return Err(crate::Error::Domain("need 0 < h_grad*(1+scale) <= h_hess".into()));
        }
        if self.directions < 4 {
            return Err(crate::Error::Domain("need at least 4 sampling directions".into()));
        }
        Ok(())
    }
}
