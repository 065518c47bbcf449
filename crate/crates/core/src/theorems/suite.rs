use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analysis::{
    c11_crosscheck, closed_form_gap, exp_comparison_check, gap_order_fit, CheckReport, DiffConfig, GapKind, Region,
    DEFAULT_SEED,
};
use crate::envelope::{self, affine, bump, Field, ScalarField, SolverConfig};
use crate::error::{domain, Error, Result};
use crate::manifold::{Manifold, Point};
use crate::numeric::ConformalMetric;

use super::counterexamples::{counterexample_hyperbolic, counterexample_warped, CounterexampleTolerances, WarpedPlan};
use super::lemma::{verify_convexity_lemma, verify_nonpositive_lemma, LemmaConstants};
use super::properties::{verify_bounded_convergence, verify_envelope_properties};
use super::regularization::{row, verify_lipschitz_preservation, verify_regularization, RegularizationPlan};

/// Model space selector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ManifoldSpec {
    Euclidean { n: usize },
    Sphere { n: usize, k: f64 },
    Hyperbolic { n: usize, k: f64 },
    Warped,
    Poincare,
}

impl ManifoldSpec {
    /// `kind` is one of `euclidean`, `sphere`, `hyperbolic`, `warped`, `poincare`;
    /// `k` defaults to `+1` / `-1`.
    pub fn parse(kind: &str, n: usize, k: Option<f64>) -> Result<Self> {
        Ok(match kind {
            "euclidean" | "flat" => Self::Euclidean { n },
            "sphere" => Self::Sphere { n, k: k.unwrap_or(1.0) },
            "hyperbolic" => Self::Hyperbolic { n, k: k.unwrap_or(-1.0) },
            "warped" => Self::Warped,
            "poincare" => Self::Poincare,
            other => return Err(domain(format!("unknown manifold '{other}'"))),
        })
    }

    pub fn build(&self) -> Result<Manifold<f64>> {
        match *self {
            Self::Euclidean { n } => Manifold::euclidean(n),
            Self::Sphere { n, k } => Manifold::sphere(n, k),
            Self::Hyperbolic { n, k } => Manifold::hyperbolic(n, k),
            Self::Warped => Ok(Manifold::warped()),
            Self::Poincare => Ok(Manifold::conformal(ConformalMetric::poincare())),
        }
    }
}

/// Second anchor used by fields that need one: distance 1 from the origin along the first frame axis.
pub fn second_anchor(m: &Manifold<f64>) -> Result<Point<f64>> {
    let o = m.origin();
    let mut u = vec![0.0; m.dim()];
    u[0] = 1.0;
    m.exp(&o, &m.combine(&o, &m.orthonormal_frame(&o), &u))
}

/// Library field by id, anchored at the origin (and [`second_anchor`]).
///
/// Ids: `const[:c]`, `dist`, `dist2`, `half-dist2`, `min-dist` (`min(2, d(., p1))`),
/// `truncated-dist2[:cap]`, `bump[:radius]`, `bump-plus-dist2`.
pub fn field_by_id(m: &Manifold<f64>, id: &str) -> Result<ScalarField<f64>> {
    let (name, arg) = match id.split_once(':') {
        Some((a, b)) => {
            let v: f64 = b.parse().map_err(|_| domain(format!("bad field argument in '{id}'")))?;
            (a, Some(v))
        }
        None => (id, None),
    };
    let o = m.origin();
    Ok(match name {
        "const" => envelope::constant(m, arg.unwrap_or(1.0)),
        "dist" => envelope::dist(m, &o),
        "dist2" => envelope::dist_sq(m, &o),
        "half-dist2" => envelope::half_dist_sq(m, &o),
        "min-dist" => envelope::truncated_dist(m, &second_anchor(m)?, arg.unwrap_or(2.0)),
        "truncated-dist2" => envelope::truncated_dist_sq(m, &o, arg.unwrap_or(0.25)),
        "bump" => bump(m, &o, arg.unwrap_or(0.3)),
        "bump-plus-dist2" => affine(m, vec![(1.0, envelope::dist_sq(m, &o)), (1.0, bump(m, &o, 0.3))], 0.0),
        other => return Err(domain(format!("unknown field '{other}'"))),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SuiteId {
    ConvexityLemma,
    NonpositiveLemma,
    Regularization,
    LipschitzPreservation,
    EnvelopeProperties,
    BoundedConvergence,
    CounterexampleHyperbolic,
    CounterexampleWarped,
    GapOrder,
    C11,
    ExpComparison,
}

impl SuiteId {
    pub const ALL: [SuiteId; 11] = [
        Self::ConvexityLemma,
        Self::NonpositiveLemma,
        Self::Regularization,
        Self::LipschitzPreservation,
        Self::EnvelopeProperties,
        Self::BoundedConvergence,
        Self::CounterexampleHyperbolic,
        Self::CounterexampleWarped,
        Self::GapOrder,
        Self::C11,
        Self::ExpComparison,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::ConvexityLemma => "convexity-lemma",
            Self::NonpositiveLemma => "nonpositive-lemma",
            Self::Regularization => "regularization",
            Self::LipschitzPreservation => "lipschitz",
            Self::EnvelopeProperties => "envelope-properties",
            Self::BoundedConvergence => "bounded-convergence",
            Self::CounterexampleHyperbolic => "hyperbolic",
            Self::CounterexampleWarped => "warped",
            Self::GapOrder => "gap-order",
            Self::C11 => "c11",
            Self::ExpComparison => "exp-comparison",
        }
    }

    /// Whether the suite composes `(f_lambda)^mu` under `mu <= lambda / (2q)`.
    pub fn composes(&self) -> bool {
        matches!(self, Self::Regularization)
    }
}

impl fmt::Display for SuiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SuiteId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.iter().copied().find(|id| id.name() == s).ok_or_else(|| domain(format!("unknown suite '{s}'")))
    }
}

/// A verification job: suite, space, field, parameter grids, budgets and seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteSpec {
    pub suite: SuiteId,
    pub manifold: ManifoldSpec,
    pub field: String,
    pub lambdas: Vec<f64>,
    /// Empty means `mu = lambda / (2q)` for each `lambda`.
    pub mus: Vec<f64>,
    pub q: f64,
    pub k0: f64,
    pub radius: Option<f64>,
    pub samples: usize,
    pub distances: Vec<f64>,
    /// Overrides of the lemma constants `A`, `B`, `C`.
    pub constants: [Option<f64>; 3],
    pub seed: u64,
}

impl SuiteSpec {
    /// Defaults matching the reference runs of each suite.
    pub fn new(suite: SuiteId) -> Self {
        let mut s = Self {
            suite,
            manifold: ManifoldSpec::Sphere { n: 2, k: 1.0 },
            field: "bump".into(),
            lambdas: vec![0.04, 0.02, 0.01],
            mus: Vec::new(),
            q: 2.0,
            k0: 1.0,
            radius: None,
            samples: 10_000,
            distances: vec![0.5, 1.0, 2.0],
            constants: [None; 3],
            seed: DEFAULT_SEED,
        };
        match suite {
            SuiteId::NonpositiveLemma => {
                s.manifold = ManifoldSpec::Hyperbolic { n: 2, k: -1.0 };
                s.radius = Some(1.0);
                s.constants = [None, None, Some(1.0)];
                s.samples = 2000;
            }
            SuiteId::LipschitzPreservation => {
                s.manifold = ManifoldSpec::Hyperbolic { n: 2, k: -1.0 };
                s.field = "min-dist".into();
                s.lambdas = vec![0.05, 0.02, 0.01];
                s.samples = 256;
            }
            SuiteId::EnvelopeProperties => {
                s.field = "dist2".into();
                s.lambdas = vec![0.1, 0.2];
                s.samples = 64;
            }
            SuiteId::BoundedConvergence => {
                s.manifold = ManifoldSpec::Hyperbolic { n: 2, k: -1.0 };
                s.field = "dist2".into();
                s.lambdas = vec![0.2, 0.1, 0.05];
                s.radius = Some(2.0);
            }
            SuiteId::CounterexampleHyperbolic => {
                s.manifold = ManifoldSpec::Hyperbolic { n: 2, k: -1.0 };
                s.field = "dist2".into();
                s.lambdas = vec![0.5, 1.0];
            }
            SuiteId::CounterexampleWarped => {
                s.manifold = ManifoldSpec::Warped;
                s.field = "truncated-dist2:0.0625".into();
                s.lambdas = vec![1e-3];
                s.mus = vec![2.5e-4];
            }
            SuiteId::GapOrder => {
                s.field = String::new();
            }
            SuiteId::C11 => {
                s.field = "half-dist2".into();
                s.radius = Some(1.0);
                s.samples = 64;
            }
            SuiteId::ExpComparison => {
                s.manifold = ManifoldSpec::Hyperbolic { n: 2, k: -1.0 };
                s.radius = Some(0.1);
                s.samples = 1000;
            }
            SuiteId::ConvexityLemma | SuiteId::Regularization => {}
        }
        s
    }

    /// The `mu` values paired with `lambda`.
    pub fn mus_for(&self, lambda: f64) -> Vec<f64> {
        if self.mus.is_empty() {
            vec![lambda / (2.0 * self.q)]
        } else {
            self.mus.clone()
        }
    }

    /// Rejects grids violating `mu <= lambda / (2q)` in composing suites.
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(domain("samples must be positive"));
        }
        if self.suite.composes() {
            if !(self.q > 1.0) {
                return Err(domain("q must exceed 1"));
            }
            for &l in &self.lambdas {
                for mu in self.mus_for(l) {
                    envelope::EnvelopeParams::new(l, mu, self.q)?.check_composition()?;
                }
            }
        }
        Ok(())
    }

    fn diff(&self) -> DiffConfig {
        DiffConfig::default().with_seed(self.seed)
    }
}

/// Runs one suite.
pub fn run_suite(spec: &SuiteSpec) -> Result<CheckReport> {
    spec.validate()?;
    let m = spec.manifold.build()?;
    let o = m.origin();
    let diff = spec.diff();
    let mut rep = match spec.suite {
        SuiteId::ConvexityLemma => {
            let c = spec.constants[2].unwrap_or(1.0);
            let mut k = LemmaConstants::minimal(spec.q, c);
            k.a = spec.constants[0].unwrap_or(k.a);
            k.b = spec.constants[1].unwrap_or(spec.q * k.a);
            let (_, r) = super::lemma::admissible_r(spec.q, spec.k0)?;
            let r = r.min(m.convexity_radius() / 2.0);
            let frame = m.orthonormal_frame(&o);
            let mut u = vec![0.0; m.dim()];
            u[0] = 0.5 * r;
            let y0 = m.exp(&o, &m.combine(&o, &frame, &u))?;
            u[0] = -0.3 * r;
            let z0 = m.exp(&o, &m.combine(&o, &frame, &u))?;
            verify_convexity_lemma(&m, spec.q, spec.k0, k, &o, &y0, &z0, spec.samples, &diff)?
        }
        SuiteId::NonpositiveLemma => {
            let r = spec.radius.unwrap_or(1.0);
            let c0 = spec.constants[2].unwrap_or(1.0);
            let b_scale = spec.constants[1].unwrap_or(1.0);
            let frame = m.orthonormal_frame(&o);
            let mut u = vec![0.0; m.dim()];
            u[0] = 0.5 * r;
            let y0 = m.exp(&o, &m.combine(&o, &frame, &u))?;
            verify_nonpositive_lemma(&m, r, c0, b_scale, &o, &y0, spec.samples, &diff)?
        }
        SuiteId::Regularization => {
            let f = field_by_id(&m, &spec.field)?;
            let frame = m.orthonormal_frame(&o);
            let mut u = vec![0.0; m.dim()];
            u[0] = 0.1;
            let center = m.exp(&o, &m.combine(&o, &frame, &u))?;
            let mut plan = RegularizationPlan::new(spec.q, spec.k0, spec.lambdas.clone(), &center);
            plan.grid_center = o.clone();
            plan.grid_radius = spec.radius.unwrap_or(0.3);
            plan.diff = diff;
            verify_regularization(&f, &plan)?
        }
        SuiteId::LipschitzPreservation => {
            let f = field_by_id(&m, &spec.field)?;
            let region = Region::ball(&o, spec.radius.unwrap_or(1.5));
            let cfg = DiffConfig { n_pairs: spec.samples, ..diff };
            verify_lipschitz_preservation(&f, &spec.lambdas, &region, (1.05, 0.05), (0.95, 0.01), &SolverConfig::light(), &cfg)?
        }
        SuiteId::EnvelopeProperties => {
            let f = field_by_id(&m, &spec.field)?;
            let h = affine(&m, vec![(1.0, f.clone()), (1.0, bump(&m, &o, 0.3))], 0.0);
            let (l1, l2) = match spec.lambdas.as_slice() {
                [a, b, ..] => (a.min(*b), a.max(*b)),
                _ => return Err(domain("envelope-properties needs two lambdas")),
            };
            let region = Region::ball(&o, spec.radius.unwrap_or(0.5));
            verify_envelope_properties(&f, &h, (l1, l2), f.infimum.clone(), &region, spec.samples, &SolverConfig::light(), &diff)?
        }
        SuiteId::BoundedConvergence => {
            verify_bounded_convergence(&spec.lambdas, spec.radius.unwrap_or(2.0), 0.05, 1e-3, &SolverConfig::light(), &diff)?
        }
        SuiteId::CounterexampleHyperbolic => {
            let pairs: Vec<(f64, f64)> =
                spec.lambdas.iter().flat_map(|&l| spec.mus_for(l).into_iter().map(move |mu| (l, mu))).collect();
            counterexample_hyperbolic(&pairs, &spec.distances, &CounterexampleTolerances::default(), &SolverConfig::light(), &diff)?
        }
        SuiteId::CounterexampleWarped => {
            let mut plan = WarpedPlan::<f64> { diff, ..WarpedPlan::default() };
            if let Some(&l) = spec.lambdas.first() {
                plan.lambda = l;
                plan.mu = spec.mus.first().copied().unwrap_or(l / 4.0);
            }
            counterexample_warped(&plan)?
        }
        SuiteId::GapOrder => gap_order_report(&m, &diff)?,
        SuiteId::C11 => {
            let f = field_by_id(&m, &spec.field)?;
            let cfg = DiffConfig { n_samples: spec.samples, ..diff };
            c11_crosscheck(&f, &o, spec.radius.unwrap_or(1.0), f64::NAN, &cfg)?.0
        }
        SuiteId::ExpComparison => {
            let eps = spec.constants[0].unwrap_or(0.02);
            exp_comparison_check(&m, eps, spec.radius.unwrap_or(0.1), spec.samples, &diff)?
        }
    };
    rep.seed = spec.seed;
    Ok(rep)
}

/// Step sizes of the order fit: nine log-spaced values in `[1e-3, 1e-1]`.
pub fn gap_steps() -> Vec<f64> {
    (0..9).map(|i| 10f64.powf(-3.0 + 0.25 * i as f64)).collect()
}

/// `(t, gap)` rows for both gaps plus a slope row each (the slope must lie in `[1.9, 2.1]`).
pub fn gap_order_report(m: &Manifold<f64>, diff: &DiffConfig) -> Result<CheckReport> {
    let x = m.origin();
    let mut u = vec![0.0; m.dim()];
    u[0] = 0.6;
    u[1] = 0.8;
    let dir = m.combine(&x, &m.orthonormal_frame(&x), &u);
    let ts = gap_steps();
    let mut rep = CheckReport::new("gap-order", m.name(), diff.seed);
    for (kind, label) in [(GapKind::Dexp, "dexp"), (GapKind::Invexp, "invexp")] {
        let fit = gap_order_fit(m, &x, &dir, &ts, kind, false)?;
        for (i, &(t, g)) in fit.points.iter().enumerate() {
            let reference = closed_form_gap(m, &dir.scaled(t), kind).map_or(f64::NAN, |v| v);
            rep.rows.push(row(&format!("{label}/gap@t={t:.6e}"), i, 0.0, 0.0, 0.0, g, reference, true));
        }
        let s = fit.slope;
        let pass = (1.9..=2.1).contains(&s);
        rep.push_row(row(&format!("{label}/slope"), ts.len(), 0.0, 0.0, 0.0, s, 2.0, pass), (s - 2.0).abs(), 0.1);
    }
    Ok(rep)
}

/// Field lookup for library callers that want the trait object.
pub fn boxed_field(m: &Manifold<f64>, id: &str) -> Result<Box<dyn Field<f64> + Send>> {
    Ok(Box::new(field_by_id(m, id)?))
}
