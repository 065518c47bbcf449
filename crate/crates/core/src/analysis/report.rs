use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// One numeric-versus-reference comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub label: String,
    pub point_id: usize,
    pub lambda: f64,
    pub mu: f64,
    pub q: f64,
    pub value_numeric: f64,
    pub value_reference: f64,
    pub pass: bool,
}

impl Row {
    pub fn abs_err(&self) -> f64 {
        (self.value_numeric - self.value_reference).abs()
    }

    pub fn rel_err(&self) -> f64 {
        let r = self.value_reference.abs();
        if r > 0.0 {
            self.abs_err() / r
        } else {
            self.abs_err()
        }
    }
}

/// Outcome of a verification run.
///
/// `pass` is exactly `worst_violation <= slack`. Parent reports aggregate
/// children by their margins (`worst_violation - slack`) with zero slack.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub suite: String,
    pub manifold: String,
    pub samples_attempted: usize,
    pub samples_evaluated: usize,
    pub worst_violation: f64,
    pub slack: f64,
    pub witnesses: Vec<Vec<f64>>,
    pub pass: bool,
    pub seed: u64,
    pub params: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    pub rows: Vec<Row>,
    pub children: Vec<CheckReport>,
}

impl CheckReport {
    pub fn new(suite: impl Into<String>, manifold: impl Into<String>, seed: u64) -> Self {
        Self {
            suite: suite.into(),
            manifold: manifold.into(),
            samples_attempted: 0,
            samples_evaluated: 0,
            worst_violation: f64::NEG_INFINITY,
            slack: 0.0,
            witnesses: Vec::new(),
            pass: true,
            seed,
            params: BTreeMap::new(),
            notes: Vec::new(),
            rows: Vec::new(),
            children: Vec::new(),
        }
    }

    /// Sets the worst violation and its slack, and derives `pass`.
    pub fn conclude(&mut self, worst: f64, slack: f64) {
        self.worst_violation = worst;
        self.slack = slack;
        self.pass = !(worst > slack) && !worst.is_nan();
    }

    pub fn margin(&self) -> f64 {
        self.worst_violation - self.slack
    }

    pub fn param(mut self, k: &str, v: f64) -> Self {
        self.params.insert(k.to_string(), v);
        self
    }

    pub fn set(&mut self, k: &str, v: f64) {
        self.params.insert(k.to_string(), v);
    }

    /// Folds one observation into the worst case: the kept observation is the
    /// one with the largest margin `violation - slack` (NaN always wins).
    pub fn absorb(&mut self, violation: f64, slack: f64) {
        let m = violation - slack;
        let worse = m.is_nan() || m > self.margin() || self.worst_violation == f64::NEG_INFINITY;
        if worse && !self.margin().is_nan() {
            self.conclude(violation, slack);
        }
    }

    /// Adds a child; the parent's worst case is the largest child margin (with zero slack).
    pub fn push_child(&mut self, child: CheckReport) {
        self.samples_attempted += child.samples_attempted;
        self.samples_evaluated += child.samples_evaluated;
        self.absorb(child.margin(), 0.0);
        self.children.push(child);
    }

    /// Adds a comparison row with its violation and slack.
    pub fn push_row(&mut self, row: Row, violation: f64, slack: f64) {
        self.samples_attempted += 1;
        self.samples_evaluated += 1;
        self.absorb(violation, slack);
        self.rows.push(row);
    }

    /// Every row in this report and its descendants, with the owning suite name.
    pub fn all_rows(&self) -> Vec<(String, &Row)> {
        let mut out: Vec<(String, &Row)> = self.rows.iter().map(|r| (self.suite.clone(), r)).collect();
        for c in &self.children {
            out.extend(c.all_rows());
        }
        out
    }
}
