use std::fs::OpenOptions;
use std::io::{self, Write};
use std::path::Path;

use renv_core::analysis::CheckReport;

pub const HEADER: [&str; 12] = [
    "suite",
    "manifold",
    "lambda",
    "mu",
    "q",
    "seed",
    "point_id",
    "value_numeric",
    "value_reference",
    "abs_err",
    "rel_err",
    "status",
];

/// One CSV line.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvRow {
    pub suite: String,
    pub manifold: String,
    pub lambda: f64,
    pub mu: f64,
    pub q: f64,
    pub seed: u64,
    pub point_id: usize,
    pub value_numeric: f64,
    pub value_reference: f64,
    pub pass: bool,
}

impl CsvRow {
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

    fn record(&self) -> [String; 12] {
        [
            self.suite.clone(),
            self.manifold.clone(),
            num(self.lambda),
            num(self.mu),
            num(self.q),
            self.seed.to_string(),
            self.point_id.to_string(),
            num(self.value_numeric),
            num(self.value_reference),
            num(self.abs_err()),
            num(self.rel_err()),
            if self.pass { "pass" } else { "fail" }.to_string(),
        ]
    }
}

/// 17 significant digits, enough to round-trip an `f64`.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Rows of a report tree, depth first: each report's own rows (`suite:label`),
/// then a `suite:summary` row (worst violation against slack), then its children.
pub fn flatten(rep: &CheckReport) -> Vec<CsvRow> {
    let mut out = Vec::new();
    walk(rep, &mut out);
    out
}

fn walk(rep: &CheckReport, out: &mut Vec<CsvRow>) {
    for r in &rep.rows {
        out.push(CsvRow {
            suite: format!("{}:{}", rep.suite, r.label),
            manifold: rep.manifold.clone(),
            lambda: r.lambda,
            mu: r.mu,
            q: r.q,
            seed: rep.seed,
            point_id: r.point_id,
            value_numeric: r.value_numeric,
            value_reference: r.value_reference,
            pass: r.pass,
        });
    }
    let p = |k: &str| rep.params.get(k).copied().unwrap_or(0.0);
    out.push(CsvRow {
        suite: format!("{}:summary", rep.suite),
        manifold: rep.manifold.clone(),
        lambda: p("lambda"),
        mu: p("mu"),
        q: p("q"),
        seed: rep.seed,
        point_id: rep.rows.len(),
        value_numeric: rep.worst_violation,
        value_reference: rep.slack,
        pass: rep.pass,
    });
    for c in &rep.children {
        walk(c, out);
    }
}

/// Appends `rows` to the CSV at `path` (standard output when `None`), writing the
/// header only when the file is new or empty.
pub fn emit_series(path: Option<&Path>, rows: &[CsvRow]) -> io::Result<()> {
    match path {
        None => {
            let stdout = io::stdout();
            write_rows(stdout.lock(), rows, true)
        }
        Some(p) => {
            let file = OpenOptions::new().create(true).append(true).open(p)?;
            let fresh = file.metadata()?.len() == 0;
            write_rows(file, rows, fresh)
        }
    }
}

fn write_rows<W: Write>(w: W, rows: &[CsvRow], header: bool) -> io::Result<()> {
    let mut wr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    if header {
        wr.write_record(HEADER)?;
    }
    for r in rows {
        wr.write_record(r.record())?;
    }
    wr.flush()
}

/// Writes one report as a JSON object, or several as an array.
pub fn emit_json(path: Option<&Path>, reports: &[CheckReport]) -> io::Result<()> {
    let text = match reports {
        [one] => serde_json::to_string_pretty(one),
        many => serde_json::to_string_pretty(many),
    }
    .map_err(io::Error::other)?;
    match path {
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.write_all(b"\n")
        }
        Some(p) => std::fs::write(p, text + "\n"),
    }
}
