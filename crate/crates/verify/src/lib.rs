//! Reporting for the acceptance run (`tests/acceptance.rs`): one `PASS`/`FAIL` line per
//! criterion, then a tally. Kept in its own package so that `cargo test --workspace`
//! runs it after every other test binary.

/// Outcome of one criterion.
#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub what: &'static str,
    pub ok: bool,
    pub detail: String,
}

pub fn verdict(what: &'static str, ok: bool, detail: String) -> Verdict {
    Verdict { what, ok, detail }
}

impl Verdict {
    /// `PASS criterion  n: what -- detail`.
    pub fn line(&self, n: usize) -> String {
        format!("{} criterion {n:>2}: {} -- {}", if self.ok { "PASS" } else { "FAIL" }, self.what, self.detail)
    }
}

/// Runs the criteria in order, printing each line as it completes; returns the failing
/// (1-based) criterion numbers.
pub fn run_all(criteria: &[fn() -> Verdict]) -> Vec<usize> {
    let mut failed = Vec::new();
    for (i, c) in criteria.iter().enumerate() {
        let v = c();
        println!("{}", v.line(i + 1));
        if !v.ok {
            failed.push(i + 1);
        }
    }
    println!("acceptance: {} passed, {} failed {failed:?}", criteria.len() - failed.len(), failed.len());
    failed
}
