//! Verification reports.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

/// Outcome of one check. Everything except `wall_time_ms` is a function of
/// the inputs and the seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub samples: usize,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub worst_violation: f64,
    pub witness: Option<Vec<f64>>,
    pub coverage_gap: Option<f64>,
    pub winding: Option<i64>,
    pub passed: bool,
    pub wall_time_ms: f64,
    #[serde(default)]
    pub details: BTreeMap<String, f64>,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new(check: &str, samples: usize, seed: u64) -> Self {
        VerificationReport {
            check: check.to_string(),
            samples,
            seed,
            tolerances: BTreeMap::new(),
            worst_violation: 0.0,
            witness: None,
            coverage_gap: None,
            winding: None,
            passed: true,
            wall_time_ms: 0.0,
            details: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn tolerance(mut self, name: &str, value: f64) -> Self {
        self.tolerances.insert(name.to_string(), value);
        self
    }

    pub fn detail(&mut self, name: &str, value: f64) {
        self.details.insert(name.to_string(), value);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn timed(mut self, start: Instant) -> Self {
        self.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
        self
    }

    /// Combine reports: passes iff all parts pass; the worst violation and
    /// its witness come from the worst part.
    pub fn merge(check: &str, parts: &[VerificationReport]) -> Self {
        let mut out = VerificationReport::new(check, parts.iter().map(|p| p.samples).sum(), 0);
        out.seed = parts.first().map(|p| p.seed).unwrap_or(0);
        for p in parts {
            for (k, v) in &p.tolerances {
                out.tolerances.insert(format!("{}.{k}", p.check), *v);
            }
            for (k, v) in &p.details {
                out.details.insert(format!("{}.{k}", p.check), *v);
            }
            out.notes.extend(p.notes.iter().map(|n| format!("{}: {n}", p.check)));
            if p.worst_violation > out.worst_violation
                || (p.worst_violation == out.worst_violation && out.witness.is_none())
            {
                out.worst_violation = p.worst_violation;
                out.witness = p.witness.clone();
            }
            if let Some(g) = p.coverage_gap {
                out.coverage_gap = Some(out.coverage_gap.map_or(g, |o: f64| o.max(g)));
            }
            if p.winding.is_some() {
                out.winding = p.winding;
            }
            out.passed &= p.passed;
            out.wall_time_ms += p.wall_time_ms;
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "{}: {} (samples {}, seed {}, worst violation {:.3e}",
            self.check,
            if self.passed { "pass" } else { "FAIL" },
            self.samples,
            self.seed,
            self.worst_violation
        );
        if let Some(g) = self.coverage_gap {
            s.push_str(&format!(", coverage gap {g:.3e}"));
        }
        if let Some(w) = self.winding {
            s.push_str(&format!(", winding {w}"));
        }
        s.push(')');
        s
    }

    /// Markdown table of the scalar fields.
    pub fn to_markdown(&self) -> String {
        let mut s = format!("### {}\n\n| field | value |\n|---|---|\n", self.check);
        s.push_str(&format!("| verdict | {} |\n", if self.passed { "pass" } else { "fail" }));
        s.push_str(&format!("| samples | {} |\n| seed | {} |\n", self.samples, self.seed));
        for (k, v) in &self.tolerances {
            s.push_str(&format!("| tolerance {k} | {v:e} |\n"));
        }
        s.push_str(&format!("| worst violation | {:e} |\n", self.worst_violation));
        if let Some(g) = self.coverage_gap {
            s.push_str(&format!("| coverage gap | {g:e} |\n"));
        }
        if let Some(w) = self.winding {
            s.push_str(&format!("| winding | {w} |\n"));
        }
        for (k, v) in &self.details {
            s.push_str(&format!("| {k} | {v:e} |\n"));
        }
        for n in &self.notes {
            s.push_str(&format!("\n- {n}"));
        }
        s
    }
}
