//! Pass/fail records for verification checks.

use std::fmt::Write as _;

use crate::curve::fmt17;

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub name: String,
    pub passed: bool,
    /// Largest violation of the checked condition (0 when it holds with
    /// the required margin).
    pub worst_violation: f64,
    /// Where the worst case occurred, if it is located on a grid.
    pub location: Option<f64>,
    /// What `location` measures, e.g. `t/tau0` or `sigma/k0`.
    pub location_label: String,
    pub tolerance: f64,
    pub metrics: Vec<(String, f64)>,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new(name: impl Into<String>, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            passed: true,
            worst_violation: 0.0,
            location: None,
            location_label: String::new(),
            tolerance,
            metrics: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn at(mut self, label: &str) -> Self {
        self.location_label = label.to_string();
        self
    }

    /// Record a violation magnitude at a location; keeps the worst.
    pub fn observe(&mut self, violation: f64, location: f64) {
        if violation > self.worst_violation || (violation.is_nan() && !self.worst_violation.is_nan()) {
            self.worst_violation = violation;
            self.location = Some(location);
        }
    }

    pub fn metric(&mut self, key: impl Into<String>, value: f64) {
        self.metrics.push((key.into(), value));
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// Fail the check outright, independent of the violation magnitude.
    pub fn fail(&mut self, reason: impl Into<String>) {
        self.passed = false;
        self.notes.push(reason.into());
    }

    /// Settle `passed` against the tolerance. A check already failed by
    /// [`VerificationReport::fail`] stays failed.
    pub fn finish(mut self) -> Self {
        let within = self.worst_violation <= self.tolerance;
        self.passed = self.passed && within;
        self
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.metrics.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[{}] {}", if self.passed { "PASS" } else { "FAIL" }, self.name);
        let _ = writeln!(s, "  worst violation: {:.6e} (tolerance {:.3e})", self.worst_violation, self.tolerance);
        if let Some(loc) = self.location {
            let _ = writeln!(s, "  at {} = {:.6e}", self.location_label, loc);
        }
        for (k, v) in &self.metrics {
            let _ = writeln!(s, "  {k}: {v:.10e}");
        }
        for n in &self.notes {
            let _ = writeln!(s, "  note: {n}");
        }
        s
    }

    /// `key = value` lines; metric keys are prefixed with `metric.`.
    pub fn to_key_value(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "name = {}", self.name);
        let _ = writeln!(s, "passed = {}", self.passed);
        let _ = writeln!(s, "worst_violation = {}", fmt17(self.worst_violation));
        let _ = writeln!(s, "tolerance = {}", fmt17(self.tolerance));
        if let Some(loc) = self.location {
            let _ = writeln!(s, "location = {}", fmt17(loc));
            let _ = writeln!(s, "location_label = {}", self.location_label);
        }
        for (k, v) in &self.metrics {
            let _ = writeln!(s, "metric.{k} = {}", fmt17(*v));
        }
        for (i, n) in self.notes.iter().enumerate() {
            let _ = writeln!(s, "note.{i} = {}", n.replace('\n', " "));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_implies_within_tolerance() {
        let mut r = VerificationReport::new("x", 1e-3).at("t/tau0");
        r.observe(5e-4, 1.0);
        r.observe(2e-4, 2.0);
        let r = r.finish();
        assert!(r.passed);
        assert_eq!(r.location, Some(1.0));

        let mut r = VerificationReport::new("y", 1e-3);
        r.observe(2e-3, 0.5);
        assert!(!r.finish().passed);

        let mut r = VerificationReport::new("z", 1.0);
        r.fail("forced");
        assert!(!r.finish().passed);
    }

    #[test]
    fn nan_is_a_violation() {
        let mut r = VerificationReport::new("n", 1.0);
        r.observe(f64::NAN, 3.0);
        assert!(!r.finish().passed);
    }

    #[test]
    fn key_value_form() {
        let mut r = VerificationReport::new("bounds", 1e-12).at("t/tau0");
        r.observe(0.0, 0.1);
        r.metric("ratio_end", 1.99);
        let kv = r.finish().to_key_value();
        assert!(kv.contains("passed = true"));
        assert!(kv.contains("metric.ratio_end = 1.9900000000000000e0"));
    }
}
