//! Check records and JSON reports.

use std::path::Path;

use serde::{Deserialize, Serialize};

pub const SCHEMA: u32 = 1;

/// How `observed` is compared with `target`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// |observed − target| ≤ tolerance.
    Within,
    /// observed ≤ tolerance (target is 0).
    AtMost,
    /// observed ≥ tolerance (target is the bound).
    AtLeast,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// Which geometric statement the check exercises.
    pub anchor: String,
    pub comparison: Comparison,
    pub target: f64,
    pub observed: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn within(name: impl Into<String>, anchor: impl Into<String>, target: f64, observed: f64, tolerance: f64) -> Self {
        let pass = (observed - target).abs() <= tolerance;
        Self {
            name: name.into(),
            anchor: anchor.into(),
            comparison: Comparison::Within,
            target,
            observed,
            tolerance,
            pass,
        }
    }

    pub fn at_most(name: impl Into<String>, anchor: impl Into<String>, observed: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            anchor: anchor.into(),
            comparison: Comparison::AtMost,
            target: 0.0,
            observed,
            tolerance: bound,
            pass: observed <= bound,
        }
    }

    pub fn at_least(name: impl Into<String>, anchor: impl Into<String>, observed: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            anchor: anchor.into(),
            comparison: Comparison::AtLeast,
            target: bound,
            observed,
            tolerance: bound,
            pass: observed >= bound,
        }
    }

    /// A boolean property recorded as 1 (holds) or 0.
    pub fn holds(name: impl Into<String>, anchor: impl Into<String>, ok: bool) -> Self {
        Self::within(name, anchor, 1.0, if ok { 1.0 } else { 0.0 }, 0.0)
    }

    /// A check that could not be evaluated.
    pub fn failed(name: impl Into<String>, anchor: impl Into<String>, why: &str) -> Self {
        let mut c = Self::holds(name, anchor, false);
        c.name = format!("{} [error: {why}]", c.name);
        c
    }

    pub fn summary(&self) -> String {
        let rel = match self.comparison {
            Comparison::Within => format!("|{:.6e} - {:.6e}| <= {:.1e}", self.observed, self.target, self.tolerance),
            Comparison::AtMost => format!("{:.6e} <= {:.1e}", self.observed, self.tolerance),
            Comparison::AtLeast => format!("{:.6e} >= {:.1e}", self.observed, self.tolerance),
        };
        format!("{} {}: {rel}", if self.pass { "PASS" } else { "FAIL" }, self.name)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub config: serde_json::Value,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(command: impl Into<String>, config: serde_json::Value) -> Self {
        Self {
            schema: SCHEMA,
            command: command.into(),
            config,
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = Check>) {
        self.checks.extend(checks);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_json() + "\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comparisons() {
        assert!(Check::within("a", "x", 1.0, 1.0 + 1e-9, 1e-8).pass);
        assert!(!Check::within("a", "x", 1.0, f64::NAN, 1e-8).pass);
        assert!(Check::at_most("b", "x", 1e-9, 1e-8).pass);
        assert!(!Check::at_most("b", "x", f64::NAN, 1e-8).pass);
        assert!(Check::at_least("c", "x", 9.0, 8.0).pass);
        assert!(!Check::holds("d", "x", false).pass);
    }

    #[test]
    fn json_round_trip() {
        let mut r = Report::new("verify", serde_json::json!({"seed": 7}));
        r.extend([Check::within("k", "curvature", 1.0, 1.0, 0.0)]);
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.schema, 1);
        assert!(back.all_pass());
    }
}
