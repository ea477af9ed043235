//! Uniform pass/fail records shared by every verification routine.

use serde::Serialize;

/// One exact check: a label, the verdict, and a human-readable witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, detail: detail.into() }
    }

    pub fn pass(name: impl Into<String>) -> Self {
        Self::new(name, true, "")
    }

    /// Passes when `expected == actual`; the detail records both sides either way.
    pub fn equal<T: PartialEq + std::fmt::Display>(name: impl Into<String>, expected: &T, actual: &T) -> Self {
        Self::new(name, expected == actual, format!("expected {expected}, got {actual}"))
    }
}

/// A named collection of checks.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}
