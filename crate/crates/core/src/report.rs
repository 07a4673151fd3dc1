use serde::Serialize;

/// Outcome of one named check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// How many items (faces, samples, pairs, …) were examined.
    pub checked: u64,
    /// The first counterexample, when the check failed.
    pub witness: Option<String>,
}

impl Check {
    pub fn pass(name: impl Into<String>, checked: u64) -> Self {
        Check { name: name.into(), passed: true, checked, witness: None }
    }

    pub fn fail(name: impl Into<String>, checked: u64, witness: impl Into<String>) -> Self {
        Check { name: name.into(), passed: false, checked, witness: Some(witness.into()) }
    }

    pub fn from_witness(name: impl Into<String>, checked: u64, witness: Option<String>) -> Self {
        Check { name: name.into(), passed: witness.is_none(), checked, witness }
    }
}

/// A list of checks; passes iff every check passes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
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

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}
