use std::fmt::{self, Display};

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub claim: String,
    pub params: String,
    pub expected: String,
    pub observed: String,
    pub pass: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub campaign: String,
    pub seed: u64,
    pub instances: Vec<Instance>,
    pub summary: Summary,
    /// Free-form findings, e.g. which candidate formula matched.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new(campaign: &str, seed: u64) -> Self {
        Self { campaign: campaign.to_string(), seed, instances: Vec::new(), summary: Summary::default(), notes: Vec::new() }
    }

    pub fn check(&mut self, claim: &str, params: impl Display, expected: impl Display, observed: impl Display, pass: bool) {
        self.summary.total += 1;
        if pass {
            self.summary.passed += 1;
        } else {
            self.summary.failed += 1;
        }
        self.instances.push(Instance {
            claim: claim.to_string(),
            params: params.to_string(),
            expected: expected.to_string(),
            observed: observed.to_string(),
            pass,
        });
    }

    /// Records an equality check.
    pub fn expect_eq<T: PartialEq + Display>(&mut self, claim: &str, params: impl Display, expected: T, observed: T) {
        let pass = expected == observed;
        self.check(claim, params, expected, observed, pass);
    }

    /// Counts an instance that could not run within the resource limits.
    pub fn skip(&mut self, reason: String) {
        self.summary.skipped += 1;
        if self.notes.len() < 50 {
            self.notes.push(format!("skipped: {reason}"));
        }
    }

    pub fn note(&mut self, note: String) {
        self.notes.push(note);
    }

    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &Instance> {
        self.instances.iter().filter(|i| !i.pass)
    }

    pub fn by_claim<'a>(&'a self, claim: &'a str) -> impl Iterator<Item = &'a Instance> + 'a {
        self.instances.iter().filter(move |i| i.claim == claim)
    }
}

impl Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "campaign {} (seed {})", self.campaign, self.seed)?;
        for i in &self.instances {
            writeln!(
                f,
                "{:4}  {:<24} {:<32} expected {:<16} observed {}",
                if i.pass { "ok" } else { "FAIL" },
                i.claim,
                i.params,
                i.expected,
                i.observed
            )?;
        }
        for note in &self.notes {
            writeln!(f, "note: {note}")?;
        }
        write!(
            f,
            "{} instances: {} passed, {} failed, {} skipped",
            self.summary.total, self.summary.passed, self.summary.failed, self.summary.skipped
        )
    }
}
