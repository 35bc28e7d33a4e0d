use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::brace::Element;

pub const DEFAULT_CAP: usize = 4096;
pub const DEFAULT_SAMPLES: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 0x5eed_b7ac_e000_0001;
pub const DEFAULT_TRIPLE_BUDGET: u64 = 100_000_000;

/// Limits shared by every verifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyConfig {
    /// Largest order handled exhaustively.
    pub cap: usize,
    /// Number of random tuples drawn in sampled mode.
    pub samples: u64,
    pub seed: u64,
    /// Largest number of triples an exhaustive triple loop may visit.
    pub triple_budget: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { cap: DEFAULT_CAP, samples: DEFAULT_SAMPLES, seed: DEFAULT_SEED, triple_budget: DEFAULT_TRIPLE_BUDGET }
    }
}

impl VerifyConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    /// A fresh generator for the named check, so checks do not share a stream.
    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mode {
    Exhaustive,
    Sampled { samples: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Vec<Element>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
}

impl Check {
    pub fn pass(name: impl Into<String>, mode: Mode) -> Self {
        Self { name: name.into(), passed: true, mode, witness: None, detail: None }
    }

    pub fn fail(name: impl Into<String>, mode: Mode, witness: Vec<Element>) -> Self {
        Self { name: name.into(), passed: false, mode, witness: Some(witness), detail: None }
    }

    pub fn from_witness(name: impl Into<String>, mode: Mode, witness: Option<Vec<Element>>) -> Self {
        match witness {
            None => Self::pass(name, mode),
            Some(w) => Self::fail(name, mode, w),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn is_exhaustive(&self) -> bool {
        self.checks.iter().all(|c| c.mode == Mode::Exhaustive)
    }
}
