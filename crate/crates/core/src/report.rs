//! Pass/fail reports with counterexample witnesses, and the sampling harness
//! shared by all law checkers.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::tree::HoleMode;

pub const SAMPLED: &str =
    "sampled refuter: PASS means no counterexample among the samples, not a proof";
pub const EXHAUSTIVE: &str = "exhaustive within the stated bounds";

/// One side of a failed equation: how it was computed, on which tree, with
/// which value (`undefined` when the product does not exist).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Side {
    pub expr: String,
    pub tree: String,
    pub value: String,
}

impl Side {
    pub fn new(expr: impl Into<String>, tree: impl Into<String>, value: impl Into<String>) -> Self {
        Side { expr: expr.into(), tree: tree.into(), value: value.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub input: String,
    pub sides: Vec<Side>,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "  input: {}", self.input)?;
        for s in &self.sides {
            if s.tree.is_empty() {
                writeln!(f, "  {} = {}", s.expr, s.value)?;
            } else {
                writeln!(f, "  {} = π({}) = {}", s.expr, s.tree, s.value)?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawResult {
    pub law: String,
    pub checked: usize,
    pub failures: usize,
    /// The first failure in sample order.
    pub witness: Option<Witness>,
}

impl LawResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub title: String,
    pub mode: &'static str,
    pub laws: Vec<LawResult>,
}

impl Report {
    pub fn new(title: impl Into<String>, mode: &'static str) -> Self {
        Report { title: title.into(), mode, laws: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.laws.iter().all(LawResult::passed)
    }

    pub fn push(&mut self, r: LawResult) {
        self.laws.push(r);
    }

    pub fn first_witness(&self) -> Option<&Witness> {
        self.laws.iter().find_map(|l| l.witness.as_ref())
    }

    pub fn law(&self, name: &str) -> Option<&LawResult> {
        self.laws.iter().find(|l| l.law == name)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# {}", self.title)?;
        writeln!(f, "# {}", self.mode)?;
        for l in &self.laws {
            if l.passed() {
                writeln!(f, "law {}: PASS ({} checked)", l.law, l.checked)?;
            } else {
                writeln!(f, "law {}: FAIL ({} of {} checked)", l.law, l.failures, l.checked)?;
                if let Some(w) = &l.witness {
                    write!(f, "{w}")?;
                }
            }
        }
        Ok(())
    }
}

/// Parameters of every random law checker.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SamplerConfig {
    pub samples: usize,
    /// Node bound for each generated tree (and each level of a tree of trees).
    pub size: usize,
    /// Levels of a generated tree of trees.
    pub nesting: usize,
    pub seed: u64,
    pub holes: HoleMode,
    /// Whether set-valued labels may be empty.
    pub empty_labels: bool,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            samples: 500,
            size: 8,
            nesting: 2,
            seed: 0,
            holes: HoleMode::Affine,
            empty_labels: false,
        }
    }
}

impl SamplerConfig {
    pub fn with_samples(mut self, n: usize) -> Self {
        self.samples = n;
        self
    }

    pub fn with_size(mut self, n: usize) -> Self {
        self.size = n;
        self
    }

    pub fn with_seed(mut self, s: u64) -> Self {
        self.seed = s;
        self
    }

    pub fn with_holes(mut self, h: HoleMode) -> Self {
        self.holes = h;
        self
    }

    /// Independent generator for sample `i`; reports do not depend on scheduling.
    pub fn rng(&self, i: usize) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(i as u64);
        r
    }
}

pub enum Outcome {
    Pass,
    /// The generator could not produce an instance, or its premise fails.
    Skip,
    Fail(Witness),
}

/// Evaluates `n` samples in parallel and reports as if run sequentially.
pub fn run_law<F>(law: &str, n: usize, f: F) -> LawResult
where
    F: Fn(usize) -> Outcome + Sync + Send,
{
    let outcomes: Vec<Outcome> = (0..n).into_par_iter().map(&f).collect();
    let mut res = LawResult { law: law.to_string(), checked: 0, failures: 0, witness: None };
    for o in outcomes {
        match o {
            Outcome::Pass => res.checked += 1,
            Outcome::Skip => {}
            Outcome::Fail(w) => {
                res.checked += 1;
                res.failures += 1;
                res.witness.get_or_insert(w);
            }
        }
    }
    res
}

pub fn show<T: fmt::Display>(v: &Option<T>) -> String {
    match v {
        Some(x) => x.to_string(),
        None => "undefined".to_string(),
    }
}
