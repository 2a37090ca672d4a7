//! Sequences, query-counted oracle access, and reproducible randomness.
//!
//! A [`Sequence`] is the hidden function `f : [0,n) -> i64` that the
//! sublinear testers probe.  All access from a tester goes through a
//! [`QueryOracle`], which logs every queried position so that query
//! complexity and non-adaptivity can be certified after the fact.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A fixed sequence of totally ordered values.
///
/// Ties between entries are permitted; a monotone *pattern* always
/// requires strictly increasing values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequence {
    values: Vec<i64>,
}

impl Sequence {
    /// Builds a sequence from its entries.  Errors on an empty array.
    pub fn new(values: Vec<i64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("sequence must be non-empty".into()));
        }
        Ok(Sequence { values })
    }

    /// Number of entries `n`.
    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Direct (full-access) read; used by the exact oracles, never by
    /// the sublinear testers.
    pub fn value(&self, i: usize) -> i64 {
        self.values[i]
    }

    /// All entries, in order.
    pub fn values(&self) -> &[i64] {
        &self.values
    }

    /// Parses the plain-text format: one integer per line.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let v: i64 = line
                .parse()
                .map_err(|e| Error::InvalidInput(format!("line {}: {e}", lineno + 1)))?;
            values.push(v);
        }
        Sequence::new(values)
    }

    /// Serializes to the plain-text format: one integer per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in &self.values {
            writeln!(out, "{v}").unwrap();
        }
        out
    }

    /// Reads a sequence from a text file (one integer per line).
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        Sequence::from_text(&text)
    }
}

/// Query-counted access to a hidden [`Sequence`].
///
/// Every query is appended to a log; repeated queries to the same
/// position each count (conservative accounting).  An optional budget
/// rejects queries past the cap with [`Error::BudgetExceeded`].
#[derive(Debug)]
pub struct QueryOracle<'a> {
    seq: &'a Sequence,
    log: Vec<usize>,
    budget: Option<usize>,
}

impl<'a> QueryOracle<'a> {
    pub fn new(seq: &'a Sequence) -> Self {
        QueryOracle {
            seq,
            log: Vec::new(),
            budget: None,
        }
    }

    pub fn with_budget(seq: &'a Sequence, budget: usize) -> Self {
        QueryOracle {
            seq,
            log: Vec::new(),
            budget: Some(budget),
        }
    }

    /// Length of the hidden sequence (public knowledge for the tester).
    pub fn n(&self) -> usize {
        self.seq.n()
    }

    /// Queries position `i`, logging it.
    pub fn query(&mut self, i: usize) -> Result<i64> {
        if i >= self.seq.n() {
            return Err(Error::IndexOutOfRange {
                index: i,
                n: self.seq.n(),
            });
        }
        if let Some(b) = self.budget {
            if self.log.len() >= b {
                return Err(Error::BudgetExceeded { budget: b });
            }
        }
        self.log.push(i);
        Ok(self.seq.value(i))
    }

    /// Number of queries made so far (= length of the query log).
    pub fn query_count(&self) -> usize {
        self.log.len()
    }

    /// Ordered log of every queried position.
    pub fn query_log(&self) -> &[usize] {
        &self.log
    }
}

/// Certifies non-adaptivity: every logged query must belong to the set
/// of positions committed before any query was made.
pub fn non_adaptivity_check(oracle: &QueryOracle, planned: &BTreeSet<usize>) -> bool {
    oracle.query_log().iter().all(|i| planned.contains(i))
}

/// A seeded, draw-counted random stream.
///
/// Two streams with the same seed produce identical draw sequences, so
/// any randomized run is reproducible from `(seed, trial)` alone.
#[derive(Debug, Clone)]
pub struct RandomStream {
    rng: ChaCha8Rng,
    draws: u64,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        RandomStream {
            rng: ChaCha8Rng::seed_from_u64(seed),
            draws: 0,
        }
    }

    /// Derives an independent stream for a numbered trial.
    ///
    /// Mixing is done SplitMix64-style so that nearby `(seed, index)`
    /// pairs land on unrelated ChaCha seeds.
    pub fn substream(master_seed: u64, index: u64) -> Self {
        let mut z = master_seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        RandomStream::new(z ^ (z >> 31))
    }

    /// Number of 32/64-bit draws made so far.
    pub fn draws(&self) -> u64 {
        self.draws
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.draws += 1;
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.draws += 1;
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.draws += 1;
        self.rng.fill_bytes(dest);
    }
}
