//! The sublinear testers: the growing-suffix probe, the suffix sampler,
//! the recursive interval sampler, and the combined tester.
//!
//! All testers are non-adaptive with one-sided error: every run first
//! commits a *plan* — the full set of positions it will query, a
//! deterministic function of `(n, config, seed)` — then queries the
//! plan and searches the observed values for a length-k increasing
//! subsequence.  A returned witness is therefore always genuine, and
//! `non_adaptivity_check` passes on every run by construction.

use std::collections::BTreeSet;
use std::ops::Range;

use rand::distr::Distribution;
use rand::{Rng, RngCore};
use rand_distr::Binomial;

use crate::error::{Error, Result};
use crate::exact::{find_pattern_in_points, PatternWitness};
use crate::seq::{QueryOracle, RandomStream};
use crate::structure::{eta, segment};

/// Tester parameters.  `rho` and `q` default to formulas in the
/// sampling-rate and query-cap notes below; `c1` and `c2` are the
/// tunable constants inside the polylog factors.
#[derive(Debug, Clone)]
pub struct TesterConfig {
    /// Pattern length, at least 2.
    pub k: usize,
    /// Distance parameter in (0, 1).
    pub epsilon: f64,
    /// Master seed; trial harnesses derive per-trial streams from it.
    pub seed: u64,
    /// Sampling scale for the interval sampler; `None` selects
    /// `epsilon / (c2 * k * (1 + log2(1/epsilon)))`.
    pub rho: Option<f64>,
    /// Query cap for the interval sampler; `None` selects eight times
    /// the expected-size bound `(1/rho) * (ceil(log2 n)/rho)^r`.
    pub q: Option<usize>,
    /// Suffix-sampler round constant.
    pub c1: f64,
    /// Interval-sampler scale constant.
    pub c2: f64,
}

impl TesterConfig {
    pub fn new(k: usize, epsilon: f64) -> Result<Self> {
        let cfg = TesterConfig {
            k,
            epsilon,
            seed: 0,
            rho: None,
            q: None,
            c1: 4.0,
            c2: 0.25,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::InvalidInput(format!("k={} must be >= 2", self.k)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidInput(format!(
                "epsilon={} not in (0,1)",
                self.epsilon
            )));
        }
        if self.c1 <= 0.0 || self.c2 <= 0.0 {
            return Err(Error::InvalidInput("c1, c2 must be positive".into()));
        }
        // The sampling scale must stay above epsilon / polylog(1/epsilon).
        let floor = self.epsilon / (self.c2 * self.log_eps_factor().powi(self.k as i32));
        if self.effective_rho() < floor {
            return Err(Error::InvalidInput(format!(
                "rho={} below the lower bound {floor}",
                self.effective_rho()
            )));
        }
        Ok(())
    }

    /// `1 + log2(1/epsilon)`, the building block of the polylog factors.
    fn log_eps_factor(&self) -> f64 {
        1.0 + (1.0 / self.epsilon).log2()
    }

    /// Recursion depth of the interval sampler: `r = floor(log2 k)`.
    pub fn r(&self) -> u32 {
        (self.k as f64).log2().floor() as u32
    }

    pub fn effective_rho(&self) -> f64 {
        self.rho
            .unwrap_or(self.epsilon / (self.c2 * self.k as f64 * self.log_eps_factor()))
    }

    /// Query cap for the interval sampler at domain size `n`.
    pub fn effective_q(&self, n: usize) -> usize {
        if let Some(q) = self.q {
            return q;
        }
        let rho = self.effective_rho();
        let l = crate::structure::ceil_log2(n) as f64;
        let bound = (1.0 / rho) * (l / rho).powi(self.r() as i32);
        (8.0 * bound).ceil() as usize
    }

    /// Number of suffix-sampler rounds: `ceil(log2(1/epsilon)) + c1`.
    pub fn suffix_rounds(&self) -> u32 {
        (1.0 / self.epsilon).log2().ceil() as u32 + self.c1.ceil() as u32
    }

    /// Probes in round `j`: `ceil(c1 * 2^-j * (1 + log2(1/eps))^k / eps)`.
    pub fn suffix_probes(&self, j: u32) -> usize {
        let alpha_j = (0.5f64).powi(j as i32);
        (self.c1 * alpha_j * self.log_eps_factor().powi(self.k as i32) / self.epsilon).ceil()
            as usize
    }
}

/// Per-stage sampling metadata for a tester run.
#[derive(Debug, Clone)]
pub struct StageTrace {
    pub stage: &'static str,
    pub planned: usize,
    pub queried: usize,
    pub found: bool,
}

/// Outcome of a combined tester run.
#[derive(Debug, Clone)]
pub struct TesterReport {
    /// A verified witness, or `None` for fail.
    pub outcome: Option<PatternWitness>,
    pub queries_used: usize,
    /// The pre-committed query set (for `non_adaptivity_check`).
    pub planned_queries: BTreeSet<usize>,
    pub stages: Vec<StageTrace>,
    /// True when the interval sampler drew more than `q` positions and
    /// gave up without querying.
    pub splittable_capped: bool,
}

/// Sampling plan of a single growing-suffix probe: positions drawn
/// uniformly with replacement from each doubling segment of `a`.
fn plan_probe(n: usize, a: usize, alpha0: f64, rng: &mut RandomStream) -> Vec<usize> {
    let reps = (1.0 / alpha0).ceil() as usize;
    let mut samples = Vec::new();
    for t in 1..=eta(a, n) {
        let s = segment(a, t, n);
        if s.is_empty() {
            continue;
        }
        for _ in 0..reps {
            samples.push(rng.random_range(s.clone()));
        }
    }
    samples
}

/// Queries a planned position list (duplicates each count) and searches
/// the observed values for a length-k pattern.
fn query_and_search(
    oracle: &mut QueryOracle,
    samples: &[usize],
    k: usize,
) -> Result<Option<PatternWitness>> {
    let mut points: Vec<(usize, i64)> = Vec::with_capacity(samples.len());
    for &i in samples {
        points.push((i, oracle.query(i)?));
    }
    points.sort();
    points.dedup();
    find_pattern_in_points(&points, k)
}

/// One growing-suffix probe: samples `ceil(1/alpha0)` positions from
/// each segment `S_t(a)`, queries them, and reports any length-k
/// increasing subsequence among the samples.
pub fn growing_suffix_probe(
    oracle: &mut QueryOracle,
    alpha0: f64,
    a: usize,
    k: usize,
    rng: &mut RandomStream,
) -> Result<Option<PatternWitness>> {
    if !(alpha0 > 0.0 && alpha0 <= 1.0) {
        return Err(Error::InvalidInput(format!("alpha0={alpha0} not in (0,1]")));
    }
    if a + 1 >= oracle.n() {
        return Err(Error::InvalidInput(format!(
            "probe start a={a} has no segments in [0,{})",
            oracle.n()
        )));
    }
    let samples = plan_probe(oracle.n(), a, alpha0, rng);
    query_and_search(oracle, &samples, k)
}

/// Full plan of the suffix sampler: every probe of every round, with
/// all sample positions drawn up front.
struct SuffixPlan {
    /// Per probe: the sampled positions (the start `a` itself is not
    /// queried).
    probes: Vec<Vec<usize>>,
}

fn plan_suffix(n: usize, cfg: &TesterConfig, rng: &mut RandomStream) -> SuffixPlan {
    let mut probes = Vec::new();
    for j in 1..=cfg.suffix_rounds() {
        let alpha_j = (0.5f64).powi(j as i32);
        for _ in 0..cfg.suffix_probes(j) {
            let a = rng.random_range(0..n);
            probes.push(if a + 1 < n {
                plan_probe(n, a, alpha_j, rng)
            } else {
                Vec::new()
            });
        }
    }
    SuffixPlan { probes }
}

/// Suffix sampler: geometrically decreasing densities `alpha_j = 2^-j`,
/// each round probing uniformly random starts.  Returns the first
/// witness any probe finds.
pub fn sample_suffix(
    oracle: &mut QueryOracle,
    cfg: &TesterConfig,
    rng: &mut RandomStream,
) -> Result<Option<PatternWitness>> {
    cfg.validate()?;
    let plan = plan_suffix(oracle.n(), cfg, rng);
    let mut found = None;
    for probe in &plan.probes {
        let w = query_and_search(oracle, probe, cfg.k)?;
        if found.is_none() {
            found = w;
        }
    }
    Ok(found)
}

/// Recursive interval sampler.  Level 0 includes each position of `I`
/// independently with probability `1/(rho |I|)`; deeper levels recurse
/// on the dyadic windows `[a - 2^j, a + 2^j]` around every included
/// point.  The returned set is clipped to `I`.
pub fn sample_helper(
    r: u32,
    i: Range<usize>,
    n: usize,
    rho: f64,
    rng: &mut RandomStream,
) -> Result<BTreeSet<usize>> {
    if rho <= 0.0 {
        return Err(Error::InvalidInput(format!("rho={rho} must be positive")));
    }
    if i.end > n {
        return Err(Error::InvalidInput(format!(
            "interval {i:?} outside [0,{n})"
        )));
    }
    let m = i.len();
    if m == 0 {
        return Ok(BTreeSet::new());
    }
    // Independent Bernoulli(p) over m positions == a Binomial(m, p)
    // count placed uniformly without replacement.
    let p = (1.0 / (rho * m as f64)).min(1.0);
    let count = Binomial::new(m as u64, p)
        .map_err(|e| Error::InvalidInput(e.to_string()))?
        .sample(rng) as usize;
    let mut level: Vec<usize> = rand::seq::index::sample(rng, m, count)
        .into_iter()
        .map(|o| i.start + o)
        .collect();
    level.sort_unstable();

    let mut out: BTreeSet<usize> = level.iter().copied().collect();
    if r > 0 {
        for &a in &level {
            for j in 1..=crate::structure::ceil_log2(n) {
                let w = 1usize << j;
                let window = a.saturating_sub(w)..(a + w + 1).min(n);
                out.extend(sample_helper(r - 1, window, n, rho, rng)?);
            }
        }
        // Clip recursive samples back to this level's interval.
        out.retain(|&x| i.contains(&x));
    }
    Ok(out)
}

/// Interval sampler result before searching, used by the combined
/// tester to assemble its plan.
struct SplittablePlan {
    sampled: BTreeSet<usize>,
    capped: bool,
}

fn plan_splittable(n: usize, cfg: &TesterConfig, rng: &mut RandomStream) -> Result<SplittablePlan> {
    let sampled = sample_helper(cfg.r(), 0..n, n, cfg.effective_rho(), rng)?;
    let capped = sampled.len() > cfg.effective_q(n);
    Ok(SplittablePlan { sampled, capped })
}

/// Interval sampler tester: draws the recursive sample set `A`; if
/// `|A|` exceeds the query cap it fails without querying, otherwise it
/// queries all of `A` and searches it.
pub fn sample_splittable(
    oracle: &mut QueryOracle,
    cfg: &TesterConfig,
    rng: &mut RandomStream,
) -> Result<Option<PatternWitness>> {
    cfg.validate()?;
    let plan = plan_splittable(oracle.n(), cfg, rng)?;
    if plan.capped {
        return Ok(None);
    }
    let samples: Vec<usize> = plan.sampled.iter().copied().collect();
    query_and_search(oracle, &samples, cfg.k)
}

/// The combined tester: runs the suffix sampler and the interval
/// sampler with independent randomness on the same oracle, reporting a
/// witness if either finds one plus the full pre-committed plan.
pub fn sampler(
    oracle: &mut QueryOracle,
    cfg: &TesterConfig,
    rng: &mut RandomStream,
) -> Result<TesterReport> {
    cfg.validate()?;
    let n = oracle.n();
    let mut suffix_rng = RandomStream::new(rng.next_u64());
    let mut split_rng = RandomStream::new(rng.next_u64());

    // Commit the entire plan before the first query.
    let suffix_plan = plan_suffix(n, cfg, &mut suffix_rng);
    let split_plan = plan_splittable(n, cfg, &mut split_rng)?;
    let mut planned: BTreeSet<usize> = suffix_plan.probes.iter().flatten().copied().collect();
    planned.extend(split_plan.sampled.iter().copied());

    let before = oracle.query_count();
    let mut outcome: Option<PatternWitness> = None;
    for probe in &suffix_plan.probes {
        let w = query_and_search(oracle, probe, cfg.k)?;
        if outcome.is_none() {
            outcome = w;
        }
    }
    let suffix_used = oracle.query_count() - before;
    let suffix_found = outcome.is_some();

    let split_found;
    let split_used;
    if split_plan.capped {
        split_found = false;
        split_used = 0;
    } else {
        let samples: Vec<usize> = split_plan.sampled.iter().copied().collect();
        let w = query_and_search(oracle, &samples, cfg.k)?;
        split_used = samples.len();
        split_found = w.is_some();
        if outcome.is_none() {
            outcome = w;
        }
    }

    Ok(TesterReport {
        outcome,
        queries_used: oracle.query_count() - before,
        planned_queries: planned,
        stages: vec![
            StageTrace {
                stage: "sample-suffix",
                planned: suffix_plan.probes.iter().map(Vec::len).sum(),
                queried: suffix_used,
                found: suffix_found,
            },
            StageTrace {
                stage: "sample-splittable",
                planned: split_plan.sampled.len(),
                queried: split_used,
                found: split_found,
            },
        ],
        splittable_capped: split_plan.capped,
    })
}
