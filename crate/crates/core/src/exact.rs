//! Full-access ground truth: pattern search, LIS, disjoint families,
//! and the greedy rematching subroutine.
//!
//! Everything here reads the whole sequence.  These oracles validate
//! the sublinear testers and the instance generators; they are never on
//! a query-counted path.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::seq::Sequence;

/// `k` positions with strictly increasing indices and values: a
/// (12...k)-pattern, the tester's only success output.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PatternWitness {
    indices: Vec<usize>,
}

impl PatternWitness {
    /// Builds a witness from sorted indices.  Only index monotonicity is
    /// checked here; value monotonicity is relative to a sequence and is
    /// checked by [`verify_witness`].
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidInput("witness must be non-empty".into()));
        }
        if !indices.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput(format!(
                "witness indices not strictly increasing: {indices:?}"
            )));
        }
        Ok(PatternWitness { indices })
    }

    pub fn k(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Index gap between positions `b` and `b+1` (1-indexed `b`).
    pub fn gap(&self, b: usize) -> usize {
        self.indices[b] - self.indices[b - 1]
    }

    /// The c-gap position (Definition 2.3): the smallest `c` such that
    /// the gap between positions `c` and `c+1` is at least every other
    /// gap.  Errors for length-1 tuples, which have no gaps.
    pub fn c_gap(&self) -> Result<usize> {
        if self.k() < 2 {
            return Err(Error::InvalidInput("c-gap undefined for k0 = 1".into()));
        }
        let max_gap = (1..self.k()).map(|b| self.gap(b)).max().unwrap();
        Ok((1..self.k()).find(|&b| self.gap(b) == max_gap).unwrap())
    }
}

/// A set of pairwise index-disjoint length-`k0` witnesses (the families
/// `T`, `T0` of the greedy rematching argument).
#[derive(Debug, Clone, Default)]
pub struct DisjointFamily {
    k0: usize,
    tuples: Vec<PatternWitness>,
}

impl DisjointFamily {
    /// Builds a family, checking tuple length and pairwise disjointness.
    pub fn new(k0: usize, tuples: Vec<PatternWitness>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for t in &tuples {
            if t.k() != k0 {
                return Err(Error::InvalidInput(format!(
                    "tuple length {} in family of length-{k0} tuples",
                    t.k()
                )));
            }
            for &i in t.indices() {
                if !seen.insert(i) {
                    return Err(Error::InvalidInput(format!(
                        "index {i} occurs in two tuples"
                    )));
                }
            }
        }
        Ok(DisjointFamily { k0, tuples })
    }

    pub fn empty(k0: usize) -> Self {
        DisjointFamily {
            k0,
            tuples: Vec::new(),
        }
    }

    pub fn k0(&self) -> usize {
        self.k0
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn tuples(&self) -> &[PatternWitness] {
        &self.tuples
    }

    /// `E(T)`: the union of all member indices.
    pub fn index_set(&self) -> BTreeSet<usize> {
        self.tuples
            .iter()
            .flat_map(|t| t.indices().iter().copied())
            .collect()
    }

    /// True iff every tuple is a valid witness in `f`.
    pub fn validate(&self, f: &Sequence) -> bool {
        self.tuples.iter().all(|t| verify_witness(f, t))
    }
}

/// True iff `w`'s indices are in range and both indices and values
/// strictly increase.
pub fn verify_witness(f: &Sequence, w: &PatternWitness) -> bool {
    let idx = w.indices();
    idx.iter().all(|&i| i < f.n())
        && idx
            .windows(2)
            .all(|p| p[0] < p[1] && f.value(p[0]) < f.value(p[1]))
}

/// For each point, the length of the longest strictly increasing
/// subsequence *starting* there, via patience sorting right to left.
/// `points` must be sorted by index.
fn start_lengths(points: &[(usize, i64)]) -> Vec<usize> {
    let mut lens = vec![0usize; points.len()];
    // tails[len-1] = largest value starting a chain of length `len`
    // among the suffix processed so far; sorted strictly decreasing.
    let mut tails: Vec<i64> = Vec::new();
    for (p, &(_, v)) in points.iter().enumerate().rev() {
        let pos = tails.partition_point(|&t| t > v);
        lens[p] = pos + 1;
        if pos == tails.len() {
            tails.push(v);
        } else {
            tails[pos] = v;
        }
    }
    lens
}

/// Finds a (12...k)-pattern in `f`, if any: a witness exists iff
/// `LIS(f) >= k`.  Returns the lexicographically smallest witness.
pub fn find_pattern_exact(f: &Sequence, k: usize) -> Result<Option<PatternWitness>> {
    let points: Vec<(usize, i64)> = f.values().iter().copied().enumerate().collect();
    find_pattern_in_points(&points, k)
}

/// As [`find_pattern_exact`], but restricted to the index set `Q`.
pub fn find_pattern_in_subset(
    f: &Sequence,
    q: &BTreeSet<usize>,
    k: usize,
) -> Result<Option<PatternWitness>> {
    for &i in q {
        if i >= f.n() {
            return Err(Error::IndexOutOfRange { index: i, n: f.n() });
        }
    }
    let points: Vec<(usize, i64)> = q.iter().map(|&i| (i, f.value(i))).collect();
    find_pattern_in_points(&points, k)
}

/// Pattern search over explicit `(index, value)` points sorted by
/// index.  This is the piece the sublinear testers share: they call it
/// on exactly the positions they queried.
pub fn find_pattern_in_points(points: &[(usize, i64)], k: usize) -> Result<Option<PatternWitness>> {
    if k == 0 {
        return Err(Error::InvalidInput("pattern length k must be >= 1".into()));
    }
    debug_assert!(points.windows(2).all(|w| w[0].0 <= w[1].0));
    let lens = start_lengths(points);
    if lens.iter().max().is_none_or(|&m| m < k) {
        return Ok(None);
    }
    // Greedy earliest extension: at each step take the first point that
    // continues the chain and still has a long enough run ahead of it.
    let mut indices = Vec::with_capacity(k);
    let mut prev: Option<i64> = None;
    let mut need = k;
    for (p, &(i, v)) in points.iter().enumerate() {
        if need == 0 {
            break;
        }
        if prev.is_none_or(|pv| pv < v) && lens[p] >= need {
            indices.push(i);
            prev = Some(v);
            need -= 1;
        }
    }
    debug_assert_eq!(need, 0);
    Ok(Some(PatternWitness::new(indices)?))
}

/// A maximal (not maximum) family of disjoint length-`k` increasing
/// subsequences: repeatedly extract a pattern from the residual index
/// set until none remains.
pub fn maximal_disjoint_family(f: &Sequence, k: usize) -> Result<DisjointFamily> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be >= 1".into()));
    }
    let mut residual: Vec<(usize, i64)> = f.values().iter().copied().enumerate().collect();
    let mut tuples = Vec::new();
    while let Some(w) = find_pattern_in_points(&residual, k)? {
        let used: BTreeSet<usize> = w.indices().iter().copied().collect();
        residual.retain(|&(i, _)| !used.contains(&i));
        tuples.push(w);
    }
    DisjointFamily::new(k, tuples)
}

/// GreedyDisjointTuples: rebuilds a disjoint family over `E(T0)` by
/// scanning start indices left to right and extending each start with
/// the smallest feasible next element.
///
/// The output `T` satisfies `E(T) ⊆ E(T0)`, `|T| >= |T0|/k0`, and the
/// interleaving property: for tuples `(i..), (j..)` in `T` with
/// `i1 < j1`, `i_l < j_l` and `i_{l+1} > j_{l+1}` imply
/// `f(i_{l+1}) > f(j_{l+1})`.
pub fn greedy_disjoint_tuples(
    f: &Sequence,
    k0: usize,
    t0: &DisjointFamily,
) -> Result<DisjointFamily> {
    if k0 == 0 {
        return Err(Error::InvalidInput("k0 must be >= 1".into()));
    }
    if t0.k0() != k0 {
        return Err(Error::InvalidInput(format!(
            "family holds length-{} tuples, expected {k0}",
            t0.k0()
        )));
    }
    if !t0.validate(f) {
        return Err(Error::InvalidInput("T0 contains an invalid witness".into()));
    }

    let e0: Vec<usize> = t0.index_set().into_iter().collect();
    let mut taken: BTreeSet<usize> = BTreeSet::new();
    let mut tuples: Vec<PatternWitness> = Vec::new();

    for &start in &e0 {
        // Elements consumed into T earlier in the scan are skipped.
        if taken.contains(&start) {
            continue;
        }
        // Available pool for this outer step: E(T0) \ E(T).
        let avail: Vec<usize> = e0.iter().copied().filter(|i| !taken.contains(i)).collect();
        // tail[p] = length of the longest increasing subsequence of the
        // pool starting at avail[p] (right-to-left DP).
        let mut tail = vec![1usize; avail.len()];
        for p in (0..avail.len()).rev() {
            for q in p + 1..avail.len() {
                if f.value(avail[q]) > f.value(avail[p]) {
                    tail[p] = tail[p].max(1 + tail[q]);
                }
            }
        }
        let start_p = avail.binary_search(&start).unwrap();
        if tail[start_p] < k0 {
            continue;
        }
        // Greedy extension: at each step take the smallest element that
        // still extends to a full length-k0 increasing subsequence.
        let mut chosen = vec![start_p];
        for step in 2..=k0 {
            let cur = *chosen.last().unwrap();
            let next = (cur + 1..avail.len())
                .find(|&q| f.value(avail[q]) > f.value(avail[cur]) && tail[q] > k0 - step)
                .expect("tail DP guarantees an extension");
            chosen.push(next);
        }
        let indices: Vec<usize> = chosen.iter().map(|&p| avail[p]).collect();
        for &i in &indices {
            taken.insert(i);
        }
        tuples.push(PatternWitness::new(indices)?);
    }
    DisjointFamily::new(k0, tuples)
}

/// Partitions a family by the c-gap of each tuple, grouping it into at
/// most `k0 - 1` classes.
pub fn c_gap_partition(
    t: &DisjointFamily,
) -> Result<std::collections::BTreeMap<usize, DisjointFamily>> {
    if t.k0() < 2 {
        return Err(Error::InvalidInput("c-gap partition needs k0 >= 2".into()));
    }
    let mut parts: std::collections::BTreeMap<usize, Vec<PatternWitness>> = Default::default();
    for tuple in t.tuples() {
        parts.entry(tuple.c_gap()?).or_default().push(tuple.clone());
    }
    parts
        .into_iter()
        .map(|(c, tuples)| Ok((c, DisjointFamily::new(t.k0(), tuples)?)))
        .collect()
}
