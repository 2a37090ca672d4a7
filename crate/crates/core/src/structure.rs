//! Structural machinery behind the splittable-pair analysis: scales,
//! slack cuts, cut sets `A_t(l, U)`, the density functional `v(l, U)`,
//! the greedy interval sweep, and certificate verifiers for growing
//! suffixes and splittable pairs.
//!
//! Everything here is full-access (reads the sequence directly) and
//! exact: densities and `v`-values are rationals, never floats, so the
//! density bound can be checked with zero tolerance.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Range;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::exact::{verify_witness, DisjointFamily, PatternWitness};
use crate::seq::Sequence;

/// Exact fraction type used for densities and thresholds.
pub type Frac = Ratio<i64>;
/// Wider fraction type for sums of many `v`-values.
pub type BigFrac = Ratio<i128>;

/// The slack parameter from the cut definition; the analysis fixes 1/3.
pub fn default_gamma() -> Frac {
    Frac::new(1, 3)
}

/// `ceil(log2(m))` for `m >= 1`.
pub fn ceil_log2(m: usize) -> u32 {
    if m <= 1 {
        0
    } else {
        (m - 1).ilog2() + 1
    }
}

/// Number of doubling segments seen from start `a` in a domain of size
/// `n`: `eta_a = ceil(log2(n - a))`.
pub fn eta(a: usize, n: usize) -> u32 {
    ceil_log2(n.saturating_sub(a))
}

/// Segment `S_t(a) = [a + 2^(t-1), a + 2^t)`, clipped to the domain.
/// Valid for `t >= 1`.
pub fn segment(a: usize, t: u32, n: usize) -> Range<usize> {
    let lo = (a + (1usize << (t - 1))).min(n);
    let hi = (a + (1usize << t)).min(n);
    lo..hi
}

/// The scale of an index gap `g`: the `t` with `2^t <= g <= 2^(t+1)`.
/// Exact powers of two are assigned to the lower scale so that every
/// gap `g >= 2` satisfies `g >= (3/2) * 2^t`, which keeps the slack-cut
/// window non-empty over the integers.
pub fn scale_of_gap(g: usize) -> u32 {
    debug_assert!(g >= 1);
    if g == 1 {
        0
    } else {
        ceil_log2(g) - 1
    }
}

/// True iff pivot `l` gamma-cuts `tuple` at position `c` with slack:
/// `i_c + gamma*g <= l <= i_{c+1} - gamma*g` where `g = i_{c+1} - i_c`.
pub fn cuts_with_slack(l: usize, tuple: &PatternWitness, c: usize, gamma: Frac) -> Result<bool> {
    if c < 1 || c >= tuple.k() {
        return Err(Error::InvalidInput(format!(
            "cut position c={c} out of range for a length-{} tuple",
            tuple.k()
        )));
    }
    if gamma <= Frac::new(0, 1) || gamma >= Frac::new(1, 2) {
        return Err(Error::InvalidInput(format!(
            "gamma={gamma} not in (0, 1/2)"
        )));
    }
    let ic = tuple.indices()[c - 1] as i64;
    let ic1 = tuple.indices()[c] as i64;
    let g = ic1 - ic;
    let (p, q) = (*gamma.numer(), *gamma.denom());
    let l = l as i64;
    // Multiply the real inequality through by the denominator of gamma.
    Ok(q * l >= q * ic + p * g && q * l <= q * ic1 - p * g)
}

/// The per-scale cut sets `A_t(l, U)` for one pivot.
#[derive(Debug, Clone)]
pub struct CutSets {
    pub pivot: usize,
    pub c: usize,
    pub gamma: Frac,
    /// Scale -> tuples of `U` at that scale which are cut with slack.
    pub buckets: BTreeMap<u32, Vec<PatternWitness>>,
}

impl CutSets {
    pub fn total(&self) -> usize {
        self.buckets.values().map(Vec::len).sum()
    }
}

/// Computes `A_t(l, U)` for every scale `t`.  All tuples of `U` must be
/// c-gap tuples for the given `c` (checked defensively).
pub fn cut_sets(l: usize, u: &DisjointFamily, c: usize) -> Result<CutSets> {
    let gamma = default_gamma();
    let mut buckets: BTreeMap<u32, Vec<PatternWitness>> = BTreeMap::new();
    for tuple in u.tuples() {
        if tuple.c_gap()? != c {
            return Err(Error::InvalidInput(format!(
                "tuple {:?} is not a {c}-gap tuple",
                tuple.indices()
            )));
        }
        if cuts_with_slack(l, tuple, c, gamma)? {
            let t = scale_of_gap(tuple.gap(c));
            buckets.entry(t).or_default().push(tuple.clone());
        }
    }
    Ok(CutSets {
        pivot: l,
        c,
        gamma,
        buckets,
    })
}

/// The density functional `v(l, U) = sum_t |A_t(l, U)| / 2^t`, exact.
pub fn v_value(l: usize, u: &DisjointFamily, c: usize) -> Result<BigFrac> {
    let cs = cut_sets(l, u, c)?;
    let mut v = BigFrac::new(0, 1);
    for (&t, tuples) in &cs.buckets {
        v += BigFrac::new(tuples.len() as i128, 1i128 << t);
    }
    Ok(v)
}

/// Exact mean of `v(l, U)` over all pivots `l` in `[0, n)`; the
/// density bound states this is at least `|U| / (3n)`.
pub fn mean_v_over_pivots(n: usize, u: &DisjointFamily, c: usize) -> Result<BigFrac> {
    let mut total = BigFrac::new(0, 1);
    for l in 0..n {
        total += v_value(l, u, c)?;
    }
    Ok(total / BigFrac::new(n as i128, 1))
}

/// Index-range check for cut sets: every tuple of `A_t(l, U)` has its
/// c-prefix in
/// `[l - (k0-1)*2^(t+1), l - gamma*2^t]` and its suffix in the mirror
/// range on the right.
pub fn check_cut_index_bounds(cs: &CutSets, k0: usize) -> bool {
    let l = cs.pivot as i64;
    cs.buckets.iter().all(|(&t, tuples)| {
        let wide = ((k0 as i64) - 1) << (t + 1);
        // gamma * 2^t rounded up: the prefix sits at or left of l - g3.
        let g3 = ((1i64 << t) + 2) / 3;
        tuples.iter().all(|tuple| {
            let idx = tuple.indices();
            let (pre, suf) = idx.split_at(cs.c);
            pre.iter()
                .all(|&i| l - wide <= i as i64 && (i as i64) <= l - g3)
                && suf
                    .iter()
                    .all(|&i| l + g3 <= i as i64 && (i as i64) <= l + wide)
        })
    })
}

/// Value-order fact: for families produced by the greedy
/// rematching, tuples cut at well-separated scales have ordered bridge
/// values: if `t1 >= t2 + 1 + log2(1/gamma) + log2(c+1)`, every tuple
/// at scale `t1` has `f(i_{c+1})` above every scale-`t2` tuple's
/// `f(j_{c+1})`.  Checked over every pivot.
pub fn check_cut_value_order(f: &Sequence, u: &DisjointFamily, c: usize) -> Result<bool> {
    let sep = 1.0 + 3f64.log2() + ((c + 1) as f64).log2();
    for l in 0..f.n() {
        let cs = cut_sets(l, u, c)?;
        let scales: Vec<u32> = cs.buckets.keys().copied().collect();
        for &t1 in &scales {
            for &t2 in &scales {
                if (t1 as f64) < (t2 as f64) + sep {
                    continue;
                }
                let hi_min = cs.buckets[&t1]
                    .iter()
                    .map(|w| f.value(w.indices()[c]))
                    .min()
                    .unwrap();
                let lo_max = cs.buckets[&t2]
                    .iter()
                    .map(|w| f.value(w.indices()[c]))
                    .max()
                    .unwrap();
                if lo_max >= hi_min {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Witness data for a growing suffix: per-segment dense sets whose
/// values rise across segments.
#[derive(Debug, Clone)]
pub struct GrowingSuffixCertificate {
    pub a: usize,
    pub alpha: Frac,
    pub beta: Frac,
    /// Segment index `t` (1-based) -> subset of `S_t(a)`.
    pub d: BTreeMap<u32, BTreeSet<usize>>,
}

/// Checks both growing-suffix conditions exactly: per-segment density
/// at most alpha with total at least beta, and cross-segment value
/// monotonicity.
pub fn verify_growing_suffix(f: &Sequence, cert: &GrowingSuffixCertificate) -> bool {
    let n = f.n();
    let eta_a = eta(cert.a, n);
    let mut density_sum = Frac::new(0, 1);
    let mut prev_max: Option<i64> = None;
    for (&t, d_t) in &cert.d {
        if t < 1 || t > eta_a {
            return false;
        }
        let s_t = segment(cert.a, t, n);
        if d_t.iter().any(|&b| !s_t.contains(&b)) {
            return false;
        }
        if d_t.is_empty() {
            continue;
        }
        let density = Frac::new(d_t.len() as i64, s_t.len() as i64);
        if density > cert.alpha {
            return false;
        }
        density_sum += density;
        // Maps are iterated in ascending t, so cross-segment value
        // monotonicity reduces to comparing against the running max.
        let min_here = d_t.iter().map(|&b| f.value(b)).min().unwrap();
        if let Some(m) = prev_max {
            if min_here <= m {
                return false;
            }
        }
        let max_here = d_t.iter().map(|&b| f.value(b)).max().unwrap();
        prev_max = Some(prev_max.map_or(max_here, |m| m.max(max_here)));
    }
    density_sum >= cert.beta
}

/// An interval whose tuple family splits into a left prefix zone and a
/// right suffix zone with universal cross-combinability.
#[derive(Debug, Clone)]
pub struct SplittablePair {
    pub interval: Range<usize>,
    pub family: DisjointFamily,
    pub c: usize,
    pub left: Range<usize>,
    pub mid: Range<usize>,
    pub right: Range<usize>,
}

/// Checks every splittable-pair invariant with the given alpha, beta.
pub fn verify_splittable(f: &Sequence, p: &SplittablePair, alpha: Frac, beta: Frac) -> bool {
    let i = &p.interval;
    let len = |r: &Range<usize>| (r.end - r.start) as i64;
    if len(i) == 0 || p.c < 1 || p.c >= p.family.k0() {
        return false;
    }
    // L, M, R are adjacent and partition I.
    if p.left.start != i.start
        || p.left.end != p.mid.start
        || p.mid.end != p.right.start
        || p.right.end != i.end
    {
        return false;
    }
    let isize = Frac::new(len(i), 1);
    for part in [&p.left, &p.mid, &p.right] {
        if Frac::new(len(part), 1) < alpha * isize {
            return false;
        }
    }
    if Frac::new(p.family.len() as i64, 1) < beta * isize {
        return false;
    }
    // Tuples: valid, inside I, prefixes in L, suffixes in R.
    for tuple in p.family.tuples() {
        if !verify_witness(f, tuple) {
            return false;
        }
        let (pre, suf) = tuple.indices().split_at(p.c);
        if !pre.iter().all(|b| p.left.contains(b)) || !suf.iter().all(|b| p.right.contains(b)) {
            return false;
        }
    }
    // Universal cross-combinability: every prefix's bridge value is
    // below every suffix's bridge value.
    let max_prefix = p
        .family
        .tuples()
        .iter()
        .map(|t| f.value(t.indices()[p.c - 1]))
        .max();
    let min_suffix = p
        .family
        .tuples()
        .iter()
        .map(|t| f.value(t.indices()[p.c]))
        .min();
    match (max_prefix, min_suffix) {
        (Some(a), Some(b)) => a < b,
        _ => false,
    }
}

/// Result of the greedy interval sweep: either more than half the
/// pivots score bottom, or a disjoint splittable collection.
#[derive(Debug, Clone)]
pub enum IntervalsOutcome {
    /// The pivots where no scale reached the density threshold.
    BottomSet(BTreeSet<usize>),
    Collection(Vec<SplittablePair>),
}

/// GreedyDisjointIntervals: sweeps pivots by decreasing best scale
/// `q(l)`, carving out a disjoint splittable pair per pick via the
/// median-value recombination.
///
/// Every pivot in `B` must satisfy `2^-j <= v(l, V) <= 2^-(j-1)`
/// (checked defensively).  The density threshold for `q(l)` is
/// `2^-j / (C * k0 * log2(k0))`.
pub fn greedy_disjoint_intervals(
    f: &Sequence,
    b: &BTreeSet<usize>,
    j: u32,
    v: &DisjointFamily,
    c: usize,
    c_const: f64,
) -> Result<IntervalsOutcome> {
    if b.is_empty() {
        return Ok(IntervalsOutcome::Collection(Vec::new()));
    }
    let k0 = v.k0();
    if k0 < 2 || c < 1 || c >= k0 {
        return Err(Error::InvalidInput(format!("bad split c={c} for k0={k0}")));
    }
    let lo = BigFrac::new(1, 1i128 << j);
    let hi = lo * BigFrac::new(2, 1);
    for &l in b {
        let val = v_value(l, v, c)?;
        if val < lo || val > hi {
            return Err(Error::InvalidInput(format!(
                "pivot {l} has v={val}, outside [2^-{j}, 2^-{}]",
                j - 1
            )));
        }
    }
    let threshold = (0.5f64).powi(j as i32) / (c_const * k0 as f64 * (k0 as f64).log2().max(1.0));

    // q(l): the largest scale whose cut-set density meets the
    // threshold, or bottom.
    let score = |l: usize| -> Result<Option<u32>> {
        let cs = cut_sets(l, v, c)?;
        Ok(cs
            .buckets
            .iter()
            .filter(|(&t, tuples)| tuples.len() as f64 / (1u64 << t) as f64 >= threshold)
            .map(|(&t, _)| t)
            .max())
    };

    let mut live: BTreeMap<usize, u32> = BTreeMap::new();
    let mut bottom = BTreeSet::new();
    for &l in b {
        match score(l)? {
            Some(t) => {
                live.insert(l, t);
            }
            None => {
                bottom.insert(l);
            }
        }
    }
    if 2 * bottom.len() >= b.len() {
        return Ok(IntervalsOutcome::BottomSet(bottom));
    }

    let n = f.n();
    let mut collection = Vec::new();
    while !live.is_empty() {
        // Largest scale first; ties broken by the smallest pivot.
        let (&l, &t) = live
            .iter()
            .max_by_key(|&(&l, &t)| (t, std::cmp::Reverse(l)))
            .unwrap();
        let tuples = cut_sets(l, v, c)?.buckets.remove(&t).unwrap_or_default();
        if let Some(pair) = recombine(f, l, t, c, k0, n, tuples)? {
            collection.push(pair);
        }
        // Clear a double-width window so later (smaller-scale) picks
        // cannot overlap this interval.
        let wide = 2 * k0 * (1usize << (t + 1));
        let (lo_l, hi_l) = (l.saturating_sub(wide), l + wide);
        live.retain(|&p, _| p < lo_l || p > hi_l);
    }
    Ok(IntervalsOutcome::Collection(collection))
}

/// The median-value recombination step: splits the scale-`t` cut tuples
/// at the lower median of the bridge values and rematches prefixes with
/// suffixes in sorted order, keeping at least half of them.
fn recombine(
    f: &Sequence,
    l: usize,
    t: u32,
    c: usize,
    k0: usize,
    n: usize,
    tuples: Vec<PatternWitness>,
) -> Result<Option<SplittablePair>> {
    if tuples.is_empty() {
        return Ok(None);
    }
    let mut bridge: Vec<i64> = tuples.iter().map(|w| f.value(w.indices()[c - 1])).collect();
    bridge.sort();
    let nu = bridge[(bridge.len() - 1) / 2];

    let mut prefixes: Vec<&PatternWitness> = tuples
        .iter()
        .filter(|w| f.value(w.indices()[c - 1]) <= nu)
        .collect();
    prefixes.sort_by_key(|w| f.value(w.indices()[c - 1]));
    let mut suffixes: Vec<&PatternWitness> = tuples
        .iter()
        .filter(|w| f.value(w.indices()[c]) > nu)
        .collect();
    suffixes.sort_by_key(|w| f.value(w.indices()[c]));

    let m = prefixes.len().min(suffixes.len());
    debug_assert!(2 * m >= tuples.len());
    let rematched: Vec<PatternWitness> = (0..m)
        .map(|x| {
            let mut idx = prefixes[x].indices()[..c].to_vec();
            idx.extend_from_slice(&suffixes[x].indices()[c..]);
            PatternWitness::new(idx)
        })
        .collect::<Result<_>>()?;

    let half = k0 << (t + 1);
    let interval = l.saturating_sub(half)..(l + half + 1).min(n);
    let g3 = (1usize << t).div_ceil(3);
    let left = interval.start..(l - g3 + 1);
    let mid = (l - g3 + 1)..(l + g3);
    let right = (l + g3)..interval.end;
    Ok(Some(SplittablePair {
        interval,
        family: DisjointFamily::new(k0, rematched)?,
        c,
        left,
        mid,
        right,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(idx: &[usize]) -> PatternWitness {
        PatternWitness::new(idx.to_vec()).unwrap()
    }

    #[test]
    fn slack_cut_examples() {
        let t = w(&[10, 40]);
        let g = default_gamma();
        assert!(cuts_with_slack(25, &t, 1, g).unwrap()); // 20 <= 25 <= 30
        assert!(!cuts_with_slack(19, &t, 1, g).unwrap());
        assert!(cuts_with_slack(30, &t, 1, g).unwrap()); // boundary inclusive
        assert!(cuts_with_slack(20, &t, 1, g).unwrap());
        assert!(cuts_with_slack(0, &t, 2, g).is_err());
    }

    #[test]
    fn scales() {
        assert_eq!(scale_of_gap(1), 0);
        assert_eq!(scale_of_gap(2), 0);
        assert_eq!(scale_of_gap(3), 1);
        assert_eq!(scale_of_gap(4), 1);
        assert_eq!(scale_of_gap(5), 2);
        assert_eq!(scale_of_gap(30), 4); // 2^4 <= 30 <= 2^5
                                         // The invariant 2^t <= g <= 2^(t+1) holds for every gap.
        for g in 1..10_000usize {
            let t = scale_of_gap(g);
            assert!((1 << t) <= g && g <= (1 << (t + 1)));
        }
    }

    #[test]
    fn cut_sets_examples() {
        let u = DisjointFamily::new(4, vec![w(&[0, 10, 40, 41])]).unwrap();
        let cs = cut_sets(25, &u, 2).unwrap();
        assert_eq!(cs.buckets[&4].len(), 1);
        assert!(check_cut_index_bounds(&cs, 4));
        let cs = cut_sets(5, &u, 2).unwrap();
        assert!(cs.buckets.is_empty());
        let empty = DisjointFamily::empty(4);
        assert_eq!(cut_sets(7, &empty, 2).unwrap().total(), 0);
        assert_eq!(v_value(7, &empty, 2).unwrap(), BigFrac::new(0, 1));
        // One tuple cut at scale 3 contributes exactly 1/8.
        let u = DisjointFamily::new(2, vec![w(&[0, 9])]).unwrap();
        assert_eq!(v_value(4, &u, 1).unwrap(), BigFrac::new(1, 8));
    }

    #[test]
    fn growing_suffix_identity() {
        let f = Sequence::new((0..64).collect()).unwrap();
        let n = f.n();
        let mut d = BTreeMap::new();
        let mut beta = Frac::new(0, 1);
        for t in 1..=eta(0, n) {
            let s = segment(0, t, n);
            d.insert(t, BTreeSet::from([s.start]));
            beta += Frac::new(1, s.len() as i64);
        }
        let cert = GrowingSuffixCertificate {
            a: 0,
            alpha: Frac::new(1, 1),
            beta,
            d,
        };
        assert!(verify_growing_suffix(&f, &cert));
        // Any inversion across segments must be rejected.
        let g = Sequence::new((0..64).rev().collect()).unwrap();
        assert!(!verify_growing_suffix(&g, &cert));
        // Empty D with beta = 0 is vacuously fine.
        let cert = GrowingSuffixCertificate {
            a: 0,
            alpha: Frac::new(1, 1),
            beta: Frac::new(0, 1),
            d: BTreeMap::new(),
        };
        assert!(verify_growing_suffix(&f, &cert));
    }

    #[test]
    fn splittable_verifier_example() {
        let f = Sequence::new(vec![0, 1, 9, 8, 2, 3]).unwrap();
        let p = SplittablePair {
            interval: 0..6,
            family: DisjointFamily::new(4, vec![w(&[0, 1, 4, 5])]).unwrap(),
            c: 2,
            left: 0..2,
            mid: 2..4,
            right: 4..6,
        };
        assert!(verify_splittable(&f, &p, Frac::new(1, 3), Frac::new(1, 6)));
        // A prefix index inside M fails.
        let mut bad = p.clone();
        bad.left = 0..1;
        bad.mid = 1..4;
        assert!(!verify_splittable(
            &f,
            &bad,
            Frac::new(1, 3),
            Frac::new(1, 6)
        ));
        // Too small a family for the requested beta fails.
        assert!(!verify_splittable(&f, &p, Frac::new(1, 3), Frac::new(1, 2)));
    }

    #[test]
    fn greedy_intervals_empty() {
        let f = Sequence::new(vec![1, 2, 3, 4]).unwrap();
        let v = DisjointFamily::empty(2);
        match greedy_disjoint_intervals(&f, &BTreeSet::new(), 3, &v, 1, 48.0).unwrap() {
            IntervalsOutcome::Collection(c) => assert!(c.is_empty()),
            _ => panic!("expected empty collection"),
        }
    }
}
