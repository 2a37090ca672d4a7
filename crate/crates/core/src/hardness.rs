//! The lower-bound machinery: bit-flip permutations, hard instances,
//! padding to general `n` and `k`, binary h-profiles, and adversary
//! scoring of non-adaptive query sets.
//!
//! Throughout, the domain is `[0, n)` with `n` a power of two, and bit
//! positions are 1-indexed from the least significant bit, matching the
//! binary representation `t = b1*2^0 + b2*2^1 + ...`.

use std::collections::BTreeSet;

use num_integer::binomial;
use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::exact::{DisjointFamily, PatternWitness};
use crate::seq::Sequence;

/// `M(x, y)`: the 1-indexed position of the most significant bit in
/// which `x` and `y` differ.
pub fn msb_diff(x: usize, y: usize) -> Result<u32> {
    if x == y {
        return Err(Error::InvalidInput(format!(
            "M({x},{y}) undefined for equal arguments"
        )));
    }
    Ok((x ^ y).ilog2() + 1)
}

/// `F_i(t)`: flips bit `i` of `t`.  Involutive permutation of `[0, n)`.
pub fn bit_flip(t: usize, i: u32, n: usize) -> Result<usize> {
    check_power_of_two(n)?;
    if i < 1 || i > n.ilog2() {
        return Err(Error::InvalidInput(format!(
            "bit position {i} out of range [1, {}]",
            n.ilog2()
        )));
    }
    if t >= n {
        return Err(Error::IndexOutOfRange { index: t, n });
    }
    Ok(t ^ (1 << (i - 1)))
}

fn check_power_of_two(n: usize) -> Result<()> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::InvalidInput(format!("n={n} is not a power of two")));
    }
    Ok(())
}

fn check_flip_indices(n: usize, flips: &[u32]) -> Result<()> {
    check_power_of_two(n)?;
    let log_n = n.ilog2();
    if !flips.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidInput(format!(
            "flip indices {flips:?} not strictly increasing"
        )));
    }
    if flips.iter().any(|&i| i < 1 || i > log_n) {
        return Err(Error::InvalidInput(format!(
            "flip indices {flips:?} outside [1, {log_n}]"
        )));
    }
    Ok(())
}

/// The hard permutation: the decreasing permutation composed with the
/// given bit flips.  A pair `x < y` is a (12)-copy exactly when
/// `M(x, y)` is one of the flip indices, which makes the instance
/// `1/(2k)`-far from free while keeping every copy "hidden" at the bit
/// scales `i1..ih`.
pub fn hard_instance(n: usize, flips: &[u32]) -> Result<Sequence> {
    check_flip_indices(n, flips)?;
    let mask: usize = flips.iter().map(|&i| 1usize << (i - 1)).sum();
    // All flips commute, so the composition is one XOR; then reverse.
    let values = (0..n).map(|x| (n - 1 - (x ^ mask)) as i64).collect();
    Sequence::new(values)
}

/// The canonical disjoint copies of a hard instance: each equivalence
/// class of indices agreeing outside the flip bits, sorted, is one
/// (12...k')-copy with `k' = 2^h`, and there are exactly `n / k'`
/// classes.
pub fn hard_instance_copies(n: usize, flips: &[u32]) -> Result<DisjointFamily> {
    check_flip_indices(n, flips)?;
    let mask: usize = flips.iter().map(|&i| 1usize << (i - 1)).sum();
    let k = 1usize << flips.len();
    let mut tuples = Vec::with_capacity(n / k);
    for base in 0..n {
        if base & mask != 0 {
            continue;
        }
        // Enumerate the class {base ^ s : s subset of mask} in sorted
        // index order by iterating subsets of the mask.
        let mut members: Vec<usize> = Vec::with_capacity(k);
        let mut s = 0usize;
        loop {
            members.push(base | s);
            if s == mask {
                break;
            }
            s = (s.wrapping_sub(mask)) & mask;
        }
        members.sort_unstable();
        tuples.push(PatternWitness::new(members)?);
    }
    DisjointFamily::new(k, tuples)
}

/// Pads a hard instance on `n'` points (with `k' = 2^h` and
/// `n' = ` largest power of two `<= n*k'/k`) up to `n` points for a
/// general target `k = k' + t`: the suffix is split into `t` decreasing
/// blocks, value-stacked above the prefix and above each other.  The
/// result is a permutation of `[0, n)`.
pub fn pad_instance(fprime: &Sequence, n: usize, k: usize) -> Result<Sequence> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("k={k} must be >= 2")));
    }
    let h = k.ilog2();
    let kprime = 1usize << h;
    let t = k - kprime;
    let nprime_expected = prev_power_of_two(n * kprime / k);
    if fprime.n() != nprime_expected {
        return Err(Error::InvalidInput(format!(
            "prefix has {} points, expected n'={nprime_expected} for n={n}, k={k}",
            fprime.n()
        )));
    }
    let nprime = fprime.n();
    if t == 0 {
        if n != nprime {
            return Err(Error::InvalidInput(format!(
                "k={k} is a power of two; padding needs n={n} equal to n'={nprime}"
            )));
        }
        return Sequence::new(fprime.values().to_vec());
    }
    let suffix = n - nprime;
    let (base, extra) = (suffix / t, suffix % t);
    if base < nprime / kprime {
        return Err(Error::InvalidInput(format!(
            "suffix too short: blocks of {base} < n'/k' = {}",
            nprime / kprime
        )));
    }
    // Prefix keeps the order of f'; block b occupies the value band
    // directly above block b-1 and is decreasing inside.
    let mut values: Vec<i64> = fprime.values().to_vec();
    let mut band_base = nprime as i64;
    for b in 0..t {
        let len = base + usize::from(b < extra);
        for off in 0..len {
            values.push(band_base + (len - 1 - off) as i64);
        }
        band_base += len as i64;
    }
    // Already a permutation; rank-relabel anyway to keep the contract
    // independent of the construction above.
    Sequence::new(rank_relabel(&values))
}

/// Largest power of two `<= m`.
pub fn prev_power_of_two(m: usize) -> usize {
    debug_assert!(m >= 1);
    1usize << m.ilog2()
}

/// Replaces values by their ranks, yielding a permutation of `[0, n)`.
/// Ties are broken by position, preserving order-isomorphism for
/// tie-free inputs.
pub fn rank_relabel(values: &[i64]) -> Vec<i64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by_key(|&i| (values[i], i));
    let mut out = vec![0i64; values.len()];
    for (rank, &i) in order.iter().enumerate() {
        out[i] = rank as i64;
    }
    out
}

/// True iff the sorted tuple's consecutive most-significant-difference
/// sequence follows the recursive profile pattern: for a `2^h`-tuple,
/// `M(x_j, x_{j+1}) = i_{M(j-1, j)}` for every `j` in `[k-1]`.
pub fn has_profile(tuple: &[usize], profile: &[u32]) -> Result<bool> {
    let h = profile.len();
    let k = tuple.len();
    if k != (1usize << h) {
        return Err(Error::InvalidInput(format!(
            "tuple length {k} is not 2^{h}"
        )));
    }
    if !tuple.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidInput(
            "tuple must be sorted and distinct".into(),
        ));
    }
    for j in 1..k {
        // M(j-1, j) over the positions is a value in [1, h].
        let slot = msb_diff(j - 1, j)?;
        if msb_diff(tuple[j - 1], tuple[j])? != profile[(slot - 1) as usize] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The set of captured binary h-profiles of a query set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileSet {
    pub h: usize,
    pub profiles: BTreeSet<Vec<u32>>,
}

impl ProfileSet {
    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }
}

/// Computes `bin-prof_h(Q)`: every profile `(i1 < ... < ih)` realized
/// by some `2^h`-subset of `Q`.  Uses a pair scan for `h = 1` and the
/// recursive chain decomposition for larger `h`; the brute-force
/// backend [`bin_prof_brute`] is the cross-check.
pub fn bin_prof(q: &BTreeSet<usize>, h: usize, n: usize) -> Result<ProfileSet> {
    check_power_of_two(n)?;
    if let Some(&max) = q.iter().next_back() {
        if max >= n {
            return Err(Error::IndexOutOfRange { index: max, n });
        }
    }
    let sorted: Vec<usize> = q.iter().copied().collect();
    Ok(ProfileSet {
        h,
        profiles: bin_prof_rec(&sorted, h, n.ilog2()),
    })
}

fn bin_prof_pairs(q: &[usize]) -> BTreeSet<Vec<u32>> {
    let mut out = BTreeSet::new();
    for (x, &a) in q.iter().enumerate() {
        for &b in &q[x + 1..] {
            out.insert(vec![msb_diff(a, b).unwrap()]);
        }
    }
    out
}

/// Recursive backend via chain decomposition: build the
/// chain `B_{log n + 1} = {}` up to `B_1 = Q` where `B_i` is a maximal
/// subset containing `B_{i+1}` with no two elements differing first at
/// a bit below `i` (greedy left-to-right choice), then recurse on each
/// difference layer `B_i \ B_{i+1}`.
fn bin_prof_rec(q: &[usize], h: usize, log_n: u32) -> BTreeSet<Vec<u32>> {
    if h == 0 || q.len() < (1usize << h) {
        return BTreeSet::new();
    }
    if h == 1 {
        return bin_prof_pairs(q);
    }
    // chain[i-1] = B_i as a sorted vector; membership in B_i means a
    // unique prefix x >> (i-1) among the kept elements.
    let mut chain: Vec<Vec<usize>> = vec![Vec::new(); (log_n + 2) as usize];
    for i in (1..=log_n).rev() {
        let mut kept: Vec<usize> = chain[(i + 1) as usize].clone();
        let mut prefixes: BTreeSet<usize> = kept.iter().map(|&x| x >> (i - 1)).collect();
        for &x in q {
            if prefixes.insert(x >> (i - 1)) {
                kept.push(x);
            }
        }
        kept.sort_unstable();
        chain[i as usize] = kept;
    }
    let mut out = BTreeSet::new();
    for i in 1..=log_n {
        let b_i = &chain[i as usize];
        let b_next: BTreeSet<usize> = chain[(i + 1) as usize].iter().copied().collect();
        let layer: Vec<usize> = b_i
            .iter()
            .copied()
            .filter(|x| !b_next.contains(x))
            .collect();
        for tail in bin_prof_rec(&layer, h - 1, log_n) {
            if tail[0] > i {
                let mut p = Vec::with_capacity(h);
                p.push(i);
                p.extend(tail);
                out.insert(p);
            }
        }
    }
    out
}

/// Brute-force backend: direct enumeration.  `h = 1` scans pairs;
/// `h = 2` scans pairs of equal-`M` pairs joined by a higher bridge
/// bit, which is exhaustive over 4-tuples.  Larger `h` is out of desk
/// range.
pub fn bin_prof_brute(q: &BTreeSet<usize>, h: usize, n: usize) -> Result<ProfileSet> {
    check_power_of_two(n)?;
    let sorted: Vec<usize> = q.iter().copied().collect();
    let profiles = match h {
        1 => bin_prof_pairs(&sorted),
        2 => {
            // Group pairs by their M value.
            let log_n = n.ilog2() as usize;
            let mut by_m: Vec<Vec<(usize, usize)>> = vec![Vec::new(); log_n + 1];
            for (x, &a) in sorted.iter().enumerate() {
                for &b in &sorted[x + 1..] {
                    by_m[msb_diff(a, b)? as usize].push((a, b));
                }
            }
            let mut out = BTreeSet::new();
            for (i1, pairs) in by_m.iter().enumerate() {
                for p in pairs {
                    for s in pairs {
                        if p.1 < s.0 {
                            let bridge = msb_diff(p.1, s.0)?;
                            if bridge as usize > i1 {
                                out.insert(vec![i1 as u32, bridge]);
                            }
                        }
                    }
                }
            }
            out
        }
        _ => {
            return Err(Error::InvalidInput(format!(
                "brute-force bin-prof supports h in {{1, 2}}, got {h}"
            )))
        }
    };
    Ok(ProfileSet { h, profiles })
}

/// The adversary's exact success probability against the uniform hard
/// distribution: `|bin-prof_h(Q)| / binomial(log2 n, h)`.
pub fn adversary_success(q: &BTreeSet<usize>, n: usize, k: usize) -> Result<Ratio<u64>> {
    check_power_of_two(n)?;
    if k < 2 || !k.is_power_of_two() {
        return Err(Error::InvalidInput(format!(
            "k={k} must be a power of two >= 2"
        )));
    }
    let h = k.ilog2() as usize;
    let prof = bin_prof(q, h, n)?;
    let denom = binomial(n.ilog2() as u64, h as u64);
    Ok(Ratio::new(prof.len() as u64, denom))
}

/// Exhaustively checks, over every sorted k-tuple of `[0, n)`, that
/// being a (12...k)-copy of the hard instance coincides with having the
/// flip-index profile, and that the LIS length is exactly `k`.
pub fn verify_copy_profile_equivalence(n: usize, flips: &[u32]) -> Result<bool> {
    let f = hard_instance(n, flips)?;
    let k = 1usize << flips.len();
    match k {
        2 => {
            for x in 0..n {
                for y in x + 1..n {
                    let copy = f.value(x) < f.value(y);
                    if copy != (msb_diff(x, y)? == flips[0]) {
                        return Ok(false);
                    }
                }
            }
        }
        4 => {
            let (i1, i2) = (flips[0], flips[1]);
            for x1 in 0..n {
                for x2 in x1 + 1..n {
                    let inc12 = f.value(x1) < f.value(x2);
                    let m12 = msb_diff(x1, x2)?;
                    // Neither a partial copy nor a partial profile:
                    // every completion agrees (both false).
                    if !inc12 && m12 != i1 {
                        continue;
                    }
                    for x3 in x2 + 1..n {
                        let inc23 = inc12 && f.value(x2) < f.value(x3);
                        let pro23 = m12 == i1 && msb_diff(x2, x3)? == i2;
                        if !inc23 && !pro23 {
                            continue;
                        }
                        for x4 in x3 + 1..n {
                            let copy = inc23 && f.value(x3) < f.value(x4);
                            let prof = pro23 && msb_diff(x3, x4)? == i1;
                            if copy != prof {
                                return Ok(false);
                            }
                        }
                    }
                }
            }
        }
        _ => {
            return Err(Error::InvalidInput(format!(
                "exhaustive equivalence supports k in {{2, 4}}, got {k}"
            )))
        }
    }
    // The instance holds a length-k pattern but no length-(k+1) one.
    Ok(crate::exact::find_pattern_exact(&f, k)?.is_some()
        && crate::exact::find_pattern_exact(&f, k + 1)?.is_none())
}
