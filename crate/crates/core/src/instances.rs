//! Instance generators: free sequences for soundness runs, planted
//! structures realizing the growing-suffix and splittable definitions,
//! and hard permutations with far-ness certificates.
//!
//! Every generator either is free by construction or returns a
//! certificate (a disjoint family of copies, or a growing-suffix
//! certificate) that the exact oracles can validate.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::exact::{DisjointFamily, PatternWitness};
use crate::hardness::{hard_instance, hard_instance_copies, pad_instance, prev_power_of_two};
use crate::seq::{RandomStream, Sequence};
use crate::structure::{eta, segment, Frac, GrowingSuffixCertificate};

/// The decreasing permutation: free for every k >= 2.
pub fn decreasing(n: usize) -> Sequence {
    Sequence::new((0..n as i64).rev().collect()).unwrap()
}

/// A concatenation of `k - 1` decreasing runs with random boundaries
/// and values: free for pattern length `k`, since an increasing
/// subsequence takes at most one element per run.
pub fn free_runs(n: usize, k: usize, rng: &mut RandomStream) -> Result<Sequence> {
    if k < 2 || n < k {
        return Err(Error::InvalidInput(format!(
            "need n >= k >= 2, got n={n}, k={k}"
        )));
    }
    let runs = k - 1;
    // Random interior boundaries.
    let mut cuts: Vec<usize> = (0..runs - 1).map(|_| rng.random_range(1..n)).collect();
    cuts.push(0);
    cuts.push(n);
    cuts.sort_unstable();
    let mut values: Vec<i64> = (0..n as i64).collect();
    values.shuffle(rng);
    for w in cuts.windows(2) {
        values[w[0]..w[1]].sort_unstable_by(|a, b| b.cmp(a));
    }
    Sequence::new(values)
}

/// Ascending spikes every `m` positions on a high decreasing
/// background.  Patterns of length k need k-1 spikes (plus optionally
/// one trailing background element), so the spikes carry the far-ness.
pub fn spike_comb(n: usize, m: usize) -> Result<Sequence> {
    if m < 2 || n < 2 * m {
        return Err(Error::InvalidInput(format!(
            "need n >= 2m, m >= 2; got n={n}, m={m}"
        )));
    }
    let values = (0..n)
        .map(|x| {
            if x % m == 0 {
                (x / m) as i64
            } else {
                (2 * n - x) as i64
            }
        })
        .collect();
    Sequence::new(values)
}

/// Plants a growing suffix at `a = 0`: every segment from `min_t` up
/// carries an evenly spread subset of density as close to `alpha` as
/// the segment size allows, with values rising across the whole plant;
/// all other positions form a low decreasing background.
///
/// Returns the sequence and a certificate that passes
/// `verify_growing_suffix` (beta is the exact density sum achieved).
pub fn planted_suffix(
    n: usize,
    alpha: Frac,
    min_t: u32,
) -> Result<(Sequence, GrowingSuffixCertificate)> {
    if n < 4 {
        return Err(Error::InvalidInput(
            "n too small for a planted suffix".into(),
        ));
    }
    let mut d: BTreeMap<u32, BTreeSet<usize>> = BTreeMap::new();
    let mut beta = Frac::new(0, 1);
    let mut planted: Vec<usize> = Vec::new();
    for t in min_t..=eta(0, n) {
        let s = segment(0, t, n);
        // floor(alpha * |S_t|) keeps the density at or below alpha.
        let count = (alpha * Frac::new(s.len() as i64, 1)).floor().to_integer() as usize;
        if count == 0 {
            continue;
        }
        let picks: BTreeSet<usize> = (0..count).map(|i| s.start + i * s.len() / count).collect();
        beta += Frac::new(picks.len() as i64, s.len() as i64);
        planted.extend(picks.iter());
        d.insert(t, picks);
    }
    if planted.is_empty() {
        return Err(Error::InvalidInput(
            "alpha too small: nothing planted".into(),
        ));
    }
    let planted_set: BTreeSet<usize> = planted.iter().copied().collect();
    let values = (0..n)
        .map(|x| {
            if planted_set.contains(&x) {
                // Rising with position, above all background values.
                (n + x) as i64
            } else {
                -(x as i64)
            }
        })
        .collect();
    let cert = GrowingSuffixCertificate {
        a: 0,
        alpha,
        beta,
        d,
    };
    Ok((Sequence::new(values)?, cert))
}

/// Builds `blocks` value-stacked blocks, each holding a family of
/// c-gap tuples: consecutive prefixes in the first quarter, consecutive
/// suffixes in the last quarter, and a high decreasing background in
/// between.  Block value bands decrease left to right, so no pattern
/// crosses blocks.
///
/// Returns the sequence and the planted family (all tuples c-gap with
/// the same `c`, gaps at least 2).
pub fn planted_splittable(
    n: usize,
    blocks: usize,
    k0: usize,
    c: usize,
    tuples_per_block: usize,
) -> Result<(Sequence, DisjointFamily)> {
    if k0 < 2 || c < 1 || c >= k0 {
        return Err(Error::InvalidInput(format!("bad k0={k0}, c={c}")));
    }
    if blocks == 0 || !n.is_multiple_of(blocks) {
        return Err(Error::InvalidInput(format!(
            "{blocks} blocks must divide n={n}"
        )));
    }
    let len = n / blocks;
    let quarter = len / 4;
    if quarter < 1
        || tuples_per_block == 0
        || tuples_per_block * c > quarter
        || tuples_per_block * (k0 - c) > quarter
    {
        return Err(Error::InvalidInput(format!(
            "block length {len} too small for {tuples_per_block} length-{k0} tuples"
        )));
    }
    let mut values = vec![0i64; n];
    let mut tuples = Vec::new();
    for b in 0..blocks {
        let s = b * len;
        // Bands decrease across blocks.
        let band = ((blocks - 1 - b) * len) as i64;
        // First quarter: ascending low values (tuple prefixes).
        for off in 0..quarter {
            values[s + off] = band + off as i64;
        }
        // Last quarter: ascending values above every prefix value.
        for off in 0..quarter {
            values[s + len - quarter + off] = band + (quarter + off) as i64;
        }
        // Middle: decreasing background above everything in the block.
        for (i, off) in (quarter..len - quarter).enumerate() {
            values[s + off] = band + (len - 1 - i) as i64;
        }
        for i in 0..tuples_per_block {
            let mut idx: Vec<usize> = (0..c).map(|j| s + i * c + j).collect();
            idx.extend((0..k0 - c).map(|j| s + len - quarter + i * (k0 - c) + j));
            tuples.push(PatternWitness::new(idx)?);
        }
    }
    Ok((Sequence::new(values)?, DisjointFamily::new(k0, tuples)?))
}

/// A hard instance for arbitrary `k >= 2` (padded when `k` is not a
/// power of two), with flip indices drawn from the stream and a
/// certificate of pairwise disjoint (12...k)-copies.
pub struct HardInstance {
    pub seq: Sequence,
    pub certificate: DisjointFamily,
    pub flips: Vec<u32>,
}

pub fn hard_with_certificate(n: usize, k: usize, rng: &mut RandomStream) -> Result<HardInstance> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("k={k} must be >= 2")));
    }
    let h = k.ilog2();
    let kprime = 1usize << h;
    let nprime = prev_power_of_two(n * kprime / k);
    if nprime < kprime {
        return Err(Error::InvalidInput(format!("n={n} too small for k={k}")));
    }
    // A uniformly random strictly increasing h-subset of [1, log2 n'].
    let log_n = nprime.ilog2();
    let mut all: Vec<u32> = (1..=log_n).collect();
    all.shuffle(rng);
    let mut flips: Vec<u32> = all[..h as usize].to_vec();
    flips.sort_unstable();

    let fprime = hard_instance(nprime, &flips)?;
    let copies = hard_instance_copies(nprime, &flips)?;
    let seq = pad_instance(&fprime, n, k)?;
    let certificate = match k - kprime {
        0 => copies,
        t => {
            // Copy j extends with the j-th element of every suffix block;
            // blocks are decreasing but value-stacked ascending, so any
            // one element per block continues the pattern.
            let suffix = n - nprime;
            let (base, extra) = (suffix / t, suffix % t);
            let mut starts = Vec::with_capacity(t);
            let mut pos = nprime;
            for b in 0..t {
                starts.push(pos);
                pos += base + usize::from(b < extra);
            }
            let mut tuples = Vec::new();
            for (j, w) in copies.tuples().iter().enumerate() {
                if j >= base {
                    break; // every block has at least `base` elements
                }
                let mut idx = w.indices().to_vec();
                idx.extend(starts.iter().map(|&s| s + j));
                tuples.push(PatternWitness::new(idx)?);
            }
            DisjointFamily::new(k, tuples)?
        }
    };
    Ok(HardInstance {
        seq,
        certificate,
        flips,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{find_pattern_exact, maximal_disjoint_family};
    use crate::structure::verify_growing_suffix;

    #[test]
    fn free_generators_are_free() {
        let mut rng = RandomStream::new(11);
        for k in 2..=4 {
            for _ in 0..20 {
                let f = free_runs(64, k, &mut rng).unwrap();
                assert!(find_pattern_exact(&f, k).unwrap().is_none());
            }
        }
        assert!(find_pattern_exact(&decreasing(32), 2).unwrap().is_none());
    }

    #[test]
    fn spike_comb_structure() {
        let f = spike_comb(1 << 8, 8).unwrap();
        // Plenty of disjoint triples: two spikes and a background tail.
        let t = maximal_disjoint_family(&f, 3).unwrap();
        assert!(t.len() >= 10, "only {} triples", t.len());
    }

    #[test]
    fn planted_suffix_verifies() {
        let (f, cert) = planted_suffix(1 << 10, Frac::new(1, 16), 5).unwrap();
        assert!(verify_growing_suffix(&f, &cert));
        assert!(cert.beta > Frac::new(0, 1));
    }

    #[test]
    fn planted_splittable_valid() {
        let (f, fam) = planted_splittable(1 << 10, 16, 4, 2, 8).unwrap();
        assert!(fam.validate(&f));
        assert!(fam.tuples().iter().all(|w| w.c_gap().unwrap() == 2));
        // Middle gaps are comfortably above 1.
        assert!(fam.tuples().iter().all(|w| w.gap(2) >= 2));
        // A permutation of [0, n).
        let mut v = f.values().to_vec();
        v.sort_unstable();
        assert_eq!(v, (0..1 << 10).collect::<Vec<i64>>());
    }

    #[test]
    fn hard_certificates_validate() {
        let mut rng = RandomStream::new(3);
        for (n, k) in [(1 << 10, 2), (1 << 10, 4), (12, 3), (3 << 8, 3)] {
            let hi = hard_with_certificate(n, k, &mut rng).unwrap();
            assert_eq!(hi.seq.n(), n);
            assert!(hi.certificate.validate(&hi.seq), "n={n}, k={k}");
            assert_eq!(hi.certificate.k0(), k);
            assert!(!hi.certificate.is_empty());
        }
        // k=2 at a power-of-two n keeps all n/2 copies.
        let hi = hard_with_certificate(1 << 10, 2, &mut rng).unwrap();
        assert_eq!(hi.certificate.len(), 512);
    }
}
