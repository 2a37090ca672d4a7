//! Sublinear detection of length-k monotone patterns in integer
//! sequences, with exact oracles, structural decomposition machinery,
//! instance generators, and hardness constructions for validating the
//! sampler end to end.
//!
//! Layout:
//! - [`seq`]: sequences, query-counting oracles, seeded random streams.
//! - [`exact`]: brute-force pattern search, witnesses, disjoint
//!   families, the greedy tuple extractor.
//! - [`structure`]: gap scales, slack cuts, cut-set values, growing
//!   suffixes, splittable collections, the interval sweep.
//! - [`tester`]: the non-adaptive sampler with its two stages and the
//!   recursive interval sampling primitive.
//! - [`hardness`]: bit-flip hard permutations, padding, binary
//!   profiles, and the adversary success bound.
//! - [`instances`]: generators for free, far, and planted inputs with
//!   machine-checkable certificates.

pub mod error;
pub mod exact;
pub mod hardness;
pub mod instances;
pub mod seq;
pub mod structure;
pub mod tester;

pub use error::{Error, Result};
pub use exact::{
    c_gap_partition, find_pattern_exact, find_pattern_in_points, find_pattern_in_subset,
    greedy_disjoint_tuples, maximal_disjoint_family, verify_witness, DisjointFamily,
    PatternWitness,
};
pub use hardness::{
    adversary_success, bin_prof, bin_prof_brute, bit_flip, hard_instance, hard_instance_copies,
    has_profile, msb_diff, pad_instance, prev_power_of_two, rank_relabel,
    verify_copy_profile_equivalence, ProfileSet,
};
pub use instances::{
    decreasing, free_runs, hard_with_certificate, planted_splittable, planted_suffix, spike_comb,
    HardInstance,
};
pub use seq::{non_adaptivity_check, QueryOracle, RandomStream, Sequence};
pub use structure::{
    ceil_log2, check_cut_index_bounds, check_cut_value_order, cut_sets, cuts_with_slack,
    default_gamma, eta, greedy_disjoint_intervals, mean_v_over_pivots, scale_of_gap, segment,
    v_value, verify_growing_suffix, verify_splittable, BigFrac, CutSets, Frac,
    GrowingSuffixCertificate, IntervalsOutcome, SplittablePair,
};
pub use tester::{
    growing_suffix_probe, sample_helper, sample_splittable, sample_suffix, sampler, StageTrace,
    TesterConfig, TesterReport,
};
