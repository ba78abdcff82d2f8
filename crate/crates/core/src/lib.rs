//! Exact combinatorics, channel simulation and reconstruction for channels
//! that inflict `t` bursts of exactly `b` insertions or deletions.
//!
//! Counts are computed in an exact integer type chosen by the caller (see
//! [`ExactScalar`]); [`ExactCount`] is the arbitrary-precision default.

pub mod balls;
pub mod channel;
pub mod combinatorics;
pub mod error;
pub mod reconstruct;
pub mod scalar;
pub mod sequences;

pub use balls::{
    deletion_witness, enumerate_ball, enumerate_deletion_ball, enumerate_insertion_ball, greedy_is_deletion_descendant,
    intersection, is_deletion_descendant, is_descendant, is_insertion_descendant, max_intersection_exhaustive,
    BallKind, EnumerationCap, MaxIntersection, OutputSet, DEFAULT_CAP,
};
pub use channel::{
    apply_burst_deletion, apply_burst_insertion, sample_distinct_outputs, trial_seed, BurstEvent, ChannelTrace, Sample,
    RNG_ALGORITHM,
};
pub use combinatorics::{
    binom, count_centers_by_radius1_ball_size, del_ball_max, del_ball_max_extended, del_intersection_lower_bound,
    del_intersection_max_binary, ins_ball_size, ins_intersection_max, ins_recurrence_check, sphere_packing_bound,
    ChannelParams, SpherePackingBound, MAX_ALPHABET,
};
pub use error::{Error, Result};
pub use reconstruct::{
    candidate_expansion, classify_first_symbol, deletion_majority_phase, reconstruct_from_deletions,
    reconstruct_from_insertions, ClassifierIndex, FirstSymbolClasses, MajorityPhase, PartialWord, ReconstructionResult,
    StepDiagnostics,
};
pub use scalar::ExactScalar;
pub use sequences::{array_representation, b_cyclic, radius1_del_ball_size, y_sequence, ArrayRepresentation, Sequence};

/// Arbitrary-precision count.
pub type ExactCount = num_bigint::BigUint;
/// Exact rational used for the sphere-packing bound.
pub type ExactRatio = num_rational::Ratio<ExactCount>;
/// Fixed-width count for hot loops; overflow is reported as an error.
pub type WideCount = u128;
