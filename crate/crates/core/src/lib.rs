//! Collatz permutations and their types.
//!
//! Starting from `x`, the Collatz iterates up to the first power of two form
//! a *trace*; replacing each element by its rank gives the permutation
//! `C(x)`. The up/down pattern of a trace is its *type*. This crate
//! reconstructs traces of a given type backwards from a power of two,
//! solves the resulting congruence for the witness exponents, decides from
//! the exact geometry of the reconstruction lines whether a type yields one
//! or two permutations, and counts Collatz permutations by length.
//!
//! ```
//! use collatz_perm::{collatz_perm, classify, DEFAULT_GUARD};
//! use num_bigint::BigUint;
//!
//! let p = collatz_perm(&BigUint::from(12u32), DEFAULT_GUARD).unwrap();
//! assert_eq!(p.to_string(), "5 3 1 4 2");
//!
//! let c = classify(&"uddudududduddd".parse().unwrap()).unwrap();
//! assert_eq!(c.perm_count, 2);
//! ```

pub mod affine;
pub mod census;
pub mod collatz;
pub mod error;
pub mod geometry;
pub mod par;
pub mod sigma;
pub mod witness;

pub use affine::{
    congruence, sigma_to_affine, suffix_lines, AffineForm, Congruence, LineFamily, PrefixState,
};
pub use census::{
    brute_force_census, c_residue_report, census, census_with, check_prepend_closure, classify,
    et_list, CensusOptions, CensusRow, Classification, EtRecord, MAX_CENSUS_LENGTH,
};
pub use collatz::{
    collatz_perm, collatz_step, rank_permutation, trace, trace_type, type_from_permutation,
    Permutation, Trace, DEFAULT_GUARD,
};
pub use error::{Error, Result};
pub use geometry::{
    asymptotic_permutation, crude_abscissa_bound, intersection, max_intersection_abscissa,
    permutation_at, Rational,
};
pub use par::Exec;
pub use sigma::{enumerate_types, fibonacci, validate_type, Letter, TraceType};
pub use witness::{
    discrete_log_pow2, first_valid_witness, start_value, validate_witness, witness_schedule,
    WitnessReport, WitnessSchedule, DEFAULT_WITNESS_CAP,
};
