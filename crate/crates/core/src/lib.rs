//! Close pairs of points on the modular hyperbola `xy = c (mod p)`.
//!
//! The crate decides when two points of the hyperbola sit at offset
//! `(h, k)`, recovers those points, searches for the smallest offsets under
//! restrictions on `h` and `k` (primes, squarefree, smooth numbers, ...),
//! and evaluates the character sums that govern such existence questions.
//!
//! ```
//! use modhyp::{criterion, recover_pairs, HyperbolaParams};
//!
//! let params = HyperbolaParams::from_raw(7, 1)?;
//! assert_eq!(criterion(&params, 1u64, 1u64)?, 1);
//! let pairs = recover_pairs(&params, 1u64, 1u64)?;
//! assert_eq!((pairs[0].first.x, pairs[0].first.y), (2, 4));
//! assert_eq!((pairs[0].second.x, pairs[0].second.y), (3, 5));
//! # Ok::<(), modhyp::Error>(())
//! ```
//!
//! The guide under `book/` walks through each module; its code listings are
//! compiled and run as doc-tests of this crate.

pub mod arith;
pub mod charsums;
mod error;
pub mod hyperbola;
pub mod poly;
pub mod search;
pub mod sets;

pub use arith::{
    is_prime, least_nonresidue, legendre, mod_inverse, primes_up_to, sqrt_mod, IntoResidue,
    PrimeModulus, Residue,
};
pub use charsums::{
    complete_char_sum, double_sum, exponent_condition, second_moment_w, sigma_count,
    triple_sum_s, triple_sum_via_weights, weight_w, CharSumResult, DoubleSumReport,
    ExponentCheck, ExponentRegime, TripleSumConfig,
};
pub use error::{Error, Result};
pub use hyperbola::{
    box_count, box_pair_exists, criterion, enumerate_points, recover_pairs, HyperbolaParams,
    HyperbolaPoint, PairWitness, Square,
};
pub use poly::Poly;
pub use search::{
    minimal_positive_offset, restricted_pair_search, scan_primes, theorem1_witness_search,
    verify_theorem1_claim, widening_search, CSelection, PairConstraint, ParameterSchedule,
    RunLength, ScanRow, ScanTask, ScheduleKind, SearchReport, Theorem1Witness,
};
pub use sets::{density_report, is_member, members, DensityReport, DistanceSetSpec};

/// The guide's chapters, compiled so their listings run as doc-tests.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/arithmetic.md")]
    pub mod arithmetic {}
    #[doc = include_str!("../../../book/src/criterion.md")]
    pub mod criterion {}
    #[doc = include_str!("../../../book/src/distance-sets.md")]
    pub mod distance_sets {}
    #[doc = include_str!("../../../book/src/searches.md")]
    pub mod searches {}
    #[doc = include_str!("../../../book/src/character-sums.md")]
    pub mod character_sums {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
