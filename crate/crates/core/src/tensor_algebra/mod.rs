//! The truncated tensor algebra `T^M(R^d)`.
//!
//! Tensors are immutable values in practice: every operation returns a new
//! tensor, and the few `_in_place` helpers exist for hot loops.

mod domination;
mod ops;
mod truncated;
mod word;

pub use domination::{dominated_by, dominates, DominationReport, DominationWitness, WitnessSide, DOMINATION_SLACK};
pub use ops::{
    concat_mul, concat_pow, linear_combine, pair, pair_by_level, project, resolvent, shuffle_exp, shuffle_mul,
    shuffle_pow,
};
pub use truncated::TruncatedTensor;
pub use word::{Alphabet, Word};

