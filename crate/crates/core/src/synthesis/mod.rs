//! Coefficient fields: dense storage, the saturating function and its
//! probe generators, random members, combinations and seminorms.

mod field;
mod random;
mod saturating;
mod seminorm;

pub use field::{
    combine, orientation_bits, CoefficientField, CoefficientSource, LinearCombination, DENSE_ENTRY_LIMIT,
};
pub use random::RandomMember;
pub use saturating::{level_scale, probe_fields, SaturatingField};
pub use seminorm::{lp_norm, seminorm, SeminormProfile};
