//! Complexity measures of binary sequences: maximum-order complexity, 2-adic
//! complexity (periodic and N-th), linear complexity, correlation measure and
//! expansion complexity, together with generators for the standard sequence
//! families and verifiers relating the measures.

pub mod adic;
pub mod generators;
pub mod maxorder;
pub mod measures;
pub mod numtheory;
pub mod relations;
pub mod seqcore;
pub mod seqspec;

pub use num_bigint::{BigInt, BigUint};

pub use seqcore::{PeriodicSequence, Profile, RationalRep, Word};

pub(crate) fn ser_display<T: std::fmt::Display, S: serde::Serializer>(
    value: &T,
    serializer: S,
) -> Result<S::Ok, S::Error> {
    serializer.collect_str(value)
}
