//! Span-one linked partition ideals and q-multi-summation factorizations.
//!
//! The crate computes generating functions of linked partition ideals three
//! ways (brute-force enumeration, walks on the associated digraph, and the
//! q-difference system), evaluates q-multisums `H(β)`, and searches for
//! binary-tree certificates proving that a vector of multisums satisfies the
//! same kind of q-difference system.
//!
//! All arithmetic is exact over truncated series in `x` and `q`.

// matrix code reads best with explicit indices
#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod error;
pub mod export;
pub mod ideal;
pub mod multisum;
pub mod partition;
pub mod prover;
pub mod qdiff;
pub mod series;

pub use error::Error;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/series.md")]
    mod series {}
    #[doc = include_str!("../../../book/src/ideals.md")]
    mod ideals {}
    #[doc = include_str!("../../../book/src/qdiff.md")]
    mod qdiff {}
    #[doc = include_str!("../../../book/src/multisums.md")]
    mod multisums {}
    #[doc = include_str!("../../../book/src/certificates.md")]
    mod certificates {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
