//! Exact bigraded homological algebra at desk scale.
//!
//! The crate computes dimension tables of bigraded homotopy groups `π_{n,d}`
//! inside finite boxes of degrees: homology of presented commutative dg
//! algebras, Cotor of graded Hopf algebras through the normalized cobar
//! complex, spectral sequences of filtered complexes with their τ-module
//! structure, Smith-Toda quotients, vanishing lines and localization tables.
//!
//! All arithmetic is exact, over a prime field or the rationals.

pub mod chain;
pub mod error;
pub mod exact;
pub mod graded;
pub mod operations;
pub mod spectral;
pub mod stability;

pub use error::{Diagnostic, Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/degrees.md")]
    mod degrees {}
    #[doc = include_str!("../../../book/src/exact.md")]
    mod exact {}
    #[doc = include_str!("../../../book/src/chain.md")]
    mod chain {}
    #[doc = include_str!("../../../book/src/operations.md")]
    mod operations {}
    #[doc = include_str!("../../../book/src/spectral.md")]
    mod spectral {}
    #[doc = include_str!("../../../book/src/stability.md")]
    mod stability {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
