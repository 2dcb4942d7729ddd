//! Generators of free `E_k`-algebra homotopy and the ordered x-sequence.

pub mod generators;
pub mod words;

pub use generators::{
    e2_below_diagonal_generators, ek_below_diagonal_generators, free_ek_dimension_table, free_ek_presentation,
    generator_words, x_sequence,
    XEntry, XSequence,
};
pub use words::{recompute_degree, Arity, DlOp, LieTerm, OpWord};
