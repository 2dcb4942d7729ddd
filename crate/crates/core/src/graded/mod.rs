//! Degrees, boxes, slopes and monomial bases of free graded-commutative algebras.

pub mod degree;
pub mod monomial;
pub mod slope;

pub use degree::{Degree, DegreeBox};
pub use monomial::{dims_of, enumerate_monomials, name_order, truncated_quotient_dims, GeneratorSpec, Monomial, Parity};
pub use slope::{compare_x_order, quantized_slope, SlopeQ};
