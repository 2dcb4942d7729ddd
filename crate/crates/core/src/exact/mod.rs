//! Exact linear algebra over prime fields and the rationals.

pub mod echelon;
pub mod elim;
pub mod field;
pub mod sparse;
pub mod subquotient;

pub use echelon::{invert, Echelon};
pub use elim::{independent_columns, kernel_basis, rank, RowReduction};
pub use field::{is_prime, Field, FieldSpec, PrimeField, Rationals};
pub use sparse::SparseMatrix;
pub use subquotient::Subquotient;
