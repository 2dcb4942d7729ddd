//! Finite chain models and their homology in a box.

pub mod cdga;
pub mod cobar;
pub mod complex;
pub mod hopf;
pub mod koszul;
pub mod poly;
pub mod table;

pub use cdga::{cdga_homology_box, cdga_homology_box_capped, CdgaPresentation, DEFAULT_MAX_SPOT_DIM};
pub use cobar::{cobar_complex, cotor_box};
pub use complex::{render_vector, ChainComplex, Spot};
pub use hopf::{
    monogenic_cotor_closed, BasisElement, CoproductEntry, ExplicitHopf, FactorKind, HopfData, HopfForm, HopfPresentation,
    MonogenicFactor, ProductEntry,
};
pub use koszul::{koszul_extension, koszul_quotient_box, koszul_quotient_box_capped, KillElement};
pub use poly::{parse_polynomial, FreeAlgebra, Poly, RatPoly};
pub use table::{convolve, BoxTable};
