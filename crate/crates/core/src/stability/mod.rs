//! Vanishing lines, Smith-Toda quotients, nilpotence and localization tables.

pub mod bounds;
pub mod localize;
pub mod polymodule;
pub mod smith_toda;
pub mod vanishing;

pub use bounds::{range_bounds, BoundParams, BoundResult, HopfQuotientCase};
pub use localize::{cech_localize, telescope_localize, STABILIZATION_WINDOW};
pub use polymodule::{ModuleGenerator, PolyModulePresentation};
pub use smith_toda::{nilpotence_in_box, polymodule_actions, smith_toda_table, ActionTable, Nilpotence};
pub use vanishing::{
    fit_vanishing_line, fit_vanishing_line_with_floor, quantum_candidates, VanishingLine, DEFAULT_KAPPA_FLOOR,
};
