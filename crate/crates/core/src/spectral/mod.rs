//! Spectral sequences of filtered complexes, `tau`-module structure and
//! survival of classes.

pub mod filtered;
pub mod pages;
pub mod survival;
pub mod tau;

pub use filtered::{aug_filtered_cobar, FilteredComplex};
pub use pages::{compute_page, compute_pages, infinity_page, DifferentialSummary, GroupDim, Page, PageSummary};
pub use survival::{survival_analysis, trace_class, PowerSurvival, Survival};
pub use tau::{tau_modules, TauModule, TauModuleTable};
