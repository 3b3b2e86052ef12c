//! Executable checks of the four structural properties of coarse cohomology:
//! homotopy invariance, excision, vanishing on flasques and additivity.

mod additivity;
mod mv;
mod prism;
mod swindle;

pub use additivity::{additivity_check, AdditivityReport};
pub use mv::{mv_check, BigFamily, ComplementaryPair, LesSpot, MvReport, ProInverseCheck};
pub use prism::{check_prism_identity, prism_homotopy, PrismCheck};
pub use swindle::{cochain_from_values, delta, swindle_apply, SwindleResult};
