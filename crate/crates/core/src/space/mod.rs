//! Finite windows of symbolic metric spaces and the coarse predicates on
//! them: control, closeness, flasqueness and convexity.

mod ambient;
mod convex;
mod map;
mod window;

pub use ambient::{AmbientSpec, Point};
pub use convex::{check_convex_pair, check_u_convex, Convexity, PairVerdict};
pub use map::{
    certify_flasqueness, check_close, check_controlled_proper, ControlReport, FlasquenessWitness, Properness, Rule,
    SpaceMap,
};
pub use window::{make_window, mask_and, mask_count, mask_not, mask_or, mask_subset, Window};
