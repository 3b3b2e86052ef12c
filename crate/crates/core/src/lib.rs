pub mod catalog;
pub mod cohomology;
pub mod complex;
pub mod error;
pub mod pairing;
pub mod rips;
pub mod snf;
pub mod variation;
pub mod verification;
pub mod space;

pub use error::{Error, Result};
