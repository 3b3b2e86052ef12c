//! Exact integer linear algebra over arbitrary-precision integers.

mod dense;
mod echelon;
mod group;
mod quotient;
mod sparse;

pub use dense::{smith_normal_form, DenseMatrix, SnfResult};
pub use echelon::{kernel_basis, Echelon, Insert};
pub use group::{is_exact_at, same_lattice, AbelianGroup, GroupHom};
pub use quotient::{cohomology_at, image_membership, Quotient};
pub use sparse::{SparseMatrix, SparseVec};

pub type Int = ibig::IBig;

pub fn int(x: i64) -> Int {
    Int::from(x)
}
