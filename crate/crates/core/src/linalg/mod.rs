//! Exact integer linear algebra: products, determinants, Smith normal form
//! and cokernels.

mod det;
mod group;
mod matrix;
mod snf;

pub use det::det;
pub use group::{cokernel, AbelianGroup, CokernelMap};
pub use matrix::IntMatrix;
pub use snf::{smith_normal_form, SnfResult};
