//! Flow equivalence of shifts of finite type and the matching Cuntz–Krieger
//! pair computations, all in exact integer arithmetic.

pub mod aut;
pub mod cylinder;
pub mod error;
pub mod invariants;
pub mod io;
pub mod linalg;
pub mod moves;
pub mod shift;

pub use error::{Error, Result};
pub use linalg::{AbelianGroup, IntMatrix};
pub use shift::{MarkovShift, Word};
