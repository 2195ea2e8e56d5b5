//! Cube complexes, their hyperplanes and convex hulls, and an operator-valued
//! cocycle on vertex pairs with its coefficient structure and norm bounds.

mod bits;
pub mod complex;
pub mod hyperplanes;
pub mod cat0;
pub mod hulls;

pub use cat0::{Cat0Complex, Cat0Error};
pub mod cocycle;
pub mod families;
pub mod verify;
