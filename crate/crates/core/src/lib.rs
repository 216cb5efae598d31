//! Principal ideal testing in maximal orders of indefinite quaternion algebras over ℚ.
//!
//! The pipeline builds a factor base, collects relations and local reduction
//! tables, then reduces an arbitrary right ideal to a two-sided one using
//! smooth elements and Bruhat–Tits tree reduction. Units are kept in compact
//! form throughout.

// index loops read better than iterator chains in the matrix code
#![allow(clippy::needless_range_loop)]

pub mod arith;
pub mod bttree;
pub mod error;
pub mod ideals;
pub mod linalg;
pub mod localring;
pub mod quat;
pub mod reduction;
pub mod units;

pub use error::{Error, Result};
