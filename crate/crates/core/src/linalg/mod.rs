//! Rank-4 integer lattices: HNF, duals and intersections, exact quadratic
//! forms, LLL and Fincke–Pohst enumeration; Smith forms for the relation matrix.

mod enumerate;
mod gram;
mod lattice;
mod lll;
mod snf;

pub use enumerate::{Cholesky, Enumerator};
pub use gram::{big_to_f64, sign_quad, GramForm, QuadKey};
pub use lattice::{hnf_rows, zero4, IntLattice, Vec4};
pub use lll::{coordinate_form, is_lll_reduced, lll_gram, lll_reduce, lll_reduce_basis, LatticeBasis};
pub use snf::{det, identity, kernel_mod_p, mat_mul, smith, solve_left, transpose, Matrix, Smith};

use crate::error::Result;
use num_bigint::BigInt;

/// HNF lattice generated by integer rows over `den`.
pub fn hnf_from_generators(rows: &[Vec4], den: &BigInt) -> Result<IntLattice> {
    IntLattice::from_generators(rows, den)
}

pub fn lattice_intersect(a: &IntLattice, b: &IntLattice) -> IntLattice {
    a.intersect(b)
}
