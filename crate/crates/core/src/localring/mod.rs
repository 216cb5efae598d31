//! 2×2 matrices over `ℤ/p^i`: SL₂ normal forms, the matrix Euclidean
//! algorithm and local generators of ideals.

mod generator;
mod mat;

pub use generator::local_generator;
pub use mat::{
    div_mod, divide_matrix, divides, gcd_matrix, gcd_matrix_depth, hermite_sl2, smith_sl2,
    solve_membership, val_mod, LocalMat,
};
