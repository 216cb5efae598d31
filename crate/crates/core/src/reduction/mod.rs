//! Factor base, relation collection and the principal ideal solver.

mod factor_base;
mod gbuild;
mod greduce;
mod serialize;
mod solve;

pub use factor_base::{build_factor_base, default_bound, subexp_l, FactorBase};
pub use gbuild::{gbuild, BuildConfig, GReductionStructure, Relation};
pub use serialize::{from_text, to_text};
pub use greduce::{greduce, solve_exponents, GReduceOutput};
pub use solve::{
    is_principal_attempt, naive_generator, principal_generator, verify_generator, Solution, SolveCertificate,
    SolveConfig, DEFAULT_EXPAND_DIGITS,
};
