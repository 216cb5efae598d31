//! Right ideals as lattices, two-sided ideals, splitting maps and random
//! smooth left ideals.

mod ideal;
mod random;
mod splitting;

pub use ideal::{lattice_norm, parse_ideal, RightIdeal, TwoSidedIdeal};
pub use random::{
    choose_exponents, ideal_is_smooth, is_smooth, local_left_ideal, local_right_ideal, random_left_ideal,
    random_prime_norm_ideal, random_singular_upper, smooth_exponents, LeftIdeal,
};
pub use splitting::SplittingMap;
