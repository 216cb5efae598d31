//! The algebra `(a,b/ℚ)`, its elements, the form T₂ and maximal orders.

mod algebra;
mod order;

pub use algebra::{parse_rational, QuatAlgebra, QuatElement};
pub use order::{maximal_order, Order};
