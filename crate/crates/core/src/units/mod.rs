//! Units of quadratic suborders, compact representations and the tree tables.

mod compact;
mod p1search;
mod pbuild;
mod quadratic;

pub use compact::CompactRep;
pub use p1search::{bfs_words, is_transitive, orbit, p1search, DEFAULT_SEARCH_BUDGET};
pub use pbuild::{pbuild, pbuild_with_budget, pstructure_from_generators};
pub use quadratic::{element_denominator, PrimeType, QuadElem, QuadraticContext};
