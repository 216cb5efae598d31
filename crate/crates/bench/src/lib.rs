//! Benchmarks for the qpip pipeline live in `benches/`.
