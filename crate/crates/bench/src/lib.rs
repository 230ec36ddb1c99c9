//! Criterion benchmarks for sigma-core; see `benches/`.
