//! Criterion benchmarks for amalgam-core; see `benches/`.
