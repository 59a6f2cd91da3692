//! Criterion benchmarks for `affred`; see `benches/`.
