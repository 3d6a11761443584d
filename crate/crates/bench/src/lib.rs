//! Criterion benchmarks for cgsieve; see `benches/`.
