//! Criterion benchmarks for `nvforce`; see `benches/`.
