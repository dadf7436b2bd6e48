//! Criterion benchmarks for `arw-core`; see `benches/`.
