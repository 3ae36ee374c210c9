//! Criterion benchmarks for `friendrec-core`; see `benches/`.
