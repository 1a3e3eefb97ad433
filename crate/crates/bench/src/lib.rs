//! Criterion benchmarks for the symbreak kernels live in `benches/`.
