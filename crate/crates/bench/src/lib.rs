//! Criterion benchmarks for the operator and metric kernels live in `benches/`.
