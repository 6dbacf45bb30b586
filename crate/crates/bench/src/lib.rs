//! Criterion benchmarks for the perturbation solvers live in `benches/`.
