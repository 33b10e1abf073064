//! Criterion benchmarks for simulation and optimization; see `benches/`.
