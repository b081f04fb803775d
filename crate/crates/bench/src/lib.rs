//! Benchmarks for linklab live under `benches/`.
