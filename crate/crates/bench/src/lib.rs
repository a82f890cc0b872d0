//! Benchmarks only. See `benches/`.
