//! Benchmarks for lcakit live under `benches/`.
