//! Benchmarks for symbolic and sampling routines; see `benches/`.
