//! Benchmarks for `burgers-pinn`; see `benches/training.rs`.
