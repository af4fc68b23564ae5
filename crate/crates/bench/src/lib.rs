//! Benchmarks for the `multipure` kernels live in `benches/`; run them with
//! `cargo bench -p multipure-bench`.
