//! Criterion benchmarks for the exact kernels; see `benches/kernels.rs`.
//! Run with `cargo bench -p haefliger-bench`.
