//! Criterion benchmarks for the deltaconf pipeline. See `benches/pipeline.rs`.
