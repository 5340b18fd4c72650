//! Criterion benchmarks for the encoder, decoders and analytic evaluators.
//! Run with `cargo bench -p oss-bench`.
