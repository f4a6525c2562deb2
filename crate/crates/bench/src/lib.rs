//! Criterion benchmarks for the topicrec pipeline live in `benches/`.
