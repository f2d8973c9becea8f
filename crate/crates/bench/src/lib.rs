//! Criterion benchmarks for `fiedcmg`; the targets live in `benches/`.
