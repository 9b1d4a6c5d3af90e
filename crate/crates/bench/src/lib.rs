//! Criterion benchmarks for blowupcalc live in `benches/`.
