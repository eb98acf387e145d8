//! Benchmark-only crate; see `benches/core.rs`.

use lanpower_core::{ModelSpec, PerturbationSpec};

/// AR(1) null model used by the benchmarks.
pub fn ar1_spec(n: usize) -> ModelSpec {
    ModelSpec::ar1(0.1, PerturbationSpec::reciprocal_quadratic(5.0, 1.0), n)
}

/// ARCH null model used by the benchmarks.
pub fn arch_spec(n: usize) -> ModelSpec {
    let g = PerturbationSpec::reciprocal_quadratic(3.5, 1.0);
    ModelSpec::arch(0.1, g, g, n)
}
