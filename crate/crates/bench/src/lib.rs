//! Inputs shared by the benchmarks.

use std::sync::Arc;

use hopf_cyclic::catalog::{cyclic_group_algebra, sweedler, translation_module_algebra};
use hopf_cyclic::cupprod::CupContext;
use hopf_cyclic::hopf::ModularPair;
use hopf_cyclic::symmetry::{mpi_coefficients, CoalgebraAction};

pub fn group_pair(n: usize) -> ModularPair {
    ModularPair::trivial(Arc::new(cyclic_group_algebra(n)))
}

pub fn sweedler_pair() -> ModularPair {
    let h = Arc::new(sweedler());
    let sign = hopf_cyclic::catalog::sign_character(&h);
    let one = hopf_cyclic::catalog::element(&h, "1");
    ModularPair::new(h, sign, one)
}

/// `Z/n` translating `n` points, trivial coefficients.
pub fn translation_context(n: usize, n_max: usize) -> CupContext {
    let mp = group_pair(n);
    let ma = translation_module_algebra(&mp.hopf, n);
    CupContext::coalgebra(CoalgebraAction::regular(ma), mpi_coefficients(&mp), n_max).expect("valid fixture")
}
