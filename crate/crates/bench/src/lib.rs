//! Shared inputs for the benchmarks.

use linfty_core::{BoundedSeq, Element, SeparableSpace, SubspaceD};

pub fn euclidean(dim: usize) -> SeparableSpace {
    SeparableSpace::finite_dim_lp(dim, 2.0).expect("valid space")
}

pub fn sample(dim: usize) -> Element {
    Element::vector((1..=dim).map(|i| i as f64 - 0.3 * dim as f64).collect::<Vec<_>>())
}

pub fn two_periodic() -> SubspaceD {
    SubspaceD::finite(vec![
        BoundedSeq::periodic(vec![-1.0, 1.0]).expect("pattern"),
        BoundedSeq::periodic(vec![1.0, -1.0, 0.0]).expect("pattern"),
    ])
    .expect("independent")
}
