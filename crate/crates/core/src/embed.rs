//! The interleaved embedding `T(x) = (φ_1(x), −φ_1(x), φ_2(x), −φ_2(x), …)`
//! and its finite-truncation certificates.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Exhausted, Result};
use crate::seq::{BoundedSeq, SeqTag};
use crate::spaces::{Element, SeparableSpace};
use crate::witness::OscillationWitness;

/// Tolerance for the defect-interval contract.
pub const DEFECT_TOL: f64 = 1e-9;

/// The functional rule `ψ_{2k−1} = φ_k`, `ψ_{2k} = −φ_k` over a space.
#[derive(Clone, Debug)]
pub struct Embedding {
    space: Arc<SeparableSpace>,
}

impl Embedding {
    pub fn new(space: SeparableSpace) -> Self {
        Self {
            space: Arc::new(space),
        }
    }

    pub fn space(&self) -> &SeparableSpace {
        &self.space
    }

    /// `(sign, k)` such that `ψ_n = sign · φ_k`.
    pub fn psi(n: usize) -> Result<(f64, usize)> {
        if n == 0 {
            return Err(Error::IndexZero);
        }
        let k = n.div_ceil(2);
        Ok((if n % 2 == 1 { 1.0 } else { -1.0 }, k))
    }

    pub fn image(&self, x: &Element) -> Result<BoundedSeq> {
        let bound = self.space.norm(x)?;
        let space = Arc::clone(&self.space);
        let point = x.clone();
        BoundedSeq::tagged(
            bound,
            SeqTag::FunctionalImage {
                space: space.label(),
                element: x.short(),
                scheme: None,
            },
            move |n| {
                let k = n.div_ceil(2);
                let v = space.functional_at(k).eval(&point).expect("checked element");
                if n % 2 == 1 {
                    v
                } else {
                    -v
                }
            },
        )
    }
}

pub fn embed_t1(space: &SeparableSpace, x: &Element) -> Result<BoundedSeq> {
    Embedding::new(space.clone()).image(x)
}

/// Finite-truncation isometry certificate: `lower ≤ achieved ≤ upper`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsometryDefect {
    pub lower: f64,
    pub achieved: f64,
    pub upper: f64,
}

impl IsometryDefect {
    pub fn holds(&self) -> bool {
        self.lower - DEFECT_TOL <= self.achieved && self.achieved <= self.upper + DEFECT_TOL
    }

    /// `(upper − achieved) / upper`.
    pub fn relative_defect(&self) -> f64 {
        if self.upper == 0.0 {
            0.0
        } else {
            (self.upper - self.achieved) / self.upper
        }
    }
}

/// Compares `sup_{n ≤ 2K} |T(x)_n|` against `‖x‖` and `‖x‖(1 − d_K(x/‖x‖))`.
pub fn isometry_defect(space: &SeparableSpace, x: &Element, max_k: usize) -> Result<IsometryDefect> {
    if max_k == 0 {
        return Err(Error::IndexZero);
    }
    let upper = space.norm(x)?;
    if upper == 0.0 {
        return Err(Error::ZeroElement);
    }
    let image = embed_t1(space, x)?;
    let achieved = image.prefix_sup(2 * max_k)?;
    let v = x.scaled(1.0 / upper);
    let dist = space.net_distance(&v, max_k)?;
    Ok(IsometryDefect {
        lower: upper * (1.0 - dist),
        achieved,
        upper,
    })
}

/// Net indices `k ≤ budget` with `‖v − u_k‖ ≤ eps`, in enumeration order.
pub(crate) struct NearScan<'a> {
    space: &'a SeparableSpace,
    v: Element,
    eps: f64,
    next: usize,
    budget: usize,
}

impl<'a> NearScan<'a> {
    pub(crate) fn new(space: &'a SeparableSpace, unit: Element, eps: f64, budget: usize) -> Self {
        Self {
            space,
            v: unit,
            eps,
            next: 1,
            budget,
        }
    }
}

impl Iterator for NearScan<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        while self.next <= self.budget {
            let k = self.next;
            self.next += 1;
            if self.space.distance_unchecked(&self.v, &self.space.unit_at(k)) <= self.eps {
                return Some(k);
            }
        }
        None
    }
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid("epsilon", format!("{eps} must lie in (0, 1)")))
    }
}

/// Certifies that `T(x)` has two clusters near `±‖x‖`.
///
/// Scans net indices in order and keeps each `k` with `‖x/‖x‖ − u_k‖ ≤ eps`;
/// the coordinates `2k − 1` then lie above `‖x‖(1 − eps)` and `2k` below its
/// negative.
pub fn oscillation_witness(
    space: &SeparableSpace,
    x: &Element,
    eps: f64,
    count: usize,
    scan_budget: usize,
) -> Result<OscillationWitness> {
    check_eps(eps)?;
    if count == 0 {
        return Err(Error::invalid("count", "must be at least 1"));
    }
    let norm = space.norm(x)?;
    if norm == 0.0 {
        return Err(Error::ZeroElement);
    }
    let image = embed_t1(space, x)?;
    let target_hi = norm * (1.0 - eps);
    let target_lo = -target_hi;
    let mut plus = Vec::with_capacity(count);
    let mut minus = Vec::with_capacity(count);
    for k in NearScan::new(space, x.scaled(1.0 / norm), eps, scan_budget).take(count) {
        plus.push((2 * k - 1, image.at(2 * k - 1)));
        minus.push((2 * k, image.at(2 * k)));
    }
    let found = plus.len();
    let witness = OscillationWitness::assemble(plus, minus, target_hi, target_lo, eps);
    if found < count {
        return Err(Error::BudgetExhausted(Box::new(Exhausted::Witness {
            found,
            requested: count,
            partial: witness,
        })));
    }
    Ok(witness)
}
