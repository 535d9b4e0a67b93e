//! Finite certificates of non-convergence.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seq::BoundedSeq;

/// Two index lists whose coordinates sit on opposite sides of a positive gap.
///
/// Every plus value is at least `target_hi`, every minus value at most
/// `target_lo`, and `gap = min(plus_values) − max(minus_values)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillationWitness {
    pub plus_indices: Vec<usize>,
    pub minus_indices: Vec<usize>,
    pub plus_values: Vec<f64>,
    pub minus_values: Vec<f64>,
    pub target_hi: f64,
    pub target_lo: f64,
    pub gap: f64,
    pub tolerance: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum WitnessError {
    #[error("plus and minus lists have different lengths")]
    Unbalanced,
    #[error("witness is empty")]
    Empty,
    #[error("indices are not strictly increasing")]
    NotIncreasing,
    #[error("coordinate {index}: stored {stored}, recomputed {recomputed}")]
    ValueMismatch {
        index: usize,
        stored: f64,
        recomputed: f64,
    },
    #[error("coordinate {index} = {value} misses its target")]
    TargetMissed { index: usize, value: f64 },
    #[error("stored gap {stored} differs from recomputed {recomputed}")]
    GapMismatch { stored: f64, recomputed: f64 },
    #[error("gap {0} is not positive")]
    NonPositiveGap(f64),
}

impl OscillationWitness {
    pub(crate) fn assemble(
        plus: Vec<(usize, f64)>,
        minus: Vec<(usize, f64)>,
        target_hi: f64,
        target_lo: f64,
        tolerance: f64,
    ) -> Self {
        let (plus_indices, plus_values): (Vec<_>, Vec<_>) = plus.into_iter().unzip();
        let (minus_indices, minus_values): (Vec<_>, Vec<_>) = minus.into_iter().unzip();
        let gap = gap_of(&plus_values, &minus_values);
        Self {
            plus_indices,
            minus_indices,
            plus_values,
            minus_values,
            target_hi,
            target_lo,
            gap,
            tolerance,
        }
    }

    pub fn len(&self) -> usize {
        self.plus_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plus_indices.is_empty()
    }

    /// Re-derives every stored value from `seq` and checks all invariants.
    pub fn verify(&self, seq: &BoundedSeq) -> Result<(), WitnessError> {
        if self.plus_indices.len() != self.minus_indices.len()
            || self.plus_indices.len() != self.plus_values.len()
            || self.minus_indices.len() != self.minus_values.len()
        {
            return Err(WitnessError::Unbalanced);
        }
        if self.is_empty() {
            return Err(WitnessError::Empty);
        }
        for list in [&self.plus_indices, &self.minus_indices] {
            if list[0] == 0 || list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(WitnessError::NotIncreasing);
            }
        }
        let sides = [
            (&self.plus_indices, &self.plus_values, true),
            (&self.minus_indices, &self.minus_values, false),
        ];
        for (indices, values, upper) in sides {
            for (&index, &stored) in indices.iter().zip(values) {
                let recomputed = seq.at(index);
                if recomputed.to_bits() != stored.to_bits() {
                    return Err(WitnessError::ValueMismatch {
                        index,
                        stored,
                        recomputed,
                    });
                }
                let hit = if upper {
                    stored >= self.target_hi
                } else {
                    stored <= self.target_lo
                };
                if !hit {
                    return Err(WitnessError::TargetMissed {
                        index,
                        value: stored,
                    });
                }
            }
        }
        let recomputed = gap_of(&self.plus_values, &self.minus_values);
        if recomputed.to_bits() != self.gap.to_bits() {
            return Err(WitnessError::GapMismatch {
                stored: self.gap,
                recomputed,
            });
        }
        if !(self.gap > 0.0) {
            return Err(WitnessError::NonPositiveGap(self.gap));
        }
        Ok(())
    }
}

fn gap_of(plus: &[f64], minus: &[f64]) -> f64 {
    if plus.is_empty() || minus.is_empty() {
        return 0.0;
    }
    let lo_plus = plus.iter().copied().fold(f64::INFINITY, f64::min);
    let hi_minus = minus.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    lo_plus - hi_minus
}
