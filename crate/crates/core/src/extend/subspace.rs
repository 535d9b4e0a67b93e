use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seq::BoundedSeq;

/// Coordinates used for the best-effort linear independence check.
pub const PROBE_WINDOW: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DMode {
    FiniteBasis,
    CountableBasis,
    DenseSequence,
}

type Generator = Arc<dyn Fn(usize) -> BoundedSeq + Send + Sync>;

/// A subspace `D ⊂ ℓ∞` given by generators.
///
/// Finite bases are listed in full. Countable bases and dense sequences list
/// a head and may supply a generator for members past it.
#[derive(Clone)]
pub struct SubspaceD {
    mode: DMode,
    listed: Vec<BoundedSeq>,
    generator: Option<Generator>,
}

impl fmt::Debug for SubspaceD {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SubspaceD")
            .field("mode", &self.mode)
            .field("listed", &self.listed.len())
            .field("generated", &self.generator.is_some())
            .finish()
    }
}

impl SubspaceD {
    /// `D = {0}`.
    pub fn zero() -> Self {
        Self {
            mode: DMode::FiniteBasis,
            listed: Vec::new(),
            generator: None,
        }
    }

    /// Finite basis; independence is checked on coordinates `1..=64`.
    pub fn finite(basis: Vec<BoundedSeq>) -> Result<Self> {
        let rank = probe_rank(&basis);
        if rank < basis.len() {
            return Err(Error::DependentBasis {
                rank,
                members: basis.len(),
            });
        }
        Ok(Self {
            mode: DMode::FiniteBasis,
            listed: basis,
            generator: None,
        })
    }

    /// Finite family without the independence probe; extraction does not need it.
    pub fn finite_unchecked(members: Vec<BoundedSeq>) -> Self {
        Self {
            mode: DMode::FiniteBasis,
            listed: members,
            generator: None,
        }
    }

    pub fn countable(listed: Vec<BoundedSeq>) -> Self {
        Self {
            mode: DMode::CountableBasis,
            listed,
            generator: None,
        }
    }

    pub fn dense(listed: Vec<BoundedSeq>) -> Self {
        Self {
            mode: DMode::DenseSequence,
            listed,
            generator: None,
        }
    }

    /// Members past the listed head come from `f(i)` (1-based `i`).
    pub fn with_generator<F>(mut self, f: F) -> Result<Self>
    where
        F: Fn(usize) -> BoundedSeq + Send + Sync + 'static,
    {
        if self.mode == DMode::FiniteBasis {
            return Err(Error::invalid("generator", "finite bases are listed in full"));
        }
        self.generator = Some(Arc::new(f));
        Ok(self)
    }

    pub fn mode(&self) -> DMode {
        self.mode
    }

    pub fn is_zero(&self) -> bool {
        self.mode == DMode::FiniteBasis && self.listed.is_empty()
    }

    /// Number of listed members (the dimension for finite bases).
    pub fn listed_len(&self) -> usize {
        self.listed.len()
    }

    pub fn listed(&self) -> &[BoundedSeq] {
        &self.listed
    }

    /// Member `i` (1-based), if it exists.
    pub fn member(&self, i: usize) -> Option<BoundedSeq> {
        if i == 0 {
            return None;
        }
        self.listed
            .get(i - 1)
            .cloned()
            .or_else(|| self.generator.as_ref().map(|g| g(i)))
    }

    pub(crate) fn first(&self, m: usize) -> Result<Vec<BoundedSeq>> {
        (1..=m)
            .map(|i| {
                self.member(i).ok_or_else(|| {
                    Error::invalid("m", format!("family has only {} members", self.listed.len()))
                })
            })
            .collect()
    }
}

/// Numerical rank of the members sampled on `1..=PROBE_WINDOW`.
pub fn probe_rank(members: &[BoundedSeq]) -> usize {
    let mut rows: Vec<Vec<f64>> = members
        .iter()
        .map(|s| (1..=PROBE_WINDOW).map(|n| s.at(n)).collect())
        .collect();
    let scale = rows
        .iter()
        .flatten()
        .fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0;
    }
    let tol = 1e-9 * scale;
    let mut rank = 0;
    for col in 0..PROBE_WINDOW {
        if rank == rows.len() {
            break;
        }
        let pivot = (rank..rows.len())
            .max_by(|&a, &b| rows[a][col].abs().total_cmp(&rows[b][col].abs()))
            .unwrap();
        if rows[pivot][col].abs() <= tol {
            continue;
        }
        rows.swap(rank, pivot);
        let head = rows[rank].clone();
        for row in rows.iter_mut().skip(rank + 1) {
            let f = row[col] / head[col];
            for (x, h) in row.iter_mut().zip(&head).skip(col) {
                *x -= f * h;
            }
        }
        rank += 1;
    }
    rank
}
