//! Lazily evaluated bounded sequences (elements of ℓ∞).
//!
//! A [`BoundedSeq`] is a pure coordinate oracle `n ↦ x_n` (1-based) paired
//! with a certified upper bound on `sup |x_n|` and a structural [`SeqTag`].
//! Nothing is ever materialized beyond the coordinates a caller probes.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::RangeInclusive;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type Oracle = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

/// Relative slack used when checking a probed coordinate against its bound.
const BOUND_SLACK: f64 = 1e-9;

/// Structural description of how a sequence was built.
#[derive(Clone, Debug)]
pub enum SeqTag {
    /// Listed prefix followed by a constant tail.
    ExplicitList { prefix: Vec<f64>, tail: f64 },
    /// Zero before `from`, `value` from index `from` on.
    EventuallyConstant { value: f64, from: usize },
    /// `x_n = limit + rate^n` with `|rate| < 1`.
    ExplicitLimit { limit: f64, rate: f64 },
    Periodic(Vec<f64>),
    /// Image of an element under a functional sequence.
    FunctionalImage {
        space: String,
        element: String,
        scheme: Option<String>,
    },
    LinearCombo {
        coeffs: Vec<f64>,
        children: Vec<BoundedSeq>,
    },
    Opaque,
}

impl SeqTag {
    pub fn name(&self) -> &'static str {
        match self {
            SeqTag::ExplicitList { .. } => "explicit-list",
            SeqTag::EventuallyConstant { .. } => "eventually-constant",
            SeqTag::ExplicitLimit { .. } => "explicit-limit",
            SeqTag::Periodic(_) => "periodic",
            SeqTag::FunctionalImage { .. } => "functional-image",
            SeqTag::LinearCombo { .. } => "linear-combo",
            SeqTag::Opaque => "opaque",
        }
    }
}

#[derive(Clone)]
pub struct BoundedSeq {
    oracle: Oracle,
    bound: f64,
    tag: SeqTag,
}

impl fmt::Debug for BoundedSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundedSeq")
            .field("bound", &self.bound)
            .field("tag", &self.tag)
            .finish()
    }
}

impl BoundedSeq {
    /// Wraps an arbitrary pure oracle. The caller certifies `bound`.
    pub fn from_fn<F>(bound: f64, oracle: F) -> Result<Self>
    where
        F: Fn(usize) -> f64 + Send + Sync + 'static,
    {
        Self::tagged(bound, SeqTag::Opaque, oracle)
    }

    pub(crate) fn tagged<F>(bound: f64, tag: SeqTag, oracle: F) -> Result<Self>
    where
        F: Fn(usize) -> f64 + Send + Sync + 'static,
    {
        if !bound.is_finite() || bound < 0.0 {
            return Err(Error::invalid("bound", format!("{bound} is not a finite nonnegative scalar")));
        }
        Ok(Self {
            oracle: Arc::new(oracle),
            bound,
            tag,
        })
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn constant(value: f64) -> Self {
        Self::eventually_constant(value, 1).expect("from = 1 is valid")
    }

    pub fn eventually_constant(value: f64, from: usize) -> Result<Self> {
        if from == 0 {
            return Err(Error::IndexZero);
        }
        finite("value", value)?;
        Self::tagged(
            value.abs(),
            SeqTag::EventuallyConstant { value, from },
            move |n| if n >= from { value } else { 0.0 },
        )
    }

    pub fn explicit(prefix: Vec<f64>, tail: f64) -> Result<Self> {
        finite("tail", tail)?;
        for &v in &prefix {
            finite("prefix", v)?;
        }
        let bound = prefix.iter().fold(tail.abs(), |m, v| m.max(v.abs()));
        let values = Arc::new(prefix.clone());
        Self::tagged(bound, SeqTag::ExplicitList { prefix, tail }, move |n| {
            values.get(n - 1).copied().unwrap_or(tail)
        })
    }

    pub fn explicit_limit(limit: f64, rate: f64) -> Result<Self> {
        finite("limit", limit)?;
        if !(rate.abs() < 1.0) {
            return Err(Error::invalid("rate", format!("|{rate}| must be below 1")));
        }
        Self::tagged(
            limit.abs() + rate.abs(),
            SeqTag::ExplicitLimit { limit, rate },
            move |n| limit + rate.powi(n.min(i32::MAX as usize) as i32),
        )
    }

    pub fn periodic(pattern: Vec<f64>) -> Result<Self> {
        if pattern.is_empty() {
            return Err(Error::EmptyInput("periodic pattern"));
        }
        for &v in &pattern {
            finite("pattern", v)?;
        }
        let bound = pattern.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let values = Arc::new(pattern.clone());
        Self::tagged(bound, SeqTag::Periodic(pattern), move |n| {
            values[(n - 1) % values.len()]
        })
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn tag(&self) -> &SeqTag {
        &self.tag
    }

    /// Evaluates the oracle without the bound check. `n` must be at least 1.
    #[inline]
    pub(crate) fn at(&self, n: usize) -> f64 {
        debug_assert!(n >= 1);
        (self.oracle)(n)
    }

    /// The `n`-th coordinate (1-based).
    pub fn coordinate(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::IndexZero);
        }
        let value = self.at(n);
        if !(value.abs() <= self.bound * (1.0 + BOUND_SLACK) + f64::MIN_POSITIVE) {
            return Err(Error::BoundViolation {
                index: n,
                value,
                bound: self.bound,
            });
        }
        Ok(value)
    }

    /// `max_{1 ≤ n ≤ len} |x_n|`.
    pub fn prefix_sup(&self, len: usize) -> Result<f64> {
        if len == 0 {
            return Err(Error::IndexZero);
        }
        (1..=len).try_fold(0.0_f64, |m, n| Ok(m.max(self.coordinate(n)?.abs())))
    }

    /// Checks the bound invariant on a probe set.
    pub fn check_bound<I: IntoIterator<Item = usize>>(&self, probes: I) -> Result<()> {
        for n in probes {
            self.coordinate(n)?;
        }
        Ok(())
    }

    pub fn scaled(&self, c: f64) -> Self {
        combine(&[c], std::slice::from_ref(self)).expect("one coefficient, one sequence")
    }

    /// Finite certificate that the sequence converges, derived from its tag only.
    ///
    /// Returns the limit and an index past which every coordinate stays within
    /// `tol` of it. Numeric appearance never produces a certificate.
    pub fn convergence_certificate(&self, tol: f64) -> Option<ConvergenceCert> {
        if self.bound == 0.0 {
            return Some(ConvergenceCert {
                limit: 0.0,
                from: 1,
                tail_variation: 0.0,
            });
        }
        match &self.tag {
            SeqTag::EventuallyConstant { value, from } => Some(ConvergenceCert {
                limit: *value,
                from: *from,
                tail_variation: 0.0,
            }),
            SeqTag::ExplicitList { prefix, tail } => Some(ConvergenceCert {
                limit: *tail,
                from: prefix.len() + 1,
                tail_variation: 0.0,
            }),
            SeqTag::ExplicitLimit { limit, rate } => {
                let r = rate.abs();
                if r == 0.0 {
                    return Some(ConvergenceCert {
                        limit: *limit,
                        from: 1,
                        tail_variation: 0.0,
                    });
                }
                let mut from = ((tol.ln() / r.ln()).ceil().max(1.0)) as usize;
                while r.powi(from as i32) > tol {
                    from += 1;
                }
                Some(ConvergenceCert {
                    limit: *limit,
                    from,
                    tail_variation: r.powi(from as i32),
                })
            }
            SeqTag::Periodic(pattern) => {
                let first = pattern[0];
                pattern.iter().all(|v| *v == first).then_some(ConvergenceCert {
                    limit: first,
                    from: 1,
                    tail_variation: 0.0,
                })
            }
            SeqTag::LinearCombo { coeffs, children } => {
                let active = coeffs.iter().filter(|c| **c != 0.0).count().max(1) as f64;
                let mut cert = ConvergenceCert {
                    limit: 0.0,
                    from: 1,
                    tail_variation: 0.0,
                };
                for (c, child) in coeffs.iter().zip(children) {
                    if *c == 0.0 {
                        continue;
                    }
                    let sub = child.convergence_certificate(tol / (active * c.abs()))?;
                    cert.limit += c * sub.limit;
                    cert.from = cert.from.max(sub.from);
                    cert.tail_variation += c.abs() * sub.tail_variation;
                }
                Some(cert)
            }
            SeqTag::FunctionalImage { .. } | SeqTag::Opaque => None,
        }
    }
}

/// Structural convergence certificate: `|x_n − limit| ≤ tail_variation` for `n ≥ from`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceCert {
    pub limit: f64,
    pub from: usize,
    pub tail_variation: f64,
}

fn finite(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("{v} is not finite")))
    }
}

pub fn coordinate(s: &BoundedSeq, n: usize) -> Result<f64> {
    s.coordinate(n)
}

pub fn prefix_sup(s: &BoundedSeq, len: usize) -> Result<f64> {
    s.prefix_sup(len)
}

/// `Σ coeffs[i] · seqs[i]`, evaluated lazily.
pub fn combine(coeffs: &[f64], seqs: &[BoundedSeq]) -> Result<BoundedSeq> {
    if coeffs.len() != seqs.len() {
        return Err(Error::LengthMismatch {
            coeffs: coeffs.len(),
            seqs: seqs.len(),
        });
    }
    if coeffs.is_empty() {
        return Err(Error::EmptyInput("linear combination"));
    }
    for &c in coeffs {
        finite("coefficient", c)?;
    }
    let bound = coeffs
        .iter()
        .zip(seqs)
        .map(|(c, s)| c.abs() * s.bound)
        .sum();
    let terms: Arc<Vec<(f64, BoundedSeq)>> =
        Arc::new(coeffs.iter().copied().zip(seqs.iter().cloned()).collect());
    BoundedSeq::tagged(
        bound,
        SeqTag::LinearCombo {
            coeffs: coeffs.to_vec(),
            children: seqs.to_vec(),
        },
        move |n| terms.iter().map(|(c, s)| c * s.at(n)).sum(),
    )
}

/// A finite stand-in for a subsequential limit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterEstimate {
    pub indices: Vec<usize>,
    pub value: f64,
    pub spread: f64,
}

/// Buckets the window's coordinates into cells of width `cell_width`.
///
/// Cells are centred on integer multiples of `cell_width`, so the cell of
/// index `c` is `[(c − ½)w, (c + ½)w)` with midpoint `c·w`. Results are sorted
/// by descending hit count, then ascending midpoint.
pub fn cluster_estimates(
    s: &BoundedSeq,
    window: RangeInclusive<usize>,
    cell_width: f64,
) -> Result<Vec<ClusterEstimate>> {
    if !(cell_width > 0.0) || !cell_width.is_finite() {
        return Err(Error::invalid("cell_width", format!("{cell_width} must be positive")));
    }
    if window.is_empty() {
        return Err(Error::EmptyWindow);
    }
    if *window.start() == 0 {
        return Err(Error::IndexZero);
    }
    let mut cells: BTreeMap<i64, Vec<(usize, f64)>> = BTreeMap::new();
    for n in window {
        let v = s.coordinate(n)?;
        let cell = (v / cell_width).round() as i64;
        cells.entry(cell).or_default().push((n, v));
    }
    let mut out: Vec<ClusterEstimate> = cells
        .into_iter()
        .map(|(cell, hits)| {
            let value = cell as f64 * cell_width;
            let spread = hits.iter().fold(0.0_f64, |m, (_, v)| m.max((v - value).abs()));
            ClusterEstimate {
                indices: hits.into_iter().map(|(n, _)| n).collect(),
                value,
                spread,
            }
        })
        .collect();
    // BTreeMap order is already ascending in value; a stable sort keeps it as the tie-break.
    out.sort_by(|a, b| b.indices.len().cmp(&a.indices.len()));
    Ok(out)
}
