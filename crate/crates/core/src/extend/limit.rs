//! Limits of members of `D` along an extracted subsequence.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use super::scheme::IndexScheme;
use crate::error::{Error, Result};
use crate::seq::{combine, BoundedSeq};

const CERT_TOL: f64 = 1e-12;

/// Tail-average estimate of `lim_j d(n_j)`; every sampled tail value lies within `err` of `value`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitEstimate {
    pub value: f64,
    pub err: f64,
}

/// Averages `d(n_j)` over `j ∈ (j_window/2, j_window]`.
///
/// `err` is the largest deviation over that half plus the scheme's cell slack.
/// A sequence whose tag certifies convergence from before the averaged half is
/// charged its certified tail variation instead.
pub fn limit_along(d: &BoundedSeq, scheme: &IndexScheme, j_window: usize) -> Result<LimitEstimate> {
    if j_window < 2 {
        return Err(Error::invalid("j_window", "must be at least 2"));
    }
    if scheme.len() < j_window {
        return Err(Error::SchemeExhausted(j_window));
    }
    let tail = &scheme.prefix()[j_window / 2..j_window];
    let values: Vec<f64> = tail.iter().map(|&n| d.at(n)).collect();
    let value = values.iter().sum::<f64>() / values.len() as f64;
    let dev = values.iter().fold(0.0_f64, |m, v| m.max((v - value).abs()));
    let slack = match d.convergence_certificate(CERT_TOL) {
        Some(cert) if cert.from <= tail[0] => cert.tail_variation,
        _ => scheme.slack(),
    };
    Ok(LimitEstimate {
        value,
        err: dev + slack,
    })
}

/// Outcome of comparing `L(Σ a_i d_i)` with `Σ a_i L(d_i)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearityCheck {
    pub combined: f64,
    pub expected: f64,
    pub bound: f64,
}

impl LinearityCheck {
    pub fn holds(&self) -> bool {
        (self.combined - self.expected).abs() <= self.bound + 1e-9
    }
}

/// `L` along a fixed scheme and window, caching estimates by caller-chosen id.
#[derive(Debug)]
pub struct LimitFunctional {
    scheme: Arc<IndexScheme>,
    j_window: usize,
    cache: Mutex<BTreeMap<String, LimitEstimate>>,
}

impl LimitFunctional {
    pub fn new(scheme: Arc<IndexScheme>, j_window: usize) -> Result<Self> {
        if j_window < 2 {
            return Err(Error::invalid("j_window", "must be at least 2"));
        }
        if scheme.len() < j_window {
            return Err(Error::SchemeExhausted(j_window));
        }
        Ok(Self {
            scheme,
            j_window,
            cache: Mutex::new(BTreeMap::new()),
        })
    }

    /// Uses the whole materialized prefix as the window.
    pub fn over_prefix(scheme: Arc<IndexScheme>) -> Result<Self> {
        let len = scheme.len();
        Self::new(scheme, len)
    }

    pub fn scheme(&self) -> &IndexScheme {
        &self.scheme
    }

    pub fn j_window(&self) -> usize {
        self.j_window
    }

    pub fn eval(&self, id: &str, d: &BoundedSeq) -> Result<LimitEstimate> {
        if let Some(hit) = self.cache.lock().expect("cache lock").get(id) {
            return Ok(*hit);
        }
        let est = limit_along(d, &self.scheme, self.j_window)?;
        self.cache.lock().expect("cache lock").insert(id.to_string(), est);
        Ok(est)
    }

    pub fn cached(&self) -> BTreeMap<String, LimitEstimate> {
        self.cache.lock().expect("cache lock").clone()
    }

    /// Checks `L(Σ a_i d_i) ≈ Σ a_i L(d_i)` within the summed error bars.
    pub fn linearity(&self, coeffs: &[f64], members: &[BoundedSeq]) -> Result<LinearityCheck> {
        let combo = combine(coeffs, members)?;
        let whole = limit_along(&combo, &self.scheme, self.j_window)?;
        let mut expected = 0.0;
        let mut bound = whole.err;
        for (a, d) in coeffs.iter().zip(members) {
            let part = limit_along(d, &self.scheme, self.j_window)?;
            expected += a * part.value;
            bound += a.abs() * part.err;
        }
        Ok(LinearityCheck {
            combined: whole.value,
            expected,
            bound,
        })
    }

    /// Checks `L(Σ a_i w^i) ≈ Σ a_i α_i` against the stored cluster point.
    ///
    /// Each `α_i` is a cell midpoint, so it is charged `|a_i|` times the cell slack.
    pub fn against_alpha(&self, coeffs: &[f64], members: &[BoundedSeq]) -> Result<LinearityCheck> {
        let alpha = self.scheme.alpha();
        if coeffs.len() > alpha.len() {
            return Err(Error::LengthMismatch {
                coeffs: coeffs.len(),
                seqs: alpha.len(),
            });
        }
        let combo = combine(coeffs, members)?;
        let whole = limit_along(&combo, &self.scheme, self.j_window)?;
        let expected = coeffs.iter().zip(alpha).map(|(a, b)| a * b).sum();
        let bound = whole.err
            + coeffs
                .iter()
                .enumerate()
                .map(|(i, a)| a.abs() * self.member_slack(i))
                .sum::<f64>();
        Ok(LinearityCheck {
            combined: whole.value,
            expected,
            bound,
        })
    }

    fn member_slack(&self, i: usize) -> f64 {
        use super::scheme::SchemeMode;
        let tol = self.scheme.tol_schedule();
        match self.scheme.mode() {
            SchemeMode::Natural => 0.0,
            SchemeMode::FiniteBasis => tol.last().copied().unwrap_or(0.0),
            SchemeMode::CountableBasis | SchemeMode::DenseSequence => tol.get(i).copied().unwrap_or(0.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extend::scheme::bw_extract;
    use crate::extend::subspace::SubspaceD;

    fn alt() -> BoundedSeq {
        BoundedSeq::periodic(vec![-1.0, 1.0]).unwrap()
    }

    fn odds() -> IndexScheme {
        bw_extract(&SubspaceD::finite(vec![alt()]).unwrap(), 1, 64).unwrap()
    }

    #[test]
    fn limit_examples() {
        let s = odds();
        let delta = s.slack();
        let l = limit_along(&alt().scaled(2.0), &s, s.len()).unwrap();
        assert_eq!(l.value, -2.0);
        assert!(l.err <= 2.0 * delta);
        let l = limit_along(&BoundedSeq::zero(), &s, 10).unwrap();
        assert_eq!(l, LimitEstimate { value: 0.0, err: 0.0 });
        let l = limit_along(&BoundedSeq::explicit_limit(1.0, 0.01).unwrap(), &s, 32).unwrap();
        assert!((l.value - 1.0).abs() <= l.err && l.err < 1e-9);
        assert!(limit_along(&alt(), &s, 1).is_err());
        assert!(matches!(limit_along(&alt(), &s, 33), Err(Error::SchemeExhausted(33))));
    }

    #[test]
    fn tail_values_lie_within_err() {
        let s = odds();
        let d = BoundedSeq::periodic(vec![0.3, -0.1, 0.8, 0.2]).unwrap();
        let l = limit_along(&d, &s, 20).unwrap();
        for &n in &s.prefix()[10..20] {
            assert!((d.at(n) - l.value).abs() <= l.err);
        }
    }

    #[test]
    fn functional_is_linear_and_cached() {
        let s = Arc::new(odds());
        let f = LimitFunctional::over_prefix(Arc::clone(&s)).unwrap();
        let b = BoundedSeq::periodic(vec![0.5, 0.25, -1.0]).unwrap();
        let check = f.linearity(&[2.0, -0.5], &[alt(), b]).unwrap();
        assert!(check.holds());
        let a = f.against_alpha(&[3.0], &[alt()]).unwrap();
        assert!(a.holds(), "{a:?}");
        let first = f.eval("alt", &alt()).unwrap();
        assert_eq!(f.eval("alt", &BoundedSeq::zero()).unwrap(), first);
        assert_eq!(f.cached().len(), 1);
    }
}
