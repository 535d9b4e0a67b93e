//! Membership in `c`, certificate suites and brute-force cross-checks.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embed::isometry_defect;
use crate::error::{Error, Result};
use crate::extend::{scheme_isometry_defect, separation_certificate, separation_sequence, IndexScheme, SeparationCertificate};
use crate::seq::{cluster_estimates, BoundedSeq, ClusterEstimate};
use crate::spaces::{Element, SeparableSpace};
use crate::witness::OscillationWitness;

/// Tail variation accepted for a structural convergence certificate.
pub const CERT_TOL: f64 = 1e-9;
/// Members a cluster needs before it counts as a subsequential limit.
pub const MIN_CLUSTER: usize = 5;
/// Witness lists are truncated to this many indices per side.
pub const MAX_WITNESS: usize = 64;
pub const DEFAULT_CLASSIFY_BUDGET: usize = 20_000;

const MAX_REPORTED_CLUSTERS: usize = 8;
const MAX_REPORTED_INDICES: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Verdict {
    InC {
        limit: f64,
        tail_variation: f64,
        from: usize,
    },
    NotInC {
        witness: OscillationWitness,
    },
    Unknown {
        budget_used: usize,
        clusters_seen: Vec<ClusterEstimate>,
    },
}

impl Verdict {
    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::InC { .. } => "InC",
            Verdict::NotInC { .. } => "NotInC",
            Verdict::Unknown { .. } => "Unknown",
        }
    }
}

/// Three-valued membership test for `c`.
///
/// Only a convergence-certifying tag yields `InC`. Otherwise coordinates
/// `1..=budget` are bucketed into cells of width `gap_floor / 2`; two clusters
/// of at least five members separated by `gap_floor` or more give `NotInC`.
pub fn classify_c(s: &BoundedSeq, budget: usize, gap_floor: f64) -> Result<Verdict> {
    if budget < 2 {
        return Err(Error::invalid("budget", "must be at least 2"));
    }
    if !(gap_floor > 0.0) || !gap_floor.is_finite() {
        return Err(Error::invalid("gap_floor", format!("{gap_floor} must be positive")));
    }
    if let Some(cert) = s.convergence_certificate(CERT_TOL) {
        return Ok(Verdict::InC {
            limit: cert.limit,
            tail_variation: cert.tail_variation,
            from: cert.from,
        });
    }
    let clusters = cluster_estimates(s, 1..=budget, gap_floor / 2.0)?;
    let mut heavy: Vec<(&ClusterEstimate, f64, f64)> = clusters
        .iter()
        .filter(|c| c.indices.len() >= MIN_CLUSTER)
        .map(|c| {
            let (lo, hi) = c.indices.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &n| {
                let v = s.at(n);
                (lo.min(v), hi.max(v))
            });
            (c, lo, hi)
        })
        .collect();
    heavy.sort_by(|a, b| a.0.value.total_cmp(&b.0.value));
    // widest gap between a cluster and any cluster below it
    let mut best: Option<(usize, usize, f64)> = None;
    let mut lowest_top: Option<(usize, f64)> = None;
    for (j, &(_, lo, hi)) in heavy.iter().enumerate() {
        if let Some((i, top)) = lowest_top {
            let gap = lo - top;
            if best.map_or(true, |(_, _, g)| gap > g) {
                best = Some((i, j, gap));
            }
        }
        if lowest_top.map_or(true, |(_, top)| hi < top) {
            lowest_top = Some((j, hi));
        }
    }
    if let Some((i, j, gap)) = best {
        if gap >= gap_floor {
            let take = heavy[i].0.indices.len().min(heavy[j].0.indices.len()).min(MAX_WITNESS);
            let plus: Vec<(usize, f64)> = heavy[j].0.indices[..take].iter().map(|&n| (n, s.at(n))).collect();
            let minus: Vec<(usize, f64)> = heavy[i].0.indices[..take].iter().map(|&n| (n, s.at(n))).collect();
            let target_hi = plus.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
            let target_lo = minus.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
            return Ok(Verdict::NotInC {
                witness: OscillationWitness::assemble(plus, minus, target_hi, target_lo, gap_floor),
            });
        }
    }
    let clusters_seen = clusters
        .into_iter()
        .take(MAX_REPORTED_CLUSTERS)
        .map(|mut c| {
            c.indices.truncate(MAX_REPORTED_INDICES);
            c
        })
        .collect();
    Ok(Verdict::Unknown {
        budget_used: budget,
        clusters_seen,
    })
}

/// [`classify_c`] with budget 20000 and a gap floor of half the certified bound.
pub fn classify_default(s: &BoundedSeq) -> Result<Verdict> {
    let floor = if s.bound() > 0.0 { 0.5 * s.bound() } else { 1.0 };
    classify_c(s, DEFAULT_CLASSIFY_BUDGET, floor)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsometryEntry {
    pub x_id: String,
    pub lower: f64,
    pub achieved: f64,
    pub upper: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsometryReport {
    pub entries: Vec<IsometryEntry>,
    pub max_relative_defect: f64,
    pub all_pass: bool,
}

fn sample_id(i: usize) -> String {
    format!("x{}", i + 1)
}

fn isometry_report<F>(samples: &[Element], defect: F) -> IsometryReport
where
    F: Fn(&Element) -> Result<crate::embed::IsometryDefect> + Sync,
{
    let entries: Vec<IsometryEntry> = samples
        .par_iter()
        .enumerate()
        .map(|(i, x)| match defect(x) {
            Ok(d) => IsometryEntry {
                x_id: sample_id(i),
                lower: d.lower,
                achieved: d.achieved,
                upper: d.upper,
                pass: d.holds(),
                error: None,
            },
            Err(e) => IsometryEntry {
                x_id: sample_id(i),
                lower: 0.0,
                achieved: 0.0,
                upper: 0.0,
                pass: false,
                error: Some(e.to_string()),
            },
        })
        .collect();
    let max_relative_defect = entries
        .iter()
        .filter(|e| e.error.is_none() && e.upper > 0.0)
        .map(|e| (e.upper - e.achieved) / e.upper)
        .fold(0.0, f64::max);
    let all_pass = entries.iter().all(|e| e.pass);
    IsometryReport {
        entries,
        max_relative_defect,
        all_pass,
    }
}

/// Defect intervals of `T` for every sample; per-sample errors are recorded.
pub fn check_isometry(space: &SeparableSpace, samples: &[Element], max_k: usize) -> IsometryReport {
    isometry_report(samples, |x| isometry_defect(space, x, max_k))
}

/// Like [`check_isometry`] for the placement given by `scheme`.
pub fn check_scheme_isometry(
    space: &SeparableSpace,
    scheme: &IndexScheme,
    samples: &[Element],
    max_k: usize,
) -> IsometryReport {
    isometry_report(samples, |x| scheme_isometry_defect(space, scheme, x, max_k))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationEntry {
    pub x_id: String,
    pub d_id: String,
    pub gap: f64,
    /// `2‖x‖(1 − ε) − 2·err(L)`.
    pub bound: f64,
    pub limit: f64,
    pub limit_err: f64,
    pub plus_indices: Vec<usize>,
    pub minus_indices: Vec<usize>,
    pub pass: bool,
    pub budget_exhausted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub entries: Vec<SeparationEntry>,
    pub all_pass: bool,
    pub budget_exhausted: usize,
    pub errors: usize,
}

fn separation_entry(
    space: &SeparableSpace,
    x_id: String,
    d_id: String,
    x: &Element,
    d: &BoundedSeq,
    outcome: Result<SeparationCertificate>,
    eps: f64,
) -> SeparationEntry {
    let failed = |budget: bool, msg: String| SeparationEntry {
        x_id: x_id.clone(),
        d_id: d_id.clone(),
        gap: 0.0,
        bound: 0.0,
        limit: 0.0,
        limit_err: 0.0,
        plus_indices: Vec::new(),
        minus_indices: Vec::new(),
        pass: false,
        budget_exhausted: budget,
        error: Some(msg),
    };
    let cert = match outcome {
        Ok(c) => c,
        Err(e) => return failed(e.is_budget_exhausted(), e.to_string()),
    };
    let norm = space.norm(x).unwrap_or(0.0);
    let bound = SeparationCertificate::promised_gap(norm, eps, &cert.limit);
    let verified = separation_sequence(space, &cert.scheme, x, d)
        .map_err(|e| e.to_string())
        .and_then(|y| cert.witness.verify(&y).map_err(|e| e.to_string()));
    let w = cert.witness;
    let pass = verified.is_ok() && w.gap >= bound - 1e-9;
    SeparationEntry {
        x_id,
        d_id,
        gap: w.gap,
        bound,
        limit: cert.limit.value,
        limit_err: cert.limit.err,
        plus_indices: w.plus_indices,
        minus_indices: w.minus_indices,
        pass,
        budget_exhausted: false,
        error: verified.err(),
    }
}

/// A separation witness for every `(x, d)` pair, each re-verified against `scheme_embed(x) − d`.
pub fn check_separation(
    space: &SeparableSpace,
    scheme: &IndexScheme,
    samples: &[Element],
    d_samples: &[(String, BoundedSeq)],
    eps: f64,
    count: usize,
    scan_budget: usize,
) -> SeparationReport {
    let pairs: Vec<(usize, &Element, &(String, BoundedSeq))> = samples
        .iter()
        .enumerate()
        .flat_map(|(i, x)| d_samples.iter().map(move |d| (i, x, d)))
        .collect();
    let entries: Vec<SeparationEntry> = pairs
        .into_par_iter()
        .map(|(i, x, (d_id, d))| {
            let outcome = separation_certificate(space, scheme, x, d, eps, count, scan_budget);
            separation_entry(space, sample_id(i), d_id.clone(), x, d, outcome, eps)
        })
        .collect();
    let budget_exhausted = entries.iter().filter(|e| e.budget_exhausted).count();
    let errors = entries.iter().filter(|e| e.error.is_some()).count();
    SeparationReport {
        all_pass: entries.iter().all(|e| e.pass),
        entries,
        budget_exhausted,
        errors,
    }
}

/// `max |φ(x)|` over the functionals dual to every nonzero grid direction in `[−level, level]^dim`.
///
/// Enumerates the grid with its own odometer and applies its own duality
/// formula, so it shares no code with the net used by the embedding.
pub fn brute_force_sup(space: &SeparableSpace, x: &Element, level: usize) -> Result<f64> {
    let (dim, p) = match space {
        SeparableSpace::FiniteDimLp { dim, p } => (*dim, *p),
        other => {
            return Err(Error::KindMismatch {
                expected: "fdlp".into(),
                found: other.label(),
            })
        }
    };
    if level == 0 {
        return Err(Error::IndexZero);
    }
    space.check(x)?;
    let xs = match x {
        Element::Vector(v) => v.clone(),
        _ => unreachable!("checked against the space"),
    };
    let t = level as i64;
    let mut g = vec![-t; dim];
    let mut best = 0.0_f64;
    loop {
        if g.iter().any(|&c| c != 0) {
            best = best.max(dual_pairing(&g, &xs, p).abs());
        }
        // odometer step, last coordinate fastest
        let mut i = dim;
        loop {
            if i == 0 {
                return Ok(best);
            }
            i -= 1;
            if g[i] < t {
                g[i] += 1;
                break;
            }
            g[i] = -t;
        }
    }
}

/// `φ_u(x)` for `u = g / ‖g‖_p`.
fn dual_pairing(g: &[i64], x: &[f64], p: f64) -> f64 {
    let g: Vec<f64> = g.iter().map(|&c| c as f64).collect();
    if p.is_infinite() {
        let m = g.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        let i = g.iter().position(|c| c.abs() == m).unwrap();
        return g[i].signum() * x[i];
    }
    if p == 1.0 {
        return g
            .iter()
            .zip(x)
            .map(|(c, xi)| if *c == 0.0 { 0.0 } else { c.signum() * xi })
            .sum();
    }
    let norm = g.iter().map(|c| c.abs().powf(p)).sum::<f64>().powf(1.0 / p);
    g.iter()
        .zip(x)
        .map(|(c, xi)| {
            let u = c / norm;
            u.signum() * u.abs().powf(p - 1.0) * xi
        })
        .sum()
}
