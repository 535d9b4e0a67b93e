//! Extracted subsequences `n_1 < n_2 < …` and their refinement state.
//!
//! Extraction buckets the vectors `z_n = (w^1_n, …, w^r_n)` into dyadic cells
//! over `[−B_i, B_i]`, keeps the most populated cell (ties go to the
//! lexicographically smallest corner) and bisects again. The chosen cells are
//! kept as [`Stage`]s, so membership of any `n` in the extracted set is a pure
//! predicate and the prefix can be extended on demand up to `scan_limit`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::subspace::{DMode, SubspaceD};
use crate::error::{Error, Exhausted, Result};
use crate::seq::BoundedSeq;

/// Deepest supported refinement level.
const MAX_LEVEL: u32 = 60;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeMode {
    /// `I = ℕ`, used for `D = {0}`.
    Natural,
    FiniteBasis,
    CountableBasis,
    DenseSequence,
}

/// One chosen cell: the listed members' values at `n` must all fall in it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub members: Vec<usize>,
    pub bounds: Vec<f64>,
    pub level: u32,
    pub cell: Vec<u64>,
}

impl Stage {
    fn accepts(&self, n: usize, family: &[BoundedSeq]) -> bool {
        self.members
            .iter()
            .zip(&self.bounds)
            .zip(&self.cell)
            .all(|((&m, &b), &c)| cell_index(family[m].at(n), b, self.level) == c)
    }
}

fn effective_bound(b: f64) -> f64 {
    if b > 0.0 {
        b
    } else {
        1.0
    }
}

fn side(bound: f64, level: u32) -> f64 {
    2.0 * bound * 0.5_f64.powi(level as i32)
}

/// Index of the level-`level` cell of `[−bound, bound]` containing `z`.
fn cell_index(z: f64, bound: f64, level: u32) -> u64 {
    let cells = 1_u64 << level;
    let raw = ((z + bound) / side(bound, level)).floor();
    if raw.is_nan() || raw < 0.0 {
        0
    } else {
        (raw as u64).min(cells - 1)
    }
}

fn midpoint(cell: u64, bound: f64, level: u32) -> f64 {
    -bound + (cell as f64 + 0.5) * side(bound, level)
}

/// Result of refining a candidate index set against some members.
struct Refined {
    survivors: Vec<usize>,
    cell: Vec<u64>,
    deltas: Vec<f64>,
}

/// Bisects `depth` times, keeping the fullest cell each time.
fn refine(
    candidates: Vec<usize>,
    family: &[BoundedSeq],
    members: &[usize],
    bounds: &[f64],
    depth: u32,
) -> Refined {
    let mut survivors = candidates;
    let mut cell = vec![0_u64; members.len()];
    let mut deltas = Vec::with_capacity(depth as usize);
    // cache z_n for the candidates once
    let mut values: BTreeMap<usize, Vec<f64>> = survivors
        .iter()
        .map(|&n| (n, members.iter().map(|&m| family[m].at(n)).collect()))
        .collect();
    for level in 1..=depth {
        let mut buckets: BTreeMap<Vec<u64>, Vec<usize>> = BTreeMap::new();
        for &n in &survivors {
            let key: Vec<u64> = values[&n]
                .iter()
                .zip(bounds)
                .map(|(&z, &b)| cell_index(z, b, level))
                .collect();
            buckets.entry(key).or_default().push(n);
        }
        // ascending keys, strict `>` keeps the smallest corner on ties
        let mut best: Option<(Vec<u64>, Vec<usize>)> = None;
        for (key, hits) in buckets {
            if best.as_ref().map_or(true, |(_, b)| hits.len() > b.len()) {
                best = Some((key, hits));
            }
        }
        if let Some((key, hits)) = best {
            cell = key;
            survivors = hits;
            values.retain(|n, _| survivors.binary_search(n).is_ok());
        }
        let half_diag = 0.5
            * bounds
                .iter()
                .map(|&b| side(b, level).powi(2))
                .sum::<f64>()
                .sqrt();
        deltas.push(half_diag);
    }
    Refined {
        survivors,
        cell,
        deltas,
    }
}

/// A materialized prefix of an extracted subsequence plus what is needed to extend it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IndexScheme {
    mode: SchemeMode,
    prefix: Vec<usize>,
    alpha: Vec<f64>,
    tol_schedule: Vec<f64>,
    /// Every `n ≤ scan_budget_used` has been classified.
    scan_budget_used: usize,
    scan_limit: usize,
    stages: Vec<Stage>,
    #[serde(skip)]
    family: Option<Arc<Vec<BoundedSeq>>>,
}

impl PartialEq for IndexScheme {
    fn eq(&self, other: &Self) -> bool {
        self.mode == other.mode
            && self.prefix == other.prefix
            && self.alpha == other.alpha
            && self.tol_schedule == other.tol_schedule
            && self.scan_budget_used == other.scan_budget_used
            && self.scan_limit == other.scan_limit
            && self.stages == other.stages
    }
}

/// Default cap on how far a scheme may be extended past its extraction budget.
pub const DEFAULT_SCAN_LIMIT: usize = 1 << 24;

impl IndexScheme {
    /// `I = ℕ` with `I⁺` the evens and `I⁻` the odds.
    pub fn natural() -> Self {
        Self {
            mode: SchemeMode::Natural,
            prefix: Vec::new(),
            alpha: Vec::new(),
            tol_schedule: Vec::new(),
            scan_budget_used: 0,
            scan_limit: usize::MAX,
            stages: Vec::new(),
            family: Some(Arc::new(Vec::new())),
        }
    }

    pub fn mode(&self) -> SchemeMode {
        self.mode
    }

    pub fn prefix(&self) -> &[usize] {
        &self.prefix
    }

    pub fn len(&self) -> usize {
        self.prefix.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prefix.is_empty()
    }

    /// Cluster point `α` (finite basis) or per-member limit estimates `β_i`.
    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn tol_schedule(&self) -> &[f64] {
        &self.tol_schedule
    }

    pub fn scan_budget_used(&self) -> usize {
        self.scan_budget_used
    }

    pub fn scan_limit(&self) -> usize {
        self.scan_limit
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn with_scan_limit(mut self, limit: usize) -> Self {
        self.scan_limit = limit.max(self.scan_budget_used);
        self
    }

    /// Whether the prefix can grow (false after deserialization).
    pub fn is_attached(&self) -> bool {
        self.family.is_some()
    }

    /// Re-attaches the family a deserialized scheme was extracted from.
    pub fn attach(mut self, d: &SubspaceD) -> Result<Self> {
        let needed = self
            .stages
            .iter()
            .flat_map(|s| s.members.iter().copied())
            .max()
            .map_or(0, |m| m + 1);
        self.family = Some(Arc::new(d.first(needed)?));
        Ok(self)
    }

    /// Tolerance of the deepest refinement level, charged to limit estimates.
    pub fn slack(&self) -> f64 {
        match self.mode {
            SchemeMode::Natural => 0.0,
            _ => self.tol_schedule.last().copied().unwrap_or(0.0),
        }
    }

    /// `I⁺ = {n_{2j}}`.
    pub fn plus_set(&self) -> impl Iterator<Item = usize> + '_ {
        self.prefix.iter().skip(1).step_by(2).copied()
    }

    /// `I⁻ = {n_{2j−1}}`.
    pub fn minus_set(&self) -> impl Iterator<Item = usize> + '_ {
        self.prefix.iter().step_by(2).copied()
    }

    /// `η⁺(k) = n_{2k}`, if materialized.
    pub fn eta_plus(&self, k: usize) -> Option<usize> {
        k.checked_mul(2)
            .and_then(|j| j.checked_sub(1))
            .and_then(|i| self.prefix.get(i).copied())
    }

    /// `η⁻(k) = n_{2k−1}`, if materialized.
    pub fn eta_minus(&self, k: usize) -> Option<usize> {
        k.checked_mul(2)
            .and_then(|j| j.checked_sub(2))
            .and_then(|i| self.prefix.get(i).copied())
    }

    fn accepts(&self, n: usize, family: &[BoundedSeq]) -> bool {
        self.stages.iter().all(|s| s.accepts(n, family))
    }

    /// 1-based position of `n` in `I`, or `None` when `n ∉ I`.
    ///
    /// Errors with [`Error::SchemeExhausted`] if `n` lies past the classified range.
    pub fn position(&self, n: usize) -> Result<Option<usize>> {
        if n == 0 {
            return Err(Error::IndexZero);
        }
        if self.mode == SchemeMode::Natural {
            return Ok(Some(n));
        }
        if n > self.scan_budget_used {
            return Err(Error::SchemeExhausted(n));
        }
        Ok(self.prefix.binary_search(&n).ok().map(|i| i + 1))
    }

    /// Like [`position`](Self::position) but classifies indices past the
    /// materialized range on the fly.
    ///
    /// # Panics
    ///
    /// Panics if `n` is past the materialized range of a detached scheme.
    pub(crate) fn position_lazy(&self, n: usize) -> Option<usize> {
        if self.mode == SchemeMode::Natural {
            return Some(n);
        }
        if n <= self.scan_budget_used {
            return self.prefix.binary_search(&n).ok().map(|i| i + 1);
        }
        let family = self
            .family
            .as_ref()
            .unwrap_or_else(|| panic!("scheme exhausted: coordinate {n} needs an attached family"));
        if !self.accepts(n, family) {
            return None;
        }
        let beyond = (self.scan_budget_used + 1..n)
            .filter(|&m| self.accepts(m, family))
            .count();
        Some(self.prefix.len() + beyond + 1)
    }

    /// Classifies every index up to `n`.
    pub fn extended_to_index(mut self, n: usize) -> Result<Self> {
        if n <= self.scan_budget_used {
            return Ok(self);
        }
        if n > self.scan_limit {
            return Err(Error::SchemeExhausted(n));
        }
        let family = self.family.clone().ok_or(Error::SchemeExhausted(n))?;
        for m in self.scan_budget_used + 1..=n {
            if self.accepts(m, &family) {
                self.prefix.push(m);
            }
        }
        self.scan_budget_used = n;
        Ok(self)
    }

    /// Extends until the prefix holds at least `len` indices.
    pub fn extended_to_len(mut self, len: usize) -> Result<Self> {
        if self.prefix.len() >= len {
            return Ok(self);
        }
        let family = self
            .family
            .clone()
            .ok_or(Error::SchemeExhausted(self.scan_budget_used + 1))?;
        while self.prefix.len() < len {
            let m = self.scan_budget_used + 1;
            if m > self.scan_limit {
                return Err(Error::SchemeExhausted(m));
            }
            if self.accepts(m, &family) {
                self.prefix.push(m);
            }
            self.scan_budget_used = m;
        }
        Ok(self)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Restores a detached scheme; call [`attach`](Self::attach) to extend it again.
    pub fn from_json(text: &str) -> Result<Self> {
        let scheme: Self = serde_json::from_str(text)?;
        if scheme.prefix.windows(2).any(|w| w[0] >= w[1]) || scheme.prefix.first() == Some(&0) {
            return Err(Error::invalid("prefix", "must be strictly increasing and 1-based"));
        }
        Ok(scheme)
    }
}

fn default_scan_limit(budget: usize) -> usize {
    budget.saturating_mul(256).max(DEFAULT_SCAN_LIMIT)
}

/// Bolzano–Weierstrass cell refinement over a finite basis.
pub fn bw_extract(d: &SubspaceD, depth: usize, scan_budget: usize) -> Result<IndexScheme> {
    if d.mode() != DMode::FiniteBasis {
        return Err(Error::invalid("mode", "bw_extract needs a finite basis"));
    }
    if d.listed_len() == 0 {
        return Err(Error::EmptyBasis);
    }
    if depth == 0 || depth as u32 > MAX_LEVEL {
        return Err(Error::invalid("depth", format!("must lie in 1..={MAX_LEVEL}")));
    }
    let family: Vec<BoundedSeq> = d.listed().to_vec();
    let members: Vec<usize> = (0..family.len()).collect();
    let bounds: Vec<f64> = family.iter().map(|w| effective_bound(w.bound())).collect();
    let refined = refine((1..=scan_budget).collect(), &family, &members, &bounds, depth as u32);
    let required = 2 * depth;
    if refined.survivors.len() < required {
        return Err(Error::BudgetExhausted(Box::new(Exhausted::Extraction {
            completed_stages: 0,
            survivors: refined.survivors.len(),
            required,
        })));
    }
    let level = depth as u32;
    let alpha = refined
        .cell
        .iter()
        .zip(&bounds)
        .map(|(&c, &b)| midpoint(c, b, level))
        .collect();
    Ok(IndexScheme {
        mode: SchemeMode::FiniteBasis,
        prefix: refined.survivors,
        alpha,
        tol_schedule: refined.deltas,
        scan_budget_used: scan_budget,
        scan_limit: default_scan_limit(scan_budget),
        stages: vec![Stage {
            members,
            bounds,
            level,
            cell: refined.cell,
        }],
        family: Some(Arc::new(family)),
    })
}

/// Smallest refinement level whose cell side is at most `tol`.
fn depth_for(bound: f64, tol: f64) -> u32 {
    (1..=MAX_LEVEL)
        .find(|&l| side(bound, l) <= tol)
        .unwrap_or(MAX_LEVEL)
}

/// Staged refinement over the first `m` members of a countable family.
///
/// Stage `i` refines the survivors of stage `i − 1` against member `i` until
/// its cell side is at most `tol_schedule[i − 1]`. The prefix is the diagonal
/// `(S_1[1], S_2[2], …, S_m[m])` continued by the later elements of `S_m`.
pub fn diagonal_extract(
    d: &SubspaceD,
    m: usize,
    tol_schedule: &[f64],
    scan_budget: usize,
) -> Result<IndexScheme> {
    let mode = match d.mode() {
        DMode::CountableBasis => SchemeMode::CountableBasis,
        DMode::DenseSequence => SchemeMode::DenseSequence,
        DMode::FiniteBasis => {
            return Err(Error::invalid("mode", "diagonal_extract needs a countable family"))
        }
    };
    if m == 0 {
        return Err(Error::invalid("m", "must be at least 1"));
    }
    if tol_schedule.len() < m {
        return Err(Error::invalid(
            "tol_schedule",
            format!("has {} entries, need {m}", tol_schedule.len()),
        ));
    }
    let schedule = &tol_schedule[..m];
    if schedule.iter().any(|t| !(*t > 0.0)) || schedule.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::invalid("tol_schedule", "must be positive and strictly decreasing"));
    }
    let family = d.first(m)?;
    let required = 2 * m;
    let mut survivors: Vec<usize> = (1..=scan_budget).collect();
    let mut stages = Vec::with_capacity(m);
    let mut alpha = Vec::with_capacity(m);
    let mut head = Vec::with_capacity(m);
    for (i, &tol) in schedule.iter().enumerate() {
        let bound = effective_bound(family[i].bound());
        let level = depth_for(bound, tol);
        let refined = refine(survivors, &family, &[i], &[bound], level);
        if refined.survivors.len() < required {
            return Err(Error::BudgetExhausted(Box::new(Exhausted::Extraction {
                completed_stages: i,
                survivors: refined.survivors.len(),
                required,
            })));
        }
        survivors = refined.survivors;
        head.push(survivors[i]);
        alpha.push(midpoint(refined.cell[0], bound, level));
        stages.push(Stage {
            members: vec![i],
            bounds: vec![bound],
            level,
            cell: refined.cell,
        });
    }
    let last = *head.last().unwrap();
    let mut prefix = head;
    prefix.extend(survivors.into_iter().filter(|&n| n > last));
    Ok(IndexScheme {
        mode,
        prefix,
        alpha,
        tol_schedule: schedule.to_vec(),
        scan_budget_used: scan_budget,
        scan_limit: default_scan_limit(scan_budget),
        stages,
        family: Some(Arc::new(family)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[f64]) -> BoundedSeq {
        BoundedSeq::periodic(v.to_vec()).unwrap()
    }

    #[test]
    fn cells_split_at_zero() {
        assert_eq!(cell_index(-1.0, 1.0, 1), 0);
        assert_eq!(cell_index(-1e-12, 1.0, 1), 0);
        assert_eq!(cell_index(0.0, 1.0, 1), 1);
        assert_eq!(cell_index(1.0, 1.0, 1), 1);
        assert_eq!(cell_index(1.0, 1.0, 3), 7);
        assert_eq!(cell_index(-2.0, 1.0, 3), 0);
        assert_eq!(midpoint(0, 1.0, 1), -0.5);
        // nested levels agree
        for z in [-0.93, -0.2, 0.0, 0.31, 0.999] {
            for l in 1..20 {
                assert_eq!(cell_index(z, 1.0, l + 1) / 2, cell_index(z, 1.0, l));
            }
        }
    }

    #[test]
    fn single_alternating_member_picks_odds() {
        let d = SubspaceD::finite(vec![p(&[-1.0, 1.0])]).unwrap();
        let s = bw_extract(&d, 1, 64).unwrap();
        assert_eq!(s.prefix(), (1..=63).step_by(2).collect::<Vec<_>>().as_slice());
        assert_eq!(s.alpha(), &[-0.5]);
        assert_eq!(s.tol_schedule(), &[0.5]);
        assert!((s.alpha()[0] - -1.0).abs() <= s.tol_schedule()[0]);
    }

    #[test]
    fn constant_member_keeps_everything() {
        let d = SubspaceD::finite(vec![BoundedSeq::constant(0.5)]).unwrap();
        for depth in 1..=6 {
            let s = bw_extract(&d, depth, 40).unwrap();
            assert_eq!(s.len(), 40);
            assert!((s.alpha()[0] - 0.5).abs() <= *s.tol_schedule().last().unwrap());
        }
    }

    #[test]
    fn two_members_alternating_points() {
        let d = SubspaceD::finite_unchecked(vec![p(&[-1.0, 1.0]), p(&[1.0, -1.0])]);
        let s = bw_extract(&d, 2, 256).unwrap();
        assert_eq!(s.len(), 128);
        assert!(s.prefix().iter().all(|n| n % 2 == 1));
        let delta = *s.tol_schedule().last().unwrap();
        assert!((s.alpha()[0] + 1.0).abs() <= delta);
        assert!((s.alpha()[1] - 1.0).abs() <= delta);

        let d = SubspaceD::finite(vec![p(&[-1.0, 1.0]), p(&[1.0, -1.0, 0.5])]).unwrap();
        let s = bw_extract(&d, 2, 256).unwrap();
        assert!(s.prefix().iter().all(|n| n % 2 == 1));
    }

    #[test]
    fn exhaustion_and_errors() {
        let d = SubspaceD::finite(vec![p(&[-1.0, 1.0])]).unwrap();
        assert!(matches!(
            bw_extract(&d, 3, 4),
            Err(Error::BudgetExhausted(_))
        ));
        assert!(matches!(bw_extract(&SubspaceD::zero(), 1, 10), Err(Error::EmptyBasis)));
        assert!(bw_extract(&d, 0, 10).is_err());
        assert!(bw_extract(&SubspaceD::countable(vec![p(&[1.0])]), 1, 10).is_err());
    }

    #[test]
    fn extension_matches_longer_extraction() {
        let d = SubspaceD::finite(vec![p(&[-1.0, 1.0]), p(&[1.0, -1.0, 0.0])]).unwrap();
        let short = bw_extract(&d, 2, 300).unwrap();
        let long = bw_extract(&d, 2, 3000).unwrap();
        assert_eq!(short.stages(), long.stages());
        let grown = short.clone().extended_to_index(3000).unwrap();
        assert_eq!(grown.prefix(), long.prefix());
        let grown = short.clone().extended_to_len(long.len()).unwrap();
        assert_eq!(grown.prefix(), long.prefix());
        for n in [1, 2, 3, 299, 301, 1500, 2999] {
            assert_eq!(short.position_lazy(n), long.position(n).unwrap());
        }
        assert!(matches!(short.position(301), Err(Error::SchemeExhausted(301))));
        let capped = short.with_scan_limit(400);
        assert!(matches!(capped.extended_to_index(401), Err(Error::SchemeExhausted(401))));
    }

    #[test]
    fn eta_enumerates_halves() {
        let d = SubspaceD::finite(vec![p(&[-1.0, 1.0])]).unwrap();
        let s = bw_extract(&d, 1, 64).unwrap();
        // I⁻ = {n_1, n_3, …} = {1, 5, …}, I⁺ = {n_2, n_4, …} = {3, 7, …}
        assert_eq!(s.minus_set().take(3).collect::<Vec<_>>(), vec![1, 5, 9]);
        assert_eq!(s.plus_set().take(3).collect::<Vec<_>>(), vec![3, 7, 11]);
        assert_eq!(s.eta_minus(1), Some(1));
        assert_eq!(s.eta_plus(1), Some(3));
        assert_eq!(s.eta_plus(2), Some(7));
        assert_eq!(s.eta_plus(0), None);
    }

    #[test]
    fn natural_scheme_is_everything() {
        let s = IndexScheme::natural().extended_to_len(10).unwrap();
        assert_eq!(s.prefix(), (1..=10).collect::<Vec<_>>().as_slice());
        assert_eq!(s.position_lazy(1_000), Some(1_000));
        assert_eq!(s.slack(), 0.0);
    }

    #[test]
    fn diagonal_on_constants_keeps_initial_segment() {
        let fam: Vec<BoundedSeq> = (1..=3).map(|i| BoundedSeq::constant(1.0 / i as f64)).collect();
        let d = SubspaceD::countable(fam);
        let s = diagonal_extract(&d, 3, &[0.5, 0.25, 0.125], 100).unwrap();
        assert_eq!(s.prefix(), (1..=100).collect::<Vec<_>>().as_slice());
        for (i, (b, t)) in s.alpha().iter().zip(s.tol_schedule()).enumerate() {
            assert!((b - 1.0 / (i + 1) as f64).abs() <= *t);
        }
    }

    #[test]
    fn diagonal_on_scaled_alternation() {
        let fam: Vec<BoundedSeq> = (1..=2)
            .map(|i| p(&[-1.0, 1.0]).scaled(1.0 + 1.0 / i as f64))
            .collect();
        let d = SubspaceD::countable(fam);
        let s = diagonal_extract(&d, 2, &[0.5, 0.25], 512).unwrap();
        assert!(s.prefix().iter().all(|n| n % 2 == 1));
        for (i, b) in s.alpha().iter().enumerate() {
            let target = -(1.0 + 1.0 / (i + 1) as f64);
            assert!((b - target).abs() <= s.tol_schedule()[i]);
        }
    }

    #[test]
    fn single_stage_diagonal_equals_bw() {
        let w = p(&[0.3, -0.7, 0.9, 0.1, -0.2]);
        let diag = diagonal_extract(&SubspaceD::countable(vec![w.clone()]), 1, &[0.2], 700).unwrap();
        let level = depth_for(w.bound(), 0.2) as usize;
        let bw = bw_extract(&SubspaceD::finite(vec![w]).unwrap(), level, 700).unwrap();
        assert_eq!(diag.prefix(), bw.prefix());
    }

    #[test]
    fn diagonal_validation() {
        let d = SubspaceD::dense(vec![p(&[1.0]), p(&[2.0])]);
        assert!(diagonal_extract(&d, 2, &[0.5], 10).is_err());
        assert!(diagonal_extract(&d, 2, &[0.5, 0.5], 10).is_err());
        assert!(diagonal_extract(&d, 0, &[0.5], 10).is_err());
        assert!(diagonal_extract(&d, 3, &[0.5, 0.25, 0.1], 10).is_err());
        match diagonal_extract(&d, 2, &[0.5, 0.25], 3) {
            Err(Error::BudgetExhausted(e)) => match *e {
                Exhausted::Extraction {
                    completed_stages, ..
                } => assert_eq!(completed_stages, 0),
                other => panic!("{other:?}"),
            },
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn json_roundtrip_is_bit_exact() {
        let d = SubspaceD::finite(vec![p(&[-1.0, 1.0]), p(&[0.1, -1.0 / 3.0, 0.7])]).unwrap();
        let s = bw_extract(&d, 4, 999).unwrap();
        let back = IndexScheme::from_json(&s.to_json().unwrap()).unwrap();
        assert_eq!(back, s);
        for (a, b) in back.alpha().iter().zip(s.alpha()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert!(!back.is_attached());
        assert!(matches!(
            back.clone().extended_to_index(1000),
            Err(Error::SchemeExhausted(_))
        ));
        let re = back.attach(&d).unwrap().extended_to_index(2000).unwrap();
        assert_eq!(re.prefix(), s.extended_to_index(2000).unwrap().prefix());
        let v: serde_json::Value = serde_json::from_str(&re.to_json().unwrap()).unwrap();
        for field in ["prefix", "alpha", "tol_schedule", "mode", "scan_budget_used"] {
            assert!(v.get(field).is_some(), "{field}");
        }
    }
}
