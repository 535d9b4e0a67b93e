//! The scheme-placed embedding and its certificates against `D + c`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::limit::{limit_along, LimitEstimate, LimitFunctional};
use super::scheme::{bw_extract, diagonal_extract, IndexScheme, SchemeMode};
use super::subspace::{DMode, SubspaceD};
use crate::embed::{check_eps, IsometryDefect};
use crate::error::{Error, Exhausted, Result};
use crate::seq::{combine, BoundedSeq, SeqTag};
use crate::spaces::{Element, SeparableSpace};
use crate::verify::{check_scheme_isometry, check_separation, IsometryReport, SeparationReport};
use crate::witness::OscillationWitness;

fn mode_name(mode: SchemeMode) -> &'static str {
    match mode {
        SchemeMode::Natural => "natural",
        SchemeMode::FiniteBasis => "finite_basis",
        SchemeMode::CountableBasis => "countable_basis",
        SchemeMode::DenseSequence => "dense_sequence",
    }
}

/// Value of the placed coordinate whose position in `I` is `j`.
fn placed(space: &SeparableSpace, x: &Element, j: usize) -> f64 {
    let k = j.div_ceil(2);
    let v = space.functional_at(k).eval(x).expect("checked element");
    if j % 2 == 0 {
        v
    } else {
        -v
    }
}

/// `n ↦ +φ_k(x)` at `n = η⁺(k)`, `−φ_k(x)` at `n = η⁻(k)`, `0` off `I`.
///
/// Coordinates past the materialized prefix are classified on the fly, which
/// panics for a scheme that was deserialized without re-attaching its family.
/// Use [`scheme_coordinate`] for a fallible lookup.
pub fn scheme_embed(space: &SeparableSpace, scheme: &IndexScheme, x: &Element) -> Result<BoundedSeq> {
    let bound = space.norm(x)?;
    let space = Arc::new(space.clone());
    let scheme = Arc::new(scheme.clone());
    let point = x.clone();
    let tag = SeqTag::FunctionalImage {
        space: space.label(),
        element: x.short(),
        scheme: Some(mode_name(scheme.mode()).to_string()),
    };
    BoundedSeq::tagged(bound, tag, move |n| match scheme.position_lazy(n) {
        Some(j) => placed(&space, &point, j),
        None => 0.0,
    })
}

/// Strict coordinate of the placed embedding; fails past the classified range.
pub fn scheme_coordinate(
    space: &SeparableSpace,
    scheme: &IndexScheme,
    x: &Element,
    n: usize,
) -> Result<f64> {
    space.check(x)?;
    Ok(match scheme.position(n)? {
        Some(j) => placed(space, x, j),
        None => 0.0,
    })
}

/// Materializes at least `len` prefix entries, growing geometrically.
fn grow(scheme: &mut IndexScheme, len: usize) -> Result<()> {
    if scheme.len() >= len {
        return Ok(());
    }
    let target = len.max(scheme.len().saturating_mul(2));
    match scheme.clone().extended_to_len(target) {
        Ok(s) => *scheme = s,
        Err(_) if target > len => *scheme = scheme.clone().extended_to_len(len)?,
        Err(e) => return Err(e),
    }
    Ok(())
}

/// Isometry certificate for the placed embedding over net indices `k ≤ max_k`.
pub fn scheme_isometry_defect(
    space: &SeparableSpace,
    scheme: &IndexScheme,
    x: &Element,
    max_k: usize,
) -> Result<IsometryDefect> {
    if max_k == 0 {
        return Err(Error::IndexZero);
    }
    let upper = space.norm(x)?;
    if upper == 0.0 {
        return Err(Error::ZeroElement);
    }
    let mut scheme = scheme.clone();
    grow(&mut scheme, 2 * max_k)?;
    let last = scheme.eta_plus(max_k).expect("grown");
    let image = scheme_embed(space, &scheme, x)?;
    let achieved = image.prefix_sup(last)?;
    let dist = space.net_distance(&x.scaled(1.0 / upper), max_k)?;
    Ok(IsometryDefect {
        lower: upper * (1.0 - dist),
        achieved,
        upper,
    })
}

/// `scheme_embed(x) − d`.
pub fn separation_sequence(
    space: &SeparableSpace,
    scheme: &IndexScheme,
    x: &Element,
    d: &BoundedSeq,
) -> Result<BoundedSeq> {
    combine(&[1.0, -1.0], &[scheme_embed(space, scheme, x)?, d.clone()])
}

/// A separation witness with the limit estimate it was built from.
///
/// `scheme` is the input scheme extended far enough to hold every witness index.
#[derive(Clone, Debug)]
pub struct SeparationCertificate {
    pub witness: OscillationWitness,
    pub limit: LimitEstimate,
    pub scheme: IndexScheme,
}

impl SeparationCertificate {
    /// The gap every sound certificate must reach: `2‖x‖(1 − ε) − 2·err`.
    pub fn promised_gap(norm: f64, eps: f64, limit: &LimitEstimate) -> f64 {
        2.0 * norm * (1.0 - eps) - 2.0 * limit.err
    }
}

/// Certifies that `scheme_embed(x) − d` has no limit.
///
/// With `L ± err` the limit of `d` along the scheme, coordinates `η⁺(k)` are
/// kept when they reach `‖x‖(1 − ε) − L − err` and `η⁻(k)` when they stay below
/// `−‖x‖(1 − ε) − L + err`. Net indices `k ≤ scan_budget` are scanned in order.
pub fn separation_witness(
    space: &SeparableSpace,
    scheme: &IndexScheme,
    x: &Element,
    d: &BoundedSeq,
    eps: f64,
    count: usize,
    scan_budget: usize,
) -> Result<OscillationWitness> {
    separation_certificate(space, scheme, x, d, eps, count, scan_budget).map(|c| c.witness)
}

pub fn separation_certificate(
    space: &SeparableSpace,
    scheme: &IndexScheme,
    x: &Element,
    d: &BoundedSeq,
    eps: f64,
    count: usize,
    scan_budget: usize,
) -> Result<SeparationCertificate> {
    check_eps(eps)?;
    if count == 0 {
        return Err(Error::invalid("count", "must be at least 1"));
    }
    let norm = space.norm(x)?;
    if norm == 0.0 {
        return Err(Error::ZeroElement);
    }
    let mut scheme = scheme.clone();
    grow(&mut scheme, (2 * count).max(2))?;
    let limit = limit_along(d, &scheme, scheme.len())?;
    let target_hi = norm * (1.0 - eps) - limit.value - limit.err;
    let target_lo = -norm * (1.0 - eps) - limit.value + limit.err;

    let mut y = separation_sequence(space, &scheme, x, d)?;
    let mut kept = Vec::with_capacity(count);
    let mut k = 0;
    while kept.len() < count && k < scan_budget {
        k += 1;
        if scheme.len() < 2 * k {
            if grow(&mut scheme, 2 * k).is_err() {
                break;
            }
            y = separation_sequence(space, &scheme, x, d)?;
        }
        let hi = scheme.eta_plus(k).expect("grown");
        let lo = scheme.eta_minus(k).expect("grown");
        if y.at(hi) >= target_hi && y.at(lo) <= target_lo {
            kept.push((hi, lo));
        }
    }
    let plus = kept.iter().map(|&(n, _)| (n, y.at(n))).collect();
    let minus = kept.iter().map(|&(_, n)| (n, y.at(n))).collect();
    let witness = OscillationWitness::assemble(plus, minus, target_hi, target_lo, eps);
    if kept.len() < count {
        return Err(Error::BudgetExhausted(Box::new(Exhausted::Witness {
            found: kept.len(),
            requested: count,
            partial: witness,
        })));
    }
    Ok(SeparationCertificate {
        witness,
        limit,
        scheme,
    })
}

/// Knobs for [`build_extension`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExtensionConfig {
    /// Refinement depth for a finite basis.
    pub depth: usize,
    /// Per-stage tolerances for countable and dense families.
    pub tol_schedule: Vec<f64>,
    /// Stages for countable and dense families; defaults to the schedule length.
    pub m: Option<usize>,
    pub scan_budget: usize,
    pub scan_limit: Option<usize>,
    /// Net indices covered by the isometry certificates.
    pub k: usize,
    pub epsilon: f64,
    pub count: usize,
    pub witness_budget: usize,
    /// Random combinations of members added to the `d` probes.
    pub d_combos: usize,
    pub seed: u64,
}

impl Default for ExtensionConfig {
    fn default() -> Self {
        Self {
            depth: 4,
            tol_schedule: vec![0.5, 0.25, 0.125],
            m: None,
            scan_budget: 4096,
            scan_limit: None,
            k: 64,
            epsilon: 0.2,
            count: 5,
            witness_budget: 100_000,
            d_combos: 4,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LimitEntry {
    pub d_id: String,
    pub value: f64,
    pub err: f64,
}

/// Generators of `Z = D + T(E)` together with their certificates.
#[derive(Clone, Debug, Serialize)]
pub struct ExtensionRecord {
    pub scheme: IndexScheme,
    pub limits: Vec<LimitEntry>,
    pub isometry: IsometryReport,
    pub separation: SeparationReport,
}

impl ExtensionRecord {
    pub fn all_pass(&self) -> bool {
        self.isometry.all_pass && self.separation.all_pass
    }
}

/// Runs the extraction that fits `d`'s mode.
pub fn extract_for(d: &SubspaceD, cfg: &ExtensionConfig) -> Result<IndexScheme> {
    let scheme = if d.is_zero() {
        IndexScheme::natural()
    } else {
        match d.mode() {
            DMode::FiniteBasis => bw_extract(d, cfg.depth, cfg.scan_budget)?,
            DMode::CountableBasis | DMode::DenseSequence => {
                let m = cfg.m.unwrap_or(cfg.tol_schedule.len());
                diagonal_extract(d, m, &cfg.tol_schedule, cfg.scan_budget)?
            }
        }
    };
    Ok(match cfg.scan_limit {
        Some(limit) if scheme.mode() != SchemeMode::Natural => scheme.with_scan_limit(limit),
        _ => scheme,
    })
}

/// `0`, the members that took part in the extraction, and seeded random combinations of them.
pub fn d_probes(d: &SubspaceD, scheme: &IndexScheme, combos: usize, seed: u64) -> Result<Vec<(String, BoundedSeq)>> {
    let used = match scheme.mode() {
        SchemeMode::Natural => 0,
        SchemeMode::FiniteBasis => d.listed_len(),
        SchemeMode::CountableBasis | SchemeMode::DenseSequence => scheme.alpha().len(),
    };
    let members = d.first(used)?;
    let mut out = vec![("0".to_string(), BoundedSeq::zero())];
    for (i, w) in members.iter().enumerate() {
        out.push((format!("w{}", i + 1), w.clone()));
    }
    if members.is_empty() {
        return Ok(out);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for r in 1..=combos {
        let coeffs: Vec<f64> = members.iter().map(|_| rng.gen_range(-2.0..=2.0)).collect();
        out.push((format!("r{r}"), combine(&coeffs, &members)?));
    }
    Ok(out)
}

/// Extracts a scheme for `d`, places every sample and certifies the result.
pub fn build_extension(
    space: &SeparableSpace,
    d: &SubspaceD,
    samples: &[Element],
    cfg: &ExtensionConfig,
) -> Result<ExtensionRecord> {
    let mut scheme = extract_for(d, cfg)?;
    grow(&mut scheme, (2 * cfg.k).max(2 * cfg.count).max(2))?;
    let probes = d_probes(d, &scheme, cfg.d_combos, cfg.seed)?;
    let functional = LimitFunctional::over_prefix(Arc::new(scheme.clone()))?;
    let limits = probes
        .iter()
        .map(|(id, seq)| {
            functional.eval(id, seq).map(|l| LimitEntry {
                d_id: id.clone(),
                value: l.value,
                err: l.err,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let isometry = check_scheme_isometry(space, &scheme, samples, cfg.k);
    let separation = check_separation(
        space,
        &scheme,
        samples,
        &probes,
        cfg.epsilon,
        cfg.count,
        cfg.witness_budget,
    );
    Ok(ExtensionRecord {
        scheme,
        limits,
        isometry,
        separation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::embed_t1;
    use crate::spaces::CustomNet;

    fn cycle() -> SeparableSpace {
        SeparableSpace::CustomNet(
            CustomNet::new("pm1", 2.0, vec![vec![1.0], vec![-1.0]], vec![vec![1.0], vec![-1.0]]).unwrap(),
        )
    }

    fn alt() -> BoundedSeq {
        BoundedSeq::periodic(vec![-1.0, 1.0]).unwrap()
    }

    fn odds() -> IndexScheme {
        bw_extract(&SubspaceD::finite(vec![alt()]).unwrap(), 1, 64).unwrap()
    }

    #[test]
    fn placement_follows_split() {
        let x = Element::vector(vec![2.0]);
        let e = scheme_embed(&cycle(), &odds(), &x).unwrap();
        assert_eq!(e.coordinate(1).unwrap(), -2.0);
        assert_eq!(e.coordinate(3).unwrap(), 2.0);
        assert_eq!(e.coordinate(2).unwrap(), 0.0);
        assert_eq!(e.coordinate(1001).unwrap(), -2.0);
        assert_eq!(e.bound(), 2.0);
        let zero = scheme_embed(&cycle(), &odds(), &Element::vector(vec![0.0])).unwrap();
        assert!((1..200).all(|n| zero.at(n) == 0.0));
        assert!(matches!(
            scheme_coordinate(&cycle(), &odds(), &x, 65),
            Err(Error::SchemeExhausted(65))
        ));
        assert_eq!(scheme_coordinate(&cycle(), &odds(), &x, 64).unwrap(), 0.0);
    }

    #[test]
    fn natural_scheme_relabels_t1() {
        let space = SeparableSpace::finite_dim_lp(2, 1.5).unwrap();
        let x = Element::vector(vec![0.7, -1.9]);
        let t = embed_t1(&space, &x).unwrap();
        let e = scheme_embed(&space, &IndexScheme::natural(), &x).unwrap();
        for k in 1..=500 {
            assert_eq!(e.at(2 * k).to_bits(), t.at(2 * k - 1).to_bits());
            assert_eq!(e.at(2 * k - 1).to_bits(), t.at(2 * k).to_bits());
        }
    }

    #[test]
    fn separation_examples() {
        let x = Element::vector(vec![2.0]);
        let c = separation_certificate(&cycle(), &odds(), &x, &alt(), 0.2, 5, 1000).unwrap();
        assert_eq!(c.limit.value, -1.0);
        let w = &c.witness;
        assert!(w.plus_values.iter().all(|&v| v == 3.0));
        assert!(w.minus_values.iter().all(|&v| v == -1.0));
        assert!(w.gap >= 4.0 - 2.0 * c.limit.err);
        let y = separation_sequence(&cycle(), &c.scheme, &x, &alt()).unwrap();
        w.verify(&y).unwrap();
        // the lazily extended original scheme agrees
        w.verify(&separation_sequence(&cycle(), &odds(), &x, &alt()).unwrap()).unwrap();

        let w0 = separation_witness(&cycle(), &odds(), &x, &BoundedSeq::zero(), 0.2, 5, 1000).unwrap();
        assert!(w0.gap >= 2.0 * 2.0 * 0.8 - 2.0 * odds().slack());

        let x2 = Element::vector(vec![4.0]);
        let c2 = separation_certificate(&cycle(), &odds(), &x2, &alt(), 0.2, 5, 1000).unwrap();
        assert!(c2.witness.plus_values.iter().all(|&v| v == 5.0));
        assert!(c2.witness.minus_values.iter().all(|&v| v == -3.0));

        assert!(matches!(
            separation_witness(&cycle(), &odds(), &Element::vector(vec![0.0]), &alt(), 0.2, 5, 10),
            Err(Error::ZeroElement)
        ));
        assert!(matches!(
            separation_witness(&cycle(), &odds(), &x, &alt(), 0.2, 5, 4),
            Err(Error::BudgetExhausted(_))
        ));
    }

    #[test]
    fn extension_on_small_basis_passes() {
        let d = SubspaceD::finite(vec![alt()]).unwrap();
        let samples = vec![Element::vector(vec![2.0]), Element::vector(vec![-0.5])];
        let rec = build_extension(&cycle(), &d, &samples, &ExtensionConfig::default()).unwrap();
        assert!(rec.all_pass(), "{:#?}", rec.separation);
        assert_eq!(rec.separation.entries.len(), 2 * (2 + 4));
    }

    #[test]
    fn extension_on_zero_subspace_is_t1() {
        let rec = build_extension(
            &cycle(),
            &SubspaceD::zero(),
            &[Element::vector(vec![3.0])],
            &ExtensionConfig::default(),
        )
        .unwrap();
        assert_eq!(rec.scheme.mode(), SchemeMode::Natural);
        assert!(rec.all_pass());
        assert_eq!(rec.limits.len(), 1);
    }

    #[test]
    fn extension_on_dense_constants() {
        let fam = (1..=3).map(|j| BoundedSeq::constant(1.0 / j as f64)).collect();
        let d = SubspaceD::dense(fam);
        let space = SeparableSpace::finite_dim_lp(2, 2.0).unwrap();
        let rec = build_extension(
            &space,
            &d,
            &[Element::vector(vec![3.0, 4.0])],
            &ExtensionConfig::default(),
        )
        .unwrap();
        assert!(rec.all_pass());
        for (l, j) in rec.limits[1..4].iter().zip(1..) {
            assert!((l.value - 1.0 / j as f64).abs() <= l.err);
        }
    }
}
