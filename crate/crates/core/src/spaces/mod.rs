//! Computable separable Banach spaces.
//!
//! Each space provides an exact norm, a deterministic enumeration `u_1, u_2, …`
//! of unit vectors that is dense in the unit sphere, and for every `u_k` an
//! explicit norm-one functional `φ_k` with `φ_k(u_k) = 1` (a duality map).
//!
//! Net enumeration proceeds in levels `t = 1, 2, …`; each level lists the
//! nonzero integer vectors in `[−t, t]^d` lexicographically and normalizes
//! them. Directions repeat across levels.
//!
//! | space | free coordinates at level `t` |
//! |---|---|
//! | `FiniteDimLp { dim, p }` | `dim` |
//! | `SeqLp { p, support }` | indices `1..=min(t, support)` |
//! | `ContinuousPl` | values at `j / 2^r`, `r` = number of decimal digits of `t` |

mod element;
pub(crate) mod net;
mod spec;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use element::{Element, PlFunction};
pub use spec::CustomNetFile;

use crate::error::{Error, Result};

/// Tolerance for unit-norm and `φ_k(u_k) = 1` checks.
pub const UNIT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum SeparableSpace {
    /// `ℝ^dim` with the `p`-norm, `p ∈ [1, ∞]`.
    FiniteDimLp { dim: usize, p: f64 },
    /// Finitely supported sequences with the `p`-norm, `p ∈ [1, ∞)`. The net
    /// only uses indices up to `support`.
    SeqLp { p: f64, support: usize },
    /// Piecewise-linear functions on `[0, 1]` with dyadic breakpoints, sup norm.
    ContinuousPl,
    CustomNet(CustomNet),
}

/// `ℝ^dim` with the `p`-norm and an explicit cyclic net.
#[derive(Clone, Debug, PartialEq)]
pub struct CustomNet {
    name: String,
    dim: usize,
    p: f64,
    points: Vec<Vec<f64>>,
    functionals: Vec<Vec<f64>>,
}

impl CustomNet {
    pub fn new(
        name: impl Into<String>,
        p: f64,
        points: Vec<Vec<f64>>,
        functionals: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let bad = |reason: String| Error::InvalidSpace {
            field: "custom".into(),
            reason,
        };
        check_exponent(p, true).map_err(|r| bad(r))?;
        if points.is_empty() {
            return Err(bad("net has no points".into()));
        }
        if points.len() != functionals.len() {
            return Err(bad(format!(
                "{} points but {} functionals",
                points.len(),
                functionals.len()
            )));
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(bad("points must have at least one coordinate".into()));
        }
        let q = dual_exponent(p);
        for (k, (u, f)) in points.iter().zip(&functionals).enumerate() {
            if u.len() != dim || f.len() != dim {
                return Err(bad(format!("entry {} has the wrong dimension", k + 1)));
            }
            let n = lp_norm(u.iter().copied(), p);
            if (n - 1.0).abs() > UNIT_TOL {
                return Err(bad(format!("point {} has norm {n}", k + 1)));
            }
            let d = lp_norm(f.iter().copied(), q);
            if d > 1.0 + UNIT_TOL {
                return Err(bad(format!("functional {} has dual norm {d}", k + 1)));
            }
            let pairing = dot(f, u);
            if (pairing - 1.0).abs() > UNIT_TOL {
                return Err(bad(format!("functional {} pairs to {pairing} with its point", k + 1)));
            }
        }
        Ok(Self {
            name: name.into(),
            dim,
            p,
            points,
            functionals,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// A norm-one functional.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    /// Coordinate pairing in the dual `ℓ_q`.
    Dual { coeffs: Vec<f64>, dual_p: f64 },
    SparseDual {
        coeffs: BTreeMap<usize, f64>,
        dual_p: f64,
    },
    /// `f ↦ sign · f(at)`.
    PointMass { at: f64, sign: f64 },
}

impl Functional {
    /// Operator norm of the functional, computed from its representation.
    pub fn dual_norm(&self) -> f64 {
        match self {
            Functional::Dual { coeffs, dual_p } => lp_norm(coeffs.iter().copied(), *dual_p),
            Functional::SparseDual { coeffs, dual_p } => lp_norm(coeffs.values().copied(), *dual_p),
            Functional::PointMass { sign, .. } => sign.abs(),
        }
    }

    /// Infallible application for pre-checked arguments.
    pub(crate) fn eval(&self, x: &Element) -> Option<f64> {
        match (self, x) {
            (Functional::Dual { coeffs, .. }, Element::Vector(v)) if v.len() == coeffs.len() => {
                Some(dot(coeffs, v))
            }
            (Functional::SparseDual { coeffs, .. }, Element::Sparse(m)) => Some(
                coeffs
                    .iter()
                    .filter_map(|(i, c)| m.get(i).map(|x| c * x))
                    .sum(),
            ),
            (Functional::PointMass { at, sign }, Element::Pl(f)) => Some(sign * f.eval(*at)),
            _ => None,
        }
    }

    fn kind_name(&self) -> &'static str {
        match self {
            Functional::Dual { .. } => "dual vector",
            Functional::SparseDual { .. } => "sparse dual sequence",
            Functional::PointMass { .. } => "point mass",
        }
    }
}

impl SeparableSpace {
    pub fn finite_dim_lp(dim: usize, p: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSpace {
                field: "dim".into(),
                reason: "dimension must be at least 1".into(),
            });
        }
        check_exponent(p, true).map_err(|reason| Error::InvalidSpace {
            field: "p".into(),
            reason,
        })?;
        Ok(SeparableSpace::FiniteDimLp { dim, p })
    }

    pub fn seq_lp(p: f64, support: usize) -> Result<Self> {
        check_exponent(p, false).map_err(|reason| Error::InvalidSpace {
            field: "p".into(),
            reason,
        })?;
        if support == 0 {
            return Err(Error::InvalidSpace {
                field: "support".into(),
                reason: "support must be at least 1".into(),
            });
        }
        Ok(SeparableSpace::SeqLp { p, support })
    }

    pub fn continuous_pl() -> Self {
        SeparableSpace::ContinuousPl
    }

    /// Canonical spec string for reports.
    pub fn label(&self) -> String {
        match self {
            SeparableSpace::FiniteDimLp { dim, p } => format!("fdlp:dim={dim},p={}", fmt_p(*p)),
            SeparableSpace::SeqLp { p, support } => format!("seqlp:p={},support={support}", fmt_p(*p)),
            SeparableSpace::ContinuousPl => "c01".into(),
            SeparableSpace::CustomNet(c) => format!("custom:{}", c.name),
        }
    }

    fn expected(&self) -> String {
        match self {
            SeparableSpace::FiniteDimLp { dim, .. } => format!("vector of length {dim}"),
            SeparableSpace::CustomNet(c) => format!("vector of length {}", c.dim),
            SeparableSpace::SeqLp { .. } => "sparse sequence".into(),
            SeparableSpace::ContinuousPl => "piecewise-linear function".into(),
        }
    }

    /// Verifies that `x` is a canonical element of this space.
    pub fn check(&self, x: &Element) -> Result<()> {
        let ok = match (self, x) {
            (SeparableSpace::FiniteDimLp { dim, .. }, Element::Vector(v)) => v.len() == *dim,
            (SeparableSpace::CustomNet(c), Element::Vector(v)) => v.len() == c.dim,
            (SeparableSpace::SeqLp { .. }, Element::Sparse(m)) => {
                if m.contains_key(&0) || m.values().any(|v| *v == 0.0) {
                    return Err(Error::InvalidElement(
                        "sparse elements use 1-based indices and no explicit zeros".into(),
                    ));
                }
                true
            }
            (SeparableSpace::ContinuousPl, Element::Pl(_)) => true,
            _ => false,
        };
        if !ok {
            return Err(Error::KindMismatch {
                expected: self.expected(),
                found: x.describe(),
            });
        }
        let finite = match x {
            Element::Vector(v) => v.iter().all(|a| a.is_finite()),
            Element::Sparse(m) => m.values().all(|a| a.is_finite()),
            Element::Pl(_) => true,
        };
        if !finite {
            return Err(Error::InvalidElement("non-finite coordinate".into()));
        }
        Ok(())
    }

    pub fn norm(&self, x: &Element) -> Result<f64> {
        self.check(x)?;
        Ok(self.norm_unchecked(x))
    }

    pub(crate) fn norm_unchecked(&self, x: &Element) -> f64 {
        match x {
            Element::Vector(v) => lp_norm(v.iter().copied(), self.exponent()),
            Element::Sparse(m) => lp_norm(m.values().copied(), self.exponent()),
            Element::Pl(f) => f.sup(),
        }
    }

    fn exponent(&self) -> f64 {
        match self {
            SeparableSpace::FiniteDimLp { p, .. } | SeparableSpace::SeqLp { p, .. } => *p,
            SeparableSpace::CustomNet(c) => c.p,
            SeparableSpace::ContinuousPl => f64::INFINITY,
        }
    }

    fn free_coords(&self, t: usize) -> usize {
        match self {
            SeparableSpace::FiniteDimLp { dim, .. } => *dim,
            SeparableSpace::SeqLp { support, .. } => t.min(*support),
            SeparableSpace::ContinuousPl => (1 << pl_resolution(t)) + 1,
            SeparableSpace::CustomNet(c) => c.dim,
        }
    }

    /// Number of net points through `level` (custom nets: one cycle per level).
    pub fn net_count_through(&self, level: usize) -> u128 {
        match self {
            SeparableSpace::CustomNet(c) => (c.len() * level) as u128,
            _ => net::count_through(level, |t| self.free_coords(t)),
        }
    }

    /// `u_k` for `k ≥ 1`.
    pub fn net_point(&self, k: usize) -> Result<Element> {
        if k == 0 {
            return Err(Error::IndexZero);
        }
        Ok(self.unit_at(k))
    }

    pub(crate) fn unit_at(&self, k: usize) -> Element {
        if let SeparableSpace::CustomNet(c) = self {
            return Element::Vector(c.points[(k - 1) % c.len()].clone());
        }
        let (t, offset) = net::locate(k, |t| self.free_coords(t));
        let free = self.free_coords(t);
        let raw = net::decode(offset, free, t);
        match self {
            SeparableSpace::FiniteDimLp { p, .. } => {
                let v: Vec<f64> = raw.iter().map(|&d| d as f64).collect();
                let n = lp_norm(v.iter().copied(), *p);
                Element::Vector(v.into_iter().map(|x| x / n).collect())
            }
            SeparableSpace::SeqLp { p, .. } => {
                let n = lp_norm(raw.iter().map(|&d| d as f64), *p);
                Element::Sparse(
                    raw.iter()
                        .enumerate()
                        .filter(|(_, d)| **d != 0)
                        .map(|(i, &d)| (i + 1, d as f64 / n))
                        .collect(),
                )
            }
            SeparableSpace::ContinuousPl => {
                let m = raw.iter().map(|d| d.abs()).max().unwrap_or(1) as f64;
                let segments = (free - 1) as f64;
                let breaks = (0..free).map(|j| j as f64 / segments).collect();
                let values = raw.iter().map(|&d| d as f64 / m).collect();
                Element::Pl(PlFunction::new(breaks, values).expect("dyadic grid is canonical"))
            }
            SeparableSpace::CustomNet(_) => unreachable!(),
        }
    }

    /// `φ_k` with `φ_k(u_k) = 1` and `‖φ_k‖ = 1`.
    pub fn norming_functional(&self, k: usize) -> Result<Functional> {
        if k == 0 {
            return Err(Error::IndexZero);
        }
        Ok(self.functional_at(k))
    }

    pub(crate) fn functional_at(&self, k: usize) -> Functional {
        if let SeparableSpace::CustomNet(c) = self {
            return Functional::Dual {
                coeffs: c.functionals[(k - 1) % c.len()].clone(),
                dual_p: dual_exponent(c.p),
            };
        }
        self.duality_map(&self.unit_at(k))
    }

    /// Explicit norming functional for a unit vector of a built-in space.
    pub(crate) fn duality_map(&self, u: &Element) -> Functional {
        let p = self.exponent();
        match u {
            Element::Vector(v) => Functional::Dual {
                coeffs: dense_duality(v, p),
                dual_p: dual_exponent(p),
            },
            Element::Sparse(m) => Functional::SparseDual {
                coeffs: m.iter().map(|(i, x)| (*i, scalar_duality(*x, p))).collect(),
                dual_p: dual_exponent(p),
            },
            Element::Pl(f) => {
                let sup = f.sup();
                // leftmost breakpoint attaining the sup
                let j = f.values().iter().position(|v| v.abs() == sup).unwrap_or(0);
                Functional::PointMass {
                    at: f.breaks()[j],
                    sign: if f.values()[j] < 0.0 { -1.0 } else { 1.0 },
                }
            }
        }
    }

    /// `min_{1 ≤ k ≤ max_k} ‖v − u_k‖` for a unit vector `v`.
    pub fn net_distance(&self, v: &Element, max_k: usize) -> Result<f64> {
        if max_k == 0 {
            return Err(Error::IndexZero);
        }
        let n = self.norm(v)?;
        if (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotUnitVector(n));
        }
        Ok((1..=max_k)
            .map(|k| self.distance_unchecked(v, &self.unit_at(k)))
            .fold(f64::INFINITY, f64::min))
    }

    pub(crate) fn distance_unchecked(&self, x: &Element, y: &Element) -> f64 {
        let d = x.sub(y).expect("same space");
        self.norm_unchecked(&d)
    }
}

pub fn norm(space: &SeparableSpace, x: &Element) -> Result<f64> {
    space.norm(x)
}

pub fn net_point(space: &SeparableSpace, k: usize) -> Result<Element> {
    space.net_point(k)
}

pub fn norming_functional(space: &SeparableSpace, k: usize) -> Result<Functional> {
    space.norming_functional(k)
}

pub fn net_distance(space: &SeparableSpace, v: &Element, max_k: usize) -> Result<f64> {
    space.net_distance(v, max_k)
}

pub fn apply_functional(phi: &Functional, x: &Element) -> Result<f64> {
    phi.eval(x).ok_or_else(|| Error::KindMismatch {
        expected: format!("element matching a {}", phi.kind_name()),
        found: x.describe(),
    })
}

/// Breakpoint resolution of the `ContinuousPl` net at level `t`.
fn pl_resolution(t: usize) -> u32 {
    let mut r = 1;
    let mut n = t / 10;
    while n > 0 {
        r += 1;
        n /= 10;
    }
    r
}

fn check_exponent(p: f64, allow_inf: bool) -> std::result::Result<(), String> {
    if p.is_nan() || p < 1.0 {
        return Err(format!("exponent {p} must be at least 1"));
    }
    if p.is_infinite() && !allow_inf {
        return Err("exponent must be finite for sequence spaces".into());
    }
    Ok(())
}

pub(crate) fn dual_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

pub(crate) fn fmt_p(p: f64) -> String {
    if p.is_infinite() {
        "inf".into()
    } else {
        format!("{p}")
    }
}

/// `ℓ_p` norm of a finite list, scaled by the largest entry to avoid overflow.
pub(crate) fn lp_norm(values: impl Iterator<Item = f64> + Clone, p: f64) -> f64 {
    if p.is_infinite() {
        return values.fold(0.0_f64, |m, v| m.max(v.abs()));
    }
    if p == 1.0 {
        return values.map(f64::abs).sum();
    }
    let m = values.clone().fold(0.0_f64, |m, v| m.max(v.abs()));
    if m == 0.0 {
        return 0.0;
    }
    let s: f64 = values.map(|v| (v.abs() / m).powf(p)).sum();
    m * s.powf(1.0 / p)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn scalar_duality(x: f64, p: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if p == 1.0 {
        x.signum()
    } else {
        x.signum() * x.abs().powf(p - 1.0)
    }
}

fn dense_duality(u: &[f64], p: f64) -> Vec<f64> {
    if p.is_infinite() {
        let sup = u.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let i = u.iter().position(|v| v.abs() == sup).unwrap_or(0);
        let mut out = vec![0.0; u.len()];
        out[i] = if u[i] < 0.0 { -1.0 } else { 1.0 };
        return out;
    }
    u.iter().map(|&x| scalar_duality(x, p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9
    }

    fn cycle() -> SeparableSpace {
        SeparableSpace::CustomNet(
            CustomNet::new("pm1", 2.0, vec![vec![1.0], vec![-1.0]], vec![vec![1.0], vec![-1.0]]).unwrap(),
        )
    }

    #[test]
    fn norm_examples() {
        let e2 = SeparableSpace::finite_dim_lp(2, 2.0).unwrap();
        assert_eq!(e2.norm(&Element::vector(vec![3.0, 4.0])).unwrap(), 5.0);
        let l1 = SeparableSpace::seq_lp(1.0, 8).unwrap();
        let x = Element::sparse([(1, 1.0), (5, -2.0)]).unwrap();
        assert_eq!(l1.norm(&x).unwrap(), 3.0);
        let c = SeparableSpace::continuous_pl();
        let f = Element::pl(vec![0.0, 0.5, 1.0], vec![0.0, 2.0, -1.0]).unwrap();
        assert_eq!(c.norm(&f).unwrap(), 2.0);
        assert!(matches!(c.norm(&x), Err(Error::KindMismatch { .. })));
        assert!(matches!(
            e2.norm(&Element::vector(vec![1.0])),
            Err(Error::KindMismatch { .. })
        ));
    }

    #[test]
    fn net_point_examples() {
        let s = cycle();
        assert_eq!(s.net_point(1).unwrap(), Element::vector(vec![1.0]));
        assert_eq!(s.net_point(2).unwrap(), Element::vector(vec![-1.0]));
        assert_eq!(s.net_point(3).unwrap(), Element::vector(vec![1.0]));
        assert!(matches!(s.net_point(0), Err(Error::IndexZero)));

        let e2 = SeparableSpace::finite_dim_lp(2, 2.0).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let Element::Vector(u) = e2.net_point(1).unwrap() else { panic!() };
        assert!(close(u[0], -h) && close(u[1], -h));

        let l1 = SeparableSpace::seq_lp(1.0, 4).unwrap();
        let Element::Sparse(m) = l1.net_point(1).unwrap() else { panic!() };
        assert_eq!(m.len(), 1);
        assert_eq!(m.get(&1), Some(&-1.0));
    }

    #[test]
    fn functional_examples() {
        let e2 = SeparableSpace::finite_dim_lp(2, 2.0).unwrap();
        for k in 1..50 {
            let Element::Vector(u) = e2.net_point(k).unwrap() else { panic!() };
            let Functional::Dual { coeffs, .. } = e2.norming_functional(k).unwrap() else {
                panic!()
            };
            for (a, b) in u.iter().zip(&coeffs) {
                assert!(close(*a, *b));
            }
        }
        for p in [1.0, 1.5, 2.0, f64::INFINITY] {
            let s = SeparableSpace::finite_dim_lp(1, p).unwrap();
            let phi = s.duality_map(&Element::vector(vec![-1.0]));
            let Functional::Dual { coeffs, .. } = phi else { panic!() };
            assert_eq!(coeffs, vec![-1.0]);
        }
        let c = SeparableSpace::continuous_pl();
        let u = Element::pl(vec![0.0, 0.5, 1.0], vec![0.25, 1.0, -0.5]).unwrap();
        assert_eq!(c.duality_map(&u), Functional::PointMass { at: 0.5, sign: 1.0 });
    }

    #[test]
    fn apply_examples() {
        let phi = Functional::Dual {
            coeffs: vec![0.6, 0.8],
            dual_p: 2.0,
        };
        assert!(close(apply_functional(&phi, &Element::vector(vec![3.0, 4.0])).unwrap(), 5.0));
        let mass = Functional::PointMass { at: 0.5, sign: 1.0 };
        let f = Element::pl(vec![0.0, 0.5, 1.0], vec![0.0, 2.0, 0.0]).unwrap();
        assert_eq!(apply_functional(&mass, &f).unwrap(), 2.0);
        let sign = Functional::SparseDual {
            coeffs: [(1, 1.0), (2, -1.0)].into_iter().collect(),
            dual_p: f64::INFINITY,
        };
        let x = Element::sparse([(1, 1.0), (2, -2.0)]).unwrap();
        assert_eq!(apply_functional(&sign, &x).unwrap(), 3.0);
        assert!(matches!(apply_functional(&mass, &x), Err(Error::KindMismatch { .. })));
    }

    #[test]
    fn net_distance_examples() {
        assert_eq!(cycle().net_distance(&Element::vector(vec![1.0]), 1).unwrap(), 0.0);
        let e2 = SeparableSpace::finite_dim_lp(2, 2.0).unwrap();
        let v = Element::vector(vec![0.6, 0.8]);
        // brute force over the eight level-1 directions, best is the (+,+) diagonal
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expected = ((0.6 - h).powi(2) + (0.8 - h).powi(2)).sqrt();
        assert!(close(e2.net_distance(&v, 8).unwrap(), expected));
        assert!((expected - 0.141_778_04).abs() < 1e-7);
        assert!(matches!(
            e2.net_distance(&Element::vector(vec![3.0, 4.0]), 8),
            Err(Error::NotUnitVector(_))
        ));
        assert!(matches!(e2.net_distance(&v, 0), Err(Error::IndexZero)));
    }

    #[test]
    fn pl_net_uses_decade_resolution() {
        assert_eq!(pl_resolution(1), 1);
        assert_eq!(pl_resolution(9), 1);
        assert_eq!(pl_resolution(10), 2);
        assert_eq!(pl_resolution(100), 3);
        let c = SeparableSpace::continuous_pl();
        assert_eq!(c.net_count_through(1), 26);
        let Element::Pl(f) = c.net_point(1).unwrap() else { panic!() };
        assert_eq!(f.breaks(), &[0.0, 0.5, 1.0]);
        assert_eq!(f.values(), &[-1.0, -1.0, -1.0]);
    }

    #[test]
    fn custom_net_is_validated() {
        assert!(CustomNet::new("bad", 2.0, vec![vec![2.0]], vec![vec![0.5]]).is_err());
        assert!(CustomNet::new("bad", 2.0, vec![vec![1.0]], vec![vec![2.0]]).is_err());
        assert!(CustomNet::new("bad", 2.0, vec![vec![1.0]], vec![vec![-1.0]]).is_err());
        assert!(CustomNet::new("bad", 2.0, vec![], vec![]).is_err());
        assert!(CustomNet::new("bad", 2.0, vec![vec![1.0]], vec![]).is_err());
    }

    #[test]
    fn invalid_spaces_name_the_field() {
        match SeparableSpace::finite_dim_lp(0, 2.0) {
            Err(Error::InvalidSpace { field, .. }) => assert_eq!(field, "dim"),
            other => panic!("{other:?}"),
        }
        match SeparableSpace::seq_lp(f64::INFINITY, 3) {
            Err(Error::InvalidSpace { field, .. }) => assert_eq!(field, "p"),
            other => panic!("{other:?}"),
        }
        assert!(SeparableSpace::finite_dim_lp(2, 0.5).is_err());
        assert!(SeparableSpace::seq_lp(2.0, 0).is_err());
    }
}
