use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Piecewise-linear function on `[0, 1]`.
///
/// Breakpoints strictly increase from 0 to 1; between them the function is
/// the linear interpolant of the stored values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPl")]
pub struct PlFunction {
    breaks: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Deserialize)]
struct RawPl {
    breaks: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<RawPl> for PlFunction {
    type Error = Error;

    fn try_from(raw: RawPl) -> Result<Self> {
        PlFunction::new(raw.breaks, raw.values)
    }
}

impl PlFunction {
    pub fn new(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breaks.len() != values.len() {
            return Err(Error::InvalidElement(format!(
                "{} breakpoints but {} values",
                breaks.len(),
                values.len()
            )));
        }
        if breaks.len() < 2 {
            return Err(Error::InvalidElement("need at least two breakpoints".into()));
        }
        if breaks[0] != 0.0 || *breaks.last().unwrap() != 1.0 {
            return Err(Error::InvalidElement("breakpoints must start at 0 and end at 1".into()));
        }
        if breaks.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidElement("breakpoints must strictly increase".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidElement("values must be finite".into()));
        }
        Ok(Self { breaks, values })
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, t: f64) -> f64 {
        let i = self.breaks.partition_point(|b| *b <= t);
        if i == 0 {
            return self.values[0];
        }
        if i == self.breaks.len() {
            return *self.values.last().unwrap();
        }
        let (t0, t1) = (self.breaks[i - 1], self.breaks[i]);
        let (v0, v1) = (self.values[i - 1], self.values[i]);
        if t == t0 {
            return v0;
        }
        v0 + (v1 - v0) * ((t - t0) / (t1 - t0))
    }

    /// Sup norm; a PL function attains its extrema at breakpoints.
    pub fn sup(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    fn lin_comb(a: f64, f: &Self, b: f64, g: &Self) -> Self {
        let mut breaks: Vec<f64> = f.breaks.iter().chain(&g.breaks).copied().collect();
        breaks.sort_by(|x, y| x.total_cmp(y));
        breaks.dedup();
        let values = breaks.iter().map(|&t| a * f.eval(t) + b * g.eval(t)).collect();
        Self { breaks, values }
    }
}

/// An element of one of the built-in spaces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Element {
    /// Coordinates in a finite-dimensional space (also used by custom nets).
    Vector(Vec<f64>),
    /// Finitely supported sequence, 1-based indices, no explicit zeros.
    Sparse(BTreeMap<usize, f64>),
    Pl(PlFunction),
}

impl Element {
    pub fn vector(values: impl Into<Vec<f64>>) -> Self {
        Element::Vector(values.into())
    }

    /// Builds a sparse element, dropping explicit zeros.
    pub fn sparse<I: IntoIterator<Item = (usize, f64)>>(entries: I) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, v) in entries {
            if i == 0 {
                return Err(Error::InvalidElement("sparse indices are 1-based".into()));
            }
            if !v.is_finite() {
                return Err(Error::InvalidElement(format!("non-finite value at {i}")));
            }
            if v != 0.0 {
                map.insert(i, v);
            }
        }
        Ok(Element::Sparse(map))
    }

    pub fn pl(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        PlFunction::new(breaks, values).map(Element::Pl)
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Element::Vector(_) => "vector",
            Element::Sparse(_) => "sparse",
            Element::Pl(_) => "piecewise-linear",
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Element::Vector(v) => v.iter().all(|x| *x == 0.0),
            Element::Sparse(m) => m.values().all(|x| *x == 0.0),
            Element::Pl(f) => f.values.iter().all(|x| *x == 0.0),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        match self {
            Element::Vector(v) => Element::Vector(v.iter().map(|x| c * x).collect()),
            Element::Sparse(m) => Element::Sparse(
                m.iter()
                    .map(|(i, x)| (*i, c * x))
                    .filter(|(_, x)| *x != 0.0)
                    .collect(),
            ),
            Element::Pl(f) => Element::Pl(PlFunction {
                breaks: f.breaks.clone(),
                values: f.values.iter().map(|x| c * x).collect(),
            }),
        }
    }

    /// `a·x + b·y`.
    pub fn lin_comb(a: f64, x: &Self, b: f64, y: &Self) -> Result<Self> {
        match (x, y) {
            (Element::Vector(u), Element::Vector(v)) if u.len() == v.len() => Ok(Element::Vector(
                u.iter().zip(v).map(|(p, q)| a * p + b * q).collect(),
            )),
            (Element::Sparse(u), Element::Sparse(v)) => {
                let mut out = BTreeMap::new();
                for (i, p) in u {
                    out.insert(*i, a * p);
                }
                for (i, q) in v {
                    *out.entry(*i).or_insert(0.0) += b * q;
                }
                out.retain(|_, x| *x != 0.0);
                Ok(Element::Sparse(out))
            }
            (Element::Pl(f), Element::Pl(g)) => Ok(Element::Pl(PlFunction::lin_comb(a, f, b, g))),
            _ => Err(Error::KindMismatch {
                expected: x.describe(),
                found: y.describe(),
            }),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Self::lin_comb(1.0, self, -1.0, other)
    }

    pub(crate) fn describe(&self) -> String {
        match self {
            Element::Vector(v) => format!("vector of length {}", v.len()),
            Element::Sparse(_) => "sparse sequence".into(),
            Element::Pl(_) => "piecewise-linear function".into(),
        }
    }

    /// Short human-readable rendering for tags and reports.
    pub fn short(&self) -> String {
        fn list(v: &[f64]) -> String {
            let parts: Vec<String> = v.iter().take(8).map(|x| format!("{x}")).collect();
            let more = if v.len() > 8 { ",…" } else { "" };
            format!("({}{more})", parts.join(","))
        }
        match self {
            Element::Vector(v) => list(v),
            Element::Sparse(m) => {
                let parts: Vec<String> = m.iter().take(8).map(|(i, x)| format!("{i}:{x}")).collect();
                format!("{{{}}}", parts.join(","))
            }
            Element::Pl(f) => format!("pl{}", list(&f.values)),
        }
    }
}
