//! Text specs for sequences and sequence families.
//!
//! | spec | sequence |
//! |------|----------|
//! | `zero` | all zeros |
//! | `const:<v>` | constant `v` |
//! | `periodic:<v1>,<v2>,…` | repeats the pattern |
//! | `evconst:<v>@<n>` | `0` before index `n`, then `v` |
//! | `list:<v1>,…;tail=<t>` | listed values, then `t` |
//! | `limit:<v>,rate=<r>` | `v + r^n` |
//! | `combo:<c1>*<id1>+<c2>*<id2>…` | linear combination of named sequences |
//!
//! Families (members `i = 1, 2, …`) are `scaled:<spec>` for `(1 + 1/i)·s`,
//! `recip:<spec>` for `s / i` and `same:<spec>` for `s` itself.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::seq::{combine, BoundedSeq};

fn bad(spec: &str, reason: impl Into<String>) -> Error {
    Error::InvalidSequence {
        spec: spec.to_string(),
        reason: reason.into(),
    }
}

fn number(spec: &str, text: &str) -> Result<f64> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| bad(spec, format!("`{}` is not a number", text.trim())))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad(spec, format!("`{}` is not finite", text.trim())))
    }
}

fn numbers(spec: &str, text: &str) -> Result<Vec<f64>> {
    if text.trim().is_empty() {
        return Err(bad(spec, "empty value list"));
    }
    text.split(',').map(|t| number(spec, t)).collect()
}

/// Splits `2*a-0.5*b+c1*b` into `(coefficient, id)` terms.
fn combo_terms(spec: &str, body: &str) -> Result<Vec<(f64, String)>> {
    let mut terms = Vec::new();
    let mut current = String::new();
    let mut seen_star = false;
    for ch in body.chars().filter(|c| !c.is_whitespace()) {
        if seen_star && (ch == '+' || ch == '-') {
            terms.push(std::mem::take(&mut current));
            seen_star = false;
            if ch == '-' {
                current.push('-');
            }
            continue;
        }
        if ch == '*' {
            seen_star = true;
        }
        current.push(ch);
    }
    terms.push(current);
    terms
        .into_iter()
        .map(|t| {
            let (c, id) = t
                .split_once('*')
                .ok_or_else(|| bad(spec, format!("term `{t}` is not <coeff>*<id>")))?;
            let c = c.trim_start_matches('+');
            if id.is_empty() {
                return Err(bad(spec, format!("term `{t}` has no id")));
            }
            Ok((number(spec, c)?, id.to_string()))
        })
        .collect()
}

/// Parses a sequence spec; `combo:` ids resolve in `env`.
pub fn parse_seq(spec: &str, env: &BTreeMap<String, BoundedSeq>) -> Result<BoundedSeq> {
    let spec = spec.trim();
    let (head, body) = spec.split_once(':').unwrap_or((spec, ""));
    let wrap = |e: Error| match e {
        Error::InvalidSequence { .. } => e,
        other => bad(spec, other.to_string()),
    };
    match head {
        "zero" if body.is_empty() => Ok(BoundedSeq::zero()),
        "const" => Ok(BoundedSeq::constant(number(spec, body)?)),
        "periodic" => BoundedSeq::periodic(numbers(spec, body)?).map_err(wrap),
        "evconst" => {
            let (v, n) = body
                .split_once('@')
                .ok_or_else(|| bad(spec, "expected evconst:<value>@<index>"))?;
            let n: usize = n
                .trim()
                .parse()
                .map_err(|_| bad(spec, format!("`{n}` is not an index")))?;
            BoundedSeq::eventually_constant(number(spec, v)?, n).map_err(wrap)
        }
        "list" => {
            let (vals, tail) = body
                .split_once(";tail=")
                .ok_or_else(|| bad(spec, "expected list:<v1>,…;tail=<t>"))?;
            BoundedSeq::explicit(numbers(spec, vals)?, number(spec, tail)?).map_err(wrap)
        }
        "limit" => {
            let (v, r) = body
                .split_once(",rate=")
                .ok_or_else(|| bad(spec, "expected limit:<value>,rate=<r>"))?;
            BoundedSeq::explicit_limit(number(spec, v)?, number(spec, r)?).map_err(wrap)
        }
        "combo" => {
            let terms = combo_terms(spec, body)?;
            let mut coeffs = Vec::with_capacity(terms.len());
            let mut seqs = Vec::with_capacity(terms.len());
            for (c, id) in terms {
                let s = env.get(&id).ok_or_else(|| bad(spec, format!("unknown id `{id}`")))?;
                coeffs.push(c);
                seqs.push(s.clone());
            }
            combine(&coeffs, &seqs).map_err(wrap)
        }
        _ => Err(bad(spec, format!("unknown sequence kind `{head}`"))),
    }
}

/// A sequence family `i ↦ w^i` (1-based).
#[derive(Clone, Debug)]
pub struct Family {
    base: BoundedSeq,
    rule: FamilyRule,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum FamilyRule {
    Same,
    Scaled,
    Recip,
}

impl Family {
    pub fn member(&self, i: usize) -> BoundedSeq {
        let i = i.max(1) as f64;
        match self.rule {
            FamilyRule::Same => self.base.clone(),
            FamilyRule::Scaled => self.base.scaled(1.0 + 1.0 / i),
            FamilyRule::Recip => self.base.scaled(1.0 / i),
        }
    }
}

pub fn parse_family(spec: &str, env: &BTreeMap<String, BoundedSeq>) -> Result<Family> {
    let spec = spec.trim();
    let (head, body) = spec
        .split_once(':')
        .ok_or_else(|| bad(spec, "expected <scaled|recip|same>:<sequence spec>"))?;
    let rule = match head {
        "scaled" => FamilyRule::Scaled,
        "recip" => FamilyRule::Recip,
        "same" => FamilyRule::Same,
        other => return Err(bad(spec, format!("unknown family rule `{other}`"))),
    };
    Ok(Family {
        base: parse_seq(body, env)?,
        rule,
    })
}
