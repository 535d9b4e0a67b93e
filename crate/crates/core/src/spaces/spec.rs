//! Space specification strings: `fdlp:dim=<n>,p=<p|inf>`,
//! `seqlp:p=<p>,support=<m>`, `c01` and `custom:<file>`.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{CustomNet, SeparableSpace};
use crate::error::{Error, Result};

/// On-disk layout of a custom net.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomNetFile {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(
        default = "default_p",
        serialize_with = "ser_p",
        deserialize_with = "de_p"
    )]
    pub p: f64,
    pub points: Vec<Vec<f64>>,
    pub functionals: Vec<Vec<f64>>,
}

fn default_p() -> f64 {
    2.0
}

fn ser_p<S: Serializer>(p: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if p.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*p)
    }
}

fn de_p<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum P {
        Num(f64),
        Text(String),
    }
    match P::deserialize(d)? {
        P::Num(p) => Ok(p),
        P::Text(t) => parse_p(&t).map_err(serde::de::Error::custom),
    }
}

fn parse_p(text: &str) -> std::result::Result<f64, String> {
    match text.trim() {
        "inf" | "infinity" | "∞" => Ok(f64::INFINITY),
        other => other
            .parse::<f64>()
            .map_err(|_| format!("`{other}` is not a number or `inf`")),
    }
}

impl CustomNetFile {
    pub fn into_space(self, fallback_name: &str) -> Result<SeparableSpace> {
        let name = self.name.unwrap_or_else(|| fallback_name.to_string());
        CustomNet::new(name, self.p, self.points, self.functionals).map(SeparableSpace::CustomNet)
    }
}

fn bad(field: &str, reason: impl Into<String>) -> Error {
    Error::InvalidSpace {
        field: field.into(),
        reason: reason.into(),
    }
}

fn params(body: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for part in body.split(',').filter(|s| !s.trim().is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| bad(part.trim(), "expected key=value"))?;
        if out.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
            return Err(bad(k.trim(), "given twice"));
        }
    }
    Ok(out)
}

fn take<'a>(map: &'a BTreeMap<String, String>, key: &str) -> Result<&'a str> {
    map.get(key)
        .map(String::as_str)
        .ok_or_else(|| bad(key, "missing"))
}

fn reject_extra(map: &BTreeMap<String, String>, allowed: &[&str]) -> Result<()> {
    match map.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(bad(k, "unknown parameter")),
        None => Ok(()),
    }
}

impl SeparableSpace {
    /// Parses a spec string; `custom:` paths resolve against `base_dir` when relative.
    pub fn parse(spec: &str, base_dir: Option<&Path>) -> Result<Self> {
        let spec = spec.trim();
        let (head, body) = spec.split_once(':').unwrap_or((spec, ""));
        match head {
            "fdlp" => {
                let map = params(body)?;
                reject_extra(&map, &["dim", "p"])?;
                let dim = take(&map, "dim")?
                    .parse::<usize>()
                    .map_err(|_| bad("dim", "not a positive integer"))?;
                if dim == 0 {
                    return Err(bad("dim", "dimension must be at least 1"));
                }
                let p = parse_p(take(&map, "p")?).map_err(|r| bad("p", r))?;
                SeparableSpace::finite_dim_lp(dim, p)
            }
            "seqlp" => {
                let map = params(body)?;
                reject_extra(&map, &["p", "support"])?;
                let p = parse_p(take(&map, "p")?).map_err(|r| bad("p", r))?;
                let support = take(&map, "support")?
                    .parse::<usize>()
                    .map_err(|_| bad("support", "not a positive integer"))?;
                SeparableSpace::seq_lp(p, support)
            }
            "c01" if body.is_empty() => Ok(SeparableSpace::ContinuousPl),
            "custom" => {
                if body.is_empty() {
                    return Err(bad("custom", "missing file path"));
                }
                let path = Path::new(body);
                let path = match base_dir {
                    Some(dir) if path.is_relative() => dir.join(path),
                    _ => path.to_path_buf(),
                };
                let text = std::fs::read_to_string(&path)?;
                let file: CustomNetFile = serde_json::from_str(&text)?;
                let stem = path
                    .file_stem()
                    .and_then(|s| s.to_str())
                    .unwrap_or("custom")
                    .to_string();
                file.into_space(&stem)
            }
            other => Err(bad("space", format!("unknown space kind `{other}`"))),
        }
    }
}

impl FromStr for SeparableSpace {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SeparableSpace::parse(s, None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_builtin_specs() {
        assert_eq!(
            "fdlp:dim=2,p=2".parse::<SeparableSpace>().unwrap(),
            SeparableSpace::FiniteDimLp { dim: 2, p: 2.0 }
        );
        assert_eq!(
            "fdlp:dim=3,p=inf".parse::<SeparableSpace>().unwrap(),
            SeparableSpace::FiniteDimLp {
                dim: 3,
                p: f64::INFINITY
            }
        );
        assert_eq!(
            "seqlp:p=1.5,support=4".parse::<SeparableSpace>().unwrap(),
            SeparableSpace::SeqLp { p: 1.5, support: 4 }
        );
        assert_eq!("c01".parse::<SeparableSpace>().unwrap(), SeparableSpace::ContinuousPl);
        for s in ["fdlp:dim=2,p=2", "fdlp:dim=1,p=inf", "seqlp:p=2,support=3", "c01"] {
            assert_eq!(s.parse::<SeparableSpace>().unwrap().label(), s);
        }
    }

    #[test]
    fn errors_name_the_field() {
        let field = |s: &str| match s.parse::<SeparableSpace>() {
            Err(Error::InvalidSpace { field, .. }) => field,
            other => panic!("{s}: {other:?}"),
        };
        assert_eq!(field("fdlp:dim=0"), "dim");
        assert_eq!(field("fdlp:dim=0,p=2"), "dim");
        assert_eq!(field("fdlp:dim=2"), "p");
        assert_eq!(field("fdlp:dim=2,p=abc"), "p");
        assert_eq!(field("fdlp:dim=2,p=2,q=3"), "q");
        assert_eq!(field("seqlp:p=inf,support=2"), "p");
        assert_eq!(field("seqlp:p=2"), "support");
        assert_eq!(field("l2"), "space");
    }

    #[test]
    fn custom_file_roundtrip() {
        let dir = std::env::temp_dir().join(format!("linfty-spec-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(
            dir.join("pm.json"),
            r#"{"p": "inf", "points": [[1.0], [-1.0]], "functionals": [[1.0], [-1.0]]}"#,
        )
        .unwrap();
        let s = SeparableSpace::parse("custom:pm.json", Some(&dir)).unwrap();
        assert_eq!(s.label(), "custom:pm");
        std::fs::write(dir.join("bad.json"), r#"{"points": [[2.0]], "functionals": [[0.5]]}"#).unwrap();
        assert!(SeparableSpace::parse("custom:bad.json", Some(&dir)).is_err());
        std::fs::remove_dir_all(&dir).ok();
    }
}
