//! Run configuration: the JSON file layout and its validated form.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use linfty_core::extend::{DMode, ExtensionConfig, SubspaceD};
use linfty_core::seqspec::{parse_family, parse_seq};
use linfty_core::{BoundedSeq, Element, SeparableSpace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementSpec {
    Dense(Vec<f64>),
    Pl { breaks: Vec<f64>, values: Vec<f64> },
    Sparse { entries: Vec<(usize, f64)> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedSpec {
    pub id: String,
    pub spec: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DSpec {
    pub mode: DMode,
    #[serde(default)]
    pub members: Vec<String>,
    /// Generates members past the listed ones, e.g. `scaled:periodic:-1,1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub name: String,
    pub space: String,
    pub samples: Vec<ElementSpec>,
    pub random_samples: usize,
    pub sequences: Vec<NamedSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<DSpec>,
    pub epsilon: f64,
    pub count: usize,
    pub k: usize,
    pub depth: usize,
    pub tol_schedule: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    pub scan_budget: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan_limit: Option<usize>,
    pub witness_budget: usize,
    pub classify_budget: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap_floor: Option<f64>,
    pub d_combos: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let ext = ExtensionConfig::default();
        Self {
            name: "run".into(),
            space: "fdlp:dim=2,p=2".into(),
            samples: Vec::new(),
            random_samples: 0,
            sequences: Vec::new(),
            d: None,
            epsilon: ext.epsilon,
            count: ext.count,
            k: ext.k,
            depth: ext.depth,
            tol_schedule: ext.tol_schedule,
            m: None,
            scan_budget: ext.scan_budget,
            scan_limit: None,
            witness_budget: ext.witness_budget,
            classify_budget: linfty_core::verify::DEFAULT_CLASSIFY_BUDGET,
            gap_floor: None,
            d_combos: ext.d_combos,
            seed: 0,
            out: None,
        }
    }
}

/// A config with every spec parsed.
pub struct Prepared {
    pub config: RunConfig,
    pub space: SeparableSpace,
    pub samples: Vec<Element>,
    pub sequences: Vec<(String, BoundedSeq)>,
    pub d: SubspaceD,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn extension(&self) -> ExtensionConfig {
        ExtensionConfig {
            depth: self.depth,
            tol_schedule: self.tol_schedule.clone(),
            m: self.m,
            scan_budget: self.scan_budget,
            scan_limit: self.scan_limit,
            k: self.k,
            epsilon: self.epsilon,
            count: self.count,
            witness_budget: self.witness_budget,
            d_combos: self.d_combos,
            seed: self.seed,
        }
    }

    pub fn prepare(self, base_dir: Option<&Path>) -> Result<Prepared> {
        ensure!(self.epsilon > 0.0 && self.epsilon < 1.0, "config: epsilon must lie in (0, 1)");
        ensure!(self.count >= 1, "config: count must be at least 1");
        ensure!(self.k >= 1, "config: k must be at least 1");
        ensure!(self.classify_budget >= 2, "config: classify_budget must be at least 2");
        if let Some(g) = self.gap_floor {
            ensure!(g > 0.0, "config: gap_floor must be positive");
        }
        let space = SeparableSpace::parse(&self.space, base_dir).context("config: space")?;
        let mut samples = Vec::with_capacity(self.samples.len() + self.random_samples);
        for (i, s) in self.samples.iter().enumerate() {
            let x = element(s).with_context(|| format!("config: samples[{i}]"))?;
            space.check(&x).with_context(|| format!("config: samples[{i}]"))?;
            samples.push(x);
        }
        samples.extend(random_samples(&space, self.random_samples, self.seed));

        let mut env = BTreeMap::new();
        let mut sequences = Vec::with_capacity(self.sequences.len());
        for named in &self.sequences {
            if env.contains_key(&named.id) {
                bail!("config: sequence id `{}` given twice", named.id);
            }
            let s = parse_seq(&named.spec, &env).with_context(|| format!("config: sequence `{}`", named.id))?;
            env.insert(named.id.clone(), s.clone());
            sequences.push((named.id.clone(), s));
        }
        let d = match &self.d {
            None => SubspaceD::zero(),
            Some(spec) => subspace(spec, &env).context("config: d")?,
        };
        Ok(Prepared {
            config: self,
            space,
            samples,
            sequences,
            d,
        })
    }
}

fn element(spec: &ElementSpec) -> linfty_core::Result<Element> {
    match spec {
        ElementSpec::Dense(v) => Ok(Element::vector(v.clone())),
        ElementSpec::Pl { breaks, values } => Element::pl(breaks.clone(), values.clone()),
        ElementSpec::Sparse { entries } => Element::sparse(entries.iter().copied()),
    }
}

fn subspace(spec: &DSpec, env: &BTreeMap<String, BoundedSeq>) -> Result<SubspaceD> {
    let members = spec
        .members
        .iter()
        .map(|m| parse_seq(m, env).with_context(|| format!("member `{m}`")))
        .collect::<Result<Vec<_>>>()?;
    let d = match spec.mode {
        DMode::FiniteBasis => {
            ensure!(spec.family.is_none(), "a finite basis lists its members");
            ensure!(!members.is_empty(), "a finite basis needs members; omit `d` for the zero subspace");
            SubspaceD::finite(members)?
        }
        DMode::CountableBasis => SubspaceD::countable(members),
        DMode::DenseSequence => SubspaceD::dense(members),
    };
    Ok(match &spec.family {
        Some(f) => {
            let family = parse_family(f, env)?;
            d.with_generator(move |i| family.member(i))?
        }
        None => d,
    })
}

/// Seeded nonzero samples for the space.
pub fn random_samples(space: &SeparableSpace, n: usize, seed: u64) -> Vec<Element> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let x = random_element(space, &mut rng);
        if space.norm(&x).map_or(false, |v| v > 1e-6) {
            out.push(x);
        }
    }
    out
}

pub fn random_element(space: &SeparableSpace, rng: &mut impl Rng) -> Element {
    let mut coord = || rng.gen_range(-5.0..5.0);
    match space {
        SeparableSpace::FiniteDimLp { dim, .. } => Element::vector((0..*dim).map(|_| coord()).collect::<Vec<_>>()),
        SeparableSpace::CustomNet(net) => Element::vector((0..net.dim()).map(|_| coord()).collect::<Vec<_>>()),
        SeparableSpace::SeqLp { support, .. } => {
            let entries: Vec<(usize, f64)> = (1..=*support).map(|i| (i, coord())).collect();
            Element::sparse(entries).expect("finite entries")
        }
        SeparableSpace::ContinuousPl => {
            Element::pl(vec![0.0, 0.5, 1.0], vec![coord(), coord(), coord()]).expect("valid breakpoints")
        }
    }
}
