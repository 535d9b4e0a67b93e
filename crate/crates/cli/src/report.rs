//! Report JSON and the terminal summary.

use serde::Serialize;
use serde_json::{json, Value};

use linfty_core::extend::{IndexScheme, LimitEntry};
use linfty_core::verify::{IsometryReport, SeparationReport, Verdict};
use linfty_core::OscillationWitness;

use crate::config::RunConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    CertificateFailed,
    BudgetExhausted,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::BudgetExhausted => 2,
            Status::CertificateFailed => 3,
        }
    }

    /// Budget exhaustion outranks a plain certificate failure.
    pub fn worst(self, other: Status) -> Status {
        match (self, other) {
            (Status::BudgetExhausted, _) | (_, Status::BudgetExhausted) => Status::BudgetExhausted,
            (Status::CertificateFailed, _) | (_, Status::CertificateFailed) => Status::CertificateFailed,
            _ => Status::Pass,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleRow {
    pub x_id: String,
    pub placement: &'static str,
    pub lower: f64,
    pub achieved: f64,
    pub upper: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessRow {
    pub x_id: String,
    pub d_id: String,
    pub gap: f64,
    pub bound: f64,
    pub plus_indices: Vec<usize>,
    pub minus_indices: Vec<usize>,
    pub pass: bool,
    pub budget_exhausted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerdictRow {
    pub seq_id: String,
    pub kind: &'static str,
    pub detail: Value,
    /// Embedded images must come out `NotInC`.
    pub expect_not_in_c: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Summary {
    pub samples: usize,
    pub certificates: usize,
    pub passed: usize,
    pub failed: usize,
    pub budget_exhausted: usize,
    pub max_relative_defect: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub command: String,
    pub config_echo: RunConfig,
    pub seed: u64,
    pub space: String,
    pub per_sample: Vec<SampleRow>,
    pub witnesses: Vec<WitnessRow>,
    pub verdicts: Vec<VerdictRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<IndexScheme>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub limits: Vec<LimitEntry>,
    pub summary: Summary,
    pub status: Status,
    pub exit_code: u8,
    pub versions: Value,
    pub timestamp: String,
}

impl Report {
    pub fn new(command: &str, config: RunConfig, space: String) -> Self {
        Self {
            tool: "linfty",
            command: command.into(),
            seed: config.seed,
            config_echo: config,
            space,
            per_sample: Vec::new(),
            witnesses: Vec::new(),
            verdicts: Vec::new(),
            scheme: None,
            limits: Vec::new(),
            summary: Summary::default(),
            status: Status::Pass,
            exit_code: 0,
            versions: json!({ "linfty-core": env!("CARGO_PKG_VERSION"), "report": 1 }),
            timestamp: String::new(),
        }
    }

    pub fn add_isometry(&mut self, placement: &'static str, r: IsometryReport) {
        self.summary.max_relative_defect = self.summary.max_relative_defect.max(r.max_relative_defect);
        self.per_sample.extend(r.entries.into_iter().map(|e| SampleRow {
            x_id: e.x_id,
            placement,
            lower: e.lower,
            achieved: e.achieved,
            upper: e.upper,
            pass: e.pass,
            error: e.error,
        }));
    }

    pub fn add_witness(&mut self, row: WitnessRow) {
        self.witnesses.push(row);
    }

    pub fn add_separation(&mut self, r: SeparationReport) {
        self.witnesses.extend(r.entries.into_iter().map(|e| WitnessRow {
            x_id: e.x_id,
            d_id: e.d_id,
            gap: e.gap,
            bound: e.bound,
            plus_indices: e.plus_indices,
            minus_indices: e.minus_indices,
            pass: e.pass,
            budget_exhausted: e.budget_exhausted,
            error: e.error,
        }));
    }

    pub fn add_verdict(&mut self, seq_id: String, verdict: &Verdict, expect_not_in_c: bool) {
        let detail = match verdict {
            Verdict::InC {
                limit,
                tail_variation,
                from,
            } => json!({ "limit": limit, "tail_variation": tail_variation, "from": from }),
            Verdict::NotInC { witness } => witness_detail(witness),
            Verdict::Unknown {
                budget_used,
                clusters_seen,
            } => json!({
                "budget_used": budget_used,
                "clusters": clusters_seen
                    .iter()
                    .map(|c| json!({ "value": c.value, "spread": c.spread, "first_indices": c.indices }))
                    .collect::<Vec<_>>(),
            }),
        };
        let pass = !expect_not_in_c || matches!(verdict, Verdict::NotInC { .. });
        self.verdicts.push(VerdictRow {
            seq_id,
            kind: verdict.kind(),
            detail,
            expect_not_in_c,
            pass,
        });
    }

    pub fn error(&mut self, status: Status, msg: String) {
        self.summary.errors.push(msg);
        self.status = self.status.worst(status);
    }

    /// Tallies rows and fixes the status and exit code.
    pub fn finish(&mut self) {
        let s = &mut self.summary;
        s.samples = self.config_echo.samples.len() + self.config_echo.random_samples;
        let mut status = self.status;
        let mut tally = |pass: bool, budget: bool| {
            s.certificates += 1;
            if pass {
                s.passed += 1;
            } else {
                s.failed += 1;
                if budget {
                    s.budget_exhausted += 1;
                }
                status = status.worst(if budget {
                    Status::BudgetExhausted
                } else {
                    Status::CertificateFailed
                });
            }
        };
        for r in &self.per_sample {
            tally(r.pass, false);
        }
        for w in &self.witnesses {
            tally(w.pass, w.budget_exhausted);
        }
        for v in self.verdicts.iter().filter(|v| v.expect_not_in_c) {
            // an Unknown image means the budget was too small to see both clusters
            tally(v.pass, v.kind == "Unknown");
        }
        self.status = status;
        self.exit_code = status.exit_code();
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        let s = &self.summary;
        out.push_str(&format!("{} {} on {}\n", self.tool, self.command, self.space));
        out.push_str(&format!("{:<14} {:>8}\n", "samples", s.samples));
        out.push_str(&format!("{:<14} {:>8}\n", "certificates", s.certificates));
        out.push_str(&format!("{:<14} {:>8}\n", "passed", s.passed));
        out.push_str(&format!("{:<14} {:>8}\n", "failed", s.failed));
        out.push_str(&format!("{:<14} {:>8}\n", "budget", s.budget_exhausted));
        out.push_str(&format!("{:<14} {:>8.6}\n", "max defect", s.max_relative_defect));
        if !self.verdicts.is_empty() {
            out.push_str(&format!("\n{:<24} {:<8} {:>10}\n", "sequence", "verdict", "gap"));
            for v in &self.verdicts {
                let gap = v.detail.get("gap").and_then(Value::as_f64);
                let gap = gap.map_or("-".to_string(), |g| format!("{g:.6}"));
                out.push_str(&format!("{:<24} {:<8} {:>10}\n", v.seq_id, v.kind, gap));
            }
        }
        for e in &s.errors {
            out.push_str(&format!("error: {e}\n"));
        }
        out.push_str(&format!("status: {:?} (exit {})\n", self.status, self.exit_code));
        out
    }
}

fn witness_detail(w: &OscillationWitness) -> Value {
    json!({
        "gap": w.gap,
        "target_hi": w.target_hi,
        "target_lo": w.target_lo,
        "plus_indices": w.plus_indices,
        "minus_indices": w.minus_indices,
    })
}
