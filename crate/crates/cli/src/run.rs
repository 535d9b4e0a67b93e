//! Subcommand bodies. Each fills a [`Report`]; only setup problems are errors.

use anyhow::Result;
use linfty_core::embed::embed_t1;
use linfty_core::extend::build_extension;
use linfty_core::verify::{check_isometry, classify_c};
use linfty_core::{oscillation_witness, BoundedSeq, Error};

use crate::config::Prepared;
use crate::report::{Report, Status, WitnessRow};

fn gap_floor(p: &Prepared, s: &BoundedSeq) -> f64 {
    p.config
        .gap_floor
        .unwrap_or(if s.bound() > 0.0 { 0.5 * s.bound() } else { 1.0 })
}

pub fn embed(p: &Prepared, report: &mut Report) -> Result<()> {
    let cfg = &p.config;
    report.add_isometry("t1", check_isometry(&p.space, &p.samples, cfg.k));
    for (i, x) in p.samples.iter().enumerate() {
        let x_id = format!("x{}", i + 1);
        let image = embed_t1(&p.space, x)?;
        let norm = p.space.norm(x)?;
        let bound = 2.0 * norm * (1.0 - cfg.epsilon);
        let row = match oscillation_witness(&p.space, x, cfg.epsilon, cfg.count, cfg.witness_budget) {
            Ok(w) => {
                let verified = w.verify(&image);
                WitnessRow {
                    x_id: x_id.clone(),
                    d_id: "0".into(),
                    gap: w.gap,
                    bound,
                    pass: verified.is_ok() && w.gap >= bound - 1e-9,
                    plus_indices: w.plus_indices,
                    minus_indices: w.minus_indices,
                    budget_exhausted: false,
                    error: verified.err().map(|e| e.to_string()),
                }
            }
            Err(e) => WitnessRow {
                x_id: x_id.clone(),
                d_id: "0".into(),
                gap: 0.0,
                bound,
                plus_indices: Vec::new(),
                minus_indices: Vec::new(),
                pass: false,
                budget_exhausted: e.is_budget_exhausted(),
                error: Some(e.to_string()),
            },
        };
        report.add_witness(row);
        if norm > 0.0 {
            let verdict = classify_c(&image, cfg.classify_budget, gap_floor(p, &image))?;
            report.add_verdict(format!("T({x_id})"), &verdict, true);
        }
    }
    Ok(())
}

pub fn extend(p: &Prepared, report: &mut Report) -> Result<()> {
    match build_extension(&p.space, &p.d, &p.samples, &p.config.extension()) {
        Ok(rec) => {
            report.add_isometry("scheme", rec.isometry);
            report.add_separation(rec.separation);
            report.limits = rec.limits;
            report.scheme = Some(rec.scheme);
            Ok(())
        }
        Err(e) if e.is_budget_exhausted() => {
            report.error(Status::BudgetExhausted, format!("extraction: {e}"));
            Ok(())
        }
        Err(e) => Err(e.into()),
    }
}

pub fn classify(p: &Prepared, extra: &[(String, BoundedSeq)], report: &mut Report) -> Result<()> {
    for (id, s) in p.sequences.iter().chain(extra) {
        match classify_c(s, p.config.classify_budget, gap_floor(p, s)) {
            Ok(v) => report.add_verdict(id.clone(), &v, false),
            Err(e @ Error::BoundViolation { .. }) => {
                report.error(Status::CertificateFailed, format!("sequence `{id}`: {e}"))
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(())
}

pub fn suite(p: &Prepared, report: &mut Report) -> Result<()> {
    embed(p, report)?;
    extend(p, report)?;
    classify(p, &[], report)
}
