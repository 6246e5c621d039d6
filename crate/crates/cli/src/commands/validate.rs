//! `validate`: run the acceptance battery (optionally filtered by suite
//! key), print one line per criterion and persist a manifest. The
//! `--calibrate` variant re-runs at a larger budget and writes the
//! observed statistics next to the frozen thresholds.

use std::path::Path;
use std::time::Instant;

use serde_json::json;

use crate::calibration::Calibration;
use crate::commands::CmdError;
use crate::manifest::Manifest;
use crate::out;
use crate::suites::{run_criterion, SuiteContext, CRITERIA};

pub struct ValidateOutcome {
    pub manifest: Manifest,
    pub all_pass: bool,
    pub lines: Vec<String>,
}

pub fn validate(
    suite_filter: Option<&[String]>,
    master_seed: u64,
    calibrate: bool,
    calibration: Calibration,
    out_dir: &Path,
) -> Result<ValidateOutcome, CmdError> {
    if let Some(filter) = suite_filter {
        let known: Vec<&str> = CRITERIA.iter().map(|(_, _, s)| *s).collect();
        for f in filter {
            if !known.contains(&f.as_str()) {
                return Err(CmdError::Invalid(format!(
                    "unknown suite '{f}' (known: {})",
                    {
                        let mut k = known.to_vec();
                        k.dedup();
                        k.join(", ")
                    }
                )));
            }
        }
    }

    let scale = if calibrate { 4 } else { 1 };
    let ctx = SuiteContext::new(master_seed, scale, calibration);
    let started = Instant::now();
    let mut manifest = Manifest::new(
        if calibrate { "validate --calibrate" } else { "validate" },
        master_seed,
        json!({"suites": suite_filter, "budget_scale": scale}),
    );
    let mut lines = Vec::new();
    let mut observed = Vec::new();

    for (id, _, suite) in CRITERIA {
        if let Some(filter) = suite_filter {
            if !filter.iter().any(|f| f == suite) {
                continue;
            }
        }
        let report = run_criterion(id, &ctx);
        lines.push(report.line());
        for r in &report.records {
            if calibrate {
                observed.push(json!({
                    "criterion": id,
                    "test": r.test,
                    "observed_statistic": r.statistic,
                    "frozen_threshold": r.threshold,
                    "headroom": r.threshold - r.statistic,
                }));
            }
            manifest.push(r.clone());
        }
    }

    manifest.wall_time_s = started.elapsed().as_secs_f64();
    out::ensure_dir(out_dir)?;
    out::write_manifest(out_dir, &manifest)?;
    if calibrate {
        let pilot = json!({
            "pilot_run": format!("pilot-seed-{master_seed}-scale-{scale}"),
            "observed": observed,
        });
        out::write_text(
            &out_dir.join("calibration_pilot.json"),
            &serde_json::to_string_pretty(&pilot).expect("pilot serializes"),
        )?;
    }
    let all_pass = manifest.all_pass;
    Ok(ValidateOutcome {
        manifest,
        all_pass,
        lines,
    })
}
