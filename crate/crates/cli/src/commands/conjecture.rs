//! `conjecture-min`: exploratory report on min-model fluctuations. The
//! fluctuation limits of this model are unproven, so the command reports
//! distances and trends without pass/fail verdicts.

use std::path::Path;
use std::time::Instant;

use deposim::limits::{sample_mu_d_truncated, LimitValues};
use deposim::stats::{fit_scaling, ks_two_sample, scale_value, ScaleMetric};
use deposim::RngStream;
use serde::Serialize;

use crate::commands::CmdError;
use crate::config::{ExperimentConfig, ModelName};
use crate::out;
use crate::runner;

const SAMPLER_STREAM_BASE: u64 = 1 << 34;

#[derive(Debug, Serialize)]
pub struct ConjectureReport {
    pub regime: String,
    pub kappa: f64,
    /// KS distances against the heavy fluctuation law, one per probe
    /// (kappa > 1/2 only). Reported without thresholds.
    pub ks_vs_heavy_law: Vec<f64>,
    /// Fitted fluctuation exponent of the IQR across checkpoints.
    pub fluct_exponent: Option<f64>,
    /// Mean of max|f| across replicas at each checkpoint N.
    pub max_abs_f_trend: Vec<(u64, f64)>,
    pub notes: String,
}

pub fn conjecture_min(cfg: &ExperimentConfig, out_dir: &Path) -> Result<ConjectureReport, CmdError> {
    cfg.validate()?;
    if cfg.params.model != ModelName::Min {
        return Err(CmdError::Invalid("conjecture-min requires model = min".into()));
    }
    if cfg.checkpoint_ns.len() < 3 {
        return Err(CmdError::Invalid(
            "conjecture-min needs at least three checkpoints for trend fits".into(),
        ));
    }
    let params = cfg.model_params()?;
    let probes = cfg.probe_points();
    if probes.is_empty() {
        return Err(CmdError::Invalid("conjecture-min needs a probe".into()));
    }
    let started = Instant::now();

    let runs = runner::run_scalar_replicas(
        params,
        cfg.master_seed,
        cfg.replicas,
        &cfg.checkpoint_ns,
        &probes,
        cfg.budget(),
        cfg.log_cap,
    )?;
    let last = cfg.checkpoint_ns.len() - 1;
    let final_n = cfg.checkpoint_ns[last];

    let heavy = params.kappa > 0.5 + 1e-12;
    let mut ks_vs_heavy_law = Vec::new();
    if heavy {
        let scale = (final_n as f64).powf(-params.kappa);
        for pi in 0..probes.len() {
            let snapped = runs[0].checkpoints[last].f_at_probes[pi].0;
            let xs: Vec<f64> = runner::collect_f_probe(&runs, last, pi)
                .iter()
                .map(|v| v * scale)
                .collect();
            let mut law = Vec::with_capacity(xs.len());
            for j in 0..xs.len() {
                let mut rng = RngStream::new(cfg.master_seed, SAMPLER_STREAM_BASE + j as u64);
                match sample_mu_d_truncated(&mut rng, &params, &[snapped], final_n as usize)?.values
                {
                    LimitValues::PerProbe(v) => law.push(v[0]),
                    _ => unreachable!(),
                }
            }
            ks_vs_heavy_law.push(ks_two_sample(&xs, &law, f64::INFINITY)?.statistic);
        }
    }

    // IQR trend of f at the first probe, plus the max|f| trend
    let mut fluct_points = Vec::new();
    let mut max_trend = Vec::new();
    for (k, &n) in cfg.checkpoint_ns.iter().enumerate() {
        let f = runner::collect_f_probe(&runs, k, 0);
        fluct_points.push((n as f64, scale_value(&f, ScaleMetric::Iqr)?));
        let mean_max: f64 = runs
            .iter()
            .map(|r| {
                let cp = &r.checkpoints[k];
                (cp.h_max - cp.h_at_origin).max(cp.h_at_origin - cp.h_min)
            })
            .sum::<f64>()
            / runs.len() as f64;
        max_trend.push((n, mean_max));
    }
    let fluct_exponent = fit_scaling(&fluct_points, ScaleMetric::Iqr)
        .ok()
        .map(|f| f.exponent);

    let report = ConjectureReport {
        regime: if heavy {
            "kappa > 1/2: compared against the heavy fluctuation series".into()
        } else {
            "kappa <= 1/2: exponent and boundedness trends only".into()
        },
        kappa: params.kappa,
        ks_vs_heavy_law,
        fluct_exponent,
        max_abs_f_trend: max_trend,
        notes: "exploratory: the fluctuation behavior of the min model is conjectural and no \
                threshold applies; distances and trends are reported as-is"
            .into(),
    };

    out::ensure_dir(out_dir)?;
    let mut value = serde_json::to_value(&report).expect("report serializes");
    value["wall_time_s"] = serde_json::json!(started.elapsed().as_secs_f64());
    out::write_text(
        &out_dir.join("conjecture_report.json"),
        &serde_json::to_string_pretty(&value).expect("report serializes"),
    )?;
    Ok(report)
}
