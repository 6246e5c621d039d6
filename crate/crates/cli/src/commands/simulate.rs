//! `simulate`: run the configured replicas and emit checkpoint and
//! deposition-log CSVs plus a manifest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::commands::CmdError;
use crate::config::{ExperimentConfig, ModelName};
use crate::manifest::Manifest;
use crate::out;
use crate::runner;

pub struct SimulateOutputs {
    pub checkpoint_csv: PathBuf,
    pub stellar_csv: Option<PathBuf>,
    pub log_csvs: Vec<PathBuf>,
    pub manifest_path: PathBuf,
}

pub fn simulate(cfg: &ExperimentConfig, out_dir: &Path) -> Result<SimulateOutputs, CmdError> {
    cfg.validate()?;
    let params = cfg.model_params()?;
    let probes = cfg.probe_points();
    let started = Instant::now();
    out::ensure_dir(out_dir)?;

    let mut manifest = Manifest::new(
        "simulate",
        cfg.master_seed,
        serde_json::to_value(cfg).expect("config serializes"),
    );

    let mut log_csvs = Vec::new();
    let (checkpoint_csv, stellar_csv) = match cfg.params.model {
        ModelName::Stellar => {
            let runs = runner::run_stellar_replicas(
                params,
                cfg.theta_mode.into(),
                cfg.master_seed,
                cfg.replicas,
                &cfg.checkpoint_ns,
                &probes,
                cfg.budget(),
                cfg.log_cap,
            )?;
            let scalar_rows: Vec<_> = runs
                .iter()
                .flat_map(|r| r.checkpoints.iter().map(move |c| (r.replica, &c.companion)))
                .collect();
            let stellar_rows: Vec<_> = runs
                .iter()
                .flat_map(|r| r.checkpoints.iter().map(move |c| (r.replica, c)))
                .collect();
            let cp_path = out_dir.join("checkpoints.csv");
            out::write_text(&cp_path, &out::checkpoint_csv(&scalar_rows))?;
            let st_path = out_dir.join("stellar_checkpoints.csv");
            out::write_text(&st_path, &out::stellar_checkpoint_csv(&stellar_rows))?;
            if cfg.log_cap > 0 {
                for r in &runs {
                    let path = out_dir.join(format!("deposition_log_r{}.csv", r.replica));
                    out::write_text(
                        &path,
                        &out::deposition_log_csv(params.dim, r.profile.companion().log()),
                    )?;
                    log_csvs.push(path);
                }
            }
            (cp_path, Some(st_path))
        }
        _ => {
            let runs = runner::run_scalar_replicas(
                params,
                cfg.master_seed,
                cfg.replicas,
                &cfg.checkpoint_ns,
                &probes,
                cfg.budget(),
                cfg.log_cap,
            )?;
            let rows: Vec<_> = runs
                .iter()
                .flat_map(|r| r.checkpoints.iter().map(move |c| (r.replica, c)))
                .collect();
            let cp_path = out_dir.join("checkpoints.csv");
            out::write_text(&cp_path, &out::checkpoint_csv(&rows))?;
            if cfg.log_cap > 0 {
                for r in &runs {
                    let path = out_dir.join(format!("deposition_log_r{}.csv", r.replica));
                    out::write_text(&path, &out::deposition_log_csv(params.dim, r.profile.log()))?;
                    log_csvs.push(path);
                }
            }
            (cp_path, None)
        }
    };

    manifest.wall_time_s = started.elapsed().as_secs_f64();
    let manifest_path = out::write_manifest(out_dir, &manifest)?;
    Ok(SimulateOutputs {
        checkpoint_csv,
        stellar_csv,
        log_csvs,
        manifest_path,
    })
}
