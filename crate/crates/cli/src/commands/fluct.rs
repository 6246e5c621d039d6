//! `fluct`: distributional tests of the fluctuation field at the probes,
//! keyed by the kappa regime: Gaussian with the differenced one-bump
//! covariance below 1/2, the heavy series law above 1/2, and the
//! log-corrected Gaussian on the critical line.

use std::path::Path;
use std::time::Instant;

use deposim::limits::{
    critical_covariance, diff_covariance, sample_mu_d_truncated, sample_mu_stellar_truncated,
    CovMethod, LimitValues,
};
use deposim::sampling::sphere_component_variances;
use deposim::stats::{ks_one_sample, ks_two_sample, normal_cdf};
use deposim::torus::TorusPoint;
use deposim::RngStream;

use crate::calibration::Calibration;
use crate::commands::CmdError;
use crate::config::{ExperimentConfig, ModelName};
use crate::manifest::{Manifest, TestRecord};
use crate::out;
use crate::runner;

const SAMPLER_STREAM_BASE: u64 = 1 << 33;

enum Regime {
    Gaussian,
    Heavy,
    Critical,
}

fn regime(kappa: f64) -> Regime {
    if (kappa - 0.5).abs() < 1e-12 {
        Regime::Critical
    } else if kappa < 0.5 {
        Regime::Gaussian
    } else {
        Regime::Heavy
    }
}

pub fn fluct(
    cfg: &ExperimentConfig,
    cal: &Calibration,
    out_dir: &Path,
) -> Result<Manifest, CmdError> {
    cfg.validate()?;
    let params = cfg.model_params()?;
    if cfg.checkpoint_ns.is_empty() {
        return Err(CmdError::Invalid("fluct needs at least one checkpoint".into()));
    }
    let probes = cfg.probe_points();
    // distributional tests are vacuous at the origin where f is pinned to 0
    let w = params.cell_width();
    let informative: Vec<usize> = probes
        .iter()
        .enumerate()
        .filter(|(_, p)| p.coords().iter().any(|&c| c > w / 2.0 && c < params.domain - w / 2.0))
        .map(|(i, _)| i)
        .collect();
    if informative.is_empty() {
        return Err(CmdError::Invalid(
            "all probes snap to the origin; fluctuation tests need an off-origin probe".into(),
        ));
    }

    let started = Instant::now();
    let mut manifest = Manifest::new(
        "fluct",
        cfg.master_seed,
        serde_json::to_value(cfg).expect("config serializes"),
    );
    let meta = serde_json::json!({
        "alpha": params.alpha, "beta": params.beta, "kappa": params.kappa,
        "model": cfg.params.model,
    });

    if cfg.params.model == ModelName::Stellar {
        fluct_stellar(cfg, cal, &informative, &mut manifest, &meta)?;
    } else {
        fluct_scalar(cfg, cal, &informative, &mut manifest, &meta)?;
    }

    manifest.wall_time_s = started.elapsed().as_secs_f64();
    out::ensure_dir(out_dir)?;
    out::write_manifest(out_dir, &manifest)?;
    Ok(manifest)
}

fn fluct_scalar(
    cfg: &ExperimentConfig,
    cal: &Calibration,
    informative: &[usize],
    manifest: &mut Manifest,
    meta: &serde_json::Value,
) -> Result<(), CmdError> {
    let params = cfg.model_params()?;
    if cfg.params.model == ModelName::Min {
        return Err(CmdError::Invalid(
            "no proven fluctuation limit for the min model; use conjecture-min".into(),
        ));
    }
    let probes = cfg.probe_points();
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

    for &pi in informative {
        let snapped = runs[0].checkpoints[last].f_at_probes[pi].0;
        let f: Vec<f64> = runner::collect_f_probe(&runs, last, pi);
        match regime(params.kappa) {
            Regime::Gaussian => {
                let scale = (final_n as f64).powf(-0.5);
                let xs: Vec<f64> = f.iter().map(|v| v * scale).collect();
                let var =
                    diff_covariance(&params, &snapped, &snapped, CovMethod::Quadrature { tol: 1e-8 })?
                        .value;
                let sd = var.max(0.0).sqrt();
                let th = cal.get("gaussian_fluct_ks");
                let ks = ks_one_sample(&xs, |x| normal_cdf(x, 0.0, sd), th.value)?;
                manifest.push(TestRecord {
                    test: format!("gaussian_fluct_ks_probe_{pi}"),
                    params: serde_json::json!({"meta": meta, "variance": var}),
                    statistic: ks.statistic,
                    threshold: th.value,
                    pass: ks.pass,
                    n: final_n,
                    seed: cfg.master_seed,
                    provenance: th.provenance,
                });
            }
            Regime::Heavy => {
                let scale = (final_n as f64).powf(-params.kappa);
                let xs: Vec<f64> = f.iter().map(|v| v * scale).collect();
                // matched truncation: the N-step run is itself an N-term
                // partial series
                let mut law = Vec::with_capacity(xs.len());
                for j in 0..xs.len() {
                    let mut rng = RngStream::new(cfg.master_seed, SAMPLER_STREAM_BASE + j as u64);
                    match sample_mu_d_truncated(&mut rng, &params, &[snapped], final_n as usize)?
                        .values
                    {
                        LimitValues::PerProbe(v) => law.push(v[0]),
                        _ => unreachable!(),
                    }
                }
                let th = cal.get("mu_fluct_ks");
                let ks = ks_two_sample(&xs, &law, th.value)?;
                manifest.push(TestRecord {
                    test: format!("heavy_fluct_ks_probe_{pi}"),
                    params: meta.clone(),
                    statistic: ks.statistic,
                    threshold: th.value,
                    pass: ks.pass,
                    n: final_n,
                    seed: cfg.master_seed,
                    provenance: th.provenance,
                });
            }
            Regime::Critical => {
                let scale = 1.0 / (final_n as f64 * (final_n as f64).ln()).sqrt();
                let xs: Vec<f64> = f.iter().map(|v| v * scale).collect();
                let var = critical_covariance(&params, &snapped, &snapped, 1e-10)?.value;
                let sd = var.max(0.0).sqrt();
                let th = cal.get("mu_fluct_ks");
                let ks = ks_one_sample(&xs, |x| normal_cdf(x, 0.0, sd), th.value)?;
                manifest.push(TestRecord {
                    test: format!("critical_fluct_ks_probe_{pi}"),
                    params: serde_json::json!({"meta": meta, "variance": var}),
                    statistic: ks.statistic,
                    threshold: th.value,
                    pass: ks.pass,
                    n: final_n,
                    seed: cfg.master_seed,
                    provenance: th.provenance,
                });
            }
        }
    }
    Ok(())
}

fn fluct_stellar(
    cfg: &ExperimentConfig,
    cal: &Calibration,
    informative: &[usize],
    manifest: &mut Manifest,
    meta: &serde_json::Value,
) -> Result<(), CmdError> {
    let params = cfg.model_params()?;
    let probes = cfg.probe_points();
    let mode = cfg.theta_mode.into();
    let runs = runner::run_stellar_replicas(
        params,
        mode,
        cfg.master_seed,
        cfg.replicas,
        &cfg.checkpoint_ns,
        &probes,
        cfg.budget(),
        cfg.log_cap,
    )?;
    let last = cfg.checkpoint_ns.len() - 1;
    let final_n = cfg.checkpoint_ns[last];
    let theta_var = sphere_component_variances(mode);

    for &pi in informative {
        let snapped: TorusPoint = runs[0].checkpoints[last].f_at_probes[pi].0;
        let per_comp: Vec<Vec<f64>> = (0..3)
            .map(|k| {
                runs.iter()
                    .map(|r| r.checkpoints[last].f_at_probes[pi].1[k])
                    .collect()
            })
            .collect();
        match regime(params.kappa) {
            Regime::Gaussian => {
                let scale = (final_n as f64).powf(-0.5);
                let base_var =
                    diff_covariance(&params, &snapped, &snapped, CovMethod::Quadrature { tol: 1e-8 })?
                        .value;
                let th = cal.get("gaussian_fluct_ks");
                for k in 0..3 {
                    let xs: Vec<f64> = per_comp[k].iter().map(|v| v * scale).collect();
                    let sd = (base_var * theta_var[k]).max(0.0).sqrt();
                    let ks = ks_one_sample(&xs, |x| normal_cdf(x, 0.0, sd), th.value)?;
                    manifest.push(TestRecord {
                        test: format!("stellar_gaussian_fluct_ks_probe_{pi}_component_{k}"),
                        params: meta.clone(),
                        statistic: ks.statistic,
                        threshold: th.value,
                        pass: ks.pass,
                        n: final_n,
                        seed: cfg.master_seed,
                        provenance: th.provenance.clone(),
                    });
                }
            }
            Regime::Heavy => {
                let scale = (final_n as f64).powf(-params.kappa);
                let mut law: Vec<Vec<f64>> = (0..3).map(|_| Vec::with_capacity(runs.len())).collect();
                for j in 0..runs.len() {
                    let mut rng = RngStream::new(cfg.master_seed, SAMPLER_STREAM_BASE + j as u64);
                    match sample_mu_stellar_truncated(
                        &mut rng,
                        &params,
                        mode,
                        &[snapped],
                        final_n as usize,
                    )?
                    .values
                    {
                        LimitValues::PerProbeVec(v) => {
                            for k in 0..3 {
                                law[k].push(v[0][k]);
                            }
                        }
                        _ => unreachable!(),
                    }
                }
                let th = cal.get("mu_fluct_ks");
                for k in 0..3 {
                    let xs: Vec<f64> = per_comp[k].iter().map(|v| v * scale).collect();
                    let ks = ks_two_sample(&xs, &law[k], th.value)?;
                    manifest.push(TestRecord {
                        test: format!("stellar_heavy_fluct_ks_probe_{pi}_component_{k}"),
                        params: meta.clone(),
                        statistic: ks.statistic,
                        threshold: th.value,
                        pass: ks.pass,
                        n: final_n,
                        seed: cfg.master_seed,
                        provenance: th.provenance.clone(),
                    });
                }
            }
            Regime::Critical => {
                let scale = 1.0 / (final_n as f64 * (final_n as f64).ln()).sqrt();
                let base_var = critical_covariance(&params, &snapped, &snapped, 1e-10)?.value;
                let th = cal.get("mu_fluct_ks");
                for k in 0..3 {
                    let xs: Vec<f64> = per_comp[k].iter().map(|v| v * scale).collect();
                    let sd = (base_var * theta_var[k]).max(0.0).sqrt();
                    let ks = ks_one_sample(&xs, |x| normal_cdf(x, 0.0, sd), th.value)?;
                    manifest.push(TestRecord {
                        test: format!("stellar_critical_fluct_ks_probe_{pi}_component_{k}"),
                        params: meta.clone(),
                        statistic: ks.statistic,
                        threshold: th.value,
                        pass: ks.pass,
                        n: final_n,
                        seed: cfg.master_seed,
                        provenance: th.provenance.clone(),
                    });
                }
            }
        }
    }
    Ok(())
}
