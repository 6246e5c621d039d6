//! `limits`: stream draws from one of the limit laws to CSV, with
//! truncation metadata per draw.

use std::path::Path;

use deposim::limits::{
    sample_mu_d, sample_mu_stellar, sample_stable_series, sample_stellar_speed_series,
    LimitSample, LimitValues,
};
use deposim::RngStream;

use crate::commands::CmdError;
use crate::config::ExperimentConfig;
use crate::out;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LawName {
    Stable,
    MuD,
    MuStellar,
    StellarSeries,
}

impl std::str::FromStr for LawName {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "stable" => Ok(LawName::Stable),
            "mu-d" => Ok(LawName::MuD),
            "mu-stellar" => Ok(LawName::MuStellar),
            "stellar-series" => Ok(LawName::StellarSeries),
            other => Err(format!(
                "unknown law '{other}' (expected stable | mu-d | mu-stellar | stellar-series)"
            )),
        }
    }
}

fn law_label(law: LawName) -> &'static str {
    match law {
        LawName::Stable => "stable",
        LawName::MuD => "mu-d",
        LawName::MuStellar => "mu-stellar",
        LawName::StellarSeries => "stellar-series",
    }
}

pub fn limits(
    cfg: &ExperimentConfig,
    law: LawName,
    n_samples: u64,
    tol: f64,
    out_dir: &Path,
) -> Result<std::path::PathBuf, CmdError> {
    cfg.validate()?;
    let params = cfg.model_params()?;
    let probes = cfg.probe_points();
    if matches!(law, LawName::MuD | LawName::MuStellar) && probes.is_empty() {
        return Err(CmdError::Invalid(
            "fluctuation laws need at least one probe".into(),
        ));
    }

    let mut csv = String::from("law,replica,probe_id,component,value,truncation_M,tail_bound\n");
    let label = law_label(law);
    for r in 0..n_samples {
        let mut rng = RngStream::new(cfg.master_seed, r);
        let sample: LimitSample = match law {
            LawName::Stable => sample_stable_series(&mut rng, params.zeta, tol)?,
            LawName::MuD => sample_mu_d(&mut rng, &params, &probes, tol)?,
            LawName::MuStellar => {
                sample_mu_stellar(&mut rng, &params, cfg.theta_mode.into(), &probes, tol)?
            }
            LawName::StellarSeries => {
                sample_stellar_speed_series(&mut rng, params.zeta, cfg.theta_mode.into(), tol)?
            }
        };
        let trunc = sample.truncation;
        match sample.values {
            LimitValues::Scalar(v) => {
                csv.push_str(&format!("{label},{r},,0,{v},{},{}\n", trunc.m, trunc.tail_bound));
            }
            LimitValues::Vector(v) => {
                for (k, x) in v.iter().enumerate() {
                    csv.push_str(&format!(
                        "{label},{r},,{k},{x},{},{}\n",
                        trunc.m, trunc.tail_bound
                    ));
                }
            }
            LimitValues::PerProbe(vals) => {
                for (p, x) in vals.iter().enumerate() {
                    csv.push_str(&format!(
                        "{label},{r},{p},0,{x},{},{}\n",
                        trunc.m, trunc.tail_bound
                    ));
                }
            }
            LimitValues::PerProbeVec(vals) => {
                for (p, v) in vals.iter().enumerate() {
                    for (k, x) in v.iter().enumerate() {
                        csv.push_str(&format!(
                            "{label},{r},{p},{k},{x},{},{}\n",
                            trunc.m, trunc.tail_bound
                        ));
                    }
                }
            }
        }
    }
    out::ensure_dir(out_dir)?;
    let path = out_dir.join("limit_samples.csv");
    out::write_text(&path, &csv)?;
    Ok(path)
}
