//! Frozen acceptance thresholds with provenance.
//!
//! Distributional pass bounds cannot come from the limit theorems alone
//! (those promise convergence, not finite-N error bars), so every
//! statistical threshold is either an analytic bound or a value frozen
//! from a pilot run. The committed `calibration.json` is the contract;
//! `validate --calibrate` re-runs the battery at a larger budget and
//! reports observed statistics next to the frozen values so drift is easy
//! to spot.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Threshold {
    pub value: f64,
    pub provenance: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Calibration {
    pub version: u32,
    /// Identifier of the pilot run that froze the pilot-derived entries.
    pub pilot_run: String,
    pub thresholds: BTreeMap<String, Threshold>,
}

pub const EMBEDDED: &str = include_str!("../calibration.json");

impl Calibration {
    pub fn embedded() -> Self {
        serde_json::from_str(EMBEDDED).expect("embedded calibration parses")
    }

    pub fn from_file(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn get(&self, key: &str) -> Threshold {
        self.thresholds
            .get(key)
            .cloned()
            .unwrap_or_else(|| panic!("calibration entry missing: {key}"))
    }

    pub fn value(&self, key: &str) -> f64 {
        self.get(key).value
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_calibration_has_every_suite_key() {
        let cal = Calibration::embedded();
        for key in [
            "order_stats_ks",
            "vy_law_ks",
            "gamma_moment_sigmas",
            "ballistic_speed_rel_err",
            "stable_ks",
            "gaussian_fluct_ks",
            "mu_fluct_ks",
            "critical_band_lo",
            "critical_band_hi",
            "min_speed_rel_err",
            "stellar_exponent_target",
            "stellar_exponent_tol",
            "clt_ks",
            "clt_tail_target",
            "clt_tail_tol",
            "phase_speed_tol",
            "phase_fluct_tol",
            "recompute_rel_err",
            "mass_identity_factor",
        ] {
            assert!(cal.thresholds.contains_key(key), "missing {key}");
        }
    }
}
