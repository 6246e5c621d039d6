//! The run manifest: everything needed to trace a pass/fail verdict back
//! to a seed, a config and a threshold with provenance.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TestRecord {
    pub test: String,
    pub params: serde_json::Value,
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
    pub n: u64,
    pub seed: u64,
    /// Where the threshold comes from: an analytic bound or a pilot run id.
    pub provenance: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub toolkit_version: String,
    pub command: String,
    pub master_seed: u64,
    /// Echo of the driving config (null for config-free commands).
    pub config: serde_json::Value,
    pub wall_time_s: f64,
    pub results: Vec<TestRecord>,
    pub all_pass: bool,
}

impl Manifest {
    pub fn new(command: &str, master_seed: u64, config: serde_json::Value) -> Self {
        Manifest {
            toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            master_seed,
            config,
            wall_time_s: 0.0,
            results: Vec::new(),
            all_pass: true,
        }
    }

    pub fn push(&mut self, record: TestRecord) {
        self.all_pass &= record.pass;
        self.results.push(record);
    }
}
