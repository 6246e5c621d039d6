//! Parallel replica execution: replica r draws from stream id r of the
//! master seed, replicas run on a work-stealing pool, and results are
//! ordered by replica index regardless of completion order.

use rayon::prelude::*;

use deposim::deposition::{
    run_trajectory_full, run_trajectory_stellar_full, Checkpoint, Profile, StellarCheckpoint,
    StellarProfile,
};
use deposim::sampling::SphereMode;
use deposim::torus::TorusPoint;
use deposim::{ModelParams, RngStream};

pub struct ScalarRun {
    pub replica: u64,
    pub checkpoints: Vec<Checkpoint>,
    pub profile: Profile,
}

pub struct StellarRun {
    pub replica: u64,
    pub checkpoints: Vec<StellarCheckpoint>,
    pub profile: StellarProfile,
}

#[allow(clippy::too_many_arguments)]
pub fn run_scalar_replicas(
    params: ModelParams,
    master_seed: u64,
    replicas: u64,
    checkpoint_ns: &[u64],
    probes: &[TorusPoint],
    budget: u64,
    log_cap: usize,
) -> deposim::Result<Vec<ScalarRun>> {
    let mut runs: Vec<ScalarRun> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = RngStream::new(master_seed, r);
            run_trajectory_full(params, &mut rng, checkpoint_ns, probes, budget, log_cap).map(
                |(checkpoints, profile)| ScalarRun {
                    replica: r,
                    checkpoints,
                    profile,
                },
            )
        })
        .collect::<deposim::Result<_>>()?;
    runs.sort_by_key(|r| r.replica);
    Ok(runs)
}

#[allow(clippy::too_many_arguments)]
pub fn run_stellar_replicas(
    params: ModelParams,
    theta_mode: SphereMode,
    master_seed: u64,
    replicas: u64,
    checkpoint_ns: &[u64],
    probes: &[TorusPoint],
    budget: u64,
    log_cap: usize,
) -> deposim::Result<Vec<StellarRun>> {
    let mut runs: Vec<StellarRun> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = RngStream::new(master_seed, r);
            run_trajectory_stellar_full(
                params,
                theta_mode,
                &mut rng,
                checkpoint_ns,
                probes,
                budget,
                log_cap,
            )
            .map(|(checkpoints, profile)| StellarRun {
                replica: r,
                checkpoints,
                profile,
            })
        })
        .collect::<deposim::Result<_>>()?;
    runs.sort_by_key(|r| r.replica);
    Ok(runs)
}

/// Values of one checkpoint index across replicas, e.g. `h(0)` at the
/// final N.
pub fn collect_h_origin(runs: &[ScalarRun], checkpoint_idx: usize) -> Vec<f64> {
    runs.iter()
        .map(|r| r.checkpoints[checkpoint_idx].h_at_origin)
        .collect()
}

/// Fluctuation values at one probe and checkpoint across replicas.
pub fn collect_f_probe(runs: &[ScalarRun], checkpoint_idx: usize, probe_idx: usize) -> Vec<f64> {
    runs.iter()
        .map(|r| r.checkpoints[checkpoint_idx].f_at_probes[probe_idx].1)
        .collect()
}
