//! The three growth engines: rand, min and stellar deposition on a
//! discretized torus.
//!
//! Profiles store exact pointwise samples of `h_N` at the cell centers
//! `i * D / G`, so a value at a grid point carries no discretization error;
//! the grid only matters for the min-model center rule and for min/max
//! bookkeeping. The origin is cell 0 by construction, which makes the
//! fluctuation field `f_N(x) = h_N(x) - h_N(0)` exact at the reference
//! point.
//!
//! Draw order is fixed per deposit (center-related uniforms first, then the
//! Pareto width, then the direction where applicable). Because the rand and
//! min models consume the same number of variates per step, two runs on
//! equal `(master_seed, stream_id)` share their width sequence exactly;
//! several coupling tests rely on this.

use std::time::Instant;

use crate::error::Error;
use crate::mintree::MinTree;
use crate::params::{ModelKind, ModelParams};
use crate::rng::RngStream;
use crate::sampling::{
    sample_pareto, sample_sphere_centered, sample_uniform_torus, SphereMode,
};
use crate::torus::{circle_distance, TorusPoint};
use crate::Result;

/// Refuse grids above this many cells (8 bytes each; 1 GiB of values).
const MAX_CELLS: usize = 1 << 27;

/// One applied transformation, as retained in the deposition log.
#[derive(Debug, Clone)]
pub struct DepositRecord {
    pub step: u64,
    pub center: TorusPoint,
    pub z: f64,
    /// Direction for stellar deposits, absent for scalar models.
    pub theta: Option<[f64; 3]>,
    /// Min model: cells still tied after the distance rule (resolved by
    /// lowest index). 1 for the other models.
    pub tie_count: u32,
}

/// Statistics of one trajectory at a recorded N.
#[derive(Debug, Clone)]
pub struct Checkpoint {
    pub n: u64,
    pub h_at_origin: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub argmin_cell: usize,
    /// (snapped probe, h(probe) - h(0)) pairs.
    pub f_at_probes: Vec<(TorusPoint, f64)>,
    pub wall_time: f64,
}

/// Stellar counterpart: vector field values plus the scalar companion.
#[derive(Debug, Clone)]
pub struct StellarCheckpoint {
    pub n: u64,
    pub h_at_origin: [f64; 3],
    pub f_at_probes: Vec<(TorusPoint, [f64; 3])>,
    pub companion: Checkpoint,
}

/// A discretized scalar profile with localized updates and a tournament
/// tree over the cells.
#[derive(Debug, Clone)]
pub struct Profile {
    pub params: ModelParams,
    values: Vec<f64>,
    n_deposited: u64,
    tree: MinTree,
    tree_clean: bool,
    /// Min model keeps the tree current after every deposit; the others
    /// refresh lazily at query time.
    eager_min: bool,
    origin_cell: usize,
    log: Vec<DepositRecord>,
    log_cap: usize,
    log_truncated: bool,
    range_buf: Vec<(usize, usize)>,
}

impl Profile {
    pub fn new(params: ModelParams, log_cap: usize) -> Result<Self> {
        let cells = params.cells();
        if cells > MAX_CELLS {
            return Err(Error::GridTooLarge {
                cells: cells as u128,
            });
        }
        Ok(Profile {
            values: vec![0.0; cells],
            n_deposited: 0,
            tree: MinTree::new(cells),
            tree_clean: true,
            eager_min: params.model == ModelKind::Min,
            origin_cell: 0,
            log: Vec::new(),
            log_cap,
            log_truncated: false,
            range_buf: Vec::new(),
            params,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n_deposited(&self) -> u64 {
        self.n_deposited
    }

    pub fn origin_cell(&self) -> usize {
        self.origin_cell
    }

    pub fn log(&self) -> &[DepositRecord] {
        &self.log
    }

    pub fn log_truncated(&self) -> bool {
        self.log_truncated
    }

    /// Cell index of the grid point nearest to `p`.
    pub fn snap(&self, p: &TorusPoint) -> usize {
        let g = self.params.grid_per_dim;
        let w = self.params.cell_width();
        let mut idx = 0;
        for axis in 0..self.params.dim {
            let i = (p.coord(axis) / w).round() as usize % g;
            idx = idx * g + i;
        }
        idx
    }

    /// Center point of a cell.
    pub fn cell_center(&self, idx: usize) -> TorusPoint {
        let g = self.params.grid_per_dim;
        let w = self.params.cell_width();
        if self.params.dim == 1 {
            TorusPoint::new(&[idx as f64 * w], self.params.domain)
        } else {
            let ix = idx / g;
            let iy = idx % g;
            TorusPoint::new(&[ix as f64 * w, iy as f64 * w], self.params.domain)
        }
    }

    /// Add one bump at `center` with width `z`, updating only the touched
    /// cells. Returns the record that was appended to the log.
    pub fn apply_bump(&mut self, center: TorusPoint, z: f64, tie_count: u32) -> DepositRecord {
        let mut ranges = std::mem::take(&mut self.range_buf);
        ranges.clear();
        {
            let values = &mut self.values;
            visit_bump(&self.params, &center, z, Some(&mut ranges), |idx, c| {
                values[idx] += c;
            });
        }
        if self.eager_min {
            for &(lo, hi) in &ranges {
                self.tree.update_range_from(&self.values, lo, hi);
            }
        } else {
            self.tree_clean = false;
        }
        self.range_buf = ranges;
        self.n_deposited += 1;
        let record = DepositRecord {
            step: self.n_deposited,
            center,
            z,
            theta: None,
            tie_count,
        };
        self.push_log(record.clone());
        record
    }

    fn push_log(&mut self, record: DepositRecord) {
        if self.log.len() < self.log_cap {
            self.log.push(record);
        } else if self.log_cap > 0 {
            self.log_truncated = true;
        }
    }

    fn refresh_min(&mut self) {
        if !self.tree_clean {
            self.tree.rebuild_from(&self.values);
            self.tree_clean = true;
        }
    }

    /// Global minimum value and its lowest-index cell.
    pub fn global_min(&mut self) -> (f64, usize) {
        self.refresh_min();
        self.tree.global_min()
    }

    /// Exact global minimum by linear scan; consistency oracle for the tree.
    pub fn scan_min(&self) -> (f64, usize) {
        let mut best = (f64::INFINITY, 0usize);
        for (i, &v) in self.values.iter().enumerate() {
            if v < best.0 {
                best = (v, i);
            }
        }
        best
    }

    /// Replay the deposition log onto a fresh grid; oracle for the
    /// localized-update path. Fails if the log was truncated.
    pub fn recompute_from_log(&self) -> Result<Vec<f64>> {
        if self.log_truncated {
            return Err(Error::invalid("log", "deposition log was truncated"));
        }
        let mut fresh = vec![0.0; self.values.len()];
        for rec in &self.log {
            visit_bump(&self.params, &rec.center, rec.z, None, |idx, c| {
                fresh[idx] += c;
            });
        }
        Ok(fresh)
    }

    /// Sum of all cell values (a Riemann sum of the profile up to the cell
    /// volume factor).
    pub fn grid_sum(&self) -> f64 {
        self.values.iter().sum()
    }

    fn capture(&mut self, probe_cells: &[(TorusPoint, usize)], started: Instant) -> Checkpoint {
        let (h_min, argmin_cell) = self.global_min();
        let h_max = self.values.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        let h0 = self.values[self.origin_cell];
        Checkpoint {
            n: self.n_deposited,
            h_at_origin: h0,
            h_min,
            h_max,
            argmin_cell,
            f_at_probes: probe_cells
                .iter()
                .map(|(p, c)| (*p, self.values[*c] - h0))
                .collect(),
            wall_time: started.elapsed().as_secs_f64(),
        }
    }
}

/// Vector-valued stellar profile plus its scalar companion field.
#[derive(Debug, Clone)]
pub struct StellarProfile {
    pub theta_mode: SphereMode,
    vec_values: Vec<[f64; 3]>,
    companion: Profile,
}

impl StellarProfile {
    pub fn new(params: ModelParams, theta_mode: SphereMode, log_cap: usize) -> Result<Self> {
        if params.dim != 2 || params.model != ModelKind::Stellar {
            return Err(Error::DimensionMismatch {
                required: 2,
                got: params.dim,
            });
        }
        let companion = Profile::new(params, log_cap)?;
        Ok(StellarProfile {
            theta_mode,
            vec_values: vec![[0.0; 3]; params.cells()],
            companion,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.companion.params
    }

    pub fn vec_values(&self) -> &[[f64; 3]] {
        &self.vec_values
    }

    /// The scalar field accumulating the same bumps without directions.
    pub fn companion(&self) -> &Profile {
        &self.companion
    }

    pub fn n_deposited(&self) -> u64 {
        self.companion.n_deposited
    }

    fn capture(
        &mut self,
        probe_cells: &[(TorusPoint, usize)],
        started: Instant,
    ) -> StellarCheckpoint {
        let origin = self.companion.origin_cell;
        let h0 = self.vec_values[origin];
        StellarCheckpoint {
            n: self.companion.n_deposited,
            h_at_origin: h0,
            f_at_probes: probe_cells
                .iter()
                .map(|(p, c)| {
                    let v = self.vec_values[*c];
                    (*p, [v[0] - h0[0], v[1] - h0[1], v[2] - h0[2]])
                })
                .collect(),
            companion: self.companion.capture(probe_cells, started),
        }
    }
}

/// One rand-model step: uniform center, Pareto width.
pub fn deposit_rand(profile: &mut Profile, rng: &mut RngStream) -> Result<DepositRecord> {
    if profile.params.model != ModelKind::Rand {
        return Err(Error::invalid("model", "profile is not a rand-model profile"));
    }
    let center = sample_uniform_torus(rng, profile.params.domain, profile.params.dim);
    let z = sample_pareto(rng, profile.params.beta)?;
    Ok(profile.apply_bump(center, z, 1))
}

/// One min-model step: the bump lands on the grid cell attaining the exact
/// global minimum that is nearest (torus distance) to a fresh uniform
/// tie-breaker; remaining ties resolve to the lowest linear index.
pub fn deposit_min(profile: &mut Profile, rng: &mut RngStream) -> Result<DepositRecord> {
    if profile.params.model != ModelKind::Min {
        return Err(Error::invalid("model", "profile is not a min-model profile"));
    }
    let u = sample_uniform_torus(rng, profile.params.domain, profile.params.dim);
    let z = sample_pareto(rng, profile.params.beta)?;
    let (cell, tie_count) = if profile.params.dim == 1 {
        nearest_min_cell_1d(profile, &u)
    } else {
        nearest_min_cell_2d(profile, &u)
    };
    let center = profile.cell_center(cell);
    Ok(profile.apply_bump(center, z, tie_count))
}

/// One stellar step: uniform center, Pareto width, centered direction.
/// The vector field gains `X * Theta`, the companion gains `X`.
pub fn deposit_stellar(profile: &mut StellarProfile, rng: &mut RngStream) -> Result<DepositRecord> {
    let params = profile.companion.params;
    let center = sample_uniform_torus(rng, params.domain, params.dim);
    let z = sample_pareto(rng, params.beta)?;
    let theta = sample_sphere_centered(rng, profile.theta_mode);

    {
        let vec_values = &mut profile.vec_values;
        let scalar = &mut profile.companion.values;
        visit_bump(&params, &center, z, None, |idx, c| {
            scalar[idx] += c;
            let v = &mut vec_values[idx];
            v[0] += c * theta[0];
            v[1] += c * theta[1];
            v[2] += c * theta[2];
        });
    }
    profile.companion.tree_clean = false;
    profile.companion.n_deposited += 1;
    let record = DepositRecord {
        step: profile.companion.n_deposited,
        center,
        z,
        theta: Some(theta),
        tie_count: 1,
    };
    profile.companion.push_log(record.clone());
    Ok(record)
}

fn validate_schedule(checkpoint_ns: &[u64], budget: u64) -> Result<()> {
    for w in checkpoint_ns.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::invalid(
                "checkpoint_ns",
                "must be strictly increasing",
            ));
        }
    }
    if let Some(&max) = checkpoint_ns.last() {
        if max > budget {
            return Err(Error::BudgetExceeded {
                requested: max,
                budget,
            });
        }
    }
    Ok(())
}

fn snap_probes(profile: &Profile, probes: &[TorusPoint]) -> Vec<(TorusPoint, usize)> {
    probes
        .iter()
        .map(|p| {
            let cell = profile.snap(p);
            (profile.cell_center(cell), cell)
        })
        .collect()
}

/// Run one scalar trajectory (rand or min model), capturing a checkpoint at
/// every requested N. Deterministic given the stream.
pub fn run_trajectory(
    params: ModelParams,
    rng: &mut RngStream,
    checkpoint_ns: &[u64],
    probes: &[TorusPoint],
    budget: u64,
    log_cap: usize,
) -> Result<Vec<Checkpoint>> {
    run_trajectory_full(params, rng, checkpoint_ns, probes, budget, log_cap)
        .map(|(checkpoints, _)| checkpoints)
}

/// [`run_trajectory`] returning the final profile as well (deposition log,
/// values, min tree).
pub fn run_trajectory_full(
    params: ModelParams,
    rng: &mut RngStream,
    checkpoint_ns: &[u64],
    probes: &[TorusPoint],
    budget: u64,
    log_cap: usize,
) -> Result<(Vec<Checkpoint>, Profile)> {
    validate_schedule(checkpoint_ns, budget)?;
    let mut profile = Profile::new(params, log_cap)?;
    let probe_cells = snap_probes(&profile, probes);
    let started = Instant::now();
    let mut out = Vec::with_capacity(checkpoint_ns.len());
    let mut next = checkpoint_ns.iter().peekable();
    while let Some(&&target) = next.peek() {
        while profile.n_deposited < target {
            match params.model {
                ModelKind::Rand => deposit_rand(&mut profile, rng)?,
                ModelKind::Min => deposit_min(&mut profile, rng)?,
                ModelKind::Stellar => {
                    return Err(Error::invalid("model", "use run_trajectory_stellar"))
                }
            };
        }
        out.push(profile.capture(&probe_cells, started));
        next.next();
    }
    Ok((out, profile))
}

/// Stellar counterpart of [`run_trajectory`].
pub fn run_trajectory_stellar(
    params: ModelParams,
    theta_mode: SphereMode,
    rng: &mut RngStream,
    checkpoint_ns: &[u64],
    probes: &[TorusPoint],
    budget: u64,
    log_cap: usize,
) -> Result<Vec<StellarCheckpoint>> {
    run_trajectory_stellar_full(params, theta_mode, rng, checkpoint_ns, probes, budget, log_cap)
        .map(|(checkpoints, _)| checkpoints)
}

/// [`run_trajectory_stellar`] returning the final profile as well.
pub fn run_trajectory_stellar_full(
    params: ModelParams,
    theta_mode: SphereMode,
    rng: &mut RngStream,
    checkpoint_ns: &[u64],
    probes: &[TorusPoint],
    budget: u64,
    log_cap: usize,
) -> Result<(Vec<StellarCheckpoint>, StellarProfile)> {
    validate_schedule(checkpoint_ns, budget)?;
    let mut profile = StellarProfile::new(params, theta_mode, log_cap)?;
    let probe_cells = snap_probes(&profile.companion, probes);
    let started = Instant::now();
    let mut out = Vec::with_capacity(checkpoint_ns.len());
    let mut next = checkpoint_ns.iter().peekable();
    while let Some(&&target) = next.peek() {
        while profile.n_deposited() < target {
            deposit_stellar(&mut profile, rng)?;
        }
        out.push(profile.capture(&probe_cells, started));
        next.next();
    }
    Ok((out, profile))
}

/// The default log-spaced checkpoint schedule: powers of 10^(1/4)
/// between `n_min` and `n_max`, deduplicated after rounding.
pub fn geometric_checkpoints(n_min: u64, n_max: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut k = (4.0 * (n_min as f64).log10()).floor() as i64;
    loop {
        let n = 10f64.powf(k as f64 / 4.0).round() as u64;
        if n > n_max {
            break;
        }
        if n >= n_min && out.last() != Some(&n) {
            out.push(n);
        }
        k += 1;
    }
    out
}

/// Visit every cell whose center lies strictly inside the bump support,
/// passing the exact contribution `z^(alpha-d) psi(v/z)`. When `ranges` is
/// given, the touched contiguous index ranges are appended to it (used for
/// tournament-tree maintenance).
pub(crate) fn visit_bump<F: FnMut(usize, f64)>(
    params: &ModelParams,
    center: &TorusPoint,
    z: f64,
    mut ranges: Option<&mut Vec<(usize, usize)>>,
    mut f: F,
) {
    debug_assert!(z >= 1.0);
    let g = params.grid_per_dim;
    let w = params.cell_width();
    let domain = params.domain;
    let amp = params.bump_amplitude(z);
    let shape = params.shape;
    let inv_z = 1.0 / z;

    if params.dim == 1 {
        let y = center.coord(0);
        if 2.0 * z + 2.0 * w >= domain {
            for i in 0..g {
                let v = circle_distance(i as f64 * w, y, domain);
                if v < z {
                    f(i, amp * shape.eval_nonneg(v * inv_z));
                }
            }
            if let Some(r) = ranges.as_deref_mut() {
                r.push((0, g - 1));
            }
        } else {
            let i_lo = ((y - z) / w).floor() as i64;
            let i_hi = ((y + z) / w).ceil() as i64;
            for i in i_lo..=i_hi {
                let v = (i as f64 * w - y).abs();
                if v < z {
                    f(i.rem_euclid(g as i64) as usize, amp * shape.eval_nonneg(v * inv_z));
                }
            }
            if let Some(r) = ranges.as_deref_mut() {
                push_wrapped_range(r, i_lo, i_hi, g, 0);
            }
        }
        return;
    }

    // d = 2: iterate an L1 diamond row by row; each row is contiguous in
    // the y index (up to wrap).
    let yx = center.coord(0);
    let yy = center.coord(1);
    let full_x = 2.0 * z + 2.0 * w >= domain;
    let x_range: (i64, i64) = if full_x {
        (0, g as i64 - 1)
    } else {
        (((yx - z) / w).floor() as i64, ((yx + z) / w).ceil() as i64)
    };
    for ix in x_range.0..=x_range.1 {
        let dx = if full_x {
            circle_distance(ix as f64 * w, yx, domain)
        } else {
            (ix as f64 * w - yx).abs()
        };
        if dx >= z {
            continue;
        }
        let rem = z - dx;
        let row = ix.rem_euclid(g as i64) as usize * g;
        if 2.0 * rem + 2.0 * w >= domain {
            for iy in 0..g {
                let v = dx + circle_distance(iy as f64 * w, yy, domain);
                if v < z {
                    f(row + iy, amp * shape.eval_nonneg(v * inv_z));
                }
            }
            if let Some(r) = ranges.as_deref_mut() {
                r.push((row, row + g - 1));
            }
        } else {
            let j_lo = ((yy - rem) / w).floor() as i64;
            let j_hi = ((yy + rem) / w).ceil() as i64;
            for j in j_lo..=j_hi {
                let v = dx + (j as f64 * w - yy).abs();
                if v < z {
                    f(row + j.rem_euclid(g as i64) as usize, amp * shape.eval_nonneg(v * inv_z));
                }
            }
            if let Some(r) = ranges.as_deref_mut() {
                push_wrapped_range(r, j_lo, j_hi, g, row);
            }
        }
    }
}

fn push_wrapped_range(out: &mut Vec<(usize, usize)>, lo: i64, hi: i64, g: usize, base: usize) {
    debug_assert!(hi - lo + 1 <= g as i64);
    let lo_m = lo.rem_euclid(g as i64) as usize;
    let hi_m = hi.rem_euclid(g as i64) as usize;
    if lo_m <= hi_m {
        out.push((base + lo_m, base + hi_m));
    } else {
        out.push((base + lo_m, base + g - 1));
        out.push((base, base + hi_m));
    }
}

/// Min-model center rule on the circle: the candidates are the first
/// minimum-valued cells clockwise and counterclockwise of the tie-breaker,
/// compared by exact torus distance.
fn nearest_min_cell_1d(profile: &mut Profile, u: &TorusPoint) -> (usize, u32) {
    let g = profile.params.grid_per_dim;
    let w = profile.params.cell_width();
    let domain = profile.params.domain;
    let (m, _) = profile.global_min();
    let pos = u.coord(0);

    let a_r = ((pos / w).ceil() as usize) % g;
    let a_l = (pos / w).floor() as usize % g;

    let right = profile
        .tree
        .leftmost_leq(a_r, g - 1, m)
        .or_else(|| profile.tree.leftmost_leq(0, a_r.saturating_sub(1), m));
    let left = profile
        .tree
        .rightmost_leq(0, a_l, m)
        .or_else(|| {
            if a_l + 1 <= g - 1 {
                profile.tree.rightmost_leq(a_l + 1, g - 1, m)
            } else {
                None
            }
        });

    let mut best: Option<(f64, usize)> = None;
    let mut tie = 1u32;
    for cand in [left, right].into_iter().flatten() {
        let v = circle_distance(cand as f64 * w, pos, domain);
        match best {
            None => best = Some((v, cand)),
            Some((bv, bc)) => {
                if v < bv || (v == bv && cand < bc) {
                    if v == bv && cand != bc {
                        tie = 2;
                    }
                    best = Some((v, cand));
                } else if v == bv && cand != bc {
                    tie = 2;
                }
            }
        }
    }
    let (_, cell) = best.expect("global minimum always exists");
    (cell, tie)
}

/// Min-model center rule on the 2-torus: expanding L1 rings of cells
/// around the tie-breaker until minimum-valued cells appear, then two more
/// rings to absorb the sub-cell offset of the continuous tie-breaker.
fn nearest_min_cell_2d(profile: &mut Profile, u: &TorusPoint) -> (usize, u32) {
    let g = profile.params.grid_per_dim as i64;
    let w = profile.params.cell_width();
    let domain = profile.params.domain;
    let (m, _) = profile.global_min();
    let (ux, uy) = (u.coord(0), u.coord(1));
    let cx = (ux / w).round() as i64 % g;
    let cy = (uy / w).round() as i64 % g;

    let mut hits: Vec<(f64, usize)> = Vec::new();
    let check = |ix: i64, iy: i64, hits: &mut Vec<(f64, usize)>| {
        let ix = ix.rem_euclid(g) as usize;
        let iy = iy.rem_euclid(g) as usize;
        let idx = ix * g as usize + iy;
        if profile.values[idx] == m && !hits.iter().any(|&(_, i)| i == idx) {
            let v = circle_distance(ix as f64 * w, ux, domain)
                + circle_distance(iy as f64 * w, uy, domain);
            hits.push((v, idx));
        }
    };

    let mut found_at: Option<i64> = None;
    let mut r = 0i64;
    while r <= 2 * g {
        if let Some(r0) = found_at {
            if r > r0 + 2 {
                break;
            }
        }
        if r == 0 {
            check(cx, cy, &mut hits);
        } else {
            for dx in -r..=r {
                let dy = r - dx.abs();
                check(cx + dx, cy + dy, &mut hits);
                if dy != 0 {
                    check(cx + dx, cy - dy, &mut hits);
                }
            }
        }
        if !hits.is_empty() && found_at.is_none() {
            found_at = Some(r);
        }
        r += 1;
    }
    let &(best_v, _) = hits
        .iter()
        .min_by(|a, b| a.partial_cmp(b).unwrap())
        .expect("global minimum always exists");
    let tied: Vec<usize> = hits
        .iter()
        .filter(|&&(v, _)| v == best_v)
        .map(|&(_, i)| i)
        .collect();
    let cell = *tied.iter().min().unwrap();
    (cell, tied.len() as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::{ShapeFunction, ShapeKind};

    fn params_1d(model: ModelKind, g: usize, domain: f64) -> ModelParams {
        ModelParams::new(
            1.5,
            2.0,
            domain,
            1,
            ShapeFunction::new(ShapeKind::Triangle),
            model,
            g,
        )
        .unwrap()
    }

    #[test]
    fn tiny_bump_touches_exactly_one_cell() {
        // cell width 100/16 = 6.25 > 2z, center on the cell center
        let p = params_1d(ModelKind::Rand, 16, 100.0);
        let mut profile = Profile::new(p, 16).unwrap();
        let center = profile.cell_center(5);
        profile.apply_bump(center, 1.5, 1);
        let touched: Vec<usize> = profile
            .values()
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, _)| i)
            .collect();
        assert_eq!(touched, vec![5]);
        let amp = 1.5f64.powf(0.5);
        assert!((profile.values()[5] - amp).abs() < 1e-12);
    }

    #[test]
    fn huge_bump_touches_every_cell() {
        let p = params_1d(ModelKind::Rand, 64, 10.0);
        let mut profile = Profile::new(p, 0).unwrap();
        let center = TorusPoint::new(&[3.3], 10.0);
        profile.apply_bump(center, 5.5, 1); // z >= D/2
        assert!(profile.values().iter().all(|&v| v > 0.0));
    }

    #[test]
    fn exact_support_membership() {
        let p = params_1d(ModelKind::Rand, 128, 60.0);
        let mut profile = Profile::new(p, 0).unwrap();
        let center = TorusPoint::new(&[17.2], 60.0);
        let z = 4.7;
        profile.apply_bump(center, z, 1);
        for i in 0..128 {
            let v = circle_distance(i as f64 * p.cell_width(), 17.2, 60.0);
            if v < z {
                assert!(profile.values()[i] > 0.0, "cell {i} inside support");
            } else {
                assert_eq!(profile.values()[i], 0.0, "cell {i} outside support");
            }
        }
    }

    #[test]
    fn wrapping_bump_and_tree_agree_with_scan() {
        let p = params_1d(ModelKind::Min, 37, 10.0);
        let mut profile = Profile::new(p, 0).unwrap();
        // support wraps around 0
        profile.apply_bump(TorusPoint::new(&[0.4], 10.0), 1.9, 1);
        profile.apply_bump(TorusPoint::new(&[9.7], 10.0), 2.4, 1);
        let (tm, ta) = profile.global_min();
        let (sm, sa) = profile.scan_min();
        assert_eq!((tm, ta), (sm, sa));
    }

    #[test]
    fn min_model_first_center_lands_next_to_tiebreaker() {
        let p = params_1d(ModelKind::Min, 256, 60.0);
        for seed in 0..20 {
            let mut profile = Profile::new(p, 4).unwrap();
            let mut rng = RngStream::new(900 + seed, 0);
            let rec = deposit_min(&mut profile, &mut rng).unwrap();
            // replay the tie-breaker draw
            let mut rng2 = RngStream::new(900 + seed, 0);
            let u = sample_uniform_torus(&mut rng2, 60.0, 1);
            let v = circle_distance(rec.center.coord(0), u.coord(0), 60.0);
            assert!(v <= p.cell_width() / 2.0 + 1e-9, "v = {v}");
        }
    }

    #[test]
    fn min_model_second_center_avoids_first_support() {
        let p = params_1d(ModelKind::Min, 512, 60.0);
        for seed in 0..20 {
            let mut profile = Profile::new(p, 4).unwrap();
            let mut rng = RngStream::new(7000 + seed, 0);
            let first = deposit_min(&mut profile, &mut rng).unwrap();
            if first.z >= 30.0 {
                continue; // bump covered the whole torus
            }
            let second = deposit_min(&mut profile, &mut rng).unwrap();
            let v = circle_distance(second.center.coord(0), first.center.coord(0), 60.0);
            assert!(
                v >= first.z - p.cell_width(),
                "second bump landed inside the first support: v = {v}, z = {}",
                first.z
            );
        }
    }

    #[test]
    fn values_never_decrease() {
        let p = params_1d(ModelKind::Rand, 128, 60.0);
        let mut profile = Profile::new(p, 0).unwrap();
        let mut rng = RngStream::new(4, 0);
        let mut prev = profile.values().to_vec();
        for _ in 0..200 {
            deposit_rand(&mut profile, &mut rng).unwrap();
            for (a, b) in prev.iter().zip(profile.values()) {
                assert!(b >= a);
            }
            prev = profile.values().to_vec();
        }
    }

    #[test]
    fn recompute_from_log_matches() {
        let p = params_1d(ModelKind::Rand, 512, 60.0);
        let mut profile = Profile::new(p, 1000).unwrap();
        let mut rng = RngStream::new(99, 3);
        for _ in 0..500 {
            deposit_rand(&mut profile, &mut rng).unwrap();
        }
        let fresh = profile.recompute_from_log().unwrap();
        for (a, b) in fresh.iter().zip(profile.values()) {
            let denom = b.abs().max(1e-300);
            assert!(((a - b).abs() / denom) <= 1e-9);
        }
    }

    #[test]
    fn trajectory_checkpoint_at_zero_is_all_zero() {
        let p = params_1d(ModelKind::Rand, 64, 60.0);
        let mut rng = RngStream::new(1, 0);
        let probes = vec![TorusPoint::new(&[15.0], 60.0)];
        let cps = run_trajectory(p, &mut rng, &[0], &probes, 1000, 0).unwrap();
        assert_eq!(cps.len(), 1);
        let c = &cps[0];
        assert_eq!(c.n, 0);
        assert_eq!(c.h_at_origin, 0.0);
        assert_eq!(c.h_min, 0.0);
        assert_eq!(c.h_max, 0.0);
        assert_eq!(c.f_at_probes[0].1, 0.0);
    }

    #[test]
    fn origin_probe_f_is_exactly_zero() {
        let p = params_1d(ModelKind::Rand, 64, 60.0);
        let mut rng = RngStream::new(2, 0);
        let probes = vec![TorusPoint::new(&[0.0], 60.0), TorusPoint::new(&[30.0], 60.0)];
        let cps = run_trajectory(p, &mut rng, &[10, 100], &probes, 1000, 0).unwrap();
        for c in cps {
            assert_eq!(c.f_at_probes[0].1, 0.0);
        }
    }

    #[test]
    fn budget_and_schedule_validation() {
        let p = params_1d(ModelKind::Rand, 64, 60.0);
        let mut rng = RngStream::new(2, 0);
        assert!(matches!(
            run_trajectory(p, &mut rng, &[10, 10], &[], 100, 0),
            Err(Error::InvalidParameter { .. })
        ));
        assert!(matches!(
            run_trajectory(p, &mut rng, &[200], &[], 100, 0),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn stellar_single_deposit_matches_closed_form() {
        let p = ModelParams::new(
            3.0,
            4.0,
            16.0,
            2,
            ShapeFunction::new(ShapeKind::Parabola),
            ModelKind::Stellar,
            32,
        )
        .unwrap();
        let mut profile = StellarProfile::new(p, SphereMode::UniformSphere, 8).unwrap();
        let mut rng = RngStream::new(5, 0);
        let rec = deposit_stellar(&mut profile, &mut rng).unwrap();
        let theta = rec.theta.unwrap();
        let cell = profile.companion().snap(&rec.center);
        let snapped = profile.companion().cell_center(cell);
        let expected_scalar = p.eval_bump(&rec.center, rec.z, &snapped).unwrap();
        let v = profile.vec_values()[cell];
        for k in 0..3 {
            assert!((v[k] - expected_scalar * theta[k]).abs() < 1e-12);
        }
        assert!((profile.companion().values()[cell] - expected_scalar).abs() < 1e-12);
    }

    #[test]
    fn stellar_requires_dim_two() {
        let p = params_1d(ModelKind::Rand, 64, 60.0);
        assert!(StellarProfile::new(p, SphereMode::UniformSphere, 0).is_err());
    }

    #[test]
    fn geometric_schedule_is_quarter_decades() {
        let ns = geometric_checkpoints(100, 10_000);
        assert_eq!(ns.first(), Some(&100));
        assert_eq!(ns.last(), Some(&10_000));
        assert!(ns.contains(&316) && ns.contains(&1000) && ns.contains(&3162));
        for w in ns.windows(2) {
            assert!(w[1] > w[0]);
        }
    }
}
