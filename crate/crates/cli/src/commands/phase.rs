//! `phase`: sweep an (alpha, beta) grid, fit growth and fluctuation
//! exponents per point and compare with the exponent-based classification.

use std::path::Path;

use deposim::shape::ShapeFunction;
use deposim::stats::{
    fit_scaling, phase_classify_exponents, scale_value, PhaseRegion, ScaleMetric,
};
use deposim::torus::TorusPoint;
use deposim::{ModelKind, ModelParams};

use crate::calibration::Calibration;
use crate::commands::CmdError;
use crate::config::ShapeName;
use crate::out;
use crate::runner;

#[derive(Debug, Clone)]
pub struct PhaseArgs {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub dim: usize,
    pub shape: ShapeName,
    pub domain: f64,
    pub grid_per_dim: usize,
    pub replicas: u64,
    pub checkpoint_ns: Vec<u64>,
    pub master_seed: u64,
    /// Minimal distance (in alpha) from the critical lines unless
    /// explicitly overridden.
    pub allow_near_boundary: bool,
}

#[derive(Debug, Clone)]
pub struct PhaseRow {
    pub alpha: f64,
    pub beta: f64,
    pub zeta: f64,
    pub kappa: f64,
    pub predicted: PhaseRegion,
    pub speed_exponent: Option<f64>,
    pub fluct_exponent: Option<f64>,
    pub fit_region: Option<PhaseRegion>,
    pub agree: Option<bool>,
    pub status: String,
}

/// Region letter from the two fitted-exponent verdicts.
fn region_from_flags(superballistic: bool, heavy: bool) -> PhaseRegion {
    match (superballistic, heavy) {
        (true, true) => PhaseRegion::A,
        (true, false) => PhaseRegion::B,
        (false, false) => PhaseRegion::C,
        (false, true) => PhaseRegion::D,
    }
}

/// Distance (in alpha) from the two critical lines.
fn boundary_distance(alpha: f64, beta: f64, dim: usize, order_n: u32) -> f64 {
    let d = dim as f64;
    let speed_line = d + (beta - 1.0); // zeta = 1
    let fluct_line = d + order_n as f64 + (beta - 1.0) / 2.0; // kappa = 1/2
    (alpha - speed_line).abs().min((alpha - fluct_line).abs())
}

pub fn phase_sweep(
    args: &PhaseArgs,
    cal: &Calibration,
    out_dir: &Path,
) -> Result<Vec<PhaseRow>, CmdError> {
    if args.alphas.is_empty() || args.betas.is_empty() {
        return Err(CmdError::Invalid("empty alpha or beta grid".into()));
    }
    if args.checkpoint_ns.len() < 3 {
        return Err(CmdError::Invalid(
            "exponent fits need at least three checkpoint Ns".into(),
        ));
    }
    let shape = ShapeFunction::new(args.shape.into());
    if !args.allow_near_boundary {
        for &alpha in &args.alphas {
            for &beta in &args.betas {
                let dist = boundary_distance(alpha, beta, args.dim, shape.order_n);
                if dist > 1e-12 && dist < 0.1 {
                    return Err(CmdError::Invalid(format!(
                        "grid point (alpha={alpha}, beta={beta}) sits within 0.1 of a critical \
                         line; pass --allow-near-boundary to sweep it anyway"
                    )));
                }
            }
        }
    }

    let speed_tol = cal.value("phase_speed_tol");
    let fluct_tol = cal.value("phase_fluct_tol");
    let probe = vec![TorusPoint::new(
        &vec![args.domain / 4.0; args.dim],
        args.domain,
    )];

    let mut rows = Vec::new();
    for (pi, (&alpha, &beta)) in args
        .alphas
        .iter()
        .flat_map(|a| args.betas.iter().map(move |b| (a, b)))
        .enumerate()
    {
        let params = match ModelParams::new(
            alpha,
            beta,
            args.domain,
            args.dim,
            shape,
            ModelKind::Rand,
            args.grid_per_dim,
        ) {
            Ok(p) => p,
            Err(e) => {
                rows.push(PhaseRow {
                    alpha,
                    beta,
                    zeta: f64::NAN,
                    kappa: f64::NAN,
                    predicted: PhaseRegion::Boundary,
                    speed_exponent: None,
                    fluct_exponent: None,
                    fit_region: None,
                    agree: None,
                    status: format!("error: {e}"),
                });
                continue;
            }
        };
        let predicted = phase_classify_exponents(params.zeta, params.kappa);
        let row = match sweep_point(args, params, pi as u64, &probe) {
            Ok((speed_exp, fluct_exp)) => {
                if predicted == PhaseRegion::Boundary {
                    PhaseRow {
                        alpha,
                        beta,
                        zeta: params.zeta,
                        kappa: params.kappa,
                        predicted,
                        speed_exponent: Some(speed_exp),
                        fluct_exponent: Some(fluct_exp),
                        fit_region: None,
                        agree: None,
                        status: "boundary: excluded from exponent assertions".into(),
                    }
                } else {
                    let fit_region = region_from_flags(
                        speed_exp > 1.0 + speed_tol / 2.0,
                        fluct_exp > 0.5 + fluct_tol / 2.0,
                    );
                    PhaseRow {
                        alpha,
                        beta,
                        zeta: params.zeta,
                        kappa: params.kappa,
                        predicted,
                        speed_exponent: Some(speed_exp),
                        fluct_exponent: Some(fluct_exp),
                        fit_region: Some(fit_region),
                        agree: Some(fit_region == predicted),
                        status: "ok".into(),
                    }
                }
            }
            Err(e) => PhaseRow {
                alpha,
                beta,
                zeta: params.zeta,
                kappa: params.kappa,
                predicted,
                speed_exponent: None,
                fluct_exponent: None,
                fit_region: None,
                agree: None,
                status: format!("error: {e}"),
            },
        };
        rows.push(row);
    }

    out::ensure_dir(out_dir)?;
    out::write_text(&out_dir.join("phase.csv"), &phase_csv(&rows))?;
    Ok(rows)
}

fn sweep_point(
    args: &PhaseArgs,
    params: ModelParams,
    point_idx: u64,
    probe: &[TorusPoint],
) -> Result<(f64, f64), CmdError> {
    let seed_base = 1_000_000 * point_idx;
    let runs = runner::run_scalar_replicas(
        params,
        args.master_seed.wrapping_add(seed_base),
        args.replicas,
        &args.checkpoint_ns,
        probe,
        *args.checkpoint_ns.last().unwrap(),
        0,
    )?;
    let mut speed_points = Vec::new();
    let mut fluct_points = Vec::new();
    for (k, &n) in args.checkpoint_ns.iter().enumerate() {
        let h = runner::collect_h_origin(&runs, k);
        speed_points.push((n as f64, scale_value(&h, ScaleMetric::MedianAbs)?));
        let f = runner::collect_f_probe(&runs, k, 0);
        fluct_points.push((n as f64, scale_value(&f, ScaleMetric::Iqr)?));
    }
    let speed_fit = fit_scaling(&speed_points, ScaleMetric::MedianAbs)?;
    let fluct_fit = fit_scaling(&fluct_points, ScaleMetric::Iqr)?;
    Ok((speed_fit.exponent, fluct_fit.exponent))
}

pub fn phase_csv(rows: &[PhaseRow]) -> String {
    let mut out = String::from(
        "alpha,beta,zeta,kappa,predicted_region,speed_exponent,fluct_exponent,fit_region,agree,status\n",
    );
    let opt = |x: &Option<f64>| x.map(|v| format!("{v:.6}")).unwrap_or_default();
    for r in rows {
        out.push_str(&format!(
            "{},{},{:.6},{:.6},{},{},{},{},{},{}\n",
            r.alpha,
            r.beta,
            r.zeta,
            r.kappa,
            r.predicted,
            opt(&r.speed_exponent),
            opt(&r.fluct_exponent),
            r.fit_region.map(|x| x.to_string()).unwrap_or_default(),
            r.agree.map(|x| x.to_string()).unwrap_or_default(),
            r.status
        ));
    }
    out
}
