//! Estimators and goodness-of-fit machinery: Kolmogorov-Smirnov tests,
//! log-log scaling fits, covariance estimation, the phase-diagram
//! classifier and the heavy-tailed CLT demonstration.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::Error;
use crate::rng::RngStream;
use crate::Result;

/// Outcome of one fixed-threshold goodness-of-fit test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GofResult {
    pub statistic: f64,
    pub n: usize,
    pub threshold: f64,
    pub pass: bool,
}

impl GofResult {
    pub fn new(statistic: f64, n: usize, threshold: f64) -> Self {
        GofResult {
            statistic,
            n,
            threshold,
            pass: statistic < threshold,
        }
    }
}

fn sorted(mut xs: Vec<f64>) -> Vec<f64> {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs
}

/// Sup-norm distance between the empirical CDF of `sample` and `cdf`.
pub fn ks_one_sample<F: Fn(f64) -> f64>(
    sample: &[f64],
    cdf: F,
    threshold: f64,
) -> Result<GofResult> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let xs = sorted(sample.to_vec());
    let n = xs.len() as f64;
    let mut sup = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        sup = sup.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    Ok(GofResult::new(sup, xs.len(), threshold))
}

/// Sup-norm distance between the empirical CDFs of two samples.
pub fn ks_two_sample(a: &[f64], b: &[f64], threshold: f64) -> Result<GofResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    let xs = sorted(a.to_vec());
    let ys = sorted(b.to_vec());
    let (n, m) = (xs.len(), ys.len());
    let (nf, mf) = (n as f64, m as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut sup = 0.0f64;
    while i < n && j < m {
        // advance both CDFs past the next merged value, ties together
        let v = xs[i].min(ys[j]);
        while i < n && xs[i] <= v {
            i += 1;
        }
        while j < m && ys[j] <= v {
            j += 1;
        }
        sup = sup.max((i as f64 / nf - j as f64 / mf).abs());
    }
    if i < n {
        sup = sup.max(1.0 - i as f64 / nf);
    }
    if j < m {
        sup = sup.max(1.0 - j as f64 / mf);
    }
    Ok(GofResult::new(sup, n.min(m), threshold))
}

/// CDF of the Kolmogorov distribution, via its alternating series.
/// Used to derive test thresholds rather than hard-coding quantiles.
pub fn kolmogorov_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let mut sum = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * x * x).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (1.0 - 2.0 * sum).clamp(0.0, 1.0)
}

/// Quantile of the Kolmogorov distribution by bisection.
pub fn kolmogorov_quantile(p: f64) -> f64 {
    let (mut lo, mut hi) = (0.1, 5.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Gaussian CDF helper for the fluctuation suites.
pub fn normal_cdf(x: f64, mean: f64, sd: f64) -> f64 {
    Normal::new(mean, sd).map(|d| d.cdf(x)).unwrap_or(f64::NAN)
}

/// Robust or plain scale of a sample of fluctuation values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScaleMetric {
    /// Median of |x|: default for heavy-tailed regimes.
    MedianAbs,
    /// Interquartile range.
    Iqr,
    /// Mean of |x|: only meaningful with finite first moments.
    MeanAbs,
}

/// Type-7 interpolated quantile of a sorted slice.
fn quantile_sorted(xs: &[f64], p: f64) -> f64 {
    let n = xs.len();
    if n == 1 {
        return xs[0];
    }
    let h = p * (n - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    xs[lo] + (h - lo as f64) * (xs[hi] - xs[lo])
}

/// Aggregate replica values into one scale number.
pub fn scale_value(samples: &[f64], metric: ScaleMetric) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(match metric {
        ScaleMetric::MedianAbs => {
            let xs = sorted(samples.iter().map(|x| x.abs()).collect());
            quantile_sorted(&xs, 0.5)
        }
        ScaleMetric::Iqr => {
            let xs = sorted(samples.to_vec());
            quantile_sorted(&xs, 0.75) - quantile_sorted(&xs, 0.25)
        }
        ScaleMetric::MeanAbs => samples.iter().map(|x| x.abs()).sum::<f64>() / samples.len() as f64,
    })
}

/// Least-squares exponent of `scale ~ N^exponent` on log-log axes.
#[derive(Debug, Clone, Copy)]
pub struct ScalingFit {
    pub exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
    pub metric: ScaleMetric,
}

pub fn fit_scaling(points: &[(f64, f64)], metric: ScaleMetric) -> Result<ScalingFit> {
    let mut distinct: Vec<f64> = points.iter().map(|p| p.0).collect();
    distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::NotEnoughData {
            required: 3,
            got: distinct.len(),
        });
    }
    for &(_, s) in points {
        if !(s > 0.0) {
            return Err(Error::NonPositiveScale(s));
        }
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(n, s)| (n.ln(), s.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = logs.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = logs
        .iter()
        .map(|p| {
            let e = p.1 - (intercept + slope * p.0);
            e * e
        })
        .sum();
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(ScalingFit {
        exponent: slope,
        intercept,
        r_squared,
        n_points: points.len(),
        metric,
    })
}

/// Ratios `h(N) / (N ln N)` for the critical-speed diagnostic, with a
/// last-point drift summary.
#[derive(Debug, Clone)]
pub struct LogSpeedDiagnostics {
    pub ratios: Vec<(u64, f64)>,
    /// |ratio - 1| at the last checkpoint.
    pub final_drift: f64,
    /// Whether the last checkpoint sits strictly closer to 1 than the first.
    pub tightening: bool,
}

pub fn log_corrected_speed(points: &[(u64, f64)]) -> Result<LogSpeedDiagnostics> {
    if points.is_empty() {
        return Err(Error::EmptySample);
    }
    for &(n, _) in points {
        if n < 2 {
            return Err(Error::invalid("N", "log correction needs N >= 2"));
        }
    }
    let ratios: Vec<(u64, f64)> = points
        .iter()
        .map(|&(n, h)| (n, h / (n as f64 * (n as f64).ln())))
        .collect();
    let first_drift = (ratios.first().unwrap().1 - 1.0).abs();
    let final_drift = (ratios.last().unwrap().1 - 1.0).abs();
    Ok(LogSpeedDiagnostics {
        tightening: final_drift < first_drift,
        final_drift,
        ratios,
    })
}

/// Pairwise covariance estimates across replicas with delta-method
/// standard errors.
#[derive(Debug, Clone)]
pub struct CovMatrix {
    pub cov: Vec<Vec<f64>>,
    pub se: Vec<Vec<f64>>,
    pub n: usize,
}

impl CovMatrix {
    /// Positive semi-definiteness up to noise: `A + shift I` admits a
    /// Cholesky factorization with `shift` three times the largest
    /// standard error.
    pub fn psd_up_to_noise(&self) -> bool {
        let k = self.cov.len();
        let max_se = self
            .se
            .iter()
            .flatten()
            .fold(0.0f64, |a, &b| a.max(b));
        let shift = 3.0 * max_se + 1e-12;
        let mut a: Vec<Vec<f64>> = self.cov.clone();
        for (i, row) in a.iter_mut().enumerate() {
            row[i] += shift;
        }
        // plain Cholesky; failure means an eigenvalue below -shift
        let mut l = vec![vec![0.0; k]; k];
        for i in 0..k {
            for j in 0..=i {
                let mut s = a[i][j];
                for p in 0..j {
                    s -= l[i][p] * l[j][p];
                }
                if i == j {
                    if s <= 0.0 {
                        return false;
                    }
                    l[i][i] = s.sqrt();
                } else {
                    l[i][j] = s / l[j][j];
                }
            }
        }
        true
    }
}

/// Unbiased covariance of per-replica probe vectors (one inner vector per
/// replica, one entry per probe).
pub fn empirical_field_covariance(replicas: &[Vec<f64>]) -> Result<CovMatrix> {
    if replicas.len() < 2 {
        return Err(Error::NotEnoughData {
            required: 2,
            got: replicas.len(),
        });
    }
    let k = replicas[0].len();
    if replicas.iter().any(|r| r.len() != k) {
        return Err(Error::invalid("replicas", "ragged probe vectors"));
    }
    let n = replicas.len() as f64;
    let mut means = vec![0.0; k];
    for r in replicas {
        for (m, &x) in means.iter_mut().zip(r) {
            *m += x;
        }
    }
    for m in &mut means {
        *m /= n;
    }
    let mut cov = vec![vec![0.0; k]; k];
    let mut m22 = vec![vec![0.0; k]; k];
    for r in replicas {
        for i in 0..k {
            let di = r[i] - means[i];
            for j in 0..k {
                let dj = r[j] - means[j];
                cov[i][j] += di * dj;
                m22[i][j] += di * di * dj * dj;
            }
        }
    }
    let mut se = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..k {
            let c = cov[i][j] / n;
            se[i][j] = ((m22[i][j] / n - c * c).max(0.0) / n).sqrt();
            cov[i][j] /= n - 1.0;
        }
    }
    Ok(CovMatrix {
        cov,
        se,
        n: replicas.len(),
    })
}

/// One draw of the symmetric heavy variable `xi = eps U^(-1/2)` whose
/// normalized partial sums converge to a standard normal at the
/// `sqrt(n ln n)` scale. A single uniform provides both the sign and the
/// magnitude: conditionally on the sign, the folded remainder is again
/// uniform.
#[inline]
pub fn sample_heavy_symmetric(rng: &mut RngStream) -> f64 {
    let u = rng.uniform_open();
    if u < 0.5 {
        -1.0 / (2.0 * u).sqrt()
    } else {
        1.0 / (2.0 * (1.0 - u)).sqrt()
    }
}

/// Kolmogorov-Smirnov check of `S_n / sqrt(n ln n)` against the standard
/// normal over independent replicas.
pub fn domain_of_attraction_demo(
    rng: &mut RngStream,
    n: usize,
    replicas: usize,
    threshold: f64,
) -> Result<GofResult> {
    if n < 1_000 {
        return Err(Error::invalid("n", "demo needs n >= 1000"));
    }
    let norm = (n as f64 * (n as f64).ln()).sqrt();
    let mut sums = Vec::with_capacity(replicas);
    for _ in 0..replicas {
        let mut s = 0.0;
        for _ in 0..n {
            s += sample_heavy_symmetric(rng);
        }
        sums.push(s / norm);
    }
    ks_one_sample(&sums, |x| normal_cdf(x, 0.0, 1.0), threshold)
}

/// Empirical `x^2 P(xi > x)`; approaches 1/2 for the demo variable.
pub fn heavy_tail_statistic(rng: &mut RngStream, draws: usize, x: f64) -> f64 {
    let mut count = 0usize;
    for _ in 0..draws {
        if sample_heavy_symmetric(rng) > x {
            count += 1;
        }
    }
    x * x * count as f64 / draws as f64
}

/// Open regions of the phase diagram, by the two exponent inequalities.
/// The letters are display names for the four quadrants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhaseRegion {
    /// zeta > 1, kappa > 1/2: super-ballistic growth, heavy fluctuations.
    A,
    /// zeta > 1, kappa < 1/2: super-ballistic growth, Gaussian fluctuations.
    B,
    /// zeta < 1, kappa < 1/2: ballistic growth, Gaussian fluctuations.
    C,
    /// zeta < 1, kappa > 1/2: ballistic growth, heavy fluctuations.
    D,
    /// On one of the critical lines (within 1e-12).
    Boundary,
}

impl std::fmt::Display for PhaseRegion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            PhaseRegion::A => "A",
            PhaseRegion::B => "B",
            PhaseRegion::C => "C",
            PhaseRegion::D => "D",
            PhaseRegion::Boundary => "boundary",
        };
        write!(f, "{s}")
    }
}

/// Classification straight from the exponents.
pub fn phase_classify_exponents(zeta: f64, kappa: f64) -> PhaseRegion {
    const EPS: f64 = 1e-12;
    if (zeta - 1.0).abs() < EPS || (kappa - 0.5).abs() < EPS {
        return PhaseRegion::Boundary;
    }
    match (zeta > 1.0, kappa > 0.5) {
        (true, true) => PhaseRegion::A,
        (true, false) => PhaseRegion::B,
        (false, false) => PhaseRegion::C,
        (false, true) => PhaseRegion::D,
    }
}

/// Classification from raw model parameters.
pub fn phase_classify(alpha: f64, beta: f64, dim: usize, shape_order: u32) -> PhaseRegion {
    let d = dim as f64;
    let n = shape_order as f64;
    phase_classify_exponents((alpha - d) / (beta - 1.0), (alpha - n - d) / (beta - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_two_sample_trivia() {
        let a = vec![1.0, 2.0, 3.0, 4.0];
        let r = ks_two_sample(&a, &a, 0.1).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!(r.pass);

        let b = vec![10.0, 11.0, 12.0];
        let r = ks_two_sample(&a, &b, 0.5).unwrap();
        assert_eq!(r.statistic, 1.0);
        assert!(!r.pass);
    }

    #[test]
    fn ks_one_sample_trivia() {
        // constant sample against a continuous cdf
        let xs = vec![0.5; 100];
        let r = ks_one_sample(&xs, |x| x.clamp(0.0, 1.0), 1.0).unwrap();
        assert!(r.statistic >= 0.5);

        // stratified quantiles achieve the minimal distance 0.5 / n
        let n = 50;
        let xs: Vec<f64> = (0..n).map(|k| (k as f64 + 0.5) / n as f64).collect();
        let r = ks_one_sample(&xs, |x| x.clamp(0.0, 1.0), 1.0).unwrap();
        assert!((r.statistic - 0.5 / n as f64).abs() < 1e-12);

        assert!(ks_one_sample(&[], |x| x, 0.1).is_err());
    }

    #[test]
    fn ks_invariant_under_monotone_transforms() {
        let a: Vec<f64> = (0..200).map(|i| (i as f64 * 0.77).sin() + 2.0).collect();
        let b: Vec<f64> = (0..150).map(|i| (i as f64 * 0.31).cos() + 2.0).collect();
        let d0 = ks_two_sample(&a, &b, 1.0).unwrap().statistic;
        let ta: Vec<f64> = a.iter().map(|x| x.exp()).collect();
        let tb: Vec<f64> = b.iter().map(|x| x.exp()).collect();
        let d1 = ks_two_sample(&ta, &tb, 1.0).unwrap().statistic;
        assert!((d0 - d1).abs() < 1e-12);
    }

    #[test]
    fn kolmogorov_quantile_matches_known_values() {
        // K(1.3581) ~ 0.95, K(1.6276) ~ 0.99
        assert!((kolmogorov_quantile(0.95) - 1.3581).abs() < 2e-3);
        assert!((kolmogorov_quantile(0.99) - 1.6276).abs() < 2e-3);
    }

    #[test]
    fn fit_scaling_exact_power_law() {
        let pts: Vec<(f64, f64)> = [100.0, 1000.0, 10_000.0]
            .iter()
            .map(|&n| (n, 2.5 * n))
            .collect();
        let fit = fit_scaling(&pts, ScaleMetric::MedianAbs).unwrap();
        assert!((fit.exponent - 1.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fit_scaling_guards() {
        assert!(fit_scaling(&[(10.0, 1.0), (10.0, 2.0)], ScaleMetric::Iqr).is_err());
        assert!(fit_scaling(
            &[(10.0, 1.0), (100.0, 0.0), (1000.0, 2.0)],
            ScaleMetric::Iqr
        )
        .is_err());
    }

    #[test]
    fn fit_scaling_scale_equivariance() {
        let pts = vec![(10.0, 3.0), (100.0, 7.0), (1000.0, 30.0), (5000.0, 55.0)];
        let f1 = fit_scaling(&pts, ScaleMetric::MedianAbs).unwrap();
        let scaled: Vec<(f64, f64)> = pts.iter().map(|&(n, s)| (n, 17.0 * s)).collect();
        let f2 = fit_scaling(&scaled, ScaleMetric::MedianAbs).unwrap();
        assert!((f1.exponent - f2.exponent).abs() < 1e-12);
        assert!((f2.intercept - f1.intercept - 17.0f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn log_corrected_speed_synthetic() {
        let pts: Vec<(u64, f64)> = [100u64, 10_000, 1_000_000]
            .iter()
            .map(|&n| (n, n as f64 * (n as f64).ln()))
            .collect();
        let diag = log_corrected_speed(&pts).unwrap();
        for (_, r) in &diag.ratios {
            assert!((r - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn covariance_trivia() {
        // duplicate probes give a symmetric matrix with equal diagonals
        let reps: Vec<Vec<f64>> = (0..100)
            .map(|i| {
                let x = (i as f64 * 0.37).sin();
                vec![x, x, 2.0 * x]
            })
            .collect();
        let m = empirical_field_covariance(&reps).unwrap();
        assert!((m.cov[0][0] - m.cov[1][1]).abs() < 1e-12);
        assert!((m.cov[0][1] - m.cov[0][0]).abs() < 1e-12);
        assert!((m.cov[0][2] - m.cov[2][0]).abs() < 1e-12);
        assert!(m.psd_up_to_noise());
        assert!(empirical_field_covariance(&reps[..1]).is_err());

        // a probe at the origin contributes an exactly zero row and column
        let reps: Vec<Vec<f64>> = (0..50)
            .map(|i| vec![0.0, (i as f64).sin()])
            .collect();
        let m = empirical_field_covariance(&reps).unwrap();
        assert_eq!(m.cov[0][0], 0.0);
        assert_eq!(m.cov[0][1], 0.0);
        assert_eq!(m.cov[1][0], 0.0);
    }

    #[test]
    fn phase_classify_examples() {
        assert_eq!(phase_classify(1.5, 2.0, 1, 1), PhaseRegion::C);
        assert_eq!(phase_classify(3.0, 2.0, 1, 1), PhaseRegion::A);
        assert_eq!(phase_classify(2.0, 2.0, 1, 1), PhaseRegion::Boundary);
        assert_eq!(phase_classify(2.5, 2.0, 1, 1), PhaseRegion::Boundary); // kappa = 1/2
        assert_eq!(phase_classify(2.2, 2.0, 1, 1), PhaseRegion::B);
        assert_eq!(phase_classify(5.5, 6.0, 1, 1), PhaseRegion::D);
    }

    #[test]
    fn phase_classify_consistent_with_params() {
        use crate::params::{ModelKind, ModelParams};
        use crate::shape::{ShapeFunction, ShapeKind};
        for &(alpha, beta) in &[(1.5, 2.0), (3.0, 2.0), (2.2, 2.0), (5.5, 6.0), (2.0, 2.0)] {
            let p = ModelParams::new(
                alpha,
                beta,
                60.0,
                1,
                ShapeFunction::new(ShapeKind::Triangle),
                ModelKind::Rand,
                64,
            )
            .unwrap();
            assert_eq!(
                phase_classify(alpha, beta, 1, 1),
                phase_classify_exponents(p.zeta, p.kappa)
            );
        }
    }

    #[test]
    fn heavy_tail_mass() {
        let mut rng = RngStream::new(20, 0);
        // P(xi > x) = x^-2 / 2 exactly for x >= 1
        let stat = heavy_tail_statistic(&mut rng, 1_000_000, 10.0);
        assert!((stat - 0.5).abs() < 0.05, "stat = {stat}");
    }
}
