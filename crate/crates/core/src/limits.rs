//! Direct samplers and numeric evaluators for the limiting objects of the
//! three models: the stable series, the ballistic speed constant, the
//! heavy-fluctuation laws, Gaussian covariances and the inverse-moment
//! formula for exponential partial sums.

use statrs::function::gamma::ln_gamma;

use crate::error::Error;
use crate::params::ModelParams;
use crate::quad::{adaptive_simpson, Quadrature};
use crate::rng::RngStream;
use crate::sampling::{
    pareto_from_uniform, sample_exp, sample_sphere_centered, sample_uniform_torus, SphereMode,
};
use crate::torus::{torus_distance, TorusPoint};
use crate::Result;

/// How an infinite series was cut off.
#[derive(Debug, Clone, Copy)]
pub struct SeriesTruncation {
    /// Retained terms.
    pub m: usize,
    /// Estimated size of the dropped remainder (same units as the sample
    /// for deterministic tails, an L2 bound for random tails).
    pub tail_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LimitLaw {
    StableSeries,
    MuD,
    MuStellar,
    StellarSeries,
}

#[derive(Debug, Clone)]
pub enum LimitValues {
    Scalar(f64),
    PerProbe(Vec<f64>),
    Vector([f64; 3]),
    PerProbeVec(Vec<[f64; 3]>),
}

/// One draw from a limit law, with its truncation metadata.
#[derive(Debug, Clone)]
pub struct LimitSample {
    pub law: LimitLaw,
    pub values: LimitValues,
    pub truncation: SeriesTruncation,
}

/// `E[T_i^-v] = Gamma(i - v) / Gamma(i)` for `i > v`, infinite otherwise.
/// The divergent case is an ordinary value, not an error.
pub fn inverse_moment_t(i: u64, v: f64) -> f64 {
    let i = i as f64;
    if i > v {
        (ln_gamma(i - v) - ln_gamma(i)).exp()
    } else {
        f64::INFINITY
    }
}

/// The ballistic speed constant: the expectation of one bump evaluated at
/// the origin, as a double integral over width and center. Requires
/// `zeta < 1`; the z-integral is mapped onto (0, 1] by a power substitution
/// strong enough to also flatten the endpoint singularity.
pub fn gamma_speed(params: &ModelParams, quad_tol: f64) -> Result<Quadrature> {
    if params.zeta >= 1.0 {
        return Err(Error::SpeedIntegralDiverges { zeta: params.zeta });
    }
    if !(quad_tol > 0.0) {
        return Err(Error::invalid("quad_tol", "must be > 0"));
    }
    let d = params.dim as f64;
    let beta = params.beta;
    // z^(alpha - d - beta) decays like z^-(1+q) with q > 0 iff zeta < 1
    let q = (beta - 1.0) - (params.alpha - d);
    let m = ((3.0 / q).ceil() as i32).clamp(1, 256);
    let mf = m as f64;
    let t_exp = mf * q - 1.0;
    let shape = params.shape;

    let inner_tol = quad_tol / (4.0 * (beta - 1.0));
    let mut inner_evals = 0usize;
    let mut inner = |u: f64| {
        let r = adaptive_simpson(
            |t| {
                if t == 0.0 {
                    return 0.0;
                }
                t.powf(t_exp) * shape.eval_nonneg(u * t.powi(m))
            },
            0.0,
            1.0,
            inner_tol,
        );
        inner_evals += r.evaluations;
        mf * r.value
    };

    let outer_tol = quad_tol / (4.0 * (beta - 1.0));
    let domain = params.domain;
    let (value, outer_err) = if params.dim == 1 {
        let r = adaptive_simpson(&mut inner, 0.0, domain / 2.0, outer_tol * domain / 2.0);
        (2.0 / domain * r.value, 2.0 / domain * r.abs_error)
    } else {
        // density of the torus distance: triangular on [0, D]
        let w = 4.0 / (domain * domain);
        let lo = adaptive_simpson(|u| w * u * inner(u), 0.0, domain / 2.0, outer_tol / 2.0);
        let hi = adaptive_simpson(
            |u| w * (domain - u) * inner(u),
            domain / 2.0,
            domain,
            outer_tol / 2.0,
        );
        (lo.value + hi.value, lo.abs_error + hi.abs_error)
    };
    Ok(Quadrature {
        value: (beta - 1.0) * value,
        abs_error: (beta - 1.0) * (outer_err + inner_tol),
        evaluations: inner_evals,
    })
}

/// Truncation point for the stable series. The dropped tail has mean
/// `sum_{i>M} E[T_i^-zeta] <= (M - zeta)^(1-zeta) / (zeta - 1)` (index
/// shifted because `E[T_i^-zeta] <= (i - zeta)^-zeta`); M is chosen so
/// that bound sits at `tol / 2`, leaving headroom for the randomness of
/// the realized tail.
pub fn stable_series_truncation(zeta: f64, tol: f64) -> Result<SeriesTruncation> {
    if zeta <= 1.0 {
        return Err(Error::SeriesDiverges {
            exponent: zeta,
            bound: "zeta > 1",
        });
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", "must be > 0"));
    }
    let base = (0.5 * tol * (zeta - 1.0)).powf(1.0 / (1.0 - zeta));
    let m = (zeta + base).ceil().max(1.0) as usize;
    Ok(SeriesTruncation {
        m,
        tail_bound: (m as f64 - zeta).powf(1.0 - zeta) / (zeta - 1.0),
    })
}

/// Partial sum of `sum_i T_i^-zeta` with `M` terms on the given stream.
pub fn stable_series_partial(rng: &mut RngStream, zeta: f64, m: usize) -> f64 {
    let mut t = 0.0;
    let mut sum = 0.0;
    for _ in 0..m {
        t += sample_exp(rng);
        sum += t.powf(-zeta);
    }
    sum
}

/// One draw of the super-ballistic limit `sum_i T_i^-zeta`.
pub fn sample_stable_series(rng: &mut RngStream, zeta: f64, tol: f64) -> Result<LimitSample> {
    let truncation = stable_series_truncation(zeta, tol)?;
    let value = stable_series_partial(rng, zeta, truncation.m);
    Ok(LimitSample {
        law: LimitLaw::StableSeries,
        values: LimitValues::Scalar(value),
        truncation,
    })
}

/// Truncation point for the kappa > 1/2 fluctuation series: the L2 tail
/// `sum_{i>M} E[T_i^-2kappa] ~ M^(1-2kappa)/(2kappa-1)` must not exceed
/// `tol^2`. Also keeps at least the `floor(4 kappa)` leading terms that the
/// limit construction singles out.
pub fn mu_truncation(kappa: f64, tol: f64) -> Result<SeriesTruncation> {
    if kappa <= 0.5 {
        return Err(Error::SeriesDiverges {
            exponent: kappa,
            bound: "kappa > 1/2",
        });
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", "must be > 0"));
    }
    let two_k = 2.0 * kappa;
    let from_tail = two_k + (0.5 * tol * tol * (two_k - 1.0)).powf(1.0 / (1.0 - two_k));
    let n1 = (4.0 * kappa).floor();
    let m = from_tail.ceil().max(n1 + 1.0).max(two_k.floor() + 2.0) as usize;
    mu_truncation_terms(kappa, m)
}

/// Truncation record for an explicitly chosen term count. Near the
/// critical exponent the L2 tail decays like `M^(1-2 kappa)`, so a small
/// tolerance can demand astronomically many terms; fixing M directly (for
/// instance at the step count of the finite-N run a sample is compared
/// against) keeps the cost bounded while the recorded `tail_bound` stays
/// honest.
pub fn mu_truncation_terms(kappa: f64, m: usize) -> Result<SeriesTruncation> {
    if kappa <= 0.5 {
        return Err(Error::SeriesDiverges {
            exponent: kappa,
            bound: "kappa > 1/2",
        });
    }
    let two_k = 2.0 * kappa;
    if (m as f64) <= two_k.max(4.0 * kappa) {
        return Err(Error::invalid("m", "too few terms for a finite L2 tail"));
    }
    Ok(SeriesTruncation {
        m,
        tail_bound: ((m as f64 - two_k).powf(1.0 - two_k) / (two_k - 1.0)).sqrt(),
    })
}

fn origin(params: &ModelParams) -> TorusPoint {
    TorusPoint::new(&vec![0.0; params.dim], params.domain)
}

/// One multi-probe draw of the mu_d limit law: the series
/// `sum_i G_i(s) / T_i^kappa` with
/// `G_i(s) = (psi^(n)(0)/n!) (v_{Y_i}(s)^n - v_{Y_i}(0)^n)`.
pub fn sample_mu_d(
    rng: &mut RngStream,
    params: &ModelParams,
    probes: &[TorusPoint],
    tol: f64,
) -> Result<LimitSample> {
    let truncation = mu_truncation(params.kappa, tol)?;
    sample_mu_d_with(rng, params, probes, truncation)
}

/// [`sample_mu_d`] with an explicit term count instead of a tolerance.
pub fn sample_mu_d_truncated(
    rng: &mut RngStream,
    params: &ModelParams,
    probes: &[TorusPoint],
    m: usize,
) -> Result<LimitSample> {
    let truncation = mu_truncation_terms(params.kappa, m)?;
    sample_mu_d_with(rng, params, probes, truncation)
}

fn sample_mu_d_with(
    rng: &mut RngStream,
    params: &ModelParams,
    probes: &[TorusPoint],
    truncation: SeriesTruncation,
) -> Result<LimitSample> {
    let coeff = params.shape.taylor_coeff();
    let n = params.shape.order_n as i32;
    let zero = origin(params);
    let mut acc = vec![0.0; probes.len()];
    let mut t = 0.0;
    for _ in 0..truncation.m {
        t += sample_exp(rng);
        let y = sample_uniform_torus(rng, params.domain, params.dim);
        let weight = t.powf(-params.kappa);
        let v0n = torus_distance(&zero, &y, params.domain).powi(n);
        for (k, s) in probes.iter().enumerate() {
            let vsn = torus_distance(s, &y, params.domain).powi(n);
            acc[k] += coeff * (vsn - v0n) * weight;
        }
    }
    Ok(LimitSample {
        law: LimitLaw::MuD,
        values: LimitValues::PerProbe(acc),
        truncation,
    })
}

/// Stellar counterpart of [`sample_mu_d`]: each term carries an
/// independent centered direction; the draw is a 3-vector per probe.
pub fn sample_mu_stellar(
    rng: &mut RngStream,
    params: &ModelParams,
    mode: SphereMode,
    probes: &[TorusPoint],
    tol: f64,
) -> Result<LimitSample> {
    let truncation = mu_truncation(params.kappa, tol)?;
    sample_mu_stellar_with(rng, params, mode, probes, truncation)
}

/// [`sample_mu_stellar`] with an explicit term count.
pub fn sample_mu_stellar_truncated(
    rng: &mut RngStream,
    params: &ModelParams,
    mode: SphereMode,
    probes: &[TorusPoint],
    m: usize,
) -> Result<LimitSample> {
    let truncation = mu_truncation_terms(params.kappa, m)?;
    sample_mu_stellar_with(rng, params, mode, probes, truncation)
}

fn sample_mu_stellar_with(
    rng: &mut RngStream,
    params: &ModelParams,
    mode: SphereMode,
    probes: &[TorusPoint],
    truncation: SeriesTruncation,
) -> Result<LimitSample> {
    if params.dim != 2 {
        return Err(Error::DimensionMismatch {
            required: 2,
            got: params.dim,
        });
    }
    let coeff = params.shape.taylor_coeff();
    let n = params.shape.order_n as i32;
    let zero = origin(params);
    let mut acc = vec![[0.0; 3]; probes.len()];
    let mut t = 0.0;
    for _ in 0..truncation.m {
        t += sample_exp(rng);
        let y = sample_uniform_torus(rng, params.domain, params.dim);
        let theta = sample_sphere_centered(rng, mode);
        let weight = t.powf(-params.kappa);
        let v0n = torus_distance(&zero, &y, params.domain).powi(n);
        for (k, s) in probes.iter().enumerate() {
            let vsn = torus_distance(s, &y, params.domain).powi(n);
            let g = coeff * (vsn - v0n) * weight;
            acc[k][0] += g * theta[0];
            acc[k][1] += g * theta[1];
            acc[k][2] += g * theta[2];
        }
    }
    Ok(LimitSample {
        law: LimitLaw::MuStellar,
        values: LimitValues::PerProbeVec(acc),
        truncation,
    })
}

/// One draw of the stellar speed limit `sum_i Theta_i / T_i^zeta`.
/// Converges for `zeta > 1` with a deterministic tail, and for `zeta = 1`
/// as an L2-bounded martingale; `zeta < 1` is rejected.
pub fn sample_stellar_speed_series(
    rng: &mut RngStream,
    zeta: f64,
    mode: SphereMode,
    tol: f64,
) -> Result<LimitSample> {
    if zeta < 1.0 {
        return Err(Error::SeriesDiverges {
            exponent: zeta,
            bound: "zeta >= 1",
        });
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", "must be > 0"));
    }
    let truncation = if zeta > 1.0 {
        stable_series_truncation(zeta, tol)?
    } else {
        // L2 tail: sum_{i>M} E[T_i^-2] ~ 1/M <= tol^2
        let m = (1.0 / (tol * tol)).ceil() as usize;
        SeriesTruncation {
            m,
            tail_bound: (1.0 / m as f64).sqrt(),
        }
    };
    let mut acc = [0.0; 3];
    let mut t = 0.0;
    for _ in 0..truncation.m {
        t += sample_exp(rng);
        let theta = sample_sphere_centered(rng, mode);
        let weight = t.powf(-zeta);
        acc[0] += weight * theta[0];
        acc[1] += weight * theta[1];
        acc[2] += weight * theta[2];
    }
    Ok(LimitSample {
        law: LimitLaw::StellarSeries,
        values: LimitValues::Vector(acc),
        truncation,
    })
}

/// How to evaluate a covariance integral.
#[derive(Debug, Clone, Copy)]
pub enum CovMethod {
    Quadrature { tol: f64 },
    MonteCarlo { draws: u64, seed: u64 },
}

/// A covariance value with an error estimate (quadrature tolerance or
/// three Monte Carlo standard errors).
#[derive(Debug, Clone, Copy)]
pub struct CovResult {
    pub value: f64,
    pub error_est: f64,
}

/// Covariance of the differenced one-bump field:
/// `Cov(X_1(s) - X_1(0), X_1(t) - X_1(0))`. This is the covariance of the
/// diffusive fluctuation limit. Requires `kappa < 1/2` for a finite second
/// moment.
pub fn diff_covariance(
    params: &ModelParams,
    s: &TorusPoint,
    t: &TorusPoint,
    method: CovMethod,
) -> Result<CovResult> {
    if params.kappa >= 0.5 {
        return Err(Error::InfiniteVariance {
            kappa: params.kappa,
        });
    }
    match method {
        CovMethod::Quadrature { tol } => diff_covariance_quad(params, s, t, tol),
        CovMethod::MonteCarlo { draws, seed } => diff_covariance_mc(params, s, t, draws, seed),
    }
}

fn diff_covariance_quad(
    params: &ModelParams,
    s: &TorusPoint,
    t: &TorusPoint,
    tol: f64,
) -> Result<CovResult> {
    let d = params.dim as f64;
    let beta = params.beta;
    let shape = params.shape;
    let domain = params.domain;
    let zero = origin(params);

    // large-z decay exponent of the z-integrand after differencing
    let q = (beta - 1.0) * (1.0 - 2.0 * params.kappa);
    let m = ((3.0 / q).ceil() as i32).clamp(1, 256);
    let mf = m as f64;
    // z = tau^-m; z^(2(alpha-d) - beta) dz picks up tau^(m(beta-1-2(alpha-d)) - 1)
    let t_exp = mf * (beta - 1.0 - 2.0 * (params.alpha - d)) - 1.0;
    let inner_tol = tol / 8.0;

    let inner = |vs: f64, vt: f64, v0: f64| {
        adaptive_simpson(
            |tau| {
                if tau == 0.0 {
                    return 0.0;
                }
                let inv_z = tau.powi(m);
                let ds = shape.eval_nonneg(vs * inv_z) - shape.eval_nonneg(v0 * inv_z);
                let dt = shape.eval_nonneg(vt * inv_z) - shape.eval_nonneg(v0 * inv_z);
                let prod = ds * dt;
                // the tau power alone may be singular at 0; the product
                // vanishes there faster, so short-circuit the exact zero
                if prod == 0.0 {
                    return 0.0;
                }
                tau.powf(t_exp) * prod
            },
            0.0,
            1.0,
            inner_tol,
        )
        .value
            * mf
    };

    let outer_tol = tol / 4.0;
    let value = if params.dim == 1 {
        let r = adaptive_simpson(
            |y| {
                let yp = TorusPoint::new(&[y], domain);
                inner(
                    torus_distance(s, &yp, domain),
                    torus_distance(t, &yp, domain),
                    torus_distance(&zero, &yp, domain),
                )
            },
            0.0,
            domain,
            outer_tol * domain,
        );
        r.value / domain
    } else {
        let r = adaptive_simpson(
            |y1| {
                adaptive_simpson(
                    |y2| {
                        let yp = TorusPoint::new(&[y1, y2], domain);
                        inner(
                            torus_distance(s, &yp, domain),
                            torus_distance(t, &yp, domain),
                            torus_distance(&zero, &yp, domain),
                        )
                    },
                    0.0,
                    domain,
                    outer_tol * domain / 2.0,
                )
                .value
            },
            0.0,
            domain,
            outer_tol * domain * domain / 2.0,
        );
        r.value / (domain * domain)
    };
    Ok(CovResult {
        value: (beta - 1.0) * value,
        error_est: (beta - 1.0) * tol,
    })
}

fn diff_covariance_mc(
    params: &ModelParams,
    s: &TorusPoint,
    t: &TorusPoint,
    draws: u64,
    seed: u64,
) -> Result<CovResult> {
    let mut rng = RngStream::new(seed, 0);
    let domain = params.domain;
    let exponent = params.alpha - params.dim as f64;
    let shape = params.shape;
    let zero = origin(params);
    let (mut sum_s, mut sum_t, mut sum_st, mut sum_sq) = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..draws {
        let y = sample_uniform_torus(&mut rng, domain, params.dim);
        let z = pareto_from_uniform(rng.uniform_open_closed(), params.beta);
        let amp = z.powf(exponent);
        let x0 = shape.eval_nonneg(torus_distance(&zero, &y, domain) / z);
        let xs = amp * (shape.eval_nonneg(torus_distance(s, &y, domain) / z) - x0);
        let xt = amp * (shape.eval_nonneg(torus_distance(t, &y, domain) / z) - x0);
        sum_s += xs;
        sum_t += xt;
        sum_st += xs * xt;
        sum_sq += (xs * xt) * (xs * xt);
    }
    let n = draws as f64;
    let mean_st = sum_st / n;
    let value = mean_st - (sum_s / n) * (sum_t / n);
    let var_st = (sum_sq / n - mean_st * mean_st).max(0.0);
    Ok(CovResult {
        value,
        error_est: 3.0 * (var_st / n).sqrt(),
    })
}

/// Covariance of the critical-regime Gaussian field:
/// `Cov(A(s), A(t))` with `A(s) = (psi^(n)(0)/n!) (v_U(s)^n - v_U(0)^n)`
/// and U uniform on the torus. A is exactly centered because the law of
/// `v_U(x)` does not depend on x, so this is a single d-dimensional
/// integral.
pub fn critical_covariance(
    params: &ModelParams,
    s: &TorusPoint,
    t: &TorusPoint,
    tol: f64,
) -> Result<CovResult> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", "must be > 0"));
    }
    let coeff = params.shape.taylor_coeff();
    let n = params.shape.order_n as i32;
    let domain = params.domain;
    let zero = origin(params);
    let a = |p: &TorusPoint, y: &TorusPoint| {
        coeff
            * (torus_distance(p, y, domain).powi(n) - torus_distance(&zero, y, domain).powi(n))
    };
    let value = if params.dim == 1 {
        let r = adaptive_simpson(
            |y| {
                let yp = TorusPoint::new(&[y], domain);
                a(s, &yp) * a(t, &yp)
            },
            0.0,
            domain,
            tol * domain / 2.0,
        );
        r.value / domain
    } else {
        let r = adaptive_simpson(
            |y1| {
                adaptive_simpson(
                    |y2| {
                        let yp = TorusPoint::new(&[y1, y2], domain);
                        a(s, &yp) * a(t, &yp)
                    },
                    0.0,
                    domain,
                    tol * domain / 4.0,
                )
                .value
            },
            0.0,
            domain,
            tol * domain * domain / 4.0,
        );
        r.value / (domain * domain)
    };
    Ok(CovResult {
        value,
        error_est: tol,
    })
}
