//! Samplers for every random ingredient of the models: Pareto widths,
//! exponential partial sums, the order-statistics representation of sorted
//! Pareto samples, uniform torus points and centered sphere directions.

use crate::error::Error;
use crate::rng::RngStream;
use crate::torus::TorusPoint;
use crate::Result;

/// Strictly increasing partial sums `T_1 < T_2 < ... < T_n` of i.i.d.
/// standard exponentials.
#[derive(Debug, Clone)]
pub struct ExpPartialSums {
    values: Vec<f64>,
}

impl ExpPartialSums {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Inverse-transform Pareto on `[1, inf)` with survival `z^-(beta-1)`,
/// evaluated at a given uniform `u` in `(0, 1]`.
#[inline]
pub fn pareto_from_uniform(u: f64, beta: f64) -> f64 {
    u.powf(-1.0 / (beta - 1.0))
}

/// Draw one Pareto width. `beta <= 1` has no normalizable density and is
/// rejected.
pub fn sample_pareto(rng: &mut RngStream, beta: f64) -> Result<f64> {
    if !(beta > 1.0) {
        return Err(Error::invalid("beta", format!("{beta} not > 1")));
    }
    Ok(pareto_from_uniform(rng.uniform_open_closed(), beta))
}

/// One standard exponential via -ln U with U in (0, 1).
#[inline]
pub fn sample_exp(rng: &mut RngStream) -> f64 {
    -rng.uniform_open().ln()
}

/// The first `n` partial sums of i.i.d. Exp(1) variables.
pub fn exp_partial_sums(rng: &mut RngStream, n: usize) -> ExpPartialSums {
    let mut values = Vec::with_capacity(n);
    let mut acc = 0.0;
    for _ in 0..n {
        acc += sample_exp(rng);
        values.push(acc);
    }
    ExpPartialSums { values }
}

/// The order-statistics representation of `N` sorted Pareto(beta - 1)
/// draws: `((T_{N+1} / T_i)^(1/(beta-1)))_{i=1..N}`, strictly decreasing.
pub fn order_stats_representation(rng: &mut RngStream, n: usize, beta: f64) -> Result<Vec<f64>> {
    if !(beta > 1.0) {
        return Err(Error::invalid("beta", format!("{beta} not > 1")));
    }
    if n == 0 {
        return Err(Error::invalid("n", "must be >= 1"));
    }
    let sums = exp_partial_sums(rng, n + 1);
    let t_last = sums.values()[n];
    let inv_exp = 1.0 / (beta - 1.0);
    Ok(sums.values()[..n]
        .iter()
        .map(|t| (t_last / t).powf(inv_exp))
        .collect())
}

/// A uniform point on `[0, D)^d`.
pub fn sample_uniform_torus(rng: &mut RngStream, domain: f64, dim: usize) -> TorusPoint {
    let mut coords = [0.0; 2];
    for c in coords.iter_mut().take(dim) {
        *c = rng.uniform() * domain;
    }
    TorusPoint::new(&coords[..dim], domain)
}

/// How the raw sphere direction is distributed before centering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SphereMode {
    /// Uniform on the whole unit sphere; the mean is 0 so the centered
    /// output still lies on the sphere.
    UniformSphere,
    /// Uniform on the z >= 0 hemisphere; the mean is (0, 0, 1/2), so the
    /// centering genuinely shifts the output.
    UpperHemisphere,
}

/// Draw a centered direction `Theta = Theta~ - E[Theta~]`.
pub fn sample_sphere_centered(rng: &mut RngStream, mode: SphereMode) -> [f64; 3] {
    let (z, offset) = match mode {
        SphereMode::UniformSphere => (2.0 * rng.uniform() - 1.0, 0.0),
        SphereMode::UpperHemisphere => (rng.uniform(), 0.5),
    };
    let phi = 2.0 * std::f64::consts::PI * rng.uniform();
    let r = (1.0 - z * z).max(0.0).sqrt();
    [r * phi.cos(), r * phi.sin(), z - offset]
}

/// Per-component variance of the centered direction, in closed form.
/// Feeds the Gaussian covariance of the stellar fluctuation limits.
pub fn sphere_component_variances(mode: SphereMode) -> [f64; 3] {
    match mode {
        // E[x^2] = E[y^2] = E[z^2] = 1/3 on the sphere
        SphereMode::UniformSphere => [1.0 / 3.0; 3],
        // z uniform on [0,1]: Var(z) = 1/12; E[x^2] = (1 - E[z^2])/2 = 1/3
        SphereMode::UpperHemisphere => [1.0 / 3.0, 1.0 / 3.0, 1.0 / 12.0],
    }
}

/// Direct sampler of the law of the torus distance `v_Y(s)` for Y uniform:
/// Uniform[0, D/2] in dimension 1, the sum of two independent such
/// uniforms (triangular on [0, D]) in dimension 2.
pub fn sample_vy_distance_direct(rng: &mut RngStream, domain: f64, dim: usize) -> Result<f64> {
    match dim {
        1 => Ok(rng.uniform() * domain / 2.0),
        2 => Ok(rng.uniform() * domain / 2.0 + rng.uniform() * domain / 2.0),
        _ => Err(Error::DimensionMismatch {
            required: 2,
            got: dim,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pareto_inverse_transform_values() {
        assert_eq!(pareto_from_uniform(1.0, 2.0), 1.0);
        assert!((pareto_from_uniform(0.25, 2.0) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn pareto_rejects_beta_at_most_one() {
        let mut rng = RngStream::new(3, 0);
        assert!(sample_pareto(&mut rng, 1.0).is_err());
        assert!(sample_pareto(&mut rng, 0.4).is_err());
    }

    #[test]
    fn partial_sums_strictly_increase() {
        let mut rng = RngStream::new(5, 0);
        let sums = exp_partial_sums(&mut rng, 500);
        for w in sums.values().windows(2) {
            assert!(w[1] > w[0]);
        }
        assert!(sums.values()[0] > 0.0);
    }

    #[test]
    fn order_stats_strictly_decrease_and_exceed_one() {
        let mut rng = RngStream::new(7, 0);
        for n in [1usize, 2, 17, 200] {
            let v = order_stats_representation(&mut rng, n, 2.5).unwrap();
            assert_eq!(v.len(), n);
            for w in v.windows(2) {
                assert!(w[0] > w[1]);
            }
            assert!(*v.last().unwrap() > 1.0);
        }
    }

    #[test]
    fn uniform_sphere_has_unit_norm() {
        let mut rng = RngStream::new(11, 0);
        for _ in 0..1000 {
            let t = sample_sphere_centered(&mut rng, SphereMode::UniformSphere);
            let norm = (t[0] * t[0] + t[1] * t[1] + t[2] * t[2]).sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn torus_sample_in_domain() {
        let mut rng = RngStream::new(13, 0);
        for _ in 0..1000 {
            let p = sample_uniform_torus(&mut rng, 60.0, 2);
            for &c in p.coords() {
                assert!((0.0..60.0).contains(&c));
            }
        }
    }

    #[test]
    fn vy_direct_dimension_guard() {
        let mut rng = RngStream::new(17, 0);
        assert!(sample_vy_distance_direct(&mut rng, 10.0, 3).is_err());
    }
}
