//! Model parameters and single-bump evaluation.

use crate::error::Error;
use crate::shape::ShapeFunction;
use crate::torus::{torus_distance, TorusPoint};
use crate::Result;

/// Which deposition dynamics drive the centers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// Centers uniform on the torus, independent of the profile.
    Rand,
    /// Centers at the global minimum of the current profile nearest a fresh
    /// uniform tie-breaker.
    Min,
    /// d = 2 vector-valued variant: each bump multiplied by a centered
    /// random direction.
    Stellar,
}

/// The full parameter set of one model instance.
///
/// `zeta` and `kappa` are computed once here and never re-derived
/// downstream, so this constructor is the single site controlling the
/// phase-diagram formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub alpha: f64,
    pub beta: f64,
    /// Torus side length D.
    pub domain: f64,
    /// Dimension d, 1 or 2.
    pub dim: usize,
    pub shape: ShapeFunction,
    pub model: ModelKind,
    /// Cells per dimension G.
    pub grid_per_dim: usize,
    /// Growth-speed exponent (alpha - d) / (beta - 1).
    pub zeta: f64,
    /// Fluctuation exponent (alpha - n - d) / (beta - 1).
    pub kappa: f64,
}

impl ModelParams {
    pub fn new(
        alpha: f64,
        beta: f64,
        domain: f64,
        dim: usize,
        shape: ShapeFunction,
        model: ModelKind,
        grid_per_dim: usize,
    ) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::invalid("alpha", format!("{alpha} not > 0")));
        }
        if !(beta > 1.0) {
            return Err(Error::invalid("beta", format!("{beta} not > 1")));
        }
        if !(domain > 0.0) {
            return Err(Error::invalid("domain", format!("{domain} not > 0")));
        }
        if dim != 1 && dim != 2 {
            return Err(Error::DimensionMismatch {
                required: 2,
                got: dim,
            });
        }
        if model == ModelKind::Stellar && dim != 2 {
            return Err(Error::DimensionMismatch {
                required: 2,
                got: dim,
            });
        }
        if grid_per_dim == 0 {
            return Err(Error::invalid("grid_per_dim", "must be positive"));
        }
        let d = dim as f64;
        let n = shape.order_n as f64;
        Ok(ModelParams {
            alpha,
            beta,
            domain,
            dim,
            shape,
            model,
            grid_per_dim,
            zeta: (alpha - d) / (beta - 1.0),
            kappa: (alpha - n - d) / (beta - 1.0),
        })
    }

    /// Total number of grid cells G^d.
    pub fn cells(&self) -> usize {
        if self.dim == 1 {
            self.grid_per_dim
        } else {
            self.grid_per_dim * self.grid_per_dim
        }
    }

    /// Cell width D / G.
    pub fn cell_width(&self) -> f64 {
        self.domain / self.grid_per_dim as f64
    }

    /// Vertical amplitude z^(alpha - d) of a bump of width z.
    #[inline]
    pub fn bump_amplitude(&self, z: f64) -> f64 {
        z.powf(self.alpha - self.dim as f64)
    }

    /// Evaluate one bump of width `z >= 1` centered at `center` at the
    /// point `s`: `z^(alpha - d) psi(v_center(s) / z)`.
    pub fn eval_bump(&self, center: &TorusPoint, z: f64, s: &TorusPoint) -> Result<f64> {
        if z < 1.0 {
            return Err(Error::WidthBelowSupport(z));
        }
        let v = torus_distance(s, center, self.domain);
        Ok(self.bump_amplitude(z) * self.shape.eval_nonneg(v / z))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::ShapeKind;

    fn params(alpha: f64, beta: f64, domain: f64, dim: usize, kind: ShapeKind) -> ModelParams {
        ModelParams::new(
            alpha,
            beta,
            domain,
            dim,
            ShapeFunction::new(kind),
            ModelKind::Rand,
            64,
        )
        .unwrap()
    }

    #[test]
    fn exponents_match_their_formulas() {
        let p = params(1.5, 2.0, 60.0, 1, ShapeKind::Triangle);
        assert!((p.zeta - 0.5).abs() < 1e-15);
        assert!((p.kappa + 0.5).abs() < 1e-15);

        let p = params(3.0, 2.0, 60.0, 1, ShapeKind::Triangle);
        assert!((p.zeta - 2.0).abs() < 1e-15);
        assert!((p.kappa - 1.0).abs() < 1e-15);

        let p = params(2.5, 4.0, 32.0, 2, ShapeKind::Parabola);
        assert!((p.zeta - (0.5 / 3.0)).abs() < 1e-15);
        assert!((p.kappa - (-1.5 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn stellar_requires_two_dimensions() {
        let err = ModelParams::new(
            2.5,
            4.0,
            32.0,
            1,
            ShapeFunction::new(ShapeKind::Parabola),
            ModelKind::Stellar,
            64,
        );
        assert!(err.is_err());
    }

    #[test]
    fn bump_examples() {
        // d=1, alpha=1.5, Triangle, z=4, center=0, s=2: 4^0.5 * (1 - 2/4) = 1
        let p = params(1.5, 2.0, 16.0, 1, ShapeKind::Triangle);
        let center = TorusPoint::new(&[0.0], 16.0);
        let s = TorusPoint::new(&[2.0], 16.0);
        let x = p.eval_bump(&center, 4.0, &s).unwrap();
        assert!((x - 1.0).abs() < 1e-12);

        // v = z lands exactly on the support edge
        let s_edge = TorusPoint::new(&[4.0], 16.0);
        assert_eq!(p.eval_bump(&center, 4.0, &s_edge).unwrap(), 0.0);

        // at the center psi(0) = 1, amplitude z^(alpha-d)
        let p3 = params(3.0, 2.0, 16.0, 1, ShapeKind::Triangle);
        assert_eq!(p3.eval_bump(&center, 2.0, &center).unwrap(), 4.0);
    }

    #[test]
    fn bump_width_below_one_rejected() {
        let p = params(1.5, 2.0, 16.0, 1, ShapeKind::Triangle);
        let c = TorusPoint::new(&[0.0], 16.0);
        assert!(matches!(
            p.eval_bump(&c, 0.5, &c),
            Err(Error::WidthBelowSupport(_))
        ));
    }

    #[test]
    fn bump_vanishes_outside_width() {
        let p = params(1.5, 2.0, 60.0, 1, ShapeKind::Triangle);
        let c = TorusPoint::new(&[10.0], 60.0);
        for i in 0..120 {
            let s = TorusPoint::new(&[i as f64 / 2.0], 60.0);
            let v = torus_distance(&s, &c, 60.0);
            let x = p.eval_bump(&c, 3.0, &s).unwrap();
            if v >= 3.0 {
                assert_eq!(x, 0.0);
            }
        }
    }
}
