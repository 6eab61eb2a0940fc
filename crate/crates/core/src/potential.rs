//! Strongly convex potentials `phi`, their conjugates and Bregman distances.
//!
//! Two potentials are built in: `phi(x) = 1/2 ||x||^2` and the sparsity-promoting
//! `phi(x) = lambda ||x||_1 + 1/2 ||x||^2`. Both are 1-strongly convex. The primal
//! map `grad phi*` of the latter is componentwise soft shrinkage.

use crate::linalg::dot;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum PotentialKind {
    SquaredNorm,
    L1SquaredNorm,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Potential {
    kind: PotentialKind,
    lambda: f64,
    sigma: f64,
}

/// `sign(x) * max(|x| - lambda, 0)` componentwise.
pub fn soft_shrink(x_star: &[f64], lambda: f64) -> Vec<f64> {
    x_star.iter().map(|&v| shrink_scalar(v, lambda)).collect()
}

#[inline]
pub(crate) fn shrink_scalar(v: f64, lambda: f64) -> f64 {
    if v > lambda {
        v - lambda
    } else if v < -lambda {
        v + lambda
    } else {
        0.0
    }
}

impl Potential {
    /// `1/2 ||x||^2`.
    pub fn squared_norm() -> Self {
        Self { kind: PotentialKind::SquaredNorm, lambda: 0.0, sigma: 1.0 }
    }

    /// `lambda ||x||_1 + 1/2 ||x||^2`.
    ///
    /// # Panics
    /// If `lambda` is negative or not finite.
    pub fn l1_squared_norm(lambda: f64) -> Self {
        assert!(lambda.is_finite() && lambda >= 0.0, "lambda must be finite and >= 0, got {lambda}");
        Self { kind: PotentialKind::L1SquaredNorm, lambda, sigma: 1.0 }
    }

    /// `SquaredNorm` for `lambda == 0`, otherwise `L1SquaredNorm`.
    pub fn for_lambda(lambda: f64) -> Self {
        if lambda == 0.0 {
            Self::squared_norm()
        } else {
            Self::l1_squared_norm(lambda)
        }
    }

    pub fn kind(&self) -> PotentialKind {
        self.kind
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Strong-convexity modulus.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Scalar primal map applied to one coordinate.
    #[inline]
    pub fn primal_map_scalar(&self, v: f64) -> f64 {
        // lambda is 0 for SquaredNorm, and shrink_scalar(v, 0) == v exactly,
        // so both kinds share one code path.
        shrink_scalar(v, self.lambda) / self.sigma
    }

    /// `grad phi*(x_star)`.
    pub fn primal_map(&self, x_star: &[f64]) -> Vec<f64> {
        x_star.iter().map(|&v| self.primal_map_scalar(v)).collect()
    }

    /// Writes `grad phi*(x_star)` into `out`.
    pub fn primal_map_into(&self, x_star: &[f64], out: &mut [f64]) {
        for (o, &v) in out.iter_mut().zip(x_star) {
            *o = self.primal_map_scalar(v);
        }
    }

    /// `phi*(x_star) = sigma/2 ||grad phi*(x_star)||^2`; equals `1/2 ||S_lambda(x_star)||^2` for sigma = 1.
    pub fn conjugate_value(&self, x_star: &[f64]) -> f64 {
        let s: f64 = x_star
            .iter()
            .map(|&v| {
                let p = self.primal_map_scalar(v);
                p * p
            })
            .sum();
        0.5 * self.sigma * s
    }

    /// `phi(x) = lambda ||x||_1 + sigma/2 ||x||^2`.
    pub fn primal_value(&self, x: &[f64]) -> f64 {
        let l1: f64 = x.iter().map(|v| v.abs()).sum();
        self.lambda * l1 + 0.5 * self.sigma * dot(x, x)
    }

    /// Bregman distance `D^{x*}(grad phi*(x*), y)` via the dual form
    /// `phi*(x*) - <x*, y> + phi(y)`.
    pub fn bregman_distance(&self, x_star: &[f64], y: &[f64]) -> f64 {
        (self.conjugate_value(x_star) - dot(x_star, y) + self.primal_value(y)).max(0.0)
    }
}
