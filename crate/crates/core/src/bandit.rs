//! Contextual bandit policies.
//!
//! [`LinUcb`] is a disjoint-arm linear UCB: one ridge model per arm over a
//! shared context, scored as `θ_aᵀx + α·sqrt(xᵀA_a⁻¹x)`. The inverse is kept
//! up to date with Sherman–Morrison updates and periodically recomputed from
//! `A_a` to stop rounding drift.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Arm choice plus the per-arm scores it was taken from.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub arm: usize,
    pub scores: Vec<f64>,
}

/// A contextual bandit that the engine can drive.
pub trait Policy {
    fn arm_count(&self) -> usize;
    fn context_dim(&self) -> usize;
    fn select(&mut self, context: &[f64]) -> Result<Selection>;
    fn update(&mut self, arm: usize, context: &[f64], reward: f64) -> Result<()>;
}

/// Concatenates static node features and dynamic neighborhood features.
pub fn build_context(
    static_features: &[f64],
    dynamic_features: &[f64],
    static_dim: usize,
    class_count: usize,
) -> Result<Vec<f64>> {
    if static_features.len() != static_dim {
        return Err(Error::DimensionMismatch {
            expected: static_dim,
            actual: static_features.len(),
        });
    }
    if dynamic_features.len() != 4 * class_count {
        return Err(Error::DimensionMismatch {
            expected: 4 * class_count,
            actual: dynamic_features.len(),
        });
    }
    let mut ctx = Vec::with_capacity(static_dim + 4 * class_count);
    ctx.extend_from_slice(static_features);
    ctx.extend_from_slice(dynamic_features);
    Ok(ctx)
}

/// Index of the largest score; the lowest index wins ties.
pub fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinUcbParams {
    pub alpha: f64,
    pub ridge: f64,
    /// Recompute each arm's inverse from scratch after this many updates.
    pub refresh_every: usize,
}

impl Default for LinUcbParams {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            ridge: 1.0,
            refresh_every: 1000,
        }
    }
}

#[derive(Debug, Clone)]
struct Arm {
    design: DMatrix<f64>,
    inverse: DMatrix<f64>,
    response: DVector<f64>,
    since_refresh: usize,
}

#[derive(Debug, Clone)]
pub struct LinUcb {
    params: LinUcbParams,
    dim: usize,
    arms: Vec<Arm>,
}

impl LinUcb {
    pub fn new(arm_count: usize, dim: usize, params: LinUcbParams) -> Result<Self> {
        if arm_count == 0 || dim == 0 {
            return Err(Error::InvalidArgument(
                "LinUCB needs at least one arm and one context dimension".into(),
            ));
        }
        if !(params.ridge > 0.0 && params.ridge.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "ridge must be positive, got {}",
                params.ridge
            )));
        }
        if !(params.alpha >= 0.0 && params.alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "alpha must be non-negative, got {}",
                params.alpha
            )));
        }
        let arm = Arm {
            design: DMatrix::identity(dim, dim) * params.ridge,
            inverse: DMatrix::identity(dim, dim) / params.ridge,
            response: DVector::zeros(dim),
            since_refresh: 0,
        };
        Ok(Self {
            params,
            dim,
            arms: vec![arm; arm_count],
        })
    }

    pub fn params(&self) -> &LinUcbParams {
        &self.params
    }

    pub fn design_matrix(&self, arm: usize) -> &DMatrix<f64> {
        &self.arms[arm].design
    }

    pub fn inverse(&self, arm: usize) -> &DMatrix<f64> {
        &self.arms[arm].inverse
    }

    pub fn response(&self, arm: usize) -> &DVector<f64> {
        &self.arms[arm].response
    }

    /// Ridge estimate `A_a⁻¹ b_a`.
    pub fn theta(&self, arm: usize) -> DVector<f64> {
        let a = &self.arms[arm];
        &a.inverse * &a.response
    }

    fn check_context(&self, context: &[f64]) -> Result<()> {
        if context.len() == self.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: context.len(),
            })
        }
    }

    /// UCB score of every arm for `context`.
    pub fn scores(&self, context: &[f64]) -> Result<Vec<f64>> {
        self.check_context(context)?;
        let x = DVector::from_column_slice(context);
        Ok(self
            .arms
            .iter()
            .map(|arm| {
                // A⁻¹ is symmetric, so θᵀx = bᵀ(A⁻¹x).
                let v = &arm.inverse * &x;
                let mean = arm.response.dot(&v);
                let width = x.dot(&v).max(0.0).sqrt();
                mean + self.params.alpha * width
            })
            .collect())
    }

    /// Max-norm of `A_a·A_a⁻¹ − I` for one arm.
    pub fn inverse_residual(&self, arm: usize) -> f64 {
        let a = &self.arms[arm];
        let prod = &a.design * &a.inverse - DMatrix::identity(self.dim, self.dim);
        prod.amax()
    }

    fn refresh(arm: &mut Arm) {
        // design is SPD by construction; fall back to LU if rounding says otherwise
        let inv = match arm.design.clone().cholesky() {
            Some(ch) => ch.inverse(),
            None => arm
                .design
                .clone()
                .try_inverse()
                .unwrap_or_else(|| arm.inverse.clone()),
        };
        arm.inverse = inv;
        arm.since_refresh = 0;
    }
}

impl Policy for LinUcb {
    fn arm_count(&self) -> usize {
        self.arms.len()
    }

    fn context_dim(&self) -> usize {
        self.dim
    }

    fn select(&mut self, context: &[f64]) -> Result<Selection> {
        let scores = self.scores(context)?;
        Ok(Selection {
            arm: argmax(&scores),
            scores,
        })
    }

    fn update(&mut self, arm: usize, context: &[f64], reward: f64) -> Result<()> {
        self.check_context(context)?;
        if arm >= self.arms.len() {
            return Err(Error::InvalidClass {
                class: arm,
                class_count: self.arms.len(),
            });
        }
        let x = DVector::from_column_slice(context);
        let refresh_every = self.params.refresh_every;
        let state = &mut self.arms[arm];
        state.design.ger(1.0, &x, &x, 1.0);
        state.response.axpy(reward, &x, 1.0);

        let v = &state.inverse * &x;
        let denom = 1.0 + x.dot(&v);
        state.inverse.ger(-1.0 / denom, &v, &v, 1.0);
        state.since_refresh += 1;
        if refresh_every > 0 && state.since_refresh >= refresh_every {
            Self::refresh(state);
        }
        Ok(())
    }
}

/// Picks an arm uniformly at random; never learns.
#[derive(Debug, Clone)]
pub struct UniformRandom {
    arm_count: usize,
    dim: usize,
    rng: ChaCha8Rng,
}

impl UniformRandom {
    pub fn new(arm_count: usize, dim: usize, rng: ChaCha8Rng) -> Self {
        Self {
            arm_count,
            dim,
            rng,
        }
    }
}

impl Policy for UniformRandom {
    fn arm_count(&self) -> usize {
        self.arm_count
    }

    fn context_dim(&self) -> usize {
        self.dim
    }

    fn select(&mut self, _context: &[f64]) -> Result<Selection> {
        Ok(Selection {
            arm: self.rng.random_range(0..self.arm_count),
            scores: vec![0.0; self.arm_count],
        })
    }

    fn update(&mut self, _arm: usize, _context: &[f64], _reward: f64) -> Result<()> {
        Ok(())
    }
}
