//! Randomized truncated SVD for shrinking wide feature matrices.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::{stream, Stream};

pub const DEFAULT_OVERSAMPLE: usize = 10;
pub const DEFAULT_POWER_ITERATIONS: usize = 2;

#[derive(Debug, Clone)]
pub struct TruncatedSvd {
    /// Descending.
    pub singular_values: Vec<f64>,
    /// k x d, rows are right singular vectors.
    pub components: DMatrix<f64>,
    /// n x k, the input projected onto `components`.
    pub projection: DMatrix<f64>,
}

impl TruncatedSvd {
    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.projection * &self.components
    }
}

fn orthonormal_basis(m: DMatrix<f64>) -> DMatrix<f64> {
    m.qr().q()
}

pub fn randomized_svd<R: Rng + ?Sized>(
    x: &DMatrix<f64>,
    k: usize,
    oversample: usize,
    power_iterations: usize,
    rng: &mut R,
) -> Result<TruncatedSvd> {
    let (n, d) = x.shape();
    let rank_cap = n.min(d);
    if k == 0 || k > rank_cap {
        return Err(Error::InvalidArgument(format!(
            "target rank {k} must lie in 1..={rank_cap} for a {n}x{d} matrix"
        )));
    }
    let width = (k + oversample).min(rank_cap);
    let omega = DMatrix::<f64>::from_fn(d, width, |_, _| rng.sample(StandardNormal));
    let mut q = orthonormal_basis(x * omega);
    for _ in 0..power_iterations {
        let z = orthonormal_basis(x.transpose() * &q);
        q = orthonormal_basis(x * z);
    }
    let b = q.transpose() * x;
    let svd = b.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    order.truncate(k);

    let singular_values = order.iter().map(|&i| svd.singular_values[i]).collect();
    let components = DMatrix::from_fn(k, d, |r, c| v_t[(order[r], c)]);
    let projection = x * components.transpose();
    Ok(TruncatedSvd {
        singular_values,
        components,
        projection,
    })
}

/// Projects `features` (n rows of width d) onto their top `k` right singular
/// directions, columns ordered by decreasing singular value.
pub fn reduce_features(features: &[Vec<f64>], k: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let n = features.len();
    let d = features.first().map_or(0, Vec::len);
    if features.iter().any(|r| r.len() != d) {
        return Err(Error::InvalidArgument("ragged feature rows".into()));
    }
    let x = DMatrix::from_fn(n, d, |i, j| features[i][j]);
    let mut rng = stream(seed, Stream::Generator);
    let svd = randomized_svd(
        &x,
        k,
        DEFAULT_OVERSAMPLE,
        DEFAULT_POWER_ITERATIONS,
        &mut rng,
    )?;
    Ok((0..n)
        .map(|i| svd.projection.row(i).iter().copied().collect())
        .collect())
}
