//! Principal component analysis via the SVD of the centered data matrix.
//!
//! For centered rows `Xc = U S V^T`, the right singular vectors are the
//! eigenvectors of the covariance `Xc^T Xc / (n - 1)` with eigenvalues
//! `s_i^2 / (n - 1)`. Each direction is sign-normalized so that its
//! largest-magnitude entry is positive, which makes the output independent
//! of the SVD routine's sign conventions.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct PcaModel {
    mean: DVector<f64>,
    /// `input_dim x target_dim`, orthonormal columns.
    components: DMatrix<f64>,
    /// Covariance eigenvalues, descending, one per singular value.
    variances: Vec<f64>,
    rank: usize,
}

impl PcaModel {
    /// Fits `target_dim` directions to the rows of `x`.
    pub fn fit(x: &DMatrix<f64>, target_dim: usize) -> Result<Self> {
        let (n, d) = x.shape();
        if n < 2 {
            return Err(Error::invalid("PCA needs at least two rows"));
        }
        if target_dim == 0 || target_dim > d {
            return Err(Error::invalid(format!(
                "target dimension {target_dim} must be between 1 and the input dimension {d}"
            )));
        }

        let mean = x.row_mean().transpose();
        let centered = center(x, &mean);

        let svd = centered.svd(false, true);
        let v_t = svd
            .v_t
            .ok_or_else(|| Error::invalid("SVD did not produce right singular vectors"))?;
        let singular = svd.singular_values;

        let mut order: Vec<usize> = (0..singular.len()).collect();
        order.sort_by(|&a, &b| singular[b].total_cmp(&singular[a]));

        let s_max = singular.iter().copied().fold(0.0, f64::max);
        let tol = s_max * n.max(d) as f64 * f64::EPSILON;
        let rank = singular.iter().filter(|&&s| s > tol).count();
        if target_dim > rank {
            return Err(Error::RankDeficient {
                requested: target_dim,
                rank,
            });
        }

        let mut components = DMatrix::zeros(d, target_dim);
        for (j, &idx) in order.iter().take(target_dim).enumerate() {
            let mut dir = v_t.row(idx).transpose();
            let pivot = dir
                .iter()
                .enumerate()
                .fold((0usize, 0.0f64), |best, (i, &v)| {
                    if v.abs() > best.1 {
                        (i, v.abs())
                    } else {
                        best
                    }
                })
                .0;
            if dir[pivot] < 0.0 {
                dir.neg_mut();
            }
            components.set_column(j, &dir);
        }

        let denom = (n - 1) as f64;
        let variances = order
            .iter()
            .map(|&i| singular[i] * singular[i] / denom)
            .collect();

        Ok(Self {
            mean,
            components,
            variances,
            rank,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.components.nrows()
    }

    pub fn target_dim(&self) -> usize {
        self.components.ncols()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    /// Principal directions as columns.
    pub fn components(&self) -> &DMatrix<f64> {
        &self.components
    }

    /// Variance captured by each kept direction.
    pub fn explained_variance(&self) -> &[f64] {
        &self.variances[..self.target_dim()]
    }

    /// Every covariance eigenvalue recovered by the decomposition, descending.
    pub fn all_variances(&self) -> &[f64] {
        &self.variances
    }

    pub fn effective_rank(&self) -> usize {
        self.rank
    }

    /// Centers with the fitted mean and projects each row.
    pub fn transform(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        center(x, &self.mean) * &self.components
    }

    pub fn project_row(&self, row: &[f64]) -> Vec<f64> {
        let x = DMatrix::from_row_slice(1, row.len(), row);
        self.transform(&x).iter().copied().collect()
    }

    /// Maps projected rows back to the input space.
    pub fn inverse_transform(&self, y: &DMatrix<f64>) -> DMatrix<f64> {
        let mut x = y * self.components.transpose();
        for mut row in x.row_iter_mut() {
            row += self.mean.transpose();
        }
        x
    }

    /// Squared Frobenius residual of the rank-`target_dim` reconstruction,
    /// divided by `n - 1` so that it is on the covariance-eigenvalue scale.
    pub fn reconstruction_error(&self, x: &DMatrix<f64>) -> f64 {
        let centered = center(x, &self.mean);
        let projected = &centered * &self.components;
        let residual = &centered - projected * self.components.transpose();
        residual.norm_squared() / (x.nrows() - 1) as f64
    }
}

fn center(x: &DMatrix<f64>, mean: &DVector<f64>) -> DMatrix<f64> {
    let mut c = x.clone();
    for mut row in c.row_iter_mut() {
        row -= mean.transpose();
    }
    c
}
