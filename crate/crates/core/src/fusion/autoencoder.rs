//! Single-hidden-layer autoencoder trained with full-batch gradient descent.
//!
//! Inputs are z-scored per column. The encoder is `act(Z W1 + b1)`, the
//! decoder `H W2 + b2`, and the loss is the mean squared error over all
//! entries of the standardized matrix.

use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    #[default]
    Tanh,
    Linear,
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tanh" => Ok(Activation::Tanh),
            "linear" => Ok(Activation::Linear),
            other => Err(Error::invalid(format!("unknown activation '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutoencoderConfig {
    pub seed: u64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub activation: Activation,
}

impl Default for AutoencoderConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            epochs: 200,
            learning_rate: 0.01,
            activation: Activation::Tanh,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Autoencoder {
    col_mean: DVector<f64>,
    col_scale: DVector<f64>,
    w_enc: DMatrix<f64>,
    b_enc: DVector<f64>,
    w_dec: DMatrix<f64>,
    b_dec: DVector<f64>,
    activation: Activation,
    loss_curve: Vec<f64>,
}

impl Autoencoder {
    /// Trains on the rows of `x`. The recorded loss curve has `epochs + 1`
    /// entries: the loss before each update and the final loss.
    pub fn train(x: &DMatrix<f64>, target_dim: usize, config: &AutoencoderConfig) -> Result<Self> {
        let (n, d) = x.shape();
        if n < 2 {
            return Err(Error::invalid("autoencoder needs at least two rows"));
        }
        if target_dim == 0 || target_dim > d {
            return Err(Error::invalid(format!(
                "target dimension {target_dim} must be between 1 and the input dimension {d}"
            )));
        }
        if !(config.learning_rate > 0.0 && config.learning_rate.is_finite()) {
            return Err(Error::invalid("learning rate must be positive"));
        }

        let col_mean = x.row_mean().transpose();
        let col_scale = DVector::from_iterator(
            d,
            x.column_iter().zip(col_mean.iter()).map(|(col, &m)| {
                let var = col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n as f64;
                if var > 0.0 {
                    var.sqrt()
                } else {
                    1.0
                }
            }),
        );

        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let limit = (6.0 / (d + target_dim) as f64).sqrt();
        let w_enc = DMatrix::from_fn(d, target_dim, |_, _| rng.gen_range(-limit..limit));
        let w_dec = DMatrix::from_fn(target_dim, d, |_, _| rng.gen_range(-limit..limit));

        let mut model = Self {
            col_mean,
            col_scale,
            w_enc,
            b_enc: DVector::zeros(target_dim),
            w_dec,
            b_dec: DVector::zeros(d),
            activation: config.activation,
            loss_curve: Vec::with_capacity(config.epochs + 1),
        };

        let z = model.standardize(x);
        let scale = 2.0 / (n * d) as f64;
        let lr = config.learning_rate;

        for epoch in 0..=config.epochs {
            let hidden = model.hidden(&z);
            let recon = model.decode(&hidden);
            let err = recon - &z;
            let loss = err.norm_squared() / (n * d) as f64;
            if !loss.is_finite() {
                return Err(Error::Diverged { epoch });
            }
            model.loss_curve.push(loss);
            if epoch == config.epochs {
                break;
            }

            let d_out = err * scale;
            let grad_w_dec = hidden.transpose() * &d_out;
            let grad_b_dec = column_sums(&d_out);
            let mut d_hidden = &d_out * model.w_dec.transpose();
            if model.activation == Activation::Tanh {
                d_hidden.zip_apply(&hidden, |g, h| *g *= 1.0 - h * h);
            }
            let grad_w_enc = z.transpose() * &d_hidden;
            let grad_b_enc = column_sums(&d_hidden);

            model.w_dec -= grad_w_dec * lr;
            model.b_dec -= grad_b_dec * lr;
            model.w_enc -= grad_w_enc * lr;
            model.b_enc -= grad_b_enc * lr;
        }
        Ok(model)
    }

    pub fn loss_curve(&self) -> &[f64] {
        &self.loss_curve
    }

    pub fn final_loss(&self) -> f64 {
        self.loss_curve.last().copied().unwrap_or(f64::NAN)
    }

    /// Encoder activations for the rows of `x` (standardized with the
    /// training statistics).
    pub fn encode(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        self.hidden(&self.standardize(x))
    }

    /// Mean squared reconstruction error on the standardized scale.
    pub fn reconstruction_mse(&self, x: &DMatrix<f64>) -> f64 {
        let z = self.standardize(x);
        let recon = self.decode(&self.hidden(&z));
        (recon - &z).norm_squared() / z.len() as f64
    }

    fn standardize(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut z = x.clone();
        for mut row in z.row_iter_mut() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (*v - self.col_mean[j]) / self.col_scale[j];
            }
        }
        z
    }

    fn hidden(&self, z: &DMatrix<f64>) -> DMatrix<f64> {
        let mut h = z * &self.w_enc;
        add_row_bias(&mut h, &self.b_enc);
        if self.activation == Activation::Tanh {
            h.apply(|v| *v = v.tanh());
        }
        h
    }

    fn decode(&self, h: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = h * &self.w_dec;
        add_row_bias(&mut out, &self.b_dec);
        out
    }
}

fn add_row_bias(m: &mut DMatrix<f64>, bias: &DVector<f64>) {
    for mut row in m.row_iter_mut() {
        row += bias.transpose();
    }
}

fn column_sums(m: &DMatrix<f64>) -> DVector<f64> {
    m.row_sum().transpose()
}
