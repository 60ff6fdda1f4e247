//! Batch normalization over every axis but the last (channel) axis.
//!
//! Train mode normalizes with the batch statistics and hands them back in
//! the cache; the caller folds them into the moving averages with
//! [`BatchNormParams::absorb`]. Infer mode uses the moving averages and is a
//! fixed affine map.

use crate::error::{Error, Result};
use crate::numerics::{Scalar, Tensor};

pub const DEFAULT_EPSILON: f64 = 1e-3;
pub const DEFAULT_MOMENTUM: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Infer,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchNormParams<T> {
    pub gamma: Tensor<T>,
    pub beta: Tensor<T>,
    /// Non-trainable.
    pub moving_mean: Tensor<T>,
    /// Non-trainable.
    pub moving_var: Tensor<T>,
    pub epsilon: f64,
    pub momentum: f64,
}

/// Gradients of the trainable half of [`BatchNormParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct BatchNormGrads<T> {
    pub gamma: Tensor<T>,
    pub beta: Tensor<T>,
}

/// Per-channel mean and biased variance of one training batch.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchStats<T> {
    pub mean: Vec<T>,
    pub var: Vec<T>,
}

impl<T: Scalar> BatchNormParams<T> {
    /// gamma = 1, beta = 0, moving mean 0, moving variance 1.
    pub fn new(channels: usize, epsilon: f64, momentum: f64) -> Self {
        BatchNormParams {
            gamma: Tensor::filled(&[channels], T::one()),
            beta: Tensor::zeros(&[channels]),
            moving_mean: Tensor::zeros(&[channels]),
            moving_var: Tensor::filled(&[channels], T::one()),
            epsilon,
            momentum,
        }
    }

    pub fn channels(&self) -> usize {
        self.gamma.len()
    }

    pub fn trainable_count(&self) -> usize {
        self.gamma.len() + self.beta.len()
    }

    pub fn non_trainable_count(&self) -> usize {
        self.moving_mean.len() + self.moving_var.len()
    }

    /// Exponential moving average update from one batch.
    pub fn absorb(&mut self, stats: &BatchStats<T>) {
        let m = T::from_f64(self.momentum);
        let keep = T::one() - m;
        for (mm, &bm) in self.moving_mean.data_mut().iter_mut().zip(&stats.mean) {
            *mm = m * *mm + keep * bm;
        }
        for (mv, &bv) in self.moving_var.data_mut().iter_mut().zip(&stats.var) {
            *mv = m * *mv + keep * bv;
        }
    }
}

#[derive(Debug)]
pub struct BatchNormCache<T> {
    x_hat: Tensor<T>,
    inv_std: Vec<T>,
    mode: Mode,
    stats: Option<BatchStats<T>>,
}

impl<T> BatchNormCache<T> {
    /// Batch statistics observed in train mode.
    pub fn batch_stats(&self) -> Option<&BatchStats<T>> {
        self.stats.as_ref()
    }
}

pub fn batchnorm_forward<T: Scalar>(
    x: &Tensor<T>,
    p: &BatchNormParams<T>,
    mode: Mode,
) -> Result<(Tensor<T>, BatchNormCache<T>)> {
    let c = p.channels();
    if x.rank() == 0 || *x.shape().last().unwrap() != c {
        return Err(Error::shape("batchnorm", x.shape(), &[c]));
    }
    let rows = x.len() / c;
    let eps = T::from_f64(p.epsilon);

    let (mean, var) = match mode {
        Mode::Train => {
            if rows < 2 {
                return Err(Error::Data(format!(
                    "train-mode batch normalization needs at least 2 values per channel, got {rows}"
                )));
            }
            let n = T::from_f64(rows as f64);
            let mut mean = vec![T::zero(); c];
            for row in x.data().chunks(c) {
                for (m, &v) in mean.iter_mut().zip(row) {
                    *m += v;
                }
            }
            mean.iter_mut().for_each(|m| *m = *m / n);
            let mut var = vec![T::zero(); c];
            for row in x.data().chunks(c) {
                for ((s, &v), &m) in var.iter_mut().zip(row).zip(&mean) {
                    *s += (v - m) * (v - m);
                }
            }
            var.iter_mut().for_each(|s| *s = *s / n);
            (mean, var)
        }
        Mode::Infer => (p.moving_mean.data().to_vec(), p.moving_var.data().to_vec()),
    };

    let inv_std: Vec<T> = var.iter().map(|&v| T::one() / (v + eps).sqrt()).collect();
    let mut x_hat = x.clone();
    let mut y = x.clone();
    for (xh_row, y_row) in x_hat
        .data_mut()
        .chunks_mut(c)
        .zip(y.data_mut().chunks_mut(c))
    {
        for ch in 0..c {
            let xh = (xh_row[ch] - mean[ch]) * inv_std[ch];
            xh_row[ch] = xh;
            y_row[ch] = xh * p.gamma.data()[ch] + p.beta.data()[ch];
        }
    }
    let stats = (mode == Mode::Train).then_some(BatchStats { mean, var });
    Ok((
        y,
        BatchNormCache {
            x_hat,
            inv_std,
            mode,
            stats,
        },
    ))
}

impl<T: Scalar> BatchNormCache<T> {
    pub fn backward(
        self,
        dy: &Tensor<T>,
        p: &BatchNormParams<T>,
    ) -> Result<(Tensor<T>, BatchNormGrads<T>)> {
        if dy.shape() != self.x_hat.shape() {
            return Err(Error::shape(
                "batchnorm backward",
                dy.shape(),
                self.x_hat.shape(),
            ));
        }
        let c = p.channels();
        let rows = dy.len() / c;
        let mut dgamma = vec![T::zero(); c];
        let mut dbeta = vec![T::zero(); c];
        for (g_row, xh_row) in dy.data().chunks(c).zip(self.x_hat.data().chunks(c)) {
            for ch in 0..c {
                dgamma[ch] += g_row[ch] * xh_row[ch];
                dbeta[ch] += g_row[ch];
            }
        }

        let mut dx = Tensor::zeros(dy.shape());
        match self.mode {
            Mode::Infer => {
                for (dx_row, g_row) in dx.data_mut().chunks_mut(c).zip(dy.data().chunks(c)) {
                    for ch in 0..c {
                        dx_row[ch] = g_row[ch] * p.gamma.data()[ch] * self.inv_std[ch];
                    }
                }
            }
            Mode::Train => {
                // dx = inv_std/N * (N*dx_hat - sum(dx_hat) - x_hat*sum(dx_hat*x_hat)),
                // where dx_hat = dy*gamma, so the sums are gamma*dbeta and gamma*dgamma.
                let n = T::from_f64(rows as f64);
                for ((dx_row, g_row), xh_row) in dx
                    .data_mut()
                    .chunks_mut(c)
                    .zip(dy.data().chunks(c))
                    .zip(self.x_hat.data().chunks(c))
                {
                    for ch in 0..c {
                        let gamma = p.gamma.data()[ch];
                        dx_row[ch] = gamma * self.inv_std[ch] / n
                            * (n * g_row[ch] - dbeta[ch] - xh_row[ch] * dgamma[ch]);
                    }
                }
            }
        }
        Ok((
            dx,
            BatchNormGrads {
                gamma: Tensor::from_vec(&[c], dgamma)?,
                beta: Tensor::from_vec(&[c], dbeta)?,
            },
        ))
    }
}
