use std::fmt;

use crate::layers::batchnorm::{DEFAULT_EPSILON, DEFAULT_MOMENTUM};
use crate::layers::{
    Activation, BatchNormGrads, BatchNormParams, Conv1DParams, DenseParams, GruParams, Pooling,
};
use crate::numerics::init::TRUNCATED_NORMAL_STDDEV;
use crate::numerics::{Scalar, SeededRng, Tensor};

/// Topology knobs. Defaults reproduce the 4370-parameter model.
#[derive(Debug, Clone, PartialEq)]
pub struct Architecture {
    pub seq_len: usize,
    pub in_channels: usize,
    pub filters: usize,
    pub kernel_size: usize,
    pub gru_units: usize,
    pub dense_units: usize,
    pub classes: usize,
    pub conv_activation: Activation,
    pub dense_activation: Activation,
    pub pooling: Pooling,
    pub bn_epsilon: f64,
    pub bn_momentum: f64,
    pub gru_init_stddev: f64,
}

impl Default for Architecture {
    fn default() -> Self {
        Architecture {
            seq_len: 16,
            in_channels: 1,
            filters: 128,
            kernel_size: 3,
            gru_units: 10,
            dense_units: 10,
            classes: 6,
            conv_activation: Activation::Relu,
            dense_activation: Activation::Relu,
            pooling: Pooling::Max,
            bn_epsilon: DEFAULT_EPSILON,
            bn_momentum: DEFAULT_MOMENTUM,
            gru_init_stddev: TRUNCATED_NORMAL_STDDEV,
        }
    }
}

impl Architecture {
    /// Width of the concatenated branch outputs.
    pub fn merged_width(&self) -> usize {
        self.filters + self.seq_len * self.gru_units
    }
}

/// Names one parameter tensor as `layer/tensor`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ParamId {
    pub layer: &'static str,
    pub tensor: &'static str,
}

impl fmt::Display for ParamId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.layer, self.tensor)
    }
}

pub const CONV: &str = "conv1d";
pub const BATCHNORM: &str = "batch_normalization";
pub const GRU: &str = "gru";
pub const DENSE: &str = "dense";
pub const DENSE_OUT: &str = "dense_1";

const fn id(layer: &'static str, tensor: &'static str) -> ParamId {
    ParamId { layer, tensor }
}

/// Every weight, bias and statistic of the two-branch model.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParameters<T> {
    pub arch: Architecture,
    pub conv: Conv1DParams<T>,
    pub bn: BatchNormParams<T>,
    pub gru: GruParams<T>,
    pub dense: DenseParams<T>,
    pub dense_out: DenseParams<T>,
}

/// Gradients for the trainable tensors, laid out like [`NetworkParameters`].
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkGrads<T> {
    pub conv: Conv1DParams<T>,
    pub bn: BatchNormGrads<T>,
    pub gru: GruParams<T>,
    pub dense: DenseParams<T>,
    pub dense_out: DenseParams<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamCount {
    pub total: usize,
    pub trainable: usize,
    pub non_trainable: usize,
}

fn gru_ids() -> [ParamId; 12] {
    [
        id(GRU, "w_z"),
        id(GRU, "w_r"),
        id(GRU, "w_h"),
        id(GRU, "u_z"),
        id(GRU, "u_r"),
        id(GRU, "u_h"),
        id(GRU, "b_z"),
        id(GRU, "b_r"),
        id(GRU, "b_h"),
        id(GRU, "rb_z"),
        id(GRU, "rb_r"),
        id(GRU, "rb_h"),
    ]
}

impl<T: Scalar> NetworkParameters<T> {
    /// Fresh parameters. Each layer draws from its own named stream of `seed`.
    pub fn build(arch: &Architecture, seed: u64) -> Self {
        let conv = Conv1DParams::he_uniform(
            arch.kernel_size,
            arch.in_channels,
            arch.filters,
            &mut SeededRng::stream(seed, CONV),
        );
        let gru = GruParams::truncated_normal(
            arch.in_channels,
            arch.gru_units,
            arch.gru_init_stddev,
            &mut SeededRng::stream(seed, GRU),
        );
        let dense = DenseParams::he_uniform(
            arch.merged_width(),
            arch.dense_units,
            &mut SeededRng::stream(seed, DENSE),
        );
        let dense_out = DenseParams::he_uniform(
            arch.dense_units,
            arch.classes,
            &mut SeededRng::stream(seed, DENSE_OUT),
        );
        NetworkParameters {
            arch: arch.clone(),
            conv,
            bn: BatchNormParams::new(arch.filters, arch.bn_epsilon, arch.bn_momentum),
            gru,
            dense,
            dense_out,
        }
    }

    /// All-zero parameters with the right shapes (batchnorm at its defaults).
    pub fn zeros(arch: &Architecture) -> Self {
        NetworkParameters {
            arch: arch.clone(),
            conv: Conv1DParams::zeros(arch.kernel_size, arch.in_channels, arch.filters),
            bn: BatchNormParams::new(arch.filters, arch.bn_epsilon, arch.bn_momentum),
            gru: GruParams::zeros(arch.in_channels, arch.gru_units),
            dense: DenseParams::zeros(arch.merged_width(), arch.dense_units),
            dense_out: DenseParams::zeros(arch.dense_units, arch.classes),
        }
    }

    pub fn param_count(&self) -> ParamCount {
        let trainable: usize = self.trainable().iter().map(|(_, t)| t.len()).sum();
        let non_trainable = self.bn.non_trainable_count();
        ParamCount {
            total: trainable + non_trainable,
            trainable,
            non_trainable,
        }
    }

    /// Trainable tensors in canonical order.
    pub fn trainable(&self) -> Vec<(ParamId, &Tensor<T>)> {
        let mut out = vec![
            (id(CONV, "kernel"), &self.conv.kernel),
            (id(CONV, "bias"), &self.conv.bias),
            (id(BATCHNORM, "gamma"), &self.bn.gamma),
            (id(BATCHNORM, "beta"), &self.bn.beta),
        ];
        out.extend(
            gru_ids()
                .into_iter()
                .zip(self.gru.tensors().map(|(_, t)| t)),
        );
        out.extend([
            (id(DENSE, "kernel"), &self.dense.weights),
            (id(DENSE, "bias"), &self.dense.bias),
            (id(DENSE_OUT, "kernel"), &self.dense_out.weights),
            (id(DENSE_OUT, "bias"), &self.dense_out.bias),
        ]);
        out
    }

    pub fn trainable_mut(&mut self) -> Vec<(ParamId, &mut Tensor<T>)> {
        let mut all = self.all_tensors_mut();
        all.truncate(all.len() - 2);
        all
    }

    pub fn non_trainable(&self) -> Vec<(ParamId, &Tensor<T>)> {
        vec![
            (id(BATCHNORM, "moving_mean"), &self.bn.moving_mean),
            (id(BATCHNORM, "moving_variance"), &self.bn.moving_var),
        ]
    }

    pub fn non_trainable_mut(&mut self) -> Vec<(ParamId, &mut Tensor<T>)> {
        let mut all = self.all_tensors_mut();
        all.split_off(all.len() - 2)
    }

    /// Every tensor (trainable first), in manifest order.
    pub fn all_tensors(&self) -> Vec<(ParamId, &Tensor<T>)> {
        let mut out = self.trainable();
        out.extend(self.non_trainable());
        out
    }

    pub fn all_tensors_mut(&mut self) -> Vec<(ParamId, &mut Tensor<T>)> {
        let NetworkParameters {
            conv,
            bn,
            gru,
            dense,
            dense_out,
            ..
        } = self;
        let mut out = vec![
            (id(CONV, "kernel"), &mut conv.kernel),
            (id(CONV, "bias"), &mut conv.bias),
            (id(BATCHNORM, "gamma"), &mut bn.gamma),
            (id(BATCHNORM, "beta"), &mut bn.beta),
        ];
        out.extend(gru_ids().into_iter().zip(gru.tensors_mut().map(|(_, t)| t)));
        out.extend([
            (id(DENSE, "kernel"), &mut dense.weights),
            (id(DENSE, "bias"), &mut dense.bias),
            (id(DENSE_OUT, "kernel"), &mut dense_out.weights),
            (id(DENSE_OUT, "bias"), &mut dense_out.bias),
            (id(BATCHNORM, "moving_mean"), &mut bn.moving_mean),
            (id(BATCHNORM, "moving_variance"), &mut bn.moving_var),
        ]);
        out
    }
}

impl<T: Scalar> NetworkGrads<T> {
    pub fn zeros(arch: &Architecture) -> Self {
        NetworkGrads {
            conv: Conv1DParams::zeros(arch.kernel_size, arch.in_channels, arch.filters),
            bn: BatchNormGrads {
                gamma: Tensor::zeros(&[arch.filters]),
                beta: Tensor::zeros(&[arch.filters]),
            },
            gru: GruParams::zeros(arch.in_channels, arch.gru_units),
            dense: DenseParams::zeros(arch.merged_width(), arch.dense_units),
            dense_out: DenseParams::zeros(arch.dense_units, arch.classes),
        }
    }

    /// Same order as [`NetworkParameters::trainable`].
    pub fn tensors(&self) -> Vec<(ParamId, &Tensor<T>)> {
        let mut out = vec![
            (id(CONV, "kernel"), &self.conv.kernel),
            (id(CONV, "bias"), &self.conv.bias),
            (id(BATCHNORM, "gamma"), &self.bn.gamma),
            (id(BATCHNORM, "beta"), &self.bn.beta),
        ];
        out.extend(
            gru_ids()
                .into_iter()
                .zip(self.gru.tensors().map(|(_, t)| t)),
        );
        out.extend([
            (id(DENSE, "kernel"), &self.dense.weights),
            (id(DENSE, "bias"), &self.dense.bias),
            (id(DENSE_OUT, "kernel"), &self.dense_out.weights),
            (id(DENSE_OUT, "bias"), &self.dense_out.bias),
        ]);
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<(ParamId, &mut Tensor<T>)> {
        let mut out = vec![
            (id(CONV, "kernel"), &mut self.conv.kernel),
            (id(CONV, "bias"), &mut self.conv.bias),
            (id(BATCHNORM, "gamma"), &mut self.bn.gamma),
            (id(BATCHNORM, "beta"), &mut self.bn.beta),
        ];
        out.extend(
            gru_ids()
                .into_iter()
                .zip(self.gru.tensors_mut().map(|(_, t)| t)),
        );
        out.extend([
            (id(DENSE, "kernel"), &mut self.dense.weights),
            (id(DENSE, "bias"), &mut self.dense.bias),
            (id(DENSE_OUT, "kernel"), &mut self.dense_out.weights),
            (id(DENSE_OUT, "bias"), &mut self.dense_out.bias),
        ]);
        out
    }
}
