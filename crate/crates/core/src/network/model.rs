//! Full two-branch forward and backward passes.
//!
//! ```text
//! input [B, T, 1] ─┬─ Conv1D ─ BatchNorm ─ Activation ─ GlobalPool ─┐
//!                  └─ GRU (all steps) ─ Flatten ─────────────────────┴─ Concatenate ─ Dense ─ Dense(softmax)
//! ```

use crate::error::{Error, Result};
use crate::layers::{
    activation_forward, batchnorm_forward, concatenate, conv1d_forward, dense_forward, flatten,
    global_pool_forward, gru_forward, split_columns, unflatten, Activation, ActivationCache,
    BatchNormCache, BatchStats, Conv1DCache, DenseCache, GruCache, Mode, PoolCache,
};
use crate::network::params::{NetworkGrads, NetworkParameters};
use crate::numerics::{Scalar, Tensor};

/// Intermediates saved by [`forward`] for [`backward`].
#[derive(Debug)]
pub struct ForwardCache<T> {
    conv: Conv1DCache<T>,
    bn: BatchNormCache<T>,
    act: ActivationCache<T>,
    pool: PoolCache,
    gru: GruCache<T>,
    gru_shape: Vec<usize>,
    dense: DenseCache<T>,
    dense_out: DenseCache<T>,
    probs: Tensor<T>,
}

impl<T> ForwardCache<T> {
    pub fn probs(&self) -> &Tensor<T> {
        &self.probs
    }

    /// Batch statistics from a train-mode pass, to be folded into the
    /// moving averages.
    pub fn batch_stats(&self) -> Option<&BatchStats<T>> {
        self.bn.batch_stats()
    }
}

/// Accepts `[B, T, C]` or `[B, T]` (single channel) input.
fn check_input<T: Scalar>(params: &NetworkParameters<T>, x: &Tensor<T>) -> Result<Tensor<T>> {
    let arch = &params.arch;
    let expected = arch.seq_len;
    match x.shape() {
        [_, t, c] if *t == expected && *c == arch.in_channels => Ok(x.clone()),
        [b, t] if *t == expected && arch.in_channels == 1 => x.clone().reshape(&[*b, *t, 1]),
        [_, t, _] | [_, t] => Err(Error::FeatureLength {
            expected,
            actual: *t,
        }),
        other => Err(Error::shape(
            "network input",
            other,
            &[0, expected, arch.in_channels],
        )),
    }
}

/// Class probabilities `[B, classes]` for input `[B, seq_len, in_channels]`.
pub fn forward<T: Scalar>(
    params: &NetworkParameters<T>,
    x: &Tensor<T>,
    mode: Mode,
) -> Result<(Tensor<T>, ForwardCache<T>)> {
    let x = check_input(params, x)?;
    let arch = &params.arch;

    let (c, conv) = conv1d_forward(&x, &params.conv)?;
    let (n, bn) = batchnorm_forward(&c, &params.bn, mode)?;
    let (a, act) = activation_forward(&n, arch.conv_activation);
    let (pooled, pool) = global_pool_forward(&a, arch.pooling)?;

    let (h, gru) = gru_forward(&x, &params.gru, None)?;
    let gru_shape = h.shape().to_vec();
    let flat = flatten(&h)?;

    let merged = concatenate(&pooled, &flat)?;
    let (hidden, dense) = dense_forward(&merged, &params.dense, arch.dense_activation)?;
    let (probs, dense_out) = dense_forward(&hidden, &params.dense_out, Activation::Softmax)?;

    Ok((
        probs.clone(),
        ForwardCache {
            conv,
            bn,
            act,
            pool,
            gru,
            gru_shape,
            dense,
            dense_out,
            probs,
        },
    ))
}

/// Inference-mode probabilities; parameters are only read.
pub fn predict<T: Scalar>(params: &NetworkParameters<T>, x: &Tensor<T>) -> Result<Tensor<T>> {
    forward(params, x, Mode::Infer).map(|(p, _)| p)
}

/// Parameter gradients from the gradient of the loss w.r.t. the
/// pre-softmax logits of the output layer.
pub fn backward<T: Scalar>(
    params: &NetworkParameters<T>,
    cache: ForwardCache<T>,
    d_logits: &Tensor<T>,
) -> Result<NetworkGrads<T>> {
    let (d_hidden, g_dense_out) = cache
        .dense_out
        .backward_from_logits(d_logits, &params.dense_out)?;
    let (d_merged, g_dense) = cache.dense.backward(&d_hidden, &params.dense)?;
    let (d_pooled, d_flat) = split_columns(&d_merged, params.arch.filters)?;

    let d_h = unflatten(&d_flat, &cache.gru_shape)?;
    let g_gru = cache.gru.backward(&d_h, &params.gru)?;

    let d_act = cache.pool.backward(&d_pooled)?;
    let d_norm = cache.act.backward(&d_act)?;
    let (d_conv, g_bn) = cache.bn.backward(&d_norm, &params.bn)?;
    let (_, g_conv) = cache.conv.backward(&d_conv, &params.conv)?;

    Ok(NetworkGrads {
        conv: g_conv,
        bn: g_bn,
        gru: g_gru.params,
        dense: g_dense,
        dense_out: g_dense_out,
    })
}
