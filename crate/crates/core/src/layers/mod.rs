//! Forward and backward passes for each layer of the model.
//!
//! Every layer works on batched tensors with the batch axis first. Forward
//! functions return the output together with a cache; `backward` consumes
//! the cache, so a cache cannot be replayed.

pub mod batchnorm;
pub mod conv1d;
pub mod dense;
pub mod gru;
pub mod pooling;
pub mod shape_ops;

#[cfg(test)]
pub(crate) mod testutil;

pub use batchnorm::{
    batchnorm_forward, BatchNormCache, BatchNormGrads, BatchNormParams, BatchStats, Mode,
};
pub use conv1d::{conv1d_forward, Conv1DCache, Conv1DParams};
pub use dense::{
    activation_forward, dense_forward, Activation, ActivationCache, DenseCache, DenseParams,
};
pub use gru::{gru_forward, GruCache, GruGrads, GruParams};
pub use pooling::{global_pool_forward, PoolCache, Pooling};
pub use shape_ops::{concatenate, flatten, split_columns, unflatten};
