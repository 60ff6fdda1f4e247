//! Tensor arithmetic, activations, initializers and the seeded generator.

pub mod activations;
pub mod init;
mod rng;
mod scalar;
mod tensor;

pub use activations::{relu, sigmoid, softmax, tanh};
pub use init::{init_he_uniform, init_truncated_normal};
pub use rng::SeededRng;
pub use scalar::{Precision, Scalar};
pub use tensor::Tensor;
