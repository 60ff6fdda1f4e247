//! Cross-entropy, RMSProp, the training loop, evaluation and the gradient
//! check.

pub mod config;
pub mod fit;
pub mod gradcheck;
pub mod loss;
pub mod optimizer;
pub mod progress;

pub use config::TrainConfig;
pub use fit::{evaluate, fit, predicted_classes, split_indices};
pub use gradcheck::{gradient_check, GradCheckConfig, GradCheckReport, Mutation, Probe};
pub use loss::{cross_entropy, PROB_FLOOR};
pub use optimizer::{rmsprop_step, RmsProp, RmsPropState};
pub use progress::{EpochStats, LineSink, NullSink, ProgressSink};
