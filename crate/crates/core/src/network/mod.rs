//! The two-branch GRU + Conv1D model: parameters, passes, summary and the
//! weight manifest.

pub mod manifest;
pub mod model;
pub mod params;
pub mod summary;

pub use manifest::{load_weights, manifest_precision, save_weights, WeightFile};
pub use model::{backward, forward, predict, ForwardCache};
pub use params::{Architecture, NetworkGrads, NetworkParameters, ParamCount, ParamId};
pub use summary::{summary, ModelSummary, SummaryRow};
