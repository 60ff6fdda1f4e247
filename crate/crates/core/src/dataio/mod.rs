//! Flow CSV ingestion, feature scaling, label encoding and batching.

pub mod batches;
pub mod csv_stream;
pub mod features;
pub mod labels;
pub mod synthetic;

pub use batches::{batches, Batch, Batches};
pub use csv_stream::{
    stream_csv, ClassDistribution, CsvSchema, FlowRecord, FlowStream, IngestStats, LabelSource,
    RawFlow, RowPolicy,
};
pub use features::{
    fit_normalizer, FeatureRange, FeatureSpec, FittedFeatures, DEFAULT_FEATURES, FEATURE_COUNT,
};
pub use labels::{class_name, encode_label, LabelMap, CLASS_NAMES, NUM_CLASSES};
pub use synthetic::{generate, write_bot_iot_csv, SyntheticConfig};
