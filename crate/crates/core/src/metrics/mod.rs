//! Confusion-matrix statistics: one-vs-rest per-class metrics and overall
//! aggregates, plus report serialization.

pub mod class_stats;
pub mod confusion;
pub mod overall;
pub mod report;

pub use class_stats::{auci_band, class_stats, f_beta, AuciBand, ClassStats};
pub use confusion::{BinaryCells, ConfusionMatrix};
pub use overall::{
    accuracy_ci, cohen_kappa, overall_stats, relative_classifier_information, OverallStats, Z_95,
};
pub use report::{report, MetricsReport, UNDEFINED};
