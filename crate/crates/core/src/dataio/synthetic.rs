//! Seeded synthetic flows with a class-dependent temporal pattern, for tests,
//! examples and smoke runs without the real capture.

use std::io::Write;

use crate::dataio::csv_stream::FlowRecord;
use crate::dataio::features::{DEFAULT_FEATURES, FEATURE_COUNT};
use crate::dataio::labels::NUM_CLASSES;
use crate::error::{Error, Result};
use crate::numerics::SeededRng;

/// Label text written for each class by [`write_bot_iot_csv`].
pub const CLASS_LABEL_TEXT: [(&str, &str); NUM_CLASSES] = [
    ("Normal", "Normal"),
    ("DDoS", "TCP"),
    ("DDoS", "UDP"),
    ("DoS", "HTTP"),
    ("Reconnaissance", "OS_Fingerprint"),
    ("Theft", "Data_Exfiltration"),
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticConfig {
    pub samples: usize,
    pub noise: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            samples: 1200,
            noise: 0.1,
            seed: 7,
        }
    }
}

/// Noise-free value of class `class` at step `t`, in [0.15, 0.85].
pub fn class_pattern(class: usize, t: usize) -> f64 {
    let freq = 1.0 + (class % 3) as f64;
    let phase = if class < 3 {
        0.0
    } else {
        std::f64::consts::FRAC_PI_2
    };
    let x = 2.0 * std::f64::consts::PI * freq * t as f64 / FEATURE_COUNT as f64 + phase;
    0.5 + 0.35 * x.sin()
}

/// Balanced classes (sample `i` has class `i % 6`), Gaussian noise, values
/// clamped to [0, 1].
pub fn generate(config: &SyntheticConfig) -> Vec<FlowRecord> {
    let mut rng = SeededRng::stream(config.seed, "synthetic");
    (0..config.samples)
        .map(|i| {
            let class = i % NUM_CLASSES;
            let features = (0..FEATURE_COUNT)
                .map(|t| {
                    (class_pattern(class, t) + config.noise * rng.standard_normal()).clamp(0.0, 1.0)
                })
                .collect();
            FlowRecord::new(features, Some(class))
        })
        .collect()
}

/// Per-column scale used when writing raw CSV values.
pub fn raw_scale(column: usize) -> f64 {
    10f64.powi((column % 4) as i32)
}

/// Writes records as a CSV with the default feature columns (values scaled
/// by [`raw_scale`]) plus `category` and `subcategory`.
pub fn write_bot_iot_csv<W: Write>(out: W, records: &[FlowRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = DEFAULT_FEATURES.to_vec();
    header.extend(["category", "subcategory"]);
    w.write_record(&header)?;
    let mut row = Vec::with_capacity(header.len());
    for r in records {
        if r.features.len() != FEATURE_COUNT {
            return Err(Error::FeatureLength {
                expected: FEATURE_COUNT,
                actual: r.features.len(),
            });
        }
        let label = r
            .label
            .filter(|&l| l < NUM_CLASSES)
            .ok_or_else(|| Error::Data("synthetic CSV rows need a class label".into()))?;
        row.clear();
        row.extend(
            r.features
                .iter()
                .enumerate()
                .map(|(k, v)| (v * raw_scale(k)).to_string()),
        );
        row.push(CLASS_LABEL_TEXT[label].0.to_string());
        row.push(CLASS_LABEL_TEXT[label].1.to_string());
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}
