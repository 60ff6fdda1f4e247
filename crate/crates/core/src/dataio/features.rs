use crate::error::{Error, Result};

/// Number of flow features fed to the model (one per time step).
pub const FEATURE_COUNT: usize = 16;

/// Default input columns: sixteen numeric per-flow fields of the UNSW 2018
/// IoT botnet CSV export. Override through the schema configuration.
pub const DEFAULT_FEATURES: [&str; FEATURE_COUNT] = [
    "proto_number",
    "pkts",
    "bytes",
    "state_number",
    "seq",
    "dur",
    "mean",
    "stddev",
    "sum",
    "min",
    "max",
    "spkts",
    "dpkts",
    "sbytes",
    "dbytes",
    "rate",
];

/// Ordered, unfitted feature selection. Cannot transform values; fit it
/// first with [`fit_normalizer`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSpec {
    names: Vec<String>,
}

impl Default for FeatureSpec {
    fn default() -> Self {
        FeatureSpec {
            names: DEFAULT_FEATURES.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl FeatureSpec {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let names: Vec<String> = names
            .iter()
            .map(|s| s.as_ref().trim().to_string())
            .collect();
        if names.len() != FEATURE_COUNT {
            return Err(Error::Config(format!(
                "feature list must name exactly {FEATURE_COUNT} columns, got {}",
                names.len()
            )));
        }
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() {
                return Err(Error::Config(format!("feature {i} has an empty name")));
            }
            if names[..i].contains(n) {
                return Err(Error::Config(format!("duplicate feature column `{n}`")));
            }
        }
        Ok(FeatureSpec { names })
    }

    /// Reads one column name per line; blank lines and `#` comments are ignored.
    pub fn from_list(text: &str) -> Result<Self> {
        let names: Vec<&str> = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .collect();
        Self::new(&names)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

/// Min/max of one feature column on the training data.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRange {
    pub name: String,
    pub min: f64,
    pub max: f64,
}

/// Feature selection with fitted min-max scaling.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedFeatures {
    ranges: Vec<FeatureRange>,
}

impl FittedFeatures {
    pub fn from_ranges(ranges: Vec<FeatureRange>) -> Result<Self> {
        let names: Vec<&str> = ranges.iter().map(|r| r.name.as_str()).collect();
        FeatureSpec::new(&names)?;
        if let Some(r) = ranges.iter().find(|r| !(r.min <= r.max)) {
            return Err(Error::Config(format!("feature `{}` has min > max", r.name)));
        }
        Ok(FittedFeatures { ranges })
    }

    pub fn ranges(&self) -> &[FeatureRange] {
        &self.ranges
    }

    pub fn spec(&self) -> FeatureSpec {
        FeatureSpec {
            names: self.ranges.iter().map(|r| r.name.clone()).collect(),
        }
    }

    /// Scales raw values to [0, 1]; values outside the training range are
    /// clamped and constant features map to 0.
    pub fn transform(&self, raw: &[f64]) -> Result<Vec<f64>> {
        if raw.len() != self.ranges.len() {
            return Err(Error::FeatureLength {
                expected: self.ranges.len(),
                actual: raw.len(),
            });
        }
        Ok(raw
            .iter()
            .zip(&self.ranges)
            .map(|(&v, r)| {
                let span = r.max - r.min;
                if span > 0.0 {
                    ((v - r.min) / span).clamp(0.0, 1.0)
                } else {
                    0.0
                }
            })
            .collect())
    }
}

/// Per-feature min/max over a single pass of training rows.
pub fn fit_normalizer<'a, I>(rows: I, spec: &FeatureSpec) -> Result<FittedFeatures>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let n = spec.names().len();
    let mut min = vec![f64::INFINITY; n];
    let mut max = vec![f64::NEG_INFINITY; n];
    let mut seen = 0u64;
    for row in rows {
        if row.len() != n {
            return Err(Error::FeatureLength {
                expected: n,
                actual: row.len(),
            });
        }
        for ((lo, hi), &v) in min.iter_mut().zip(max.iter_mut()).zip(row) {
            *lo = lo.min(v);
            *hi = hi.max(v);
        }
        seen += 1;
    }
    if seen == 0 {
        return Err(Error::Data(
            "cannot fit feature scaling on zero rows".into(),
        ));
    }
    let ranges = spec
        .names()
        .iter()
        .zip(min.into_iter().zip(max))
        .map(|(name, (min, max))| {
            if min == max {
                log::warn!("feature `{name}` is constant ({min}) in the training data; it will be scaled to 0");
            }
            FeatureRange {
                name: name.clone(),
                min,
                max,
            }
        })
        .collect();
    Ok(FittedFeatures { ranges })
}
