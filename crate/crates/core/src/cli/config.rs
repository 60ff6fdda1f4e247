//! Flat `key = value` run configuration. Command-line flags and their
//! `BOTNET_*` environment variables take precedence over the file.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::dataio::{CsvSchema, FeatureSpec, LabelSource, RowPolicy};
use crate::error::{Error, Result};
use crate::network::Architecture;
use crate::numerics::Precision;
use crate::training::{GradCheckConfig, TrainConfig};

/// Keys accepted in a config file.
pub const CONFIG_KEYS: &[&str] = &[
    "data",
    "weights",
    "report",
    "stats",
    "features",
    "seed",
    "epochs",
    "batch_size",
    "learning_rate",
    "rms_decay",
    "rms_epsilon",
    "validation_fraction",
    "stratified",
    "precision",
    "delimiter",
    "row_policy",
    "label_mode",
    "category_column",
    "subcategory_column",
    "class_column",
    "filters",
    "gru_units",
    "probes",
    "tolerance",
];

/// Every setting of one command run, after merging defaults, the config file
/// and command-line values.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub data: Option<PathBuf>,
    pub weights: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub stats: Option<PathBuf>,
    pub features: Option<PathBuf>,
    pub precision: Precision,
    pub train: TrainConfig,
    pub arch: Architecture,
    pub delimiter: u8,
    pub row_policy: RowPolicy,
    pub labels: LabelSource,
    pub gradcheck: GradCheckConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            data: None,
            weights: None,
            report: None,
            stats: None,
            features: None,
            precision: Precision::Double,
            train: TrainConfig::default(),
            arch: Architecture::default(),
            delimiter: b',',
            row_policy: RowPolicy::Skip,
            labels: LabelSource::default(),
            gradcheck: GradCheckConfig::default(),
        }
    }
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("config line {}: expected `key = value`", no + 1))
        })?;
        let key = k.trim().replace('-', "_");
        if !CONFIG_KEYS.contains(&key.as_str()) {
            return Err(Error::Config(format!(
                "config line {}: unknown key `{}`",
                no + 1,
                k.trim()
            )));
        }
        if out.insert(key, v.trim().to_string()).is_some() {
            return Err(Error::Config(format!(
                "config line {}: key `{}` repeated",
                no + 1,
                k.trim()
            )));
        }
    }
    Ok(out)
}

fn parse_value<V: std::str::FromStr>(key: &str, v: &str) -> Result<V> {
    v.parse()
        .map_err(|_| Error::Config(format!("invalid value `{v}` for `{key}`")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::Config(format!("invalid boolean `{v}` for `{key}`"))),
    }
}

pub fn parse_precision(v: &str) -> Result<Precision> {
    Precision::from_tag(v)
        .ok_or_else(|| Error::Config(format!("unknown precision `{v}`; use single or double")))
}

pub fn parse_delimiter(v: &str) -> Result<u8> {
    match v {
        "tab" | "\\t" => Ok(b'\t'),
        "comma" => Ok(b','),
        "semicolon" => Ok(b';'),
        s if s.len() == 1 && s.is_ascii() => Ok(s.as_bytes()[0]),
        _ => Err(Error::Config(format!(
            "delimiter `{v}` must be a single ASCII character"
        ))),
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = RunConfig::default();
        cfg.apply(&parse_config(&text)?)?;
        Ok(cfg)
    }

    /// Applies parsed key/value settings on top of the current values.
    pub fn apply(&mut self, map: &BTreeMap<String, String>) -> Result<()> {
        let mut mode = None;
        let mut category = None;
        let mut subcategory = None;
        let mut class_column = None;
        for (k, v) in map {
            match k.as_str() {
                "data" => self.data = Some(v.into()),
                "weights" => self.weights = Some(v.into()),
                "report" => self.report = Some(v.into()),
                "stats" => self.stats = Some(v.into()),
                "features" => self.features = Some(v.into()),
                "seed" => self.train.seed = parse_value(k, v)?,
                "epochs" => self.train.epochs = parse_value(k, v)?,
                "batch_size" => self.train.batch_size = parse_value(k, v)?,
                "learning_rate" => self.train.learning_rate = parse_value(k, v)?,
                "rms_decay" => self.train.rms_decay = parse_value(k, v)?,
                "rms_epsilon" => self.train.rms_epsilon = parse_value(k, v)?,
                "validation_fraction" => self.train.validation_fraction = parse_value(k, v)?,
                "stratified" => self.train.stratified = parse_bool(k, v)?,
                "precision" => self.precision = parse_precision(v)?,
                "delimiter" => self.delimiter = parse_delimiter(v)?,
                "row_policy" => {
                    self.row_policy = match v.as_str() {
                        "skip" => RowPolicy::Skip,
                        "fail" => RowPolicy::Fail,
                        _ => {
                            return Err(Error::Config(format!(
                                "row_policy must be skip or fail, got `{v}`"
                            )))
                        }
                    }
                }
                "label_mode" => mode = Some(v.clone()),
                "category_column" => category = Some(v.clone()),
                "subcategory_column" => subcategory = Some(v.clone()),
                "class_column" => class_column = Some(v.clone()),
                "filters" => self.arch.filters = parse_value(k, v)?,
                "gru_units" => self.arch.gru_units = parse_value(k, v)?,
                "probes" => self.gradcheck.probes = parse_value(k, v)?,
                "tolerance" => self.gradcheck.tolerance = parse_value(k, v)?,
                other => return Err(Error::Config(format!("unknown key `{other}`"))),
            }
        }
        let mode = mode.unwrap_or_else(|| match (&self.labels, &class_column) {
            (_, Some(_)) | (LabelSource::ClassIndex { .. }, None) => "index".into(),
            (LabelSource::Unlabeled, None) => "none".into(),
            _ => "categories".into(),
        });
        self.labels = match mode.as_str() {
            "categories" => {
                let (dc, ds) = match &self.labels {
                    LabelSource::Categories {
                        category,
                        subcategory,
                    } => (category.clone(), subcategory.clone()),
                    _ => ("category".into(), "subcategory".into()),
                };
                LabelSource::Categories {
                    category: category.unwrap_or(dc),
                    subcategory: subcategory.unwrap_or(ds),
                }
            }
            "index" => LabelSource::ClassIndex {
                column: class_column.unwrap_or_else(|| match &self.labels {
                    LabelSource::ClassIndex { column } => column.clone(),
                    _ => "class".into(),
                }),
            },
            "none" => LabelSource::Unlabeled,
            other => {
                return Err(Error::Config(format!(
                    "label_mode must be categories, index or none, got `{other}`"
                )))
            }
        };
        Ok(())
    }

    /// Feature list from `features`, or the default columns.
    pub fn feature_spec(&self) -> Result<FeatureSpec> {
        match &self.features {
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                FeatureSpec::from_list(&text)
            }
            None => Ok(FeatureSpec::default()),
        }
    }

    pub fn schema(&self, features: FeatureSpec, labels: LabelSource) -> CsvSchema {
        CsvSchema {
            delimiter: self.delimiter,
            features,
            labels,
            row_policy: self.row_policy,
            ..CsvSchema::default()
        }
    }

    pub fn require_data(&self) -> Result<&Path> {
        require_input(self.data.as_deref(), "--data")
    }

    pub fn require_weights(&self) -> Result<&Path> {
        require_input(self.weights.as_deref(), "--weights")
    }
}

fn require_input<'a>(path: Option<&'a Path>, flag: &str) -> Result<&'a Path> {
    let path = path.ok_or_else(|| Error::Config(format!("{flag} is required for this command")))?;
    if !path.is_file() {
        return Err(Error::io(
            path,
            std::io::Error::new(std::io::ErrorKind::NotFound, "input file not found"),
        ));
    }
    Ok(path)
}

/// Checks that an output path can be created.
pub fn check_output(path: &Path) -> Result<()> {
    let parent = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    if !parent.is_dir() {
        return Err(Error::io(
            path,
            std::io::Error::new(
                std::io::ErrorKind::NotFound,
                "output directory does not exist",
            ),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_values_apply() {
        let map = parse_config(
            "# run\nseed = 9\nepochs=2\nbatch-size = 5\nprecision = single\nstratified = yes\ndelimiter = ;\n",
        )
        .unwrap();
        let mut cfg = RunConfig::default();
        cfg.apply(&map).unwrap();
        assert_eq!(cfg.train.seed, 9);
        assert_eq!(cfg.train.epochs, 2);
        assert_eq!(cfg.train.batch_size, 5);
        assert_eq!(cfg.precision, Precision::Single);
        assert!(cfg.train.stratified);
        assert_eq!(cfg.delimiter, b';');
    }

    #[test]
    fn label_settings() {
        let mut cfg = RunConfig::default();
        cfg.apply(&parse_config("class_column = attack_class\n").unwrap())
            .unwrap();
        assert_eq!(
            cfg.labels,
            LabelSource::ClassIndex {
                column: "attack_class".into()
            }
        );
        cfg.apply(&parse_config("label_mode = categories\ncategory_column = cat\n").unwrap())
            .unwrap();
        assert_eq!(
            cfg.labels,
            LabelSource::Categories {
                category: "cat".into(),
                subcategory: "subcategory".into()
            }
        );
    }

    #[test]
    fn bad_files_rejected() {
        assert!(parse_config("colour = blue\n").is_err());
        assert!(parse_config("seed 3\n").is_err());
        assert!(parse_config("seed = 1\nseed = 2\n").is_err());
        let mut cfg = RunConfig::default();
        let err = cfg
            .apply(&parse_config("epochs = many\n").unwrap())
            .unwrap_err();
        assert!(err.to_string().contains("epochs"), "{err}");
        assert!(cfg
            .apply(&parse_config("precision = half\n").unwrap())
            .is_err());
    }

    #[test]
    fn missing_inputs_named() {
        let cfg = RunConfig::default();
        assert!(cfg
            .require_data()
            .unwrap_err()
            .to_string()
            .contains("--data"));
    }
}
