//! Single-pass CSV ingestion.
//!
//! The reader keeps one reusable record buffer, so memory does not grow with
//! the file length. Rows that fail to parse are either skipped and counted or
//! turned into an error, depending on [`RowPolicy`].

use std::fmt;
use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;

use csv::StringRecord;

use crate::dataio::features::{FeatureSpec, FittedFeatures};
use crate::dataio::labels::{encode_label, LabelMap, NUM_CLASSES};
use crate::error::{Error, Result};

/// How rows that cannot be parsed are handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RowPolicy {
    #[default]
    Skip,
    Fail,
}

/// Where the class label comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelSource {
    /// Category and subcategory text columns, mapped through a [`LabelMap`].
    Categories {
        category: String,
        subcategory: String,
    },
    /// A column that already holds the class index.
    ClassIndex { column: String },
    /// No label (inference input).
    Unlabeled,
}

impl Default for LabelSource {
    fn default() -> Self {
        LabelSource::Categories {
            category: "category".into(),
            subcategory: "subcategory".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvSchema {
    pub delimiter: u8,
    pub features: FeatureSpec,
    pub labels: LabelSource,
    pub label_map: LabelMap,
    pub row_policy: RowPolicy,
}

impl Default for CsvSchema {
    fn default() -> Self {
        CsvSchema {
            delimiter: b',',
            features: FeatureSpec::default(),
            labels: LabelSource::default(),
            label_map: LabelMap::default(),
            row_policy: RowPolicy::Skip,
        }
    }
}

/// Unscaled feature values of one flow.
#[derive(Debug, Clone, PartialEq)]
pub struct RawFlow {
    pub features: Vec<f64>,
    pub label: Option<usize>,
}

/// Scaled flow: every feature in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct FlowRecord {
    pub features: Vec<f64>,
    pub label: Option<usize>,
}

impl FlowRecord {
    pub fn new(features: Vec<f64>, label: Option<usize>) -> Self {
        FlowRecord { features, label }
    }
}

/// Counts of records per class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ClassDistribution {
    pub counts: [u64; NUM_CLASSES],
}

impl ClassDistribution {
    pub fn add(&mut self, class: usize) {
        if let Some(c) = self.counts.get_mut(class) {
            *c += 1;
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn of(records: &[FlowRecord]) -> Self {
        let mut d = ClassDistribution::default();
        records
            .iter()
            .filter_map(|r| r.label)
            .for_each(|c| d.add(c));
        d
    }
}

impl fmt::Display for ClassDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (class, count) in self.counts.iter().enumerate() {
            writeln!(
                f,
                "class {class} ({}): {count}",
                crate::dataio::class_name(class)
            )?;
        }
        writeln!(f, "total: {}", self.total())
    }
}

const KEPT_ERRORS: usize = 10;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IngestStats {
    /// Data rows seen (header excluded).
    pub rows: u64,
    pub records: u64,
    pub skipped: u64,
    /// The first few skip reasons.
    pub skip_reasons: Vec<String>,
    pub classes: ClassDistribution,
}

enum LabelColumns {
    Categories(usize, usize),
    Index(usize),
    None,
}

pub struct FlowStream<R: Read> {
    reader: csv::Reader<R>,
    feature_cols: Vec<usize>,
    label_cols: LabelColumns,
    label_map: LabelMap,
    policy: RowPolicy,
    record: StringRecord,
    values: Vec<f64>,
    stats: IngestStats,
    done: bool,
}

/// Opens `path` and resolves the schema against its header row.
pub fn stream_csv(
    path: impl AsRef<Path>,
    schema: &CsvSchema,
) -> Result<FlowStream<BufReader<File>>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    FlowStream::from_reader(BufReader::new(file), schema, &path.display().to_string())
}

fn parse_number(cell: &str) -> Option<f64> {
    let cell = cell.trim();
    let v = match cell.strip_prefix("0x").or_else(|| cell.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16).ok()? as f64,
        None => cell.parse::<f64>().ok()?,
    };
    v.is_finite().then_some(v)
}

impl<R: Read> FlowStream<R> {
    pub fn from_reader(reader: R, schema: &CsvSchema, source: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .delimiter(schema.delimiter)
            .flexible(true)
            .from_reader(reader);
        let headers = reader.headers()?.clone();
        let find = |name: &str| headers.iter().position(|h| h.trim() == name);

        let mut missing = Vec::new();
        let mut feature_cols = Vec::with_capacity(schema.features.names().len());
        for name in schema.features.names() {
            match find(name) {
                Some(i) => feature_cols.push(i),
                None => missing.push(name.clone()),
            }
        }
        let mut need = |name: &str| match find(name) {
            Some(i) => i,
            None => {
                missing.push(name.to_string());
                0
            }
        };
        let label_cols = match &schema.labels {
            LabelSource::Categories {
                category,
                subcategory,
            } => LabelColumns::Categories(need(category), need(subcategory)),
            LabelSource::ClassIndex { column } => LabelColumns::Index(need(column)),
            LabelSource::Unlabeled => LabelColumns::None,
        };
        if !missing.is_empty() {
            return Err(Error::MissingColumns {
                path: source.to_string(),
                missing,
            });
        }
        Ok(FlowStream {
            reader,
            values: Vec::with_capacity(feature_cols.len()),
            feature_cols,
            label_cols,
            label_map: schema.label_map.clone(),
            policy: schema.row_policy,
            record: StringRecord::new(),
            stats: IngestStats::default(),
            done: false,
        })
    }

    pub fn stats(&self) -> &IngestStats {
        &self.stats
    }

    /// Applies fitted scaling to every record of the stream.
    pub fn normalized(self, features: &FittedFeatures) -> Normalized<'_, R> {
        Normalized {
            inner: self,
            features,
        }
    }

    /// Drains the stream, returning every record and the final counts.
    pub fn collect_all(mut self) -> Result<(Vec<RawFlow>, IngestStats)> {
        let mut out = Vec::new();
        for r in self.by_ref() {
            out.push(r?);
        }
        Ok((out, self.stats))
    }

    fn parse_current(&mut self) -> std::result::Result<RawFlow, String> {
        let rec = &self.record;
        self.values.clear();
        for &col in &self.feature_cols {
            let cell = rec.get(col).ok_or_else(|| format!("missing field {col}"))?;
            let v = parse_number(cell)
                .ok_or_else(|| format!("non-numeric feature value `{cell}` in column {col}"))?;
            self.values.push(v);
        }
        let field = |i: usize| rec.get(i).ok_or_else(|| format!("missing field {i}"));
        let label = match self.label_cols {
            LabelColumns::Categories(c, s) => Some(
                encode_label(field(c)?, field(s)?, &self.label_map).map_err(|e| e.to_string())?,
            ),
            LabelColumns::Index(i) => {
                let cell = field(i)?.trim();
                let class: usize = cell
                    .parse()
                    .map_err(|_| format!("bad class index `{cell}`"))?;
                if class >= NUM_CLASSES {
                    return Err(format!("class index {class} out of range"));
                }
                Some(class)
            }
            LabelColumns::None => None,
        };
        Ok(RawFlow {
            features: self.values.clone(),
            label,
        })
    }
}

impl<R: Read> Iterator for FlowStream<R> {
    type Item = Result<RawFlow>;

    fn next(&mut self) -> Option<Self::Item> {
        while !self.done {
            match self.reader.read_record(&mut self.record) {
                Ok(false) => self.done = true,
                Ok(true) => {
                    self.stats.rows += 1;
                    let row = self.stats.rows;
                    match self.parse_current() {
                        Ok(flow) => {
                            self.stats.records += 1;
                            if let Some(c) = flow.label {
                                self.stats.classes.add(c);
                            }
                            return Some(Ok(flow));
                        }
                        Err(message) => match self.policy {
                            RowPolicy::Skip => {
                                self.stats.skipped += 1;
                                if self.stats.skip_reasons.len() < KEPT_ERRORS {
                                    self.stats
                                        .skip_reasons
                                        .push(format!("row {row}: {message}"));
                                }
                            }
                            RowPolicy::Fail => {
                                self.done = true;
                                return Some(Err(Error::Row { row, message }));
                            }
                        },
                    }
                }
                Err(e) if e.is_io_error() => {
                    self.done = true;
                    return Some(Err(e.into()));
                }
                Err(e) => {
                    self.stats.rows += 1;
                    let row = self.stats.rows;
                    match self.policy {
                        RowPolicy::Skip => {
                            self.stats.skipped += 1;
                            if self.stats.skip_reasons.len() < KEPT_ERRORS {
                                self.stats.skip_reasons.push(format!("row {row}: {e}"));
                            }
                        }
                        RowPolicy::Fail => {
                            self.done = true;
                            return Some(Err(Error::Row {
                                row,
                                message: e.to_string(),
                            }));
                        }
                    }
                }
            }
        }
        None
    }
}

pub struct Normalized<'a, R: Read> {
    inner: FlowStream<R>,
    features: &'a FittedFeatures,
}

impl<R: Read> Normalized<'_, R> {
    pub fn stats(&self) -> &IngestStats {
        self.inner.stats()
    }
}

impl<R: Read> Iterator for Normalized<'_, R> {
    type Item = Result<FlowRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        let raw = self.inner.next()?;
        Some(raw.and_then(|r| {
            Ok(FlowRecord {
                features: self.features.transform(&r.features)?,
                label: r.label,
            })
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataio::features::{fit_normalizer, DEFAULT_FEATURES};

    fn header() -> String {
        let mut h: Vec<&str> = vec!["pkSeqID"];
        h.extend(DEFAULT_FEATURES);
        h.extend(["attack", "category", "subcategory"]);
        h.join(",")
    }

    fn row(id: usize, base: f64, cat: &str, sub: &str) -> String {
        let vals: Vec<String> = (0..16).map(|i| format!("{}", base + i as f64)).collect();
        format!("{id},{},1,{cat},{sub}", vals.join(","))
    }

    fn fixture() -> String {
        [
            header(),
            row(1, 0.0, "Normal", "Normal"),
            row(2, 10.0, "DDoS", "TCP"),
            row(3, 20.0, "DoS", "HTTP"),
        ]
        .join("\n")
            + "\n"
    }

    fn open<'a>(text: &'a str, schema: &CsvSchema) -> Result<FlowStream<&'a [u8]>> {
        FlowStream::from_reader(text.as_bytes(), schema, "fixture")
    }

    #[test]
    fn three_row_fixture() {
        let (flows, stats) = open(&fixture(), &CsvSchema::default())
            .unwrap()
            .collect_all()
            .unwrap();
        assert_eq!(flows.len(), 3);
        assert_eq!(flows[1].features[0], 10.0);
        assert_eq!(flows[1].features[15], 25.0);
        assert_eq!(
            flows.iter().map(|f| f.label.unwrap()).collect::<Vec<_>>(),
            [0, 1, 3]
        );
        assert_eq!(stats.classes.total(), 3);
        assert_eq!(stats.skipped, 0);
    }

    #[test]
    fn corrupt_row_skip_and_fail() {
        let mut text = fixture();
        text = text.replacen(",35,", ",oops,", 1);
        let (flows, stats) = open(&text, &CsvSchema::default())
            .unwrap()
            .collect_all()
            .unwrap();
        assert_eq!(flows.len(), 2);
        assert_eq!(stats.skipped, 1);
        assert!(stats.skip_reasons[0].contains("oops"));

        let schema = CsvSchema {
            row_policy: RowPolicy::Fail,
            ..CsvSchema::default()
        };
        let err = open(&text, &schema).unwrap().collect_all().unwrap_err();
        assert!(matches!(err, Error::Row { row: 3, .. }), "{err}");
    }

    #[test]
    fn short_row_and_unknown_label_are_row_errors() {
        let text = fixture() + "9,1,2\n" + &row(10, 0.0, "Theft", "Keylogging") + "\n";
        let (flows, stats) = open(&text, &CsvSchema::default())
            .unwrap()
            .collect_all()
            .unwrap();
        assert_eq!(flows.len(), 3);
        assert_eq!(stats.skipped, 2);
        assert!(stats.skip_reasons[1].contains("Keylogging"));
    }

    #[test]
    fn missing_columns_are_listed() {
        let text = fixture()
            .replacen("sbytes", "sbytez", 1)
            .replacen("subcategory", "sub", 1);
        match open(&text, &CsvSchema::default()) {
            Err(Error::MissingColumns { missing, .. }) => {
                assert_eq!(missing, ["sbytes", "subcategory"])
            }
            Err(e) => panic!("unexpected error {e}"),
            Ok(_) => panic!("expected missing columns"),
        }
    }

    #[test]
    fn unlabeled_and_index_labels() {
        let schema = CsvSchema {
            labels: LabelSource::Unlabeled,
            ..CsvSchema::default()
        };
        let (flows, _) = open(&fixture(), &schema).unwrap().collect_all().unwrap();
        assert!(flows.iter().all(|f| f.label.is_none()));

        let schema = CsvSchema {
            labels: LabelSource::ClassIndex {
                column: "attack".into(),
            },
            ..CsvSchema::default()
        };
        let (flows, _) = open(&fixture(), &schema).unwrap().collect_all().unwrap();
        assert!(flows.iter().all(|f| f.label == Some(1)));
    }

    #[test]
    fn normalized_stream_is_in_unit_interval() {
        let (raw, _) = open(&fixture(), &CsvSchema::default())
            .unwrap()
            .collect_all()
            .unwrap();
        let fitted = fit_normalizer(
            raw.iter().map(|r| r.features.as_slice()),
            &FeatureSpec::default(),
        )
        .unwrap();
        let records: Vec<FlowRecord> = open(&fixture(), &CsvSchema::default())
            .unwrap()
            .normalized(&fitted)
            .collect::<Result<_>>()
            .unwrap();
        assert_eq!(records[1].features, vec![0.5; 16]);
        assert!(records.iter().all(|r| r.features.len() == 16));
    }

    #[test]
    fn semicolon_delimiter_and_hex() {
        let text = fixture().replace(',', ";").replacen(";10;", ";0xA;", 1);
        let schema = CsvSchema {
            delimiter: b';',
            ..CsvSchema::default()
        };
        let (flows, _) = open(&text, &schema).unwrap().collect_all().unwrap();
        assert_eq!(flows[0].features[10], 10.0);
    }
}
