//! Report assembly and its two text forms: a `key=value` tree that parses
//! back losslessly, and a per-class table with one metric per row.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::metrics::class_stats::{class_stats, AuciBand, ClassStats};
use crate::metrics::confusion::{BinaryCells, ConfusionMatrix};
use crate::metrics::overall::{overall_stats, OverallStats};

/// Rendering of an undefined value.
pub const UNDEFINED: &str = "None";

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub class_names: Vec<String>,
    pub overall: OverallStats,
    pub classes: Vec<ClassStats>,
}

pub fn report(cm: &ConfusionMatrix, class_names: &[&str]) -> Result<MetricsReport> {
    let k = cm.classes();
    let names = (0..k)
        .map(|c| {
            class_names
                .get(c)
                .map_or_else(|| format!("class{c}"), |s| s.to_string())
        })
        .collect();
    Ok(MetricsReport {
        class_names: names,
        overall: overall_stats(cm)?,
        classes: (0..k).map(|c| class_stats(cm, c)).collect::<Result<_>>()?,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| UNDEFINED.to_string(), |v| v.to_string())
}

fn rounded(v: Option<f64>) -> String {
    v.map_or_else(|| UNDEFINED.to_string(), |v| format!("{v:.5}"))
}

fn class_fields(s: &ClassStats) -> Vec<(&'static str, String)> {
    vec![
        ("tp", s.cells.tp.to_string()),
        ("fp", s.cells.fp.to_string()),
        ("fn", s.cells.fn_.to_string()),
        ("tn", s.cells.tn.to_string()),
        ("acc", s.acc.to_string()),
        ("err", s.err.to_string()),
        ("tpr", opt(s.tpr)),
        ("tnr", opt(s.tnr)),
        ("precision", opt(s.precision)),
        ("f1", s.f1.to_string()),
        ("agf", opt(s.agf)),
        ("agm", opt(s.agm)),
        ("auc", opt(s.auc)),
        (
            "auci",
            s.auci
                .map_or_else(|| UNDEFINED.to_string(), |b| b.to_string()),
        ),
        ("youden", opt(s.youden)),
        ("dind", opt(s.dind)),
        ("sind", opt(s.sind)),
    ]
}

fn overall_fields(o: &OverallStats) -> Vec<(&'static str, String)> {
    vec![
        ("population", o.population.to_string()),
        ("accuracy", o.accuracy.to_string()),
        ("error", o.error.to_string()),
        ("ci_lower", o.ci_lower.to_string()),
        ("ci_upper", o.ci_upper.to_string()),
        ("f1_macro", o.f1_macro.to_string()),
        ("f1_micro", o.f1_micro.to_string()),
        ("f1_weighted", o.f1_weighted.to_string()),
        ("kappa", opt(o.kappa)),
        ("hamming", o.hamming.to_string()),
        ("rci", o.rci.to_string()),
    ]
}

impl MetricsReport {
    /// `overall.accuracy=...`, `class.2.precision=...` lines.
    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        for (k, v) in overall_fields(&self.overall) {
            let _ = writeln!(out, "overall.{k}={v}");
        }
        for (i, (name, s)) in self.class_names.iter().zip(&self.classes).enumerate() {
            let _ = writeln!(out, "class.{i}.name={name}");
            for (k, v) in class_fields(s) {
                let _ = writeln!(out, "class.{i}.{k}={v}");
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Data(format!("report line {}: expected key=value", no + 1))
            })?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        let fields = Fields(&map);
        let overall = OverallStats {
            population: fields.num("overall.population")?,
            accuracy: fields.num("overall.accuracy")?,
            error: fields.num("overall.error")?,
            ci_lower: fields.num("overall.ci_lower")?,
            ci_upper: fields.num("overall.ci_upper")?,
            f1_macro: fields.num("overall.f1_macro")?,
            f1_micro: fields.num("overall.f1_micro")?,
            f1_weighted: fields.num("overall.f1_weighted")?,
            kappa: fields.opt("overall.kappa")?,
            hamming: fields.num("overall.hamming")?,
            rci: fields.num("overall.rci")?,
        };
        let mut class_names = Vec::new();
        let mut classes = Vec::new();
        for i in 0.. {
            let Some(name) = map.get(&format!("class.{i}.name")) else {
                break;
            };
            let key = |k: &str| format!("class.{i}.{k}");
            class_names.push(name.clone());
            classes.push(ClassStats {
                cells: BinaryCells::new(
                    fields.num(&key("tp"))?,
                    fields.num(&key("fp"))?,
                    fields.num(&key("fn"))?,
                    fields.num(&key("tn"))?,
                ),
                acc: fields.num(&key("acc"))?,
                err: fields.num(&key("err"))?,
                tpr: fields.opt(&key("tpr"))?,
                tnr: fields.opt(&key("tnr"))?,
                precision: fields.opt(&key("precision"))?,
                f1: fields.num(&key("f1"))?,
                agf: fields.opt(&key("agf"))?,
                agm: fields.opt(&key("agm"))?,
                auc: fields.opt(&key("auc"))?,
                auci: fields.opt::<AuciBand>(&key("auci"))?,
                youden: fields.opt(&key("youden"))?,
                dind: fields.opt(&key("dind"))?,
                sind: fields.opt(&key("sind"))?,
            });
        }
        Ok(MetricsReport {
            class_names,
            overall,
            classes,
        })
    }

    /// One row per metric, one column per class, values at five decimals.
    pub fn to_table(&self) -> String {
        let mut rows: Vec<(String, Vec<String>)> = Vec::new();
        let mut push = |label: &str, f: &dyn Fn(&ClassStats) -> String| {
            rows.push((label.to_string(), self.classes.iter().map(f).collect()));
        };
        push("ACC", &|s| rounded(Some(s.acc)));
        push("AGF", &|s| rounded(s.agf));
        push("AGM", &|s| rounded(s.agm));
        push("AUC", &|s| rounded(s.auc));
        push("AUCI", &|s| {
            s.auci.map_or_else(|| UNDEFINED.into(), |b| b.to_string())
        });
        push("ERR", &|s| rounded(Some(s.err)));
        push("F1", &|s| rounded(Some(s.f1)));
        push("Precision", &|s| rounded(s.precision));
        push("TPR", &|s| rounded(s.tpr));
        push("TNR", &|s| rounded(s.tnr));
        push("FN", &|s| s.cells.fn_.to_string());
        push("FP", &|s| s.cells.fp.to_string());
        push("TP", &|s| s.cells.tp.to_string());
        push("TN", &|s| s.cells.tn.to_string());
        push("Youden", &|s| rounded(s.youden));
        push("dInd", &|s| rounded(s.dind));
        push("sInd", &|s| rounded(s.sind));

        let label_w = rows.iter().map(|(l, _)| l.len()).max().unwrap_or(0).max(6);
        let col_w: Vec<usize> = (0..self.classes.len())
            .map(|c| {
                rows.iter()
                    .map(|(_, v)| v[c].len())
                    .chain([self.class_names[c].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let mut out = format!("{:label_w$}", "Metric");
        for (name, w) in self.class_names.iter().zip(&col_w) {
            let _ = write!(out, "  {name:>w$}");
        }
        out.push('\n');
        for (label, vals) in &rows {
            let _ = write!(out, "{label:label_w$}");
            for (v, w) in vals.iter().zip(&col_w) {
                let _ = write!(out, "  {v:>w$}");
            }
            out.push('\n');
        }
        out
    }
}

struct Fields<'a>(&'a BTreeMap<String, String>);

impl Fields<'_> {
    fn raw(&self, key: &str) -> Result<&str> {
        self.0
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| Error::Data(format!("report is missing `{key}`")))
    }

    fn num<V: std::str::FromStr>(&self, key: &str) -> Result<V> {
        let v = self.raw(key)?;
        v.parse()
            .map_err(|_| Error::Data(format!("report value `{key}={v}` is not a number")))
    }

    fn opt<V: std::str::FromStr>(&self, key: &str) -> Result<Option<V>> {
        match self.raw(key)? {
            UNDEFINED => Ok(None),
            v => v
                .parse()
                .map(Some)
                .map_err(|_| Error::Data(format!("report value `{key}={v}` cannot be parsed"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ConfusionMatrix {
        ConfusionMatrix::from_counts(vec![vec![50, 2, 0], vec![3, 40, 0], vec![0, 0, 0]]).unwrap()
    }

    #[test]
    fn key_values_round_trip() {
        let r = report(&sample(), &["a", "b", "c"]).unwrap();
        let text = r.to_key_values();
        assert!(text.contains("class.2.precision=None"), "{text}");
        assert_eq!(MetricsReport::parse(&text).unwrap(), r);
    }

    #[test]
    fn shape_and_default_names() {
        let r = report(&sample(), &["a"]).unwrap();
        assert_eq!(r.classes.len(), 3);
        assert_eq!(r.class_names, ["a", "class1", "class2"]);
    }

    #[test]
    fn table_layout() {
        let t = report(&sample(), &["a", "b", "c"]).unwrap().to_table();
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 18);
        assert!(lines[0].starts_with("Metric"));
        let precision = lines.iter().find(|l| l.starts_with("Precision")).unwrap();
        assert!(precision.ends_with("None"), "{precision}");
    }

    #[test]
    fn parse_errors_name_the_key() {
        let err = MetricsReport::parse("overall.accuracy=0.5\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("overall.population"), "{err}");
        assert!(MetricsReport::parse("garbage\n").is_err());
    }
}
