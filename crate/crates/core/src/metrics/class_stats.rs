use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::metrics::confusion::{BinaryCells, ConfusionMatrix};

/// Verbal interpretation of an AUC value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum AuciBand {
    Poor,
    Fair,
    Good,
    VeryGood,
    Excellent,
}

impl AuciBand {
    pub fn label(self) -> &'static str {
        match self {
            AuciBand::Poor => "Poor",
            AuciBand::Fair => "Fair",
            AuciBand::Good => "Good",
            AuciBand::VeryGood => "Very Good",
            AuciBand::Excellent => "Excellent",
        }
    }
}

impl fmt::Display for AuciBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for AuciBand {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            AuciBand::Poor,
            AuciBand::Fair,
            AuciBand::Good,
            AuciBand::VeryGood,
            AuciBand::Excellent,
        ]
        .into_iter()
        .find(|b| b.label() == s)
        .ok_or_else(|| Error::Data(format!("unknown AUC band `{s}`")))
    }
}

pub fn auci_band(auc: f64) -> Result<AuciBand> {
    if !(0.0..=1.0).contains(&auc) {
        return Err(Error::Numeric(format!("AUC {auc} outside [0, 1]")));
    }
    Ok(match auc {
        a if a < 0.6 => AuciBand::Poor,
        a if a < 0.7 => AuciBand::Fair,
        a if a < 0.8 => AuciBand::Good,
        a if a < 0.9 => AuciBand::VeryGood,
        _ => AuciBand::Excellent,
    })
}

/// One-vs-rest statistics of a single class. `None` marks a value whose
/// denominator is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassStats {
    pub cells: BinaryCells,
    pub acc: f64,
    pub err: f64,
    pub tpr: Option<f64>,
    pub tnr: Option<f64>,
    pub precision: Option<f64>,
    pub f1: f64,
    pub agf: Option<f64>,
    pub agm: Option<f64>,
    pub auc: Option<f64>,
    pub auci: Option<AuciBand>,
    pub youden: Option<f64>,
    pub dind: Option<f64>,
    pub sind: Option<f64>,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// F-beta score; `None` when every denominator term is zero.
pub fn f_beta(cells: &BinaryCells, beta: f64) -> Option<f64> {
    let b2 = beta * beta;
    let tp = cells.tp as f64;
    let den = (1.0 + b2) * tp + b2 * cells.fn_ as f64 + cells.fp as f64;
    (den > 0.0).then(|| (1.0 + b2) * tp / den)
}

impl ClassStats {
    pub fn from_cells(cells: BinaryCells) -> Result<Self> {
        let n = cells.total();
        if n == 0 {
            return Err(Error::Data(
                "class statistics need a nonempty population".into(),
            ));
        }
        let BinaryCells { tp, fp, fn_, tn } = cells;
        let acc = (tp + tn) as f64 / n as f64;
        let tpr = ratio(tp, tp + fn_);
        let tnr = ratio(tn, tn + fp);
        let precision = ratio(tp, tp + fp);
        let f1 = if tp == 0 {
            0.0
        } else {
            2.0 * tp as f64 / (2 * tp + fp + fn_) as f64
        };
        let agf = if tp == 0 {
            Some(0.0)
        } else {
            match (f_beta(&cells, 2.0), f_beta(&cells.swapped(), 0.5)) {
                (Some(f2), Some(inv)) => Some((f2 * inv).sqrt()),
                _ => None,
            }
        };
        let nn = (tn + fp) as f64 / n as f64;
        let agm = match (tpr, tnr) {
            (Some(0.0), _) => Some(0.0),
            (Some(r), Some(s)) => Some(((r * s).sqrt() + s * nn) / (1.0 + nn)),
            _ => None,
        };
        let both = tpr.zip(tnr);
        let auc = both.map(|(r, s)| (r + s) / 2.0);
        let dind = both.map(|(r, s)| ((1.0 - r).powi(2) + (1.0 - s).powi(2)).sqrt());
        Ok(ClassStats {
            cells,
            acc,
            err: 1.0 - acc,
            tpr,
            tnr,
            precision,
            f1,
            agf,
            agm,
            auc,
            auci: auc.map(auci_band).transpose()?,
            youden: auc.map(|a| 2.0 * a - 1.0),
            dind,
            sind: dind.map(|d| 1.0 - d / std::f64::consts::SQRT_2),
        })
    }
}

pub fn class_stats(cm: &ConfusionMatrix, class: usize) -> Result<ClassStats> {
    if class >= cm.classes() {
        return Err(Error::Data(format!(
            "class {class} outside 0..{}",
            cm.classes()
        )));
    }
    ClassStats::from_cells(cm.cells(class))
}
