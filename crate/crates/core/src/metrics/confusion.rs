use crate::error::{Error, Result};

/// `counts[i][j]`: samples of actual class `i` predicted as class `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    counts: Vec<Vec<u64>>,
}

/// One-vs-rest cells for a single class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BinaryCells {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

impl BinaryCells {
    pub fn new(tp: u64, fp: u64, fn_: u64, tn: u64) -> Self {
        BinaryCells { tp, fp, fn_, tn }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    /// Cells of the complementary class: TP and TN swap, FP and FN swap.
    pub fn swapped(&self) -> Self {
        BinaryCells {
            tp: self.tn,
            fp: self.fn_,
            fn_: self.fp,
            tn: self.tp,
        }
    }
}

impl ConfusionMatrix {
    pub fn new(classes: usize) -> Self {
        ConfusionMatrix {
            counts: vec![vec![0; classes]; classes],
        }
    }

    pub fn from_counts(counts: Vec<Vec<u64>>) -> Result<Self> {
        let k = counts.len();
        if k == 0 {
            return Err(Error::Data(
                "confusion matrix needs at least one class".into(),
            ));
        }
        if let Some(row) = counts.iter().position(|r| r.len() != k) {
            return Err(Error::Data(format!(
                "confusion matrix row {row} has {} entries, expected {k}",
                counts[row].len()
            )));
        }
        Ok(ConfusionMatrix { counts })
    }

    /// Tallies paired actual/predicted labels.
    pub fn from_labels(classes: usize, actual: &[usize], predicted: &[usize]) -> Result<Self> {
        if actual.len() != predicted.len() {
            return Err(Error::Data(format!(
                "{} actual labels but {} predictions",
                actual.len(),
                predicted.len()
            )));
        }
        let mut cm = ConfusionMatrix::new(classes);
        for (&a, &p) in actual.iter().zip(predicted) {
            cm.record(a, p)?;
        }
        Ok(cm)
    }

    pub fn record(&mut self, actual: usize, predicted: usize) -> Result<()> {
        let k = self.classes();
        if actual >= k || predicted >= k {
            return Err(Error::Data(format!(
                "label pair ({actual}, {predicted}) outside 0..{k}"
            )));
        }
        self.counts[actual][predicted] += 1;
        Ok(())
    }

    pub fn classes(&self) -> usize {
        self.counts.len()
    }

    pub fn get(&self, actual: usize, predicted: usize) -> u64 {
        self.counts[actual][predicted]
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.classes()).map(|i| self.counts[i][i]).sum()
    }

    /// Actual-class totals.
    pub fn row_sums(&self) -> Vec<u64> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    /// Predicted-class totals.
    pub fn col_sums(&self) -> Vec<u64> {
        (0..self.classes())
            .map(|j| self.counts.iter().map(|r| r[j]).sum())
            .collect()
    }

    pub fn cells(&self, class: usize) -> BinaryCells {
        let tp = self.counts[class][class];
        let fn_ = self.row_sums()[class] - tp;
        let fp = self.col_sums()[class] - tp;
        BinaryCells {
            tp,
            fp,
            fn_,
            tn: self.total() - tp - fp - fn_,
        }
    }

    /// Relabels class `i` as `perm[i]` on both axes.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let k = self.classes();
        let mut seen = vec![false; k];
        if perm.len() != k
            || perm
                .iter()
                .any(|&p| p >= k || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::Data(format!(
                "{perm:?} is not a permutation of 0..{k}"
            )));
        }
        let mut out = ConfusionMatrix::new(k);
        for i in 0..k {
            for j in 0..k {
                out.counts[perm[i]][perm[j]] = self.counts[i][j];
            }
        }
        Ok(out)
    }
}
