use crate::error::{Error, Result};
use crate::metrics::class_stats::ClassStats;
use crate::metrics::confusion::ConfusionMatrix;

/// z for a two-sided 95% normal interval.
pub const Z_95: f64 = 1.96;

#[derive(Debug, Clone, PartialEq)]
pub struct OverallStats {
    pub population: u64,
    pub accuracy: f64,
    pub error: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub f1_macro: f64,
    pub f1_micro: f64,
    pub f1_weighted: f64,
    pub kappa: Option<f64>,
    pub hamming: f64,
    pub rci: f64,
}

/// Normal-approximation interval `acc ± z·sqrt(acc(1-acc)/n)`.
pub fn accuracy_ci(accuracy: f64, n: u64, z: f64) -> (f64, f64) {
    let half = z * (accuracy * (1.0 - accuracy) / n as f64).sqrt();
    (accuracy - half, accuracy + half)
}

/// Cohen's kappa from observed agreement and the two marginal count vectors.
/// `None` when chance agreement is 1.
pub fn cohen_kappa(p_o: f64, actual: &[u64], predicted: &[u64], n: u64) -> Option<f64> {
    let n2 = (n as f64) * (n as f64);
    let p_e: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(&a, &p)| a as f64 * p as f64)
        .sum::<f64>()
        / n2;
    (p_e < 1.0).then(|| (p_o - p_e) / (1.0 - p_e))
}

fn entropy(counts: impl IntoIterator<Item = u64>, n: f64) -> f64 {
    counts
        .into_iter()
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Mutual information between actual and predicted labels divided by the
/// entropy of the actual labels; 0 when that entropy is 0.
pub fn relative_classifier_information(cm: &ConfusionMatrix) -> f64 {
    let n = cm.total() as f64;
    let h_actual = entropy(cm.row_sums(), n);
    if h_actual <= 0.0 {
        return 0.0;
    }
    let h_pred = entropy(cm.col_sums(), n);
    let h_joint = entropy(cm.counts().iter().flatten().copied(), n);
    ((h_actual + h_pred - h_joint) / h_actual).clamp(0.0, 1.0)
}

pub fn overall_stats(cm: &ConfusionMatrix) -> Result<OverallStats> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::Data(
            "overall statistics need a nonempty confusion matrix".into(),
        ));
    }
    let n = total as f64;
    let trace = cm.trace();
    let accuracy = trace as f64 / n;
    let (ci_lower, ci_upper) = accuracy_ci(accuracy, total, Z_95);
    let support = cm.row_sums();
    let f1: Vec<f64> = (0..cm.classes())
        .map(|c| ClassStats::from_cells(cm.cells(c)).map(|s| s.f1))
        .collect::<Result<_>>()?;
    let f1_weighted = f1
        .iter()
        .zip(&support)
        .map(|(f, &s)| f * s as f64)
        .sum::<f64>()
        / n;
    Ok(OverallStats {
        population: total,
        accuracy,
        error: 1.0 - accuracy,
        ci_lower,
        ci_upper,
        f1_macro: f1.iter().sum::<f64>() / f1.len() as f64,
        f1_micro: accuracy,
        f1_weighted,
        kappa: cohen_kappa(accuracy, &support, &cm.col_sums(), total),
        hamming: (total - trace) as f64 / n,
        rci: relative_classifier_information(cm),
    })
}
