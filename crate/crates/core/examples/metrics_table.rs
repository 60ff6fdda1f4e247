//! Per-class statistics from one-vs-rest cell counts, and overall
//! statistics from a small confusion matrix.

use botnet_gru_cnn::metrics::{
    accuracy_ci, overall_stats, report, BinaryCells, ClassStats, ConfusionMatrix, Z_95,
};

fn main() -> botnet_gru_cnn::Result<()> {
    for (name, cells) in [
        ("DDoS-TCP", BinaryCells::new(318_277, 57, 60, 413_473)),
        ("DDoS-UDP", BinaryCells::new(1_846, 3_487, 1_734, 724_800)),
        ("OS-Fingerprinting", BinaryCells::new(449, 29, 55, 731_334)),
        ("Data-Exfiltration", BinaryCells::new(0, 0, 107, 731_760)),
    ] {
        let s = ClassStats::from_cells(cells)?;
        println!(
            "{name:18} acc={:.5} precision={} f1={:.5} auc={:?} band={:?} agf={:?} agm={:?}",
            s.acc,
            s.precision
                .map_or_else(|| "None".into(), |p| format!("{p:.5}")),
            s.f1,
            s.auc,
            s.auci,
            s.agf,
            s.agm
        );
    }
    let (lo, hi) = accuracy_ci(0.99259, 731_867, Z_95);
    println!("95% CI at accuracy 0.99259: ({lo:.5}, {hi:.5})");

    let cm = ConfusionMatrix::from_counts(vec![vec![48, 2, 0], vec![5, 40, 5], vec![0, 3, 47]])?;
    let overall = overall_stats(&cm)?;
    println!("{overall:#?}");
    let rep = report(&cm, &["benign", "flood", "scan"])?;
    print!("{}", rep.to_table());
    print!("{}", rep.to_key_values());
    Ok(())
}
