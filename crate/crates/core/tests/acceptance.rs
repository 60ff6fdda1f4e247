//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line and then
//! asserts, so a failing criterion still reports its measured values.

use std::io::Write;
use std::time::{Duration, Instant};

use botnet_gru_cnn::dataio::{generate, SyntheticConfig};
use botnet_gru_cnn::layers::{gru_forward, GruParams};
use botnet_gru_cnn::metrics::{
    accuracy_ci, cohen_kappa, overall_stats, AuciBand, BinaryCells, ClassStats, ConfusionMatrix,
    Z_95,
};
use botnet_gru_cnn::network::{predict, save_weights, summary, Architecture, NetworkParameters};
use botnet_gru_cnn::numerics::{softmax, SeededRng, Tensor};
use botnet_gru_cnn::training::{
    fit, gradient_check, GradCheckConfig, Mutation, NullSink, TrainConfig,
};

/// Written through the stdout handle so the line shows even when the test
/// harness captures `println!`.
fn verdict(criterion: u32, name: &str, ok: bool, detail: &str) {
    let tag = if ok { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{tag} criterion {criterion} ({name}): {detail}");
    let _ = out.flush();
}

#[test]
fn criterion_1_parameter_accounting() {
    let started = Instant::now();
    let s = summary(&Architecture::default());
    let counts: Vec<usize> = [
        "Conv1D",
        "BatchNormalization",
        "GRU",
        "dense (Dense)",
        "dense_1 (Dense)",
    ]
    .iter()
    .map(|l| s.row(l).map_or(usize::MAX, |r| r.params))
    .collect();
    let built = NetworkParameters::<f64>::build(&Architecture::default(), 0).param_count();
    let elapsed = started.elapsed();
    let ok = counts == [512, 512, 390, 2890, 66]
        && (s.totals.total, s.totals.trainable, s.totals.non_trainable) == (4370, 4114, 256)
        && built == s.totals
        && s.rows.len() == 10
        && elapsed < Duration::from_secs(1);
    verdict(
        1,
        "parameter accounting",
        ok,
        &format!(
            "layers {counts:?}, total {} trainable {} non-trainable {}, {} rows, {elapsed:?}",
            s.totals.total,
            s.totals.trainable,
            s.totals.non_trainable,
            s.rows.len()
        ),
    );
    assert!(ok);
}

struct Published {
    class: usize,
    cells: BinaryCells,
    acc: f64,
    agf: f64,
    agm: f64,
    auc: f64,
    band: AuciBand,
    err: f64,
    f1: f64,
    precision: Option<f64>,
    youden: f64,
    dind: f64,
    sind: f64,
}

fn published_columns() -> Vec<Published> {
    vec![
        Published {
            class: 1,
            cells: BinaryCells::new(318_277, 57, 60, 413_473),
            acc: 0.99984,
            agf: 0.99983,
            agm: 0.99985,
            auc: 0.99984,
            band: AuciBand::Excellent,
            err: 0.00016,
            f1: 0.99982,
            precision: Some(0.99982),
            youden: 0.99967,
            dind: 0.00023,
            sind: 0.99983,
        },
        Published {
            class: 2,
            cells: BinaryCells::new(1_846, 3_487, 1_734, 724_800),
            acc: 0.99287,
            agf: 0.68433,
            agm: 0.85544,
            auc: 0.75543,
            band: AuciBand::Good,
            err: 0.00713,
            f1: 0.41423,
            precision: Some(0.34615),
            youden: 0.51085,
            dind: 0.48438,
            sind: 0.65749,
        },
        Published {
            class: 4,
            cells: BinaryCells::new(449, 29, 55, 731_334),
            acc: 0.99989,
            agf: 0.94874,
            agm: 0.97189,
            auc: 0.94542,
            band: AuciBand::Excellent,
            err: 0.00011,
            f1: 0.91446,
            precision: Some(0.93933),
            youden: 0.89083,
            dind: 0.10913,
            sind: 0.92284,
        },
        Published {
            class: 5,
            cells: BinaryCells::new(0, 0, 107, 731_760),
            acc: 0.99985,
            agf: 0.0,
            agm: 0.0,
            auc: 0.5,
            band: AuciBand::Poor,
            err: 0.00015,
            f1: 0.0,
            precision: None,
            youden: 0.0,
            dind: 1.0,
            sind: 0.29289,
        },
    ]
}

#[test]
fn criterion_2_metrics_match_published_class_columns() {
    const TOL: f64 = 5e-5;
    let started = Instant::now();
    let mut worst: f64 = 0.0;
    let mut problems = Vec::new();
    for p in published_columns() {
        assert_eq!(p.cells.total(), 731_867);
        let s = ClassStats::from_cells(p.cells).unwrap();
        let pairs = [
            ("ACC", Some(s.acc), p.acc),
            ("ERR", Some(s.err), p.err),
            ("F1", Some(s.f1), p.f1),
            ("AUC", s.auc, p.auc),
            ("AGF", s.agf, p.agf),
            ("AGM", s.agm, p.agm),
            ("Youden", s.youden, p.youden),
            ("dInd", s.dind, p.dind),
            ("sInd", s.sind, p.sind),
        ];
        for (name, got, want) in pairs {
            match got {
                Some(g) => {
                    worst = worst.max((g - want).abs());
                    if (g - want).abs() > TOL {
                        problems.push(format!("class {} {name} {g:.6} vs {want}", p.class));
                    }
                }
                None => problems.push(format!("class {} {name} undefined", p.class)),
            }
        }
        match (s.precision, p.precision) {
            (Some(g), Some(w)) => {
                worst = worst.max((g - w).abs());
                if (g - w).abs() > TOL {
                    problems.push(format!("class {} precision {g:.6} vs {w}", p.class));
                }
            }
            (None, None) => {}
            (g, w) => problems.push(format!("class {} precision {g:?} vs {w:?}", p.class)),
        }
        if s.auci != Some(p.band) {
            problems.push(format!("class {} AUCI {:?} vs {}", p.class, s.auci, p.band));
        }
    }
    let elapsed = started.elapsed();
    let ok = problems.is_empty() && elapsed < Duration::from_secs(1);
    verdict(
        2,
        "metrics oracle",
        ok,
        &format!("classes 1,2,4,5; max abs deviation {worst:.2e} (tol {TOL:e}); {elapsed:?}; {problems:?}"),
    );
    assert!(ok);
}

#[test]
fn criterion_3_confidence_interval() {
    let (lo, hi) = accuracy_ci(0.99259, 731_867, Z_95);
    let got = (format!("{lo:.5}"), format!("{hi:.5}"));
    let ok = got == ("0.99239".to_string(), "0.99279".to_string());
    verdict(
        3,
        "95% confidence interval",
        ok,
        &format!("({}, {})", got.0, got.1),
    );
    assert!(ok);
}

#[test]
fn criterion_4_kappa_reconstruction() {
    const N: u64 = 731_867;
    const PUBLISHED: f64 = 0.98307;
    let actual = [396_572u64, 318_337, 3_580, 12_767, 504, 107];
    // TP + FP per class from the published columns
    let predicted = [
        396_568u64 + 4,
        318_277 + 57,
        1_846 + 3_487,
        9_304 + 1_806,
        449 + 29,
        0,
    ];
    let p_o = 0.99259;

    let n2 = (N as f64).powi(2);
    let p_e_oracle: f64 = actual
        .iter()
        .zip(&predicted)
        .map(|(&a, &p)| (a * p) as f64)
        .sum::<f64>()
        / n2;
    let oracle = (p_o - p_e_oracle) / (1.0 - p_e_oracle);
    let kappa = cohen_kappa(p_o, &actual, &predicted, N).unwrap();
    assert!(
        (kappa - oracle).abs() < 1e-12,
        "library {kappa} vs oracle {oracle}"
    );

    let ok = (kappa - PUBLISHED).abs() <= 2e-3;
    verdict(
        4,
        "kappa plausibility",
        ok,
        &format!(
            "reconstructed {kappa:.6} (p_e {p_e_oracle:.6}) vs published {PUBLISHED}; |diff| {:.2e}, tolerance 2e-3",
            (kappa - PUBLISHED).abs()
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_5_gradient_verification() {
    let started = Instant::now();
    let params = NetworkParameters::<f64>::build(&Architecture::default(), 2024);
    let clean = gradient_check(&params, &GradCheckConfig::default()).unwrap();
    let mutated = gradient_check(
        &params,
        &GradCheckConfig {
            mutation: Some(Mutation::FlipGruRecurrent),
            ..Default::default()
        },
    )
    .unwrap();
    let elapsed = started.elapsed();
    let layers = clean.layers();
    let worst = clean.worst().unwrap();
    let ok = clean.probes.len() >= 100
        && layers.len() == 5
        && clean.passed()
        && !mutated.passed()
        && elapsed < Duration::from_secs(60);
    verdict(
        5,
        "gradient verification",
        ok,
        &format!(
            "{} probes over {layers:?}, worst {} rel {:.2e} (tol 1e-5); mutated run {} failures; {elapsed:?}",
            clean.probes.len(),
            worst.param,
            worst.rel_error,
            mutated.failures()
        ),
    );
    assert!(ok);
}

/// Direct per-sample, per-step evaluation of the dual-bias GRU gates.
fn scalar_gru(x: &[f64], t_len: usize, input: usize, p: &GruParams<f64>, h0: &[f64]) -> Vec<f64> {
    let units = h0.len();
    let sig = |v: f64| 1.0 / (1.0 + (-v).exp());
    let mut h = h0.to_vec();
    let mut out = Vec::with_capacity(t_len * units);
    for t in 0..t_len {
        let xt = &x[t * input..(t + 1) * input];
        let mut next = vec![0.0; units];
        for (j, nj) in next.iter_mut().enumerate() {
            let mut xz = p.b_z.data()[j];
            let mut xr = p.b_r.data()[j];
            let mut xh = p.b_h.data()[j];
            for (i, &xi) in xt.iter().enumerate() {
                xz += xi * p.w_z.at(&[i, j]);
                xr += xi * p.w_r.at(&[i, j]);
                xh += xi * p.w_h.at(&[i, j]);
            }
            let mut hz = p.rb_z.data()[j];
            let mut hr = p.rb_r.data()[j];
            let mut hh = p.rb_h.data()[j];
            for (i, &hi) in h.iter().enumerate() {
                hz += hi * p.u_z.at(&[i, j]);
                hr += hi * p.u_r.at(&[i, j]);
                hh += hi * p.u_h.at(&[i, j]);
            }
            let z = sig(xz + hz);
            let r = sig(xr + hr);
            let cand = (xh + r * hh).tanh();
            *nj = (1.0 - z) * h[j] + z * cand;
        }
        h = next;
        out.extend_from_slice(&h);
    }
    out
}

#[test]
fn criterion_6_gru_matches_scalar_oracle() {
    let mut rng = SeededRng::new(6);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let t_len = 1 + rng.below(8);
        let units = 1 + rng.below(6);
        let input = 1 + rng.below(3);
        let batch = 1 + rng.below(3);
        let mut p = GruParams::<f64>::zeros(input, units);
        for (_, t) in p.tensors_mut() {
            for v in t.data_mut() {
                *v = rng.uniform(-1.0, 1.0);
            }
        }
        let x: Vec<f64> = (0..batch * t_len * input)
            .map(|_| rng.uniform(-2.0, 2.0))
            .collect();
        let h0: Vec<f64> = (0..batch * units).map(|_| rng.uniform(-0.9, 0.9)).collect();
        let use_h0 = rng.below(2) == 1;
        let xt = Tensor::from_vec(&[batch, t_len, input], x.clone()).unwrap();
        let h0t = Tensor::from_vec(&[batch, units], h0.clone()).unwrap();
        let (seq, _) = gru_forward(&xt, &p, use_h0.then_some(&h0t)).unwrap();
        for b in 0..batch {
            let start = if use_h0 {
                h0[b * units..(b + 1) * units].to_vec()
            } else {
                vec![0.0; units]
            };
            let expect = scalar_gru(
                &x[b * t_len * input..(b + 1) * t_len * input],
                t_len,
                input,
                &p,
                &start,
            );
            let got = &seq.data()[b * t_len * units..(b + 1) * t_len * units];
            for (g, e) in got.iter().zip(&expect) {
                worst = worst.max((g - e).abs());
            }
        }
    }
    let ok = worst <= 1e-10;
    verdict(
        6,
        "GRU oracle equivalence",
        ok,
        &format!("50 configurations, max abs diff {worst:.2e} (tol 1e-10)"),
    );
    assert!(ok);
}

#[test]
fn criterion_7_synthetic_training() {
    let started = Instant::now();
    let records = generate(&SyntheticConfig {
        samples: 12_000,
        noise: 0.1,
        seed: 7,
    });
    let config = TrainConfig {
        seed: 7,
        ..Default::default()
    };
    assert_eq!(
        (config.epochs, config.batch_size, config.validation_fraction),
        (4, 10, 0.10)
    );
    let params = NetworkParameters::<f64>::build(&Architecture::default(), 7);
    let (_, history) = fit(params, &records, &config, &mut NullSink).unwrap();
    let elapsed = started.elapsed();
    let last = history.last().unwrap();
    let ok = history.len() == 4 && last.val_accuracy >= 0.95 && elapsed <= Duration::from_secs(300);
    verdict(
        7,
        "synthetic end-to-end training",
        ok,
        &format!(
            "12000 sequences, 4 epochs: val acc {:.4} (>= 0.95), val loss {:.4}, {elapsed:?} (<= 300 s)",
            last.val_accuracy, last.val_loss
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_8_invariant_suites() {
    let mut rng = SeededRng::new(8);

    // hamming loss against accuracy on random single-label matrices
    let mut hamming_ok = true;
    for _ in 0..1000 {
        let k = 2 + rng.below(5);
        let counts: Vec<Vec<u64>> = (0..k)
            .map(|_| (0..k).map(|_| rng.below(40) as u64).collect())
            .collect();
        let cm = ConfusionMatrix::from_counts(counts).unwrap();
        if cm.total() == 0 {
            continue;
        }
        let s = overall_stats(&cm).unwrap();
        let n = cm.total();
        let wrong = n - cm.trace();
        hamming_ok &= s.hamming == wrong as f64 / n as f64
            && s.accuracy == cm.trace() as f64 / n as f64
            && wrong + cm.trace() == n
            && (s.hamming - (1.0 - s.accuracy)).abs() <= f64::EPSILON;
    }

    // softmax rows, both standalone and as network output
    let logits = Tensor::from_vec(
        &[200, 6],
        (0..1200).map(|_| rng.uniform(-30.0, 30.0)).collect(),
    )
    .unwrap();
    let mut softmax_dev: f64 = 0.0;
    for row in softmax(&logits).data().chunks(6) {
        softmax_dev = softmax_dev.max((row.iter().sum::<f64>() - 1.0).abs());
    }
    let params = NetworkParameters::<f64>::build(&Architecture::default(), 8);
    let x = Tensor::from_vec(
        &[32, 16, 1],
        (0..512).map(|_| rng.uniform(0.0, 1.0)).collect(),
    )
    .unwrap();
    for row in predict(&params, &x).unwrap().data().chunks(6) {
        softmax_dev = softmax_dev.max((row.iter().sum::<f64>() - 1.0).abs());
    }

    // perfect agreement
    let mut diag = vec![vec![0u64; 6]; 6];
    for (i, row) in diag.iter_mut().enumerate() {
        row[i] = 10 + 7 * i as u64;
    }
    let ident = overall_stats(&ConfusionMatrix::from_counts(diag).unwrap()).unwrap();

    // seeded determinism of serial training
    let records = generate(&SyntheticConfig {
        samples: 240,
        ..Default::default()
    });
    let cfg = TrainConfig {
        epochs: 2,
        seed: 3,
        ..Default::default()
    };
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for run in 0..2 {
        let p = NetworkParameters::<f64>::build(&Architecture::default(), 3);
        let (trained, _) = fit(p, &records, &cfg, &mut NullSink).unwrap();
        let path = dir.path().join(format!("run{run}.weights"));
        save_weights(&path, &trained, None).unwrap();
        files.push(std::fs::read(path).unwrap());
    }
    let identical = files[0] == files[1];

    let ok = hamming_ok
        && softmax_dev <= 1e-9
        && ident.kappa == Some(1.0)
        && ident.rci == 1.0
        && ident.hamming == 0.0
        && identical;
    verdict(
        8,
        "invariant suites",
        ok,
        &format!(
            "hamming=1-accuracy on 1000 matrices: {hamming_ok}; max |softmax row sum - 1| {softmax_dev:.1e}; \
             identity kappa {:?} rci {}; identical weight files: {identical}",
            ident.kappa, ident.rci
        ),
    );
    assert!(ok);
}
