use std::time::Instant;

use crate::dataio::{Batch, Batches, FlowRecord};
use crate::error::{Error, Result};
use crate::layers::Mode;
use crate::metrics::ConfusionMatrix;
use crate::network::{backward, forward, predict, NetworkParameters};
use crate::numerics::{Scalar, SeededRng, Tensor};
use crate::training::config::TrainConfig;
use crate::training::loss::cross_entropy;
use crate::training::optimizer::{rmsprop_step, RmsProp, RmsPropState};
use crate::training::progress::{EpochStats, ProgressSink};

/// Rows per forward pass when evaluating.
const EVAL_CHUNK: usize = 256;

fn check_records(records: &[FlowRecord], seq_len: usize, classes: usize) -> Result<()> {
    if records.is_empty() {
        return Err(Error::Data("dataset is empty".into()));
    }
    for (i, r) in records.iter().enumerate() {
        if r.features.len() != seq_len {
            return Err(Error::FeatureLength {
                expected: seq_len,
                actual: r.features.len(),
            });
        }
        match r.label {
            None => return Err(Error::Data(format!("record {i} has no class label"))),
            Some(l) if l >= classes => {
                return Err(Error::Data(format!(
                    "record {i} has label {l}, expected 0..{classes}"
                )))
            }
            _ => {}
        }
    }
    Ok(())
}

fn take_validation(n: usize, fraction: f64) -> usize {
    ((n as f64 * fraction).round() as usize).clamp(1, n - 1)
}

/// Seeded train/validation index split.
pub fn split_indices(
    records: &[FlowRecord],
    config: &TrainConfig,
) -> Result<(Vec<usize>, Vec<usize>)> {
    config.validate()?;
    if records.len() < 2 {
        return Err(Error::Data(format!(
            "need at least 2 records for a train/validation split, got {}",
            records.len()
        )));
    }
    let mut rng = SeededRng::stream(config.seed, "split");
    let mut train = Vec::new();
    let mut val = Vec::new();
    if config.stratified {
        let max_label = records.iter().filter_map(|r| r.label).max().unwrap_or(0);
        for class in 0..=max_label {
            let mut idx: Vec<usize> = (0..records.len())
                .filter(|&i| records[i].label == Some(class))
                .collect();
            rng.shuffle(&mut idx);
            let k = if idx.len() < 2 {
                0
            } else {
                take_validation(idx.len(), config.validation_fraction)
            };
            val.extend_from_slice(&idx[..k]);
            train.extend_from_slice(&idx[k..]);
        }
        if val.is_empty() {
            return Err(Error::Data(
                "stratified split left the validation set empty".into(),
            ));
        }
        train.sort_unstable();
        val.sort_unstable();
    } else {
        let mut idx: Vec<usize> = (0..records.len()).collect();
        rng.shuffle(&mut idx);
        let k = take_validation(idx.len(), config.validation_fraction);
        val = idx[..k].to_vec();
        train = idx[k..].to_vec();
    }
    Ok((train, val))
}

fn argmax<T: Scalar>(row: &[T]) -> usize {
    let mut best = 0;
    for (i, v) in row.iter().enumerate() {
        if *v > row[best] {
            best = i;
        }
    }
    best
}

/// Predicted class per row of a probability matrix.
pub fn predicted_classes<T: Scalar>(probs: &Tensor<T>) -> Vec<usize> {
    let k = probs.shape().last().copied().unwrap_or(1).max(1);
    probs.data().chunks(k).map(argmax).collect()
}

/// Trains with RMSProp on a seeded 90/10 split, reshuffling the training part
/// every epoch.
pub fn fit<T: Scalar>(
    mut params: NetworkParameters<T>,
    records: &[FlowRecord],
    config: &TrainConfig,
    sink: &mut dyn ProgressSink,
) -> Result<(NetworkParameters<T>, Vec<EpochStats>)> {
    config.validate()?;
    let arch = params.arch.clone();
    check_records(records, arch.seq_len, arch.classes)?;
    let (train, val) = split_indices(records, config)?;
    let val_records: Vec<FlowRecord> = val.iter().map(|&i| records[i].clone()).collect();
    let opt = RmsProp {
        learning_rate: config.learning_rate,
        decay: config.rms_decay,
        epsilon: config.rms_epsilon,
    };
    let mut state = RmsPropState::new(&arch);
    let mut history = Vec::with_capacity(config.epochs);

    for epoch in 1..=config.epochs {
        let started = Instant::now();
        let mut order = train.clone();
        SeededRng::stream(config.seed.wrapping_add(epoch as u64), "epoch").shuffle(&mut order);
        let mut loss_sum = 0.0;
        let mut correct = 0usize;
        for batch in Batches::<T>::new(records, order, config.batch_size, arch.classes)? {
            let Batch {
                features,
                targets,
                labels,
            } = batch?;
            let (probs, cache) = forward(&params, &features, Mode::Train)?;
            let (loss, d_logits) = cross_entropy(&probs, &targets)?;
            let loss = loss.as_f64();
            if !loss.is_finite() {
                return Err(Error::Numeric(format!(
                    "loss became {loss} in epoch {epoch}"
                )));
            }
            loss_sum += loss * labels.len() as f64;
            correct += predicted_classes(&probs)
                .iter()
                .zip(&labels)
                .filter(|(p, l)| p == l)
                .count();
            let stats = cache.batch_stats().cloned();
            let grads = backward(&params, cache, &d_logits)?;
            rmsprop_step(&mut params, &grads, &mut state, &opt)?;
            if let Some(stats) = stats {
                params.bn.absorb(&stats);
            }
        }
        let (val_cm, val_loss) = evaluate(&params, &val_records)?;
        let stats = EpochStats {
            epoch,
            train_loss: loss_sum / train.len() as f64,
            train_accuracy: correct as f64 / train.len() as f64,
            val_loss,
            val_accuracy: val_cm.trace() as f64 / val_cm.total() as f64,
            seconds: started.elapsed().as_secs_f64(),
        };
        log::info!("{stats}");
        sink.epoch_done(&stats);
        history.push(stats);
    }
    Ok((params, history))
}

/// Inference-mode confusion matrix and mean cross-entropy over labeled records.
pub fn evaluate<T: Scalar>(
    params: &NetworkParameters<T>,
    records: &[FlowRecord],
) -> Result<(ConfusionMatrix, f64)> {
    let arch = &params.arch;
    check_records(records, arch.seq_len, arch.classes)?;
    let mut cm = ConfusionMatrix::new(arch.classes);
    let mut loss_sum = 0.0;
    for chunk in records.chunks(EVAL_CHUNK) {
        let batch = Batch::<T>::from_records(chunk, arch.classes)?;
        let probs = predict(params, &batch.features)?;
        let (loss, _) = cross_entropy(&probs, &batch.targets)?;
        loss_sum += loss.as_f64() * chunk.len() as f64;
        for (&actual, pred) in batch.labels.iter().zip(predicted_classes(&probs)) {
            cm.record(actual, pred)?;
        }
    }
    Ok((cm, loss_sum / records.len() as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataio::{generate, SyntheticConfig};
    use crate::network::Architecture;
    use crate::training::progress::NullSink;

    fn data(n: usize) -> Vec<FlowRecord> {
        generate(&SyntheticConfig {
            samples: n,
            ..Default::default()
        })
    }

    fn small_config() -> TrainConfig {
        TrainConfig {
            epochs: 1,
            ..Default::default()
        }
    }

    #[test]
    fn split_is_disjoint_and_sized() {
        let recs = data(100);
        let (train, val) = split_indices(&recs, &TrainConfig::default()).unwrap();
        assert_eq!(val.len(), 10);
        assert_eq!(train.len(), 90);
        let mut all: Vec<usize> = train.iter().chain(&val).copied().collect();
        all.sort();
        assert_eq!(all, (0..100).collect::<Vec<_>>());
    }

    #[test]
    fn stratified_split_keeps_class_mix() {
        let recs = data(120);
        let cfg = TrainConfig {
            stratified: true,
            ..Default::default()
        };
        let (_, val) = split_indices(&recs, &cfg).unwrap();
        let mut counts = [0; 6];
        for i in val {
            counts[recs[i].label.unwrap()] += 1;
        }
        assert_eq!(counts, [2; 6]);
    }

    #[test]
    fn empty_and_bad_inputs_rejected() {
        let p = NetworkParameters::<f64>::build(&Architecture::default(), 1);
        assert!(fit(p.clone(), &[], &small_config(), &mut NullSink).is_err());
        let short = vec![FlowRecord::new(vec![0.5; 15], Some(0)); 4];
        assert!(matches!(
            fit(p.clone(), &short, &small_config(), &mut NullSink),
            Err(Error::FeatureLength {
                expected: 16,
                actual: 15
            })
        ));
        let bad = TrainConfig {
            epochs: 0,
            ..Default::default()
        };
        assert!(fit(p.clone(), &data(20), &bad, &mut NullSink).is_err());
        let unlabeled = vec![FlowRecord::new(vec![0.5; 16], None)];
        assert!(evaluate(&p, &unlabeled).is_err());
    }

    #[test]
    fn zero_learning_rate_leaves_trainable_parameters_bit_exact() {
        let p = NetworkParameters::<f64>::build(&Architecture::default(), 4);
        let cfg = TrainConfig {
            learning_rate: 0.0,
            ..small_config()
        };
        let (trained, stats) = fit(p.clone(), &data(60), &cfg, &mut NullSink).unwrap();
        assert_eq!(stats.len(), 1);
        assert_eq!(trained.trainable(), p.trainable());
        assert_ne!(trained.non_trainable(), p.non_trainable());
    }

    #[test]
    fn seeded_runs_repeat_exactly() {
        let recs = data(90);
        let p = NetworkParameters::<f64>::build(&Architecture::default(), 9);
        let cfg = TrainConfig {
            epochs: 2,
            ..Default::default()
        };
        let (a, sa) = fit(p.clone(), &recs, &cfg, &mut NullSink).unwrap();
        let (b, sb) = fit(p, &recs, &cfg, &mut NullSink).unwrap();
        assert_eq!(a, b);
        let strip = |s: &[EpochStats]| {
            s.iter()
                .map(|e| (e.train_loss, e.val_loss, e.val_accuracy))
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(&sa), strip(&sb));
    }

    #[test]
    fn epoch_stats_reach_the_sink() {
        let mut seen = Vec::new();
        let mut sink = |s: &EpochStats| seen.push(s.epoch);
        let cfg = TrainConfig {
            epochs: 2,
            ..Default::default()
        };
        let p = NetworkParameters::<f32>::build(&Architecture::default(), 2);
        let (_, stats) = fit(p, &data(40), &cfg, &mut sink).unwrap();
        assert_eq!(seen, [1, 2]);
        for s in &stats {
            assert!(s.train_loss.is_finite() && s.val_loss.is_finite());
            assert!(
                (0.0..=1.0).contains(&s.train_accuracy) && (0.0..=1.0).contains(&s.val_accuracy)
            );
        }
    }

    #[test]
    fn evaluation_counts_every_record() {
        let recs = data(300);
        let p = NetworkParameters::<f64>::build(&Architecture::default(), 5);
        let (cm, loss) = evaluate(&p, &recs).unwrap();
        assert_eq!(cm.total(), 300);
        assert!(loss.is_finite());
        let probs = predict(&p, &Batch::<f64>::from_records(&recs, 6).unwrap().features).unwrap();
        let direct = predicted_classes(&probs)
            .iter()
            .zip(&recs)
            .filter(|(p, r)| Some(**p) == r.label)
            .count() as f64
            / 300.0;
        assert!((cm.trace() as f64 / 300.0 - direct).abs() <= 1e-12);
    }
}
