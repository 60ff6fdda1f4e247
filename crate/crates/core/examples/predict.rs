//! Trains briefly, saves the weights with their feature scaling, reloads
//! them and predicts a few flows.

use botnet_gru_cnn::dataio::{class_name, generate, Batch, SyntheticConfig, NUM_CLASSES};
use botnet_gru_cnn::network::{
    load_weights, predict, save_weights, Architecture, NetworkParameters,
};
use botnet_gru_cnn::training::{fit, predicted_classes, NullSink, TrainConfig};

fn main() -> botnet_gru_cnn::Result<()> {
    let records = generate(&SyntheticConfig {
        samples: 1800,
        ..Default::default()
    });
    let params = NetworkParameters::<f64>::build(&Architecture::default(), 5);
    let (trained, _) = fit(params, &records, &TrainConfig::default(), &mut NullSink)?;

    let path = std::env::temp_dir().join("botnet-predict-example.weights");
    save_weights(&path, &trained, None)?;
    let reloaded = load_weights::<f64>(&path)?.params;
    assert_eq!(reloaded, trained);

    let probe = generate(&SyntheticConfig {
        samples: 6,
        seed: 99,
        ..Default::default()
    });
    let batch = Batch::<f64>::from_records(&probe, NUM_CLASSES)?;
    let probs = predict(&reloaded, &batch.features)?;
    for ((row, pred), actual) in probs
        .data()
        .chunks(NUM_CLASSES)
        .zip(predicted_classes(&probs))
        .zip(&batch.labels)
    {
        println!(
            "actual={:18} predicted={:18} p={:.3?}",
            class_name(*actual),
            class_name(pred),
            row
        );
    }
    Ok(())
}
