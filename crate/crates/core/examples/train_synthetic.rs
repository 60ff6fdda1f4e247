//! Trains the full model on seeded synthetic flows and evaluates it.
//!
//! ```text
//! cargo run --release --example train_synthetic -- [samples] [seed]
//! ```

use botnet_gru_cnn::dataio::{generate, SyntheticConfig, CLASS_NAMES};
use botnet_gru_cnn::metrics::report;
use botnet_gru_cnn::network::{Architecture, NetworkParameters};
use botnet_gru_cnn::training::{evaluate, fit, LineSink, TrainConfig};

fn main() -> botnet_gru_cnn::Result<()> {
    let mut args = std::env::args().skip(1);
    let samples = args.next().and_then(|s| s.parse().ok()).unwrap_or(12_000);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(7);

    let records = generate(&SyntheticConfig {
        samples,
        seed,
        ..Default::default()
    });
    let config = TrainConfig {
        seed,
        ..Default::default()
    };
    let params = NetworkParameters::<f32>::build(&Architecture::default(), seed);
    let (trained, history) = fit(params, &records, &config, &mut LineSink(std::io::stdout()))?;

    let holdout = generate(&SyntheticConfig {
        samples: 1200,
        seed: seed + 1000,
        ..Default::default()
    });
    let (cm, loss) = evaluate(&trained, &holdout)?;
    let rep = report(&cm, &CLASS_NAMES)?;
    println!(
        "final val_acc={:.4} holdout loss={loss:.4} accuracy={:.4} kappa={:?}",
        history.last().map_or(0.0, |h| h.val_accuracy),
        rep.overall.accuracy,
        rep.overall.kappa
    );
    print!("{}", rep.to_table());
    Ok(())
}
