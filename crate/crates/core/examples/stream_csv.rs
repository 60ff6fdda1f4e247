//! Writes a synthetic flow CSV, streams it back, fits the min-max scaling
//! and prints the class distribution.

use botnet_gru_cnn::dataio::{
    fit_normalizer, generate, stream_csv, write_bot_iot_csv, CsvSchema, SyntheticConfig,
};

fn main() -> botnet_gru_cnn::Result<()> {
    let dir = std::env::temp_dir().join("botnet-stream-example");
    std::fs::create_dir_all(&dir).map_err(|e| botnet_gru_cnn::Error::io(&dir, e))?;
    let path = dir.join("flows.csv");
    let file = std::fs::File::create(&path).map_err(|e| botnet_gru_cnn::Error::io(&path, e))?;
    write_bot_iot_csv(
        file,
        &generate(&SyntheticConfig {
            samples: 600,
            ..Default::default()
        }),
    )?;

    let schema = CsvSchema::default();
    let (raw, stats) = stream_csv(&path, &schema)?.collect_all()?;
    println!(
        "rows={} records={} skipped={}",
        stats.rows, stats.records, stats.skipped
    );
    print!("{}", stats.classes);

    let fitted = fit_normalizer(raw.iter().map(|r| r.features.as_slice()), &schema.features)?;
    for r in fitted.ranges().iter().take(4) {
        println!("{:14} min={:.3} max={:.3}", r.name, r.min, r.max);
    }
    let first = stream_csv(&path, &schema)?
        .normalized(&fitted)
        .next()
        .transpose()?;
    if let Some(rec) = first {
        println!(
            "first record scaled: {:.3?} label={:?}",
            &rec.features[..4],
            rec.label
        );
    }
    Ok(())
}
