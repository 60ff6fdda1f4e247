use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use crate::cli::config::{check_output, RunConfig};
use crate::dataio::{
    fit_normalizer, stream_csv, FittedFeatures, FlowRecord, LabelSource, CLASS_NAMES,
};
use crate::error::{Error, Result};
use crate::metrics::report;
use crate::network::{
    load_weights, manifest_precision, predict, save_weights, summary, NetworkParameters,
};
use crate::numerics::{Precision, Scalar, Tensor};
use crate::training::{
    evaluate, fit, gradient_check, predicted_classes, split_indices, EpochStats,
};

/// Rows per forward pass when predicting.
const PREDICT_CHUNK: usize = 256;

fn io_err(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |e| Error::io(path, e)
}

fn stdout_err(e: std::io::Error) -> Error {
    Error::io("<stdout>", e)
}

pub fn cmd_summary(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    write!(out, "{}", summary(&cfg.arch)).map_err(stdout_err)
}

pub fn cmd_train(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    match cfg.precision {
        Precision::Single => train::<f32>(cfg, out),
        Precision::Double => train::<f64>(cfg, out),
    }
}

/// Default per-epoch stats file next to the weights.
pub fn stats_path(cfg: &RunConfig, weights: &std::path::Path) -> PathBuf {
    cfg.stats.clone().unwrap_or_else(|| {
        let mut name = weights.as_os_str().to_owned();
        name.push(".epochs");
        PathBuf::from(name)
    })
}

fn train<T: Scalar>(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let data = cfg.require_data()?;
    let weights = cfg
        .weights
        .as_deref()
        .ok_or_else(|| Error::Config("--weights is required for train".into()))?;
    check_output(weights)?;
    let stats_file = stats_path(cfg, weights);
    check_output(&stats_file)?;
    cfg.train.validate()?;
    if matches!(cfg.labels, LabelSource::Unlabeled) {
        return Err(Error::Config(
            "training needs labeled data; label_mode is none".into(),
        ));
    }

    let spec = cfg.feature_spec()?;
    let (raw, ingest) =
        stream_csv(data, &cfg.schema(spec.clone(), cfg.labels.clone()))?.collect_all()?;
    writeln!(
        out,
        "ingest rows={} records={} skipped={}",
        ingest.rows, ingest.records, ingest.skipped
    )
    .map_err(stdout_err)?;
    write!(out, "{}", ingest.classes).map_err(stdout_err)?;

    let unscaled: Vec<FlowRecord> = raw
        .into_iter()
        .map(|r| FlowRecord::new(r.features, r.label))
        .collect();
    let (train_idx, _) = split_indices(&unscaled, &cfg.train)?;
    let fitted = fit_normalizer(
        train_idx.iter().map(|&i| unscaled[i].features.as_slice()),
        &spec,
    )?;
    let records = unscaled
        .into_iter()
        .map(|r| Ok(FlowRecord::new(fitted.transform(&r.features)?, r.label)))
        .collect::<Result<Vec<_>>>()?;

    let params = NetworkParameters::<T>::build(&cfg.arch, cfg.train.seed);
    let mut lines = String::new();
    let mut sink = |s: &EpochStats| {
        let _ = writeln!(out, "{s}");
        lines.push_str(&format!("{s}\n"));
    };
    let (trained, _) = fit(params, &records, &cfg.train, &mut sink)?;
    save_weights(weights, &trained, Some(fitted.ranges()))?;
    fs::write(&stats_file, lines).map_err(io_err(&stats_file))?;
    writeln!(
        out,
        "weights={} stats={}",
        weights.display(),
        stats_file.display()
    )
    .map_err(stdout_err)
}

fn load_model<T: Scalar>(cfg: &RunConfig) -> Result<(NetworkParameters<T>, FittedFeatures)> {
    let path = cfg.require_weights()?;
    let file = load_weights::<T>(path)?;
    let ranges = file.features.ok_or_else(|| {
        Error::Config(format!(
            "{} has no feature scaling section; it cannot score CSV input",
            path.display()
        ))
    })?;
    if cfg.features.is_some() {
        log::warn!("--features is ignored; the weight file fixes the input columns");
    }
    Ok((file.params, FittedFeatures::from_ranges(ranges)?))
}

pub fn cmd_eval(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    cfg.require_data()?;
    match manifest_precision(cfg.require_weights()?)? {
        Precision::Single => eval::<f32>(cfg, out),
        Precision::Double => eval::<f64>(cfg, out),
    }
}

fn eval<T: Scalar>(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let data = cfg.require_data()?;
    if let Some(r) = &cfg.report {
        check_output(r)?;
    }
    if matches!(cfg.labels, LabelSource::Unlabeled) {
        return Err(Error::Config(
            "evaluation needs labeled data; label_mode is none".into(),
        ));
    }
    let (params, fitted) = load_model::<T>(cfg)?;
    let mut stream =
        stream_csv(data, &cfg.schema(fitted.spec(), cfg.labels.clone()))?.normalized(&fitted);
    let records = stream.by_ref().collect::<Result<Vec<_>>>()?;
    let skipped = stream.stats().skipped;
    if skipped > 0 {
        log::warn!("{skipped} malformed rows skipped");
    }
    let (cm, loss) = evaluate(&params, &records)?;
    let rep = report(&cm, &CLASS_NAMES)?;
    let o = &rep.overall;
    writeln!(
        out,
        "records={} skipped={skipped} loss={loss:.6} accuracy={:.5} error={:.5} ci95=({:.5},{:.5}) f1_macro={:.5} f1_micro={:.5} f1_weighted={:.5} kappa={} hamming={:.5} rci={:.5}",
        records.len(),
        o.accuracy,
        o.error,
        o.ci_lower,
        o.ci_upper,
        o.f1_macro,
        o.f1_micro,
        o.f1_weighted,
        o.kappa.map_or_else(|| "None".into(), |k| format!("{k:.5}")),
        o.hamming,
        o.rci,
    )
    .map_err(stdout_err)?;
    write!(out, "{}", rep.to_table()).map_err(stdout_err)?;
    if let Some(path) = &cfg.report {
        fs::write(path, rep.to_key_values()).map_err(io_err(path))?;
    }
    Ok(())
}

pub fn cmd_predict(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    cfg.require_data()?;
    match manifest_precision(cfg.require_weights()?)? {
        Precision::Single => predict_rows::<f32>(cfg, out),
        Precision::Double => predict_rows::<f64>(cfg, out),
    }
}

fn write_predictions<T: Scalar>(
    params: &NetworkParameters<T>,
    chunk: &[FlowRecord],
    w: &mut dyn Write,
) -> Result<()> {
    let t = params.arch.seq_len;
    let values: Vec<T> = chunk
        .iter()
        .flat_map(|r| r.features.iter().map(|&v| T::from_f64(v)))
        .collect();
    let probs = predict(params, &Tensor::from_vec(&[chunk.len(), t, 1], values)?)?;
    let k = params.arch.classes;
    for (row, class) in probs.data().chunks(k).zip(predicted_classes(&probs)) {
        let name = CLASS_NAMES.get(class).copied().unwrap_or("unknown");
        let ps: Vec<String> = row.iter().map(|p| format!("{:.9}", p.as_f64())).collect();
        writeln!(w, "{class}\t{name}\t{}", ps.join("\t")).map_err(stdout_err)?;
    }
    Ok(())
}

fn predict_rows<T: Scalar>(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let data = cfg.require_data()?;
    let (params, fitted) = load_model::<T>(cfg)?;
    let mut file_out;
    let w: &mut dyn Write = match &cfg.report {
        Some(p) => {
            check_output(p)?;
            file_out = BufWriter::new(File::create(p).map_err(io_err(p))?);
            &mut file_out
        }
        None => out,
    };
    let stream = stream_csv(data, &cfg.schema(fitted.spec(), LabelSource::Unlabeled))?;
    let mut chunk = Vec::with_capacity(PREDICT_CHUNK);
    for rec in stream.normalized(&fitted) {
        chunk.push(rec?);
        if chunk.len() == PREDICT_CHUNK {
            write_predictions(&params, &chunk, w)?;
            chunk.clear();
        }
    }
    if !chunk.is_empty() {
        write_predictions(&params, &chunk, w)?;
    }
    w.flush().map_err(stdout_err)
}

pub fn cmd_gradcheck(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    if cfg.precision != Precision::Double {
        return Err(Error::Config(
            "the gradient check runs in double precision only".into(),
        ));
    }
    let params = match &cfg.weights {
        Some(_) => load_weights::<f64>(cfg.require_weights()?)?.params,
        None => NetworkParameters::<f64>::build(&cfg.arch, cfg.train.seed),
    };
    let mut gc = cfg.gradcheck.clone();
    gc.seed = cfg.train.seed;
    let rep = gradient_check(&params, &gc)?;
    write!(out, "{rep}").map_err(stdout_err)?;
    if let Some(path) = &cfg.report {
        check_output(path)?;
        fs::write(path, rep.to_string()).map_err(io_err(path))?;
    }
    if rep.passed() {
        Ok(())
    } else {
        Err(Error::Numeric(format!(
            "gradient check failed: {} of {} probes at or above tolerance {:e}",
            rep.failures(),
            rep.probes.len(),
            rep.tolerance
        )))
    }
}
