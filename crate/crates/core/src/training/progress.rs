use std::fmt;
use std::io::Write;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct EpochStats {
    /// 1-based.
    pub epoch: usize,
    pub train_loss: f64,
    pub train_accuracy: f64,
    pub val_loss: f64,
    pub val_accuracy: f64,
    pub seconds: f64,
}

impl fmt::Display for EpochStats {
    /// `epoch=1 train_loss=... train_acc=... val_loss=... val_acc=... seconds=...`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "epoch={} train_loss={:.6} train_acc={:.6} val_loss={:.6} val_acc={:.6} seconds={:.3}",
            self.epoch,
            self.train_loss,
            self.train_accuracy,
            self.val_loss,
            self.val_accuracy,
            self.seconds
        )
    }
}

impl EpochStats {
    /// Parses a line written by the `Display` impl.
    pub fn parse_line(line: &str) -> Result<Self> {
        let mut s = EpochStats {
            epoch: 0,
            train_loss: f64::NAN,
            train_accuracy: f64::NAN,
            val_loss: f64::NAN,
            val_accuracy: f64::NAN,
            seconds: f64::NAN,
        };
        let bad = || Error::Data(format!("malformed progress line `{line}`"));
        let mut seen = 0;
        for pair in line.split_whitespace() {
            let (k, v) = pair.split_once('=').ok_or_else(bad)?;
            let num = || v.parse::<f64>().map_err(|_| bad());
            match k {
                "epoch" => s.epoch = v.parse().map_err(|_| bad())?,
                "train_loss" => s.train_loss = num()?,
                "train_acc" => s.train_accuracy = num()?,
                "val_loss" => s.val_loss = num()?,
                "val_acc" => s.val_accuracy = num()?,
                "seconds" => s.seconds = num()?,
                _ => continue,
            }
            seen += 1;
        }
        if seen != 6 {
            return Err(bad());
        }
        Ok(s)
    }
}

/// Receives one record per finished epoch.
pub trait ProgressSink {
    fn epoch_done(&mut self, stats: &EpochStats);
}

/// Discards progress.
pub struct NullSink;

impl ProgressSink for NullSink {
    fn epoch_done(&mut self, _: &EpochStats) {}
}

/// Writes one `key=value` line per epoch.
pub struct LineSink<W: Write>(pub W);

impl<W: Write> ProgressSink for LineSink<W> {
    fn epoch_done(&mut self, stats: &EpochStats) {
        if let Err(e) = writeln!(self.0, "{stats}") {
            log::warn!("could not write progress line: {e}");
        }
    }
}

impl<F: FnMut(&EpochStats)> ProgressSink for F {
    fn epoch_done(&mut self, stats: &EpochStats) {
        self(stats)
    }
}
