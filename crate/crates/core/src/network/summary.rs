use std::fmt;

use crate::network::params::{Architecture, ParamCount};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SummaryRow {
    /// Layer label as printed in the table, e.g. `Conv1D` or `dense (Dense)`.
    pub layer: String,
    /// Output shape without the batch axis.
    pub output_shape: Vec<usize>,
    pub params: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelSummary {
    pub rows: Vec<SummaryRow>,
    pub totals: ParamCount,
}

impl ModelSummary {
    pub fn row(&self, layer: &str) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.layer == layer)
    }
}

/// Layer table computed from the architecture alone.
pub fn summary(arch: &Architecture) -> ModelSummary {
    let (t, c_in, f, k, u) = (
        arch.seq_len,
        arch.in_channels,
        arch.filters,
        arch.kernel_size,
        arch.gru_units,
    );
    let conv = k * c_in * f + f;
    let bn_trainable = 2 * f;
    let bn_moving = 2 * f;
    let gru = 3 * u * (c_in + u + 2);
    let merged = arch.merged_width();
    let dense = merged * arch.dense_units + arch.dense_units;
    let dense_out = arch.dense_units * arch.classes + arch.classes;

    let row = |layer: &str, shape: &[usize], params: usize| SummaryRow {
        layer: layer.to_string(),
        output_shape: shape.to_vec(),
        params,
    };
    let rows = vec![
        row("InputLayer", &[t, c_in], 0),
        row("Conv1D", &[t, f], conv),
        row("BatchNormalization", &[t, f], bn_trainable + bn_moving),
        row("GRU", &[t, u], gru),
        row("Activation", &[t, f], 0),
        row("Flatten", &[t * u], 0),
        row(arch.pooling.layer_name(), &[f], 0),
        row("Concatenate", &[merged], 0),
        row("dense (Dense)", &[arch.dense_units], dense),
        row("dense_1 (Dense)", &[arch.classes], dense_out),
    ];
    let total = rows.iter().map(|r| r.params).sum();
    ModelSummary {
        rows,
        totals: ParamCount {
            total,
            trainable: total - bn_moving,
            non_trainable: bn_moving,
        },
    }
}

pub fn format_shape(shape: &[usize]) -> String {
    let dims: Vec<String> = std::iter::once("None".to_string())
        .chain(shape.iter().map(|d| d.to_string()))
        .collect();
    format!("({})", dims.join(", "))
}

impl fmt::Display for ModelSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rule = "-".repeat(66);
        writeln!(
            f,
            "{:<28}{:<26}{:>12}",
            "Layer (type)", "Output Shape", "Param #"
        )?;
        writeln!(f, "{}", "=".repeat(66))?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<28}{:<26}{:>12}",
                r.layer,
                format_shape(&r.output_shape),
                r.params
            )?;
        }
        writeln!(f, "{rule}")?;
        writeln!(f, "Total params: {}", self.totals.total)?;
        writeln!(f, "Trainable params: {}", self.totals.trainable)?;
        writeln!(f, "Non-trainable params: {}", self.totals.non_trainable)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::NetworkParameters;

    #[test]
    fn default_table() {
        let s = summary(&Architecture::default());
        assert_eq!(s.rows.len(), 10);
        let conv = s.row("Conv1D").unwrap();
        assert_eq!(
            (conv.output_shape.as_slice(), conv.params),
            (&[16, 128][..], 512)
        );
        let cat = s.row("Concatenate").unwrap();
        assert_eq!((cat.output_shape.as_slice(), cat.params), (&[288][..], 0));
        let counts: Vec<usize> = s.rows.iter().map(|r| r.params).filter(|&p| p > 0).collect();
        assert_eq!(counts, [512, 512, 390, 2890, 66]);
        assert_eq!(
            (s.totals.total, s.totals.trainable, s.totals.non_trainable),
            (4370, 4114, 256)
        );
    }

    #[test]
    fn agrees_with_materialized_parameters() {
        for (units, filters) in [(10, 128), (4, 32), (16, 7)] {
            let arch = Architecture {
                gru_units: units,
                filters,
                ..Architecture::default()
            };
            let p = NetworkParameters::<f64>::zeros(&arch);
            assert_eq!(summary(&arch).totals, p.param_count());
        }
    }

    #[test]
    fn rendering() {
        let text = summary(&Architecture::default()).to_string();
        assert!(text.contains("(None, 16, 128)"));
        assert!(text.contains("Total params: 4370"));
        assert!(text.contains("GlobalMaxPooling1D"));
    }
}
