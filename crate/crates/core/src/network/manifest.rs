//! Versioned plain-text weight manifest.
//!
//! ```text
//! botnet-gru-cnn-weights
//! format_version 1
//! precision f64
//! arch seq_len=16 in_channels=1 filters=128 kernel_size=3 gru_units=10 dense_units=10 classes=6 conv_activation=relu dense_activation=relu pooling=max bn_epsilon=0.001 bn_momentum=0.99 gru_init_stddev=0.05
//! tensor conv1d/kernel 3,1,128
//! <row-major values separated by single spaces>
//! tensor conv1d/bias 128
//! ...
//! feature <column> <min> <max>        (optional, one per input feature)
//! end
//! ```
//!
//! Tensors are written in the canonical order of
//! [`NetworkParameters::all_tensors`] but are matched by name on load, so
//! their order in the file is free. Values use the shortest decimal form that
//! parses back to the same bits at the stored precision.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::dataio::FeatureRange;
use crate::error::{Error, Result};
use crate::layers::{Activation, Pooling};
use crate::network::params::{Architecture, NetworkParameters};
use crate::numerics::{Precision, Scalar};

pub const MAGIC: &str = "botnet-gru-cnn-weights";
pub const FORMAT_VERSION: u32 = 1;

/// Parameters plus the input scaling they were trained with.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFile<T> {
    pub params: NetworkParameters<T>,
    pub features: Option<Vec<FeatureRange>>,
}

fn arch_line(a: &Architecture) -> String {
    format!(
        "arch seq_len={} in_channels={} filters={} kernel_size={} gru_units={} dense_units={} classes={} \
         conv_activation={} dense_activation={} pooling={} bn_epsilon={} bn_momentum={} gru_init_stddev={}",
        a.seq_len,
        a.in_channels,
        a.filters,
        a.kernel_size,
        a.gru_units,
        a.dense_units,
        a.classes,
        a.conv_activation.name(),
        a.dense_activation.name(),
        match a.pooling {
            Pooling::Max => "max",
            Pooling::Average => "average",
        },
        a.bn_epsilon,
        a.bn_momentum,
        a.gru_init_stddev,
    )
}

pub fn to_manifest_string<T: Scalar>(
    params: &NetworkParameters<T>,
    features: Option<&[FeatureRange]>,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "format_version {FORMAT_VERSION}");
    let _ = writeln!(out, "precision {}", T::NAME);
    let _ = writeln!(out, "{}", arch_line(&params.arch));
    for (id, t) in params.all_tensors() {
        let shape: Vec<String> = t.shape().iter().map(|d| d.to_string()).collect();
        let _ = writeln!(out, "tensor {id} {}", shape.join(","));
        let values: Vec<String> = t.data().iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{}", values.join(" "));
    }
    for f in features.unwrap_or_default() {
        let _ = writeln!(out, "feature {} {} {}", f.name, f.min, f.max);
    }
    let _ = writeln!(out, "end");
    out
}

pub fn save_weights<T: Scalar>(
    path: impl AsRef<Path>,
    params: &NetworkParameters<T>,
    features: Option<&[FeatureRange]>,
) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_manifest_string(params, features)).map_err(|e| Error::io(path, e))
}

pub fn load_weights<T: Scalar>(path: impl AsRef<Path>) -> Result<WeightFile<T>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_manifest(&text)
}

/// Precision recorded in a manifest header, without parsing the tensors.
pub fn manifest_precision(path: impl AsRef<Path>) -> Result<Precision> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = Lines::new(&text);
    read_header(&mut lines)
}

struct Lines<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines { text, pos: 0 }
    }

    /// Next complete line and its starting byte offset. A final line without
    /// a newline counts as truncated.
    fn next(&mut self) -> Result<(usize, &'a str)> {
        let start = self.pos;
        let rest = &self.text[start..];
        match rest.find('\n') {
            Some(i) => {
                self.pos = start + i + 1;
                Ok((start, rest[..i].trim_end_matches('\r')))
            }
            None => Err(Error::Manifest {
                offset: self.text.len(),
                message: "unexpected end of file".into(),
            }),
        }
    }
}

fn err(offset: usize, message: impl Into<String>) -> Error {
    Error::Manifest {
        offset,
        message: message.into(),
    }
}

fn read_header(lines: &mut Lines<'_>) -> Result<Precision> {
    let (off, magic) = lines.next()?;
    if magic != MAGIC {
        return Err(err(off, format!("expected `{MAGIC}` header")));
    }
    let (off, version) = lines.next()?;
    match version
        .strip_prefix("format_version ")
        .map(str::parse::<u32>)
    {
        Some(Ok(FORMAT_VERSION)) => {}
        Some(Ok(v)) => return Err(err(off, format!("unsupported format version {v}"))),
        _ => return Err(err(off, "expected `format_version N`")),
    }
    let (off, prec) = lines.next()?;
    prec.strip_prefix("precision ")
        .and_then(Precision::from_tag)
        .ok_or_else(|| err(off, "expected `precision f32|f64`"))
}

fn parse_arch(off: usize, line: &str) -> Result<Architecture> {
    let body = line
        .strip_prefix("arch ")
        .ok_or_else(|| err(off, "expected `arch ...` line"))?;
    let mut a = Architecture::default();
    let mut seen = 0;
    for pair in body.split_whitespace() {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| err(off, format!("malformed arch entry `{pair}`")))?;
        let bad = || err(off, format!("bad value for `{k}`: `{v}`"));
        let int = || v.parse::<usize>().map_err(|_| bad());
        let float = || v.parse::<f64>().map_err(|_| bad());
        match k {
            "seq_len" => a.seq_len = int()?,
            "in_channels" => a.in_channels = int()?,
            "filters" => a.filters = int()?,
            "kernel_size" => a.kernel_size = int()?,
            "gru_units" => a.gru_units = int()?,
            "dense_units" => a.dense_units = int()?,
            "classes" => a.classes = int()?,
            "conv_activation" => a.conv_activation = Activation::from_name(v).ok_or_else(bad)?,
            "dense_activation" => a.dense_activation = Activation::from_name(v).ok_or_else(bad)?,
            "pooling" => {
                a.pooling = match v {
                    "max" => Pooling::Max,
                    "average" => Pooling::Average,
                    _ => return Err(bad()),
                }
            }
            "bn_epsilon" => a.bn_epsilon = float()?,
            "bn_momentum" => a.bn_momentum = float()?,
            "gru_init_stddev" => a.gru_init_stddev = float()?,
            _ => return Err(err(off, format!("unknown arch key `{k}`"))),
        }
        seen += 1;
    }
    if seen != 13 {
        return Err(err(off, format!("arch line has {seen} of 13 keys")));
    }
    Ok(a)
}

pub fn parse_manifest<T: Scalar>(text: &str) -> Result<WeightFile<T>> {
    let mut lines = Lines::new(text);
    let precision = read_header(&mut lines)?;
    if precision.tag() != T::NAME {
        return Err(err(
            0,
            format!(
                "file stores {} values, {} requested",
                precision.tag(),
                T::NAME
            ),
        ));
    }
    let (off, arch) = lines.next()?;
    let arch = parse_arch(off, arch)?;
    let mut params = NetworkParameters::<T>::zeros(&arch);
    let mut loaded = vec![false; params.all_tensors().len()];
    let mut features: Vec<FeatureRange> = Vec::new();

    loop {
        let (off, line) = lines.next()?;
        if line == "end" {
            break;
        }
        if let Some(rest) = line.strip_prefix("tensor ") {
            let (name, shape) = rest
                .split_once(' ')
                .ok_or_else(|| err(off, "expected `tensor NAME SHAPE`"))?;
            let shape: Vec<usize> = shape
                .split(',')
                .map(|d| d.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| err(off, format!("bad shape `{shape}`")))?;
            let mut slots = params.all_tensors_mut();
            let idx = slots
                .iter()
                .position(|(id, _)| id.to_string() == name)
                .ok_or_else(|| err(off, format!("unknown tensor `{name}`")))?;
            let target = &mut slots[idx].1;
            if target.shape() != shape.as_slice() {
                return Err(err(
                    off,
                    format!(
                        "tensor `{name}` has shape {:?}, architecture expects {:?}",
                        shape,
                        target.shape()
                    ),
                ));
            }
            if loaded[idx] {
                return Err(err(off, format!("duplicate tensor `{name}`")));
            }
            let (voff, values) = lines.next()?;
            let mut count = 0;
            let data = target.data_mut();
            let mut col = 0;
            for tok in values.split(' ') {
                if count == data.len() {
                    return Err(err(voff + col, format!("too many values for `{name}`")));
                }
                data[count] = tok
                    .parse::<T>()
                    .map_err(|_| err(voff + col, format!("bad number `{tok}`")))?;
                count += 1;
                col += tok.len() + 1;
            }
            if count != data.len() {
                return Err(err(
                    voff + values.len(),
                    format!("`{name}` has {count} values, expected {}", data.len()),
                ));
            }
            loaded[idx] = true;
        } else if let Some(rest) = line.strip_prefix("feature ") {
            let parts: Vec<&str> = rest.split(' ').collect();
            let parsed = match parts.as_slice() {
                [name, min, max] => {
                    min.parse::<f64>()
                        .ok()
                        .zip(max.parse::<f64>().ok())
                        .map(|(min, max)| FeatureRange {
                            name: name.to_string(),
                            min,
                            max,
                        })
                }
                _ => None,
            };
            features.push(parsed.ok_or_else(|| err(off, "expected `feature NAME MIN MAX`"))?);
        } else {
            return Err(err(
                off,
                format!(
                    "unexpected line `{}`",
                    line.chars().take(40).collect::<String>()
                ),
            ));
        }
    }

    if let Some(i) = loaded.iter().position(|l| !l) {
        let missing = params.all_tensors()[i].0.to_string();
        return Err(err(text.len(), format!("missing tensor `{missing}`")));
    }
    if !features.is_empty() && features.len() != arch.seq_len {
        return Err(err(
            text.len(),
            format!(
                "{} feature ranges for {} inputs",
                features.len(),
                arch.seq_len
            ),
        ));
    }
    Ok(WeightFile {
        params,
        features: (!features.is_empty()).then_some(features),
    })
}
