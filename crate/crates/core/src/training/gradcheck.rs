//! Central-difference verification of the analytic gradients of the whole
//! network, in double precision.

use std::fmt;

use crate::error::{Error, Result};
use crate::layers::Mode;
use crate::network::{backward, forward, NetworkGrads, NetworkParameters, ParamId};
use crate::numerics::{SeededRng, Tensor};
use crate::training::loss::cross_entropy;

/// Deliberate corruption of the analytic gradients, used to show that the
/// check can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    /// Negate the gradients of the GRU recurrent kernels.
    FlipGruRecurrent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckConfig {
    pub probes: usize,
    pub tolerance: f64,
    pub step: f64,
    /// Differences smaller than this are measured in absolute terms.
    pub floor: f64,
    pub batch_size: usize,
    pub seed: u64,
    pub mutation: Option<Mutation>,
    /// Feed an all-zero batch instead of random inputs.
    pub zero_input: bool,
}

impl Default for GradCheckConfig {
    fn default() -> Self {
        GradCheckConfig {
            probes: 100,
            tolerance: 1e-5,
            step: 1e-5,
            floor: 1e-4,
            batch_size: 4,
            seed: 0,
            mutation: None,
            zero_input: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Probe {
    pub param: ParamId,
    pub index: usize,
    pub analytic: f64,
    pub numeric: f64,
    pub rel_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub probes: Vec<Probe>,
    pub tolerance: f64,
}

impl GradCheckReport {
    pub fn passed(&self) -> bool {
        self.probes.iter().all(|p| p.rel_error < self.tolerance)
    }

    pub fn failures(&self) -> usize {
        self.probes
            .iter()
            .filter(|p| !(p.rel_error < self.tolerance))
            .count()
    }

    pub fn worst(&self) -> Option<&Probe> {
        self.probes
            .iter()
            .max_by(|a, b| a.rel_error.total_cmp(&b.rel_error))
    }

    pub fn layers(&self) -> Vec<&'static str> {
        let mut out: Vec<&'static str> = Vec::new();
        for p in &self.probes {
            if !out.contains(&p.param.layer) {
                out.push(p.param.layer);
            }
        }
        out
    }
}

impl fmt::Display for GradCheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "gradcheck probes={} failures={} tolerance={:e} result={}",
            self.probes.len(),
            self.failures(),
            self.tolerance,
            if self.passed() { "PASS" } else { "FAIL" }
        )?;
        for layer in self.layers() {
            let worst = self
                .probes
                .iter()
                .filter(|p| p.param.layer == layer)
                .map(|p| p.rel_error)
                .fold(0.0, f64::max);
            let n = self
                .probes
                .iter()
                .filter(|p| p.param.layer == layer)
                .count();
            writeln!(f, "layer={layer} probes={n} max_rel_error={worst:e}")?;
        }
        if let Some(w) = self.worst() {
            writeln!(
                f,
                "worst={}[{}] analytic={:e} numeric={:e} rel_error={:e}",
                w.param, w.index, w.analytic, w.numeric, w.rel_error
            )?;
        }
        Ok(())
    }
}

fn relative_error(a: f64, n: f64, floor: f64) -> f64 {
    (a - n).abs() / a.abs().max(n.abs()).max(floor)
}

fn apply_mutation(grads: &mut NetworkGrads<f64>, m: Mutation) {
    match m {
        Mutation::FlipGruRecurrent => {
            for t in [&mut grads.gru.u_z, &mut grads.gru.u_r, &mut grads.gru.u_h] {
                *t = t.scale(-1.0);
            }
        }
    }
}

/// Picks coordinates round-robin over the parametered layers, uniformly
/// within each layer.
fn choose_probes(
    params: &NetworkParameters<f64>,
    count: usize,
    rng: &mut SeededRng,
) -> Vec<(usize, usize)> {
    let tensors = params.trainable();
    let mut layers: Vec<(&'static str, Vec<usize>)> = Vec::new();
    for (i, (id, _)) in tensors.iter().enumerate() {
        match layers.iter_mut().find(|(l, _)| *l == id.layer) {
            Some((_, members)) => members.push(i),
            None => layers.push((id.layer, vec![i])),
        }
    }
    (0..count)
        .map(|k| {
            let members = &layers[k % layers.len()].1;
            let size: usize = members.iter().map(|&i| tensors[i].1.len()).sum();
            let mut flat = rng.below(size);
            for &i in members {
                let len = tensors[i].1.len();
                if flat < len {
                    return (i, flat);
                }
                flat -= len;
            }
            unreachable!("coordinate drawn inside the layer")
        })
        .collect()
}

fn batch_loss(params: &NetworkParameters<f64>, x: &Tensor<f64>, y: &Tensor<f64>) -> Result<f64> {
    let (probs, _) = forward(params, x, Mode::Train)?;
    Ok(cross_entropy(&probs, y)?.0)
}

/// Compares analytic gradients against central differences of the training
/// loss on a seeded random batch.
pub fn gradient_check(
    params: &NetworkParameters<f64>,
    config: &GradCheckConfig,
) -> Result<GradCheckReport> {
    if config.probes == 0 || config.batch_size == 0 {
        return Err(Error::Config(
            "gradient check needs at least one probe and one row".into(),
        ));
    }
    if !(config.step > 0.0 && config.tolerance > 0.0) {
        return Err(Error::Config(
            "gradient check step and tolerance must be positive".into(),
        ));
    }
    let arch = &params.arch;
    let mut rng = SeededRng::stream(config.seed, "gradcheck");
    let (b, t, c, k) = (
        config.batch_size,
        arch.seq_len,
        arch.in_channels,
        arch.classes,
    );
    let x_data = (0..b * t * c)
        .map(|_| {
            if config.zero_input {
                0.0
            } else {
                rng.uniform(0.0, 1.0)
            }
        })
        .collect();
    let x = Tensor::from_vec(&[b, t, c], x_data)?;
    let mut y = Tensor::zeros(&[b, k]);
    for row in 0..b {
        let class = rng.below(k);
        y.set(&[row, class], 1.0);
    }

    let (probs, cache) = forward(params, &x, Mode::Train)?;
    let (_, d_logits) = cross_entropy(&probs, &y)?;
    let mut grads = backward(params, cache, &d_logits)?;
    if let Some(m) = config.mutation {
        apply_mutation(&mut grads, m);
    }
    let grad_tensors = grads.tensors();

    let ids: Vec<ParamId> = params.trainable().into_iter().map(|(id, _)| id).collect();
    let mut probes = Vec::with_capacity(config.probes);
    for (tensor, index) in choose_probes(params, config.probes, &mut rng) {
        let mut plus = params.clone();
        plus.trainable_mut()[tensor].1.data_mut()[index] += config.step;
        let mut minus = params.clone();
        minus.trainable_mut()[tensor].1.data_mut()[index] -= config.step;
        let numeric =
            (batch_loss(&plus, &x, &y)? - batch_loss(&minus, &x, &y)?) / (2.0 * config.step);
        let analytic = grad_tensors[tensor].1.data()[index];
        if !numeric.is_finite() || !analytic.is_finite() {
            return Err(Error::Numeric(format!(
                "non-finite gradient at {}[{index}]: analytic {analytic}, numeric {numeric}",
                ids[tensor]
            )));
        }
        probes.push(Probe {
            param: ids[tensor],
            index,
            analytic,
            numeric,
            rel_error: relative_error(analytic, numeric, config.floor),
        });
    }
    Ok(GradCheckReport {
        probes,
        tolerance: config.tolerance,
    })
}
