use crate::error::{Error, Result};
use crate::numerics::{Scalar, Tensor};

/// Temporal reduction applied to the convolution branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pooling {
    #[default]
    Max,
    Average,
}

impl Pooling {
    pub fn layer_name(self) -> &'static str {
        match self {
            Pooling::Max => "GlobalMaxPooling1D",
            Pooling::Average => "GlobalAveragePooling1D",
        }
    }
}

#[derive(Debug)]
pub struct PoolCache {
    input_shape: Vec<usize>,
    /// Argmax time index per (sample, channel); empty for average pooling.
    argmax: Vec<usize>,
    kind: Pooling,
}

/// Reduces `x: [B, T, C]` over time to `[B, C]`.
pub fn global_pool_forward<T: Scalar>(
    x: &Tensor<T>,
    kind: Pooling,
) -> Result<(Tensor<T>, PoolCache)> {
    if x.rank() != 3 || x.shape()[1] == 0 {
        return Err(Error::shape("global pooling", x.shape(), &[0, 1, 0]));
    }
    let (b, t_len, c) = (x.shape()[0], x.shape()[1], x.shape()[2]);
    let mut y = Tensor::zeros(&[b, c]);
    let mut argmax = Vec::new();
    match kind {
        Pooling::Max => {
            argmax = vec![0; b * c];
            for s in 0..b {
                for ch in 0..c {
                    let mut best = x.data()[s * t_len * c + ch];
                    let mut at = 0;
                    for t in 1..t_len {
                        let v = x.data()[(s * t_len + t) * c + ch];
                        // strict comparison keeps the first occurrence on ties
                        if v > best {
                            best = v;
                            at = t;
                        }
                    }
                    y.data_mut()[s * c + ch] = best;
                    argmax[s * c + ch] = at;
                }
            }
        }
        Pooling::Average => {
            let n = T::from_f64(t_len as f64);
            for s in 0..b {
                for t in 0..t_len {
                    for ch in 0..c {
                        y.data_mut()[s * c + ch] += x.data()[(s * t_len + t) * c + ch];
                    }
                }
            }
            y.data_mut().iter_mut().for_each(|v| *v = *v / n);
        }
    }
    Ok((
        y,
        PoolCache {
            input_shape: x.shape().to_vec(),
            argmax,
            kind,
        },
    ))
}

impl PoolCache {
    pub fn argmax(&self) -> &[usize] {
        &self.argmax
    }

    pub fn backward<T: Scalar>(self, dy: &Tensor<T>) -> Result<Tensor<T>> {
        let (b, t_len, c) = (
            self.input_shape[0],
            self.input_shape[1],
            self.input_shape[2],
        );
        if dy.shape() != [b, c] {
            return Err(Error::shape("global pooling backward", dy.shape(), &[b, c]));
        }
        let mut dx = Tensor::zeros(&self.input_shape);
        match self.kind {
            Pooling::Max => {
                for s in 0..b {
                    for ch in 0..c {
                        let t = self.argmax[s * c + ch];
                        dx.data_mut()[(s * t_len + t) * c + ch] = dy.data()[s * c + ch];
                    }
                }
            }
            Pooling::Average => {
                let n = T::from_f64(t_len as f64);
                for s in 0..b {
                    for t in 0..t_len {
                        for ch in 0..c {
                            dx.data_mut()[(s * t_len + t) * c + ch] = dy.data()[s * c + ch] / n;
                        }
                    }
                }
            }
        }
        Ok(dx)
    }
}
