use crate::error::{Error, Result};
use crate::numerics::{init_he_uniform, Scalar, SeededRng, Tensor};

/// 1-D convolution weights: kernel `[kernel_size, in_channels, filters]`, bias `[filters]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Conv1DParams<T> {
    pub kernel: Tensor<T>,
    pub bias: Tensor<T>,
}

impl<T: Scalar> Conv1DParams<T> {
    pub fn zeros(kernel_size: usize, in_channels: usize, filters: usize) -> Self {
        Conv1DParams {
            kernel: Tensor::zeros(&[kernel_size, in_channels, filters]),
            bias: Tensor::zeros(&[filters]),
        }
    }

    /// He-uniform kernel with `fan_in = kernel_size · in_channels`, zero bias.
    pub fn he_uniform(
        kernel_size: usize,
        in_channels: usize,
        filters: usize,
        rng: &mut SeededRng,
    ) -> Self {
        Conv1DParams {
            kernel: init_he_uniform(
                &[kernel_size, in_channels, filters],
                kernel_size * in_channels,
                rng,
            ),
            bias: Tensor::zeros(&[filters]),
        }
    }

    pub fn kernel_size(&self) -> usize {
        self.kernel.shape()[0]
    }

    pub fn in_channels(&self) -> usize {
        self.kernel.shape()[1]
    }

    pub fn filters(&self) -> usize {
        self.kernel.shape()[2]
    }

    pub fn param_count(&self) -> usize {
        self.kernel.len() + self.bias.len()
    }
}

#[derive(Debug)]
pub struct Conv1DCache<T> {
    input: Tensor<T>,
}

/// Left zero-padding for "same" output length.
fn left_pad(kernel_size: usize) -> usize {
    (kernel_size - 1) / 2
}

/// "Same"-padded convolution over `x: [B, T, C_in]`, giving `[B, T, filters]`.
pub fn conv1d_forward<T: Scalar>(
    x: &Tensor<T>,
    p: &Conv1DParams<T>,
) -> Result<(Tensor<T>, Conv1DCache<T>)> {
    if x.rank() != 3 || x.shape()[2] != p.in_channels() {
        return Err(Error::shape("conv1d", x.shape(), p.kernel.shape()));
    }
    let (b, t_len, c_in) = (x.shape()[0], x.shape()[1], x.shape()[2]);
    let (k_size, filters) = (p.kernel_size(), p.filters());
    let pad = left_pad(k_size);
    let kern = p.kernel.data();
    let xs = x.data();

    let mut y = Tensor::zeros(&[b, t_len, filters]);
    let yd = y.data_mut();
    for s in 0..b {
        for t in 0..t_len {
            let out = &mut yd[(s * t_len + t) * filters..(s * t_len + t + 1) * filters];
            out.copy_from_slice(p.bias.data());
            for k in 0..k_size {
                let src = t + k;
                if src < pad || src - pad >= t_len {
                    continue;
                }
                let src = src - pad;
                for c in 0..c_in {
                    let xv = xs[(s * t_len + src) * c_in + c];
                    let w = &kern[(k * c_in + c) * filters..(k * c_in + c + 1) * filters];
                    for (o, &wv) in out.iter_mut().zip(w) {
                        *o += xv * wv;
                    }
                }
            }
        }
    }
    Ok((y, Conv1DCache { input: x.clone() }))
}

impl<T: Scalar> Conv1DCache<T> {
    /// Returns `(dx, d_params)` for upstream gradient `dy: [B, T, filters]`.
    pub fn backward(
        self,
        dy: &Tensor<T>,
        p: &Conv1DParams<T>,
    ) -> Result<(Tensor<T>, Conv1DParams<T>)> {
        let x = &self.input;
        let (b, t_len, c_in) = (x.shape()[0], x.shape()[1], x.shape()[2]);
        let (k_size, filters) = (p.kernel_size(), p.filters());
        if dy.shape() != [b, t_len, filters] {
            return Err(Error::shape(
                "conv1d backward",
                dy.shape(),
                &[b, t_len, filters],
            ));
        }
        let pad = left_pad(k_size);
        let mut grads = Conv1DParams::zeros(k_size, c_in, filters);
        let mut dx = Tensor::zeros(x.shape());
        let (xs, dys, kern) = (x.data(), dy.data(), p.kernel.data());

        for s in 0..b {
            for t in 0..t_len {
                let g = &dys[(s * t_len + t) * filters..(s * t_len + t + 1) * filters];
                for (db, &gv) in grads.bias.data_mut().iter_mut().zip(g) {
                    *db += gv;
                }
                for k in 0..k_size {
                    let src = t + k;
                    if src < pad || src - pad >= t_len {
                        continue;
                    }
                    let src = src - pad;
                    for c in 0..c_in {
                        let row = (k * c_in + c) * filters..(k * c_in + c + 1) * filters;
                        let xv = xs[(s * t_len + src) * c_in + c];
                        let mut acc = T::zero();
                        for ((dw, &w), &gv) in grads.kernel.data_mut()[row.clone()]
                            .iter_mut()
                            .zip(&kern[row])
                            .zip(g)
                        {
                            *dw += xv * gv;
                            acc += w * gv;
                        }
                        dx.data_mut()[(s * t_len + src) * c_in + c] += acc;
                    }
                }
            }
        }
        Ok((dx, grads))
    }
}
