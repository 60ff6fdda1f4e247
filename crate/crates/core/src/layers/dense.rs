use crate::error::{Error, Result};
use crate::numerics::activations::{relu_grad, relu_scalar, softmax_in_place};
use crate::numerics::{init_he_uniform, Scalar, SeededRng, Tensor};

/// Activation applied after an affine map (also used standalone on the
/// convolution branch).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Linear,
    Softmax,
}

impl Activation {
    pub fn name(self) -> &'static str {
        match self {
            Activation::Relu => "relu",
            Activation::Linear => "linear",
            Activation::Softmax => "softmax",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "relu" => Some(Activation::Relu),
            "linear" => Some(Activation::Linear),
            "softmax" => Some(Activation::Softmax),
            _ => None,
        }
    }

    /// Applies the activation along the last axis.
    pub fn apply<T: Scalar>(self, z: &Tensor<T>) -> Tensor<T> {
        match self {
            Activation::Relu => z.map(relu_scalar),
            Activation::Linear => z.clone(),
            Activation::Softmax => {
                let mut out = z.clone();
                let k = *z.shape().last().unwrap_or(&1);
                if k > 0 {
                    out.data_mut().chunks_mut(k).for_each(softmax_in_place);
                }
                out
            }
        }
    }

    /// Maps `dy` (gradient w.r.t. the activation output `y`) back to the
    /// pre-activation `z`.
    pub fn backward<T: Scalar>(
        self,
        z: &Tensor<T>,
        y: &Tensor<T>,
        dy: &Tensor<T>,
    ) -> Result<Tensor<T>> {
        match self {
            Activation::Relu => dy.zip_map(z, "relu backward", |g, zv| g * relu_grad(zv)),
            Activation::Linear => Ok(dy.clone()),
            Activation::Softmax => {
                if dy.shape() != y.shape() {
                    return Err(Error::shape("softmax backward", dy.shape(), y.shape()));
                }
                let k = *y.shape().last().unwrap_or(&1);
                let mut dz = dy.clone();
                for (dz_row, y_row) in dz.data_mut().chunks_mut(k).zip(y.data().chunks(k)) {
                    let dot: T = dz_row.iter().zip(y_row).map(|(&g, &p)| g * p).sum();
                    for (g, &p) in dz_row.iter_mut().zip(y_row) {
                        *g = p * (*g - dot);
                    }
                }
                Ok(dz)
            }
        }
    }
}

/// Standalone activation layer.
#[derive(Debug)]
pub struct ActivationCache<T> {
    kind: Activation,
    z: Tensor<T>,
    y: Tensor<T>,
}

pub fn activation_forward<T: Scalar>(
    x: &Tensor<T>,
    kind: Activation,
) -> (Tensor<T>, ActivationCache<T>) {
    let y = kind.apply(x);
    (
        y.clone(),
        ActivationCache {
            kind,
            z: x.clone(),
            y,
        },
    )
}

impl<T: Scalar> ActivationCache<T> {
    pub fn backward(self, dy: &Tensor<T>) -> Result<Tensor<T>> {
        self.kind.backward(&self.z, &self.y, dy)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseParams<T> {
    /// `[in, out]`
    pub weights: Tensor<T>,
    pub bias: Tensor<T>,
}

impl<T: Scalar> DenseParams<T> {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        DenseParams {
            weights: Tensor::zeros(&[inputs, outputs]),
            bias: Tensor::zeros(&[outputs]),
        }
    }

    pub fn he_uniform(inputs: usize, outputs: usize, rng: &mut SeededRng) -> Self {
        DenseParams {
            weights: init_he_uniform(&[inputs, outputs], inputs, rng),
            bias: Tensor::zeros(&[outputs]),
        }
    }

    pub fn inputs(&self) -> usize {
        self.weights.shape()[0]
    }

    pub fn outputs(&self) -> usize {
        self.weights.shape()[1]
    }

    pub fn param_count(&self) -> usize {
        self.weights.len() + self.bias.len()
    }
}

#[derive(Debug)]
pub struct DenseCache<T> {
    input: Tensor<T>,
    z: Tensor<T>,
    y: Tensor<T>,
    activation: Activation,
}

/// `y = activation(x·W + b)` for `x: [B, in]`.
pub fn dense_forward<T: Scalar>(
    x: &Tensor<T>,
    p: &DenseParams<T>,
    activation: Activation,
) -> Result<(Tensor<T>, DenseCache<T>)> {
    if x.rank() != 2 || x.shape()[1] != p.inputs() {
        return Err(Error::shape("dense", x.shape(), p.weights.shape()));
    }
    let mut z = x.matmul(&p.weights)?;
    let out = p.outputs();
    for row in z.data_mut().chunks_mut(out) {
        for (v, &b) in row.iter_mut().zip(p.bias.data()) {
            *v += b;
        }
    }
    let y = activation.apply(&z);
    Ok((
        y.clone(),
        DenseCache {
            input: x.clone(),
            z,
            y,
            activation,
        },
    ))
}

impl<T: Scalar> DenseCache<T> {
    pub fn output(&self) -> &Tensor<T> {
        &self.y
    }

    /// Backward from the gradient w.r.t. the activated output.
    pub fn backward(
        self,
        dy: &Tensor<T>,
        p: &DenseParams<T>,
    ) -> Result<(Tensor<T>, DenseParams<T>)> {
        let dz = self.activation.backward(&self.z, &self.y, dy)?;
        self.backward_from_logits(&dz, p)
    }

    /// Backward from the gradient w.r.t. the pre-activation `z`.
    pub fn backward_from_logits(
        self,
        dz: &Tensor<T>,
        p: &DenseParams<T>,
    ) -> Result<(Tensor<T>, DenseParams<T>)> {
        if dz.shape() != self.z.shape() {
            return Err(Error::shape("dense backward", dz.shape(), self.z.shape()));
        }
        let weights = self.input.transpose()?.matmul(dz)?;
        let mut bias = Tensor::zeros(&[p.outputs()]);
        for row in dz.data().chunks(p.outputs()) {
            for (b, &g) in bias.data_mut().iter_mut().zip(row) {
                *b += g;
            }
        }
        let dx = dz.matmul(&p.weights.transpose()?)?;
        Ok((dx, DenseParams { weights, bias }))
    }
}
