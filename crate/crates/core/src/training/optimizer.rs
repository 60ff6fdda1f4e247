use crate::error::{Error, Result};
use crate::network::{Architecture, NetworkGrads, NetworkParameters};
use crate::numerics::{Scalar, Tensor};

/// Running mean of squared gradients, one accumulator per trainable tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct RmsPropState<T> {
    accumulators: NetworkGrads<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RmsProp {
    pub learning_rate: f64,
    pub decay: f64,
    pub epsilon: f64,
}

impl Default for RmsProp {
    fn default() -> Self {
        RmsProp {
            learning_rate: 1e-3,
            decay: 0.9,
            epsilon: 1e-7,
        }
    }
}

impl<T: Scalar> RmsPropState<T> {
    pub fn new(arch: &Architecture) -> Self {
        RmsPropState {
            accumulators: NetworkGrads::zeros(arch),
        }
    }

    pub fn accumulators(&self) -> Vec<&Tensor<T>> {
        self.accumulators
            .tensors()
            .into_iter()
            .map(|(_, t)| t)
            .collect()
    }
}

/// `s <- rho*s + (1-rho)*g^2`, `theta <- theta - lr*g/(sqrt(s)+eps)` on every
/// trainable tensor. Moving statistics are not touched.
pub fn rmsprop_step<T: Scalar>(
    params: &mut NetworkParameters<T>,
    grads: &NetworkGrads<T>,
    state: &mut RmsPropState<T>,
    opt: &RmsProp,
) -> Result<()> {
    let lr = T::from_f64(opt.learning_rate);
    let rho = T::from_f64(opt.decay);
    let keep = T::one() - rho;
    let eps = T::from_f64(opt.epsilon);
    let targets = params.trainable_mut();
    let grads = grads.tensors();
    let accs = state.accumulators.tensors_mut();
    if targets.len() != grads.len() || targets.len() != accs.len() {
        return Err(Error::Numeric(
            "gradient layout does not match the parameters".into(),
        ));
    }
    for (((id, theta), (_, g)), (_, s)) in targets.into_iter().zip(grads).zip(accs) {
        if theta.shape() != g.shape() || theta.shape() != s.shape() {
            return Err(Error::Numeric(format!(
                "rmsprop {id}: parameter {:?}, gradient {:?}, accumulator {:?}",
                theta.shape(),
                g.shape(),
                s.shape()
            )));
        }
        for ((t, &gv), sv) in theta.data_mut().iter_mut().zip(g.data()).zip(s.data_mut()) {
            *sv = rho * *sv + keep * gv * gv;
            *t -= lr * gv / (sv.sqrt() + eps);
        }
    }
    Ok(())
}
