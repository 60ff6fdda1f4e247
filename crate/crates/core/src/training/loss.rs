use crate::error::{Error, Result};
use crate::numerics::{Scalar, Tensor};

/// Probabilities are clamped to this before the log.
pub const PROB_FLOOR: f64 = 1e-12;

/// Mean categorical cross-entropy and its gradient w.r.t. the pre-softmax
/// logits, `(p - y) / B`.
pub fn cross_entropy<T: Scalar>(probs: &Tensor<T>, targets: &Tensor<T>) -> Result<(T, Tensor<T>)> {
    if probs.shape() != targets.shape() || probs.rank() != 2 {
        return Err(Error::shape(
            "cross_entropy",
            probs.shape(),
            targets.shape(),
        ));
    }
    let (b, k) = (probs.shape()[0], probs.shape()[1]);
    if b == 0 {
        return Err(Error::Data("cross-entropy of an empty batch".into()));
    }
    let floor = T::from_f64(PROB_FLOOR);
    let mut total = T::zero();
    for (i, (p, y)) in probs
        .data()
        .chunks(k)
        .zip(targets.data().chunks(k))
        .enumerate()
    {
        let hot = y.iter().position(|&v| v == T::one());
        let valid = hot.is_some() && y.iter().filter(|&&v| v == T::zero()).count() == k - 1;
        let Some(c) = hot.filter(|_| valid) else {
            return Err(Error::Data(format!("target row {i} is not one-hot")));
        };
        total -= p[c].max(floor).ln();
    }
    let inv_b = T::one() / T::from_f64(b as f64);
    let grad = probs.sub(targets)?.scale(inv_b);
    Ok((total * inv_b, grad))
}
