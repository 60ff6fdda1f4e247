//! Elementwise activations and their derivatives.

use crate::numerics::{Scalar, Tensor};

/// Logistic function, evaluated on the branch that cannot overflow.
#[inline]
pub fn sigmoid_scalar<T: Scalar>(x: T) -> T {
    if x >= T::zero() {
        T::one() / (T::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (T::one() + e)
    }
}

#[inline]
pub fn tanh_scalar<T: Scalar>(x: T) -> T {
    x.tanh()
}

#[inline]
pub fn relu_scalar<T: Scalar>(x: T) -> T {
    if x > T::zero() {
        x
    } else {
        T::zero()
    }
}

pub fn sigmoid<T: Scalar>(x: &Tensor<T>) -> Tensor<T> {
    x.map(sigmoid_scalar)
}

pub fn tanh<T: Scalar>(x: &Tensor<T>) -> Tensor<T> {
    x.map(tanh_scalar)
}

pub fn relu<T: Scalar>(x: &Tensor<T>) -> Tensor<T> {
    x.map(relu_scalar)
}

/// Derivative of the sigmoid expressed through its output `s`.
#[inline]
pub fn sigmoid_grad_from_output<T: Scalar>(s: T) -> T {
    s * (T::one() - s)
}

/// Derivative of tanh expressed through its output `t`.
#[inline]
pub fn tanh_grad_from_output<T: Scalar>(t: T) -> T {
    T::one() - t * t
}

#[inline]
pub fn relu_grad<T: Scalar>(x: T) -> T {
    if x > T::zero() {
        T::one()
    } else {
        T::zero()
    }
}

/// Softmax of a slice, in place, with max subtraction.
pub fn softmax_in_place<T: Scalar>(v: &mut [T]) {
    let max = v.iter().copied().fold(T::neg_infinity(), T::max);
    let mut sum = T::zero();
    for x in v.iter_mut() {
        *x = (*x - max).exp();
        sum += *x;
    }
    for x in v.iter_mut() {
        *x = *x / sum;
    }
}

/// Softmax along the last axis.
pub fn softmax<T: Scalar>(x: &Tensor<T>) -> Tensor<T> {
    let mut out = x.clone();
    let k = *x.shape().last().unwrap_or(&1);
    if k > 0 {
        for row in out.data_mut().chunks_mut(k) {
            softmax_in_place(row);
        }
    }
    out
}
