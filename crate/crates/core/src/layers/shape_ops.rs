use crate::error::{Error, Result};
use crate::numerics::{Scalar, Tensor};

/// `[B, T, C] → [B, T·C]`; element `(t, c)` lands at `t·C + c`.
pub fn flatten<T: Scalar>(x: &Tensor<T>) -> Result<Tensor<T>> {
    if x.rank() < 2 {
        return Err(Error::shape("flatten", x.shape(), &[0, 0]));
    }
    let b = x.shape()[0];
    let rest = x.len().checked_div(b).unwrap_or(0);
    x.clone().reshape(&[b, rest])
}

/// Inverse of [`flatten`], used for its backward pass.
pub fn unflatten<T: Scalar>(dy: &Tensor<T>, shape: &[usize]) -> Result<Tensor<T>> {
    dy.clone().reshape(shape)
}

/// Row-wise concatenation of `a: [B, m]` and `b: [B, n]` into `[B, m + n]`.
pub fn concatenate<T: Scalar>(a: &Tensor<T>, b: &Tensor<T>) -> Result<Tensor<T>> {
    if a.rank() != 2 || b.rank() != 2 || a.shape()[0] != b.shape()[0] {
        return Err(Error::shape("concatenate", a.shape(), b.shape()));
    }
    let (rows, m, n) = (a.shape()[0], a.shape()[1], b.shape()[1]);
    let mut data = Vec::with_capacity(rows * (m + n));
    for r in 0..rows {
        data.extend_from_slice(&a.data()[r * m..(r + 1) * m]);
        data.extend_from_slice(&b.data()[r * n..(r + 1) * n]);
    }
    Tensor::from_vec(&[rows, m + n], data)
}

/// Splits a `[B, m + n]` gradient at column `m`.
pub fn split_columns<T: Scalar>(dy: &Tensor<T>, m: usize) -> Result<(Tensor<T>, Tensor<T>)> {
    if dy.rank() != 2 || m > dy.shape()[1] {
        return Err(Error::shape("split_columns", dy.shape(), &[m]));
    }
    let (rows, total) = (dy.shape()[0], dy.shape()[1]);
    let n = total - m;
    let mut left = Vec::with_capacity(rows * m);
    let mut right = Vec::with_capacity(rows * n);
    for row in dy.data().chunks(total.max(1)).take(rows) {
        left.extend_from_slice(&row[..m]);
        right.extend_from_slice(&row[m..]);
    }
    Ok((
        Tensor::from_vec(&[rows, m], left)?,
        Tensor::from_vec(&[rows, n], right)?,
    ))
}
