use crate::numerics::{Scalar, SeededRng, Tensor};

/// Default standard deviation for truncated-normal weights.
pub const TRUNCATED_NORMAL_STDDEV: f64 = 0.05;

/// Samples of N(0, stddev²); anything beyond ±2·stddev is redrawn.
pub fn init_truncated_normal<T: Scalar>(
    shape: &[usize],
    stddev: f64,
    rng: &mut SeededRng,
) -> Tensor<T> {
    assert!(stddev > 0.0, "stddev must be positive");
    let n: usize = shape.iter().product();
    let data = (0..n)
        .map(|_| loop {
            let v = rng.standard_normal();
            if v.abs() <= 2.0 {
                break T::from_f64(v * stddev);
            }
        })
        .collect();
    Tensor::from_vec(shape, data).expect("length matches shape")
}

/// He-uniform: U[-L, L] with L = sqrt(6 / fan_in).
pub fn init_he_uniform<T: Scalar>(
    shape: &[usize],
    fan_in: usize,
    rng: &mut SeededRng,
) -> Tensor<T> {
    assert!(fan_in >= 1, "fan_in must be at least 1");
    let limit = he_uniform_limit(fan_in);
    let n: usize = shape.iter().product();
    let data = (0..n)
        .map(|_| T::from_f64(rng.uniform(-limit, limit)))
        .collect();
    Tensor::from_vec(shape, data).expect("length matches shape")
}

pub fn he_uniform_limit(fan_in: usize) -> f64 {
    (6.0 / fan_in as f64).sqrt()
}
