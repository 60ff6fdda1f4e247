use crate::numerics::{SeededRng, Tensor};

pub fn random_tensor(shape: &[usize], seed: u64) -> Tensor<f64> {
    let mut rng = SeededRng::new(seed);
    let n = shape.iter().product();
    Tensor::from_vec(shape, (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect()).unwrap()
}

/// Central-difference check of `analytic` against `loss` at up to 100 coordinates of `point`.
pub fn check_grads(
    point: &Tensor<f64>,
    analytic: &Tensor<f64>,
    loss: impl Fn(&Tensor<f64>) -> f64,
) {
    assert_eq!(point.shape(), analytic.shape());
    let h = 1e-6;
    let n = point.len();
    let mut rng = SeededRng::new(n as u64);
    let coords: Vec<usize> = if n <= 100 {
        (0..n).collect()
    } else {
        (0..100).map(|_| rng.below(n)).collect()
    };
    for i in coords {
        let mut plus = point.clone();
        plus.data_mut()[i] += h;
        let mut minus = point.clone();
        minus.data_mut()[i] -= h;
        let numeric = (loss(&plus) - loss(&minus)) / (2.0 * h);
        let a = analytic.data()[i];
        let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-6);
        assert!(
            rel < 1e-5,
            "coord {i}: analytic {a} numeric {numeric} rel {rel}"
        );
    }
}
