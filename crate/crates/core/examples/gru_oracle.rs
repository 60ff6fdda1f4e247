//! Runs the batched GRU on a tiny input and compares it with a direct
//! per-step evaluation of the gate equations.

use botnet_gru_cnn::layers::{gru_forward, GruParams};
use botnet_gru_cnn::numerics::{SeededRng, Tensor};

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn main() -> botnet_gru_cnn::Result<()> {
    let (t_len, input, units) = (5, 2, 3);
    let mut rng = SeededRng::new(3);
    let mut params = GruParams::<f64>::truncated_normal(input, units, 0.5, &mut rng);
    for (_, t) in params.tensors_mut() {
        for v in t.data_mut() {
            *v += rng.uniform(-0.1, 0.1);
        }
    }
    let xs: Vec<f64> = (0..t_len * input).map(|_| rng.uniform(-1.0, 1.0)).collect();
    let x = Tensor::from_vec(&[1, t_len, input], xs.clone())?;
    let (h_seq, _) = gru_forward(&x, &params, None)?;

    let w = |t: &Tensor<f64>, i: usize, j: usize| t.at(&[i, j]);
    let mut h = vec![0.0; units];
    let mut max_diff: f64 = 0.0;
    for step in 0..t_len {
        let xt = &xs[step * input..(step + 1) * input];
        let lin = |wk: &Tensor<f64>, uk: &Tensor<f64>, j: usize| {
            let xw: f64 = (0..input).map(|i| xt[i] * w(wk, i, j)).sum();
            let hu: f64 = (0..units).map(|i| h[i] * w(uk, i, j)).sum();
            (xw, hu)
        };
        let mut next = vec![0.0; units];
        for j in 0..units {
            let (xz, hz) = lin(&params.w_z, &params.u_z, j);
            let (xr, hr) = lin(&params.w_r, &params.u_r, j);
            let (xh, hh) = lin(&params.w_h, &params.u_h, j);
            let z = sigmoid(xz + params.b_z.data()[j] + hz + params.rb_z.data()[j]);
            let r = sigmoid(xr + params.b_r.data()[j] + hr + params.rb_r.data()[j]);
            let cand = (xh + params.b_h.data()[j] + r * (hh + params.rb_h.data()[j])).tanh();
            next[j] = (1.0 - z) * h[j] + z * cand;
        }
        h = next;
        for (j, hj) in h.iter().enumerate() {
            max_diff = max_diff.max((hj - h_seq.at(&[0, step, j])).abs());
        }
        println!("t={step} h={h:.6?}");
    }
    println!("max |batched - per-step| = {max_diff:e}");
    Ok(())
}
