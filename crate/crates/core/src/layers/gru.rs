//! Gated recurrent unit with separate input-side and recurrent-side biases.
//!
//! Per step, with row-vector inputs:
//!
//! ```text
//! z  = σ(x·W_z + b_z + h·U_z + b'_z)
//! r  = σ(x·W_r + b_r + h·U_r + b'_r)
//! h̃  = tanh(x·W_h + b_h + r ⊙ (h·U_h + b'_h))
//! h' = (1 − z) ⊙ h + z ⊙ h̃
//! ```
//!
//! Setting every `b'` to zero recovers the single-bias form. The layer
//! returns the full hidden-state sequence.

use crate::error::{Error, Result};
use crate::numerics::activations::{
    sigmoid_grad_from_output, sigmoid_scalar, tanh_grad_from_output,
};
use crate::numerics::{init_truncated_normal, Scalar, SeededRng, Tensor};

#[derive(Debug, Clone, PartialEq)]
pub struct GruParams<T> {
    /// `[input_dim, units]`
    pub w_z: Tensor<T>,
    pub w_r: Tensor<T>,
    pub w_h: Tensor<T>,
    /// `[units, units]`
    pub u_z: Tensor<T>,
    pub u_r: Tensor<T>,
    pub u_h: Tensor<T>,
    /// input-side biases, `[units]`
    pub b_z: Tensor<T>,
    pub b_r: Tensor<T>,
    pub b_h: Tensor<T>,
    /// recurrent-side biases, `[units]`
    pub rb_z: Tensor<T>,
    pub rb_r: Tensor<T>,
    pub rb_h: Tensor<T>,
}

impl<T: Scalar> GruParams<T> {
    pub fn zeros(input_dim: usize, units: usize) -> Self {
        let w = || Tensor::zeros(&[input_dim, units]);
        let u = || Tensor::zeros(&[units, units]);
        let b = || Tensor::zeros(&[units]);
        GruParams {
            w_z: w(),
            w_r: w(),
            w_h: w(),
            u_z: u(),
            u_r: u(),
            u_h: u(),
            b_z: b(),
            b_r: b(),
            b_h: b(),
            rb_z: b(),
            rb_r: b(),
            rb_h: b(),
        }
    }

    /// Truncated-normal weights, zero biases.
    pub fn truncated_normal(
        input_dim: usize,
        units: usize,
        stddev: f64,
        rng: &mut SeededRng,
    ) -> Self {
        let mut p = Self::zeros(input_dim, units);
        for t in [
            &mut p.w_z, &mut p.w_r, &mut p.w_h, &mut p.u_z, &mut p.u_r, &mut p.u_h,
        ] {
            *t = init_truncated_normal(t.shape(), stddev, rng);
        }
        p
    }

    pub fn input_dim(&self) -> usize {
        self.w_z.shape()[0]
    }

    pub fn units(&self) -> usize {
        self.w_z.shape()[1]
    }

    pub fn param_count(&self) -> usize {
        self.tensors().iter().map(|(_, t)| t.len()).sum()
    }

    /// All twelve tensors in manifest order.
    pub fn tensors(&self) -> [(&'static str, &Tensor<T>); 12] {
        [
            ("w_z", &self.w_z),
            ("w_r", &self.w_r),
            ("w_h", &self.w_h),
            ("u_z", &self.u_z),
            ("u_r", &self.u_r),
            ("u_h", &self.u_h),
            ("b_z", &self.b_z),
            ("b_r", &self.b_r),
            ("b_h", &self.b_h),
            ("rb_z", &self.rb_z),
            ("rb_r", &self.rb_r),
            ("rb_h", &self.rb_h),
        ]
    }

    pub fn tensors_mut(&mut self) -> [(&'static str, &mut Tensor<T>); 12] {
        [
            ("w_z", &mut self.w_z),
            ("w_r", &mut self.w_r),
            ("w_h", &mut self.w_h),
            ("u_z", &mut self.u_z),
            ("u_r", &mut self.u_r),
            ("u_h", &mut self.u_h),
            ("b_z", &mut self.b_z),
            ("b_r", &mut self.b_r),
            ("b_h", &mut self.b_h),
            ("rb_z", &mut self.rb_z),
            ("rb_r", &mut self.rb_r),
            ("rb_h", &mut self.rb_h),
        ]
    }
}

#[derive(Debug)]
pub struct GruCache<T> {
    input: Tensor<T>,
    batch: usize,
    steps: usize,
    // [B, T, units] each
    h_prev: Vec<T>,
    z: Vec<T>,
    r: Vec<T>,
    cand: Vec<T>,
    /// h·U_h + b'_h
    rec_h: Vec<T>,
}

/// `acc[j] += Σ_i v[i] · m[i][j]` for a row-major `m: [v.len(), acc.len()]`.
#[inline]
fn vec_mat_acc<T: Scalar>(v: &[T], m: &[T], acc: &mut [T]) {
    let n = acc.len();
    for (i, &vi) in v.iter().enumerate() {
        for (a, &w) in acc.iter_mut().zip(&m[i * n..(i + 1) * n]) {
            *a += vi * w;
        }
    }
}

/// `acc[i] += Σ_j m[i][j] · g[j]` (product with the transpose).
#[inline]
fn mat_vec_acc<T: Scalar>(m: &[T], g: &[T], acc: &mut [T]) {
    let n = g.len();
    for (i, a) in acc.iter_mut().enumerate() {
        let mut s = T::zero();
        for (&w, &gj) in m[i * n..(i + 1) * n].iter().zip(g) {
            s += w * gj;
        }
        *a += s;
    }
}

/// `m[i][j] += v[i] · g[j]`
#[inline]
fn outer_acc<T: Scalar>(v: &[T], g: &[T], m: &mut [T]) {
    let n = g.len();
    for (i, &vi) in v.iter().enumerate() {
        for (w, &gj) in m[i * n..(i + 1) * n].iter_mut().zip(g) {
            *w += vi * gj;
        }
    }
}

#[inline]
fn add_into<T: Scalar>(dst: &mut [T], src: &[T]) {
    for (d, &s) in dst.iter_mut().zip(src) {
        *d += s;
    }
}

/// Runs the recurrence over `x: [B, T, input_dim]` from `h0: [B, units]`
/// (zeros when `None`), returning all hidden states `[B, T, units]`.
pub fn gru_forward<T: Scalar>(
    x: &Tensor<T>,
    p: &GruParams<T>,
    h0: Option<&Tensor<T>>,
) -> Result<(Tensor<T>, GruCache<T>)> {
    let (d, u) = (p.input_dim(), p.units());
    if x.rank() != 3 || x.shape()[2] != d || x.shape()[1] == 0 {
        return Err(Error::shape("gru", x.shape(), p.w_z.shape()));
    }
    let (b, steps) = (x.shape()[0], x.shape()[1]);
    let zero_state = Tensor::zeros(&[b, u]);
    let h0 = h0.unwrap_or(&zero_state);
    if h0.shape() != [b, u] {
        return Err(Error::shape("gru h0", h0.shape(), &[b, u]));
    }

    let n = b * steps * u;
    let mut cache = GruCache {
        input: x.clone(),
        batch: b,
        steps,
        h_prev: vec![T::zero(); n],
        z: vec![T::zero(); n],
        r: vec![T::zero(); n],
        cand: vec![T::zero(); n],
        rec_h: vec![T::zero(); n],
    };
    let mut out = Tensor::zeros(&[b, steps, u]);

    let mut pre_z = vec![T::zero(); u];
    let mut pre_r = vec![T::zero(); u];
    let mut pre_h = vec![T::zero(); u];
    let mut rec_h = vec![T::zero(); u];
    for s in 0..b {
        let mut h: Vec<T> = h0.data()[s * u..(s + 1) * u].to_vec();
        for t in 0..steps {
            let xt = &x.data()[(s * steps + t) * d..(s * steps + t + 1) * d];
            let slot = (s * steps + t) * u..(s * steps + t + 1) * u;

            for j in 0..u {
                pre_z[j] = p.b_z.data()[j] + p.rb_z.data()[j];
                pre_r[j] = p.b_r.data()[j] + p.rb_r.data()[j];
                pre_h[j] = p.b_h.data()[j];
                rec_h[j] = p.rb_h.data()[j];
            }
            vec_mat_acc(xt, p.w_z.data(), &mut pre_z);
            vec_mat_acc(xt, p.w_r.data(), &mut pre_r);
            vec_mat_acc(xt, p.w_h.data(), &mut pre_h);
            vec_mat_acc(&h, p.u_z.data(), &mut pre_z);
            vec_mat_acc(&h, p.u_r.data(), &mut pre_r);
            vec_mat_acc(&h, p.u_h.data(), &mut rec_h);

            cache.h_prev[slot.clone()].copy_from_slice(&h);
            cache.rec_h[slot.clone()].copy_from_slice(&rec_h);
            for j in 0..u {
                let z = sigmoid_scalar(pre_z[j]);
                let r = sigmoid_scalar(pre_r[j]);
                let cand = (pre_h[j] + r * rec_h[j]).tanh();
                let k = slot.start + j;
                cache.z[k] = z;
                cache.r[k] = r;
                cache.cand[k] = cand;
                h[j] = (T::one() - z) * h[j] + z * cand;
            }
            out.data_mut()[slot].copy_from_slice(&h);
        }
    }
    Ok((out, cache))
}

/// Gradients produced by [`GruCache::backward`].
#[derive(Debug, Clone)]
pub struct GruGrads<T> {
    pub input: Tensor<T>,
    pub h0: Tensor<T>,
    pub params: GruParams<T>,
}

impl<T: Scalar> GruCache<T> {
    /// Backpropagation through time for `dh_seq: [B, T, units]`.
    pub fn backward(self, dh_seq: &Tensor<T>, p: &GruParams<T>) -> Result<GruGrads<T>> {
        let (d, u) = (p.input_dim(), p.units());
        let (b, steps) = (self.batch, self.steps);
        if dh_seq.shape() != [b, steps, u] {
            return Err(Error::shape("gru backward", dh_seq.shape(), &[b, steps, u]));
        }
        let mut g = GruParams::zeros(d, u);
        let mut dx = Tensor::zeros(self.input.shape());
        let mut dh0 = Tensor::zeros(&[b, u]);

        let mut dpre_z = vec![T::zero(); u];
        let mut dpre_r = vec![T::zero(); u];
        let mut dpre_h = vec![T::zero(); u];
        let mut drec_h = vec![T::zero(); u];
        for s in 0..b {
            let mut dh_next = vec![T::zero(); u];
            for t in (0..steps).rev() {
                let slot = (s * steps + t) * u..(s * steps + t + 1) * u;
                let h_prev = &self.h_prev[slot.clone()];
                let mut dh_prev = vec![T::zero(); u];
                for j in 0..u {
                    let k = slot.start + j;
                    let dh = dh_seq.data()[k] + dh_next[j];
                    let (z, r, cand) = (self.z[k], self.r[k], self.cand[k]);
                    dh_prev[j] = dh * (T::one() - z);
                    let dz = dh * (cand - h_prev[j]);
                    let dcand = dh * z;
                    dpre_h[j] = dcand * tanh_grad_from_output(cand);
                    let dr = dpre_h[j] * self.rec_h[k];
                    drec_h[j] = dpre_h[j] * r;
                    dpre_z[j] = dz * sigmoid_grad_from_output(z);
                    dpre_r[j] = dr * sigmoid_grad_from_output(r);
                }

                let xt = &self.input.data()[(s * steps + t) * d..(s * steps + t + 1) * d];
                outer_acc(xt, &dpre_z, g.w_z.data_mut());
                outer_acc(xt, &dpre_r, g.w_r.data_mut());
                outer_acc(xt, &dpre_h, g.w_h.data_mut());
                outer_acc(h_prev, &dpre_z, g.u_z.data_mut());
                outer_acc(h_prev, &dpre_r, g.u_r.data_mut());
                outer_acc(h_prev, &drec_h, g.u_h.data_mut());
                add_into(g.b_z.data_mut(), &dpre_z);
                add_into(g.rb_z.data_mut(), &dpre_z);
                add_into(g.b_r.data_mut(), &dpre_r);
                add_into(g.rb_r.data_mut(), &dpre_r);
                add_into(g.b_h.data_mut(), &dpre_h);
                add_into(g.rb_h.data_mut(), &drec_h);

                mat_vec_acc(p.u_z.data(), &dpre_z, &mut dh_prev);
                mat_vec_acc(p.u_r.data(), &dpre_r, &mut dh_prev);
                mat_vec_acc(p.u_h.data(), &drec_h, &mut dh_prev);

                let dxt = &mut dx.data_mut()[(s * steps + t) * d..(s * steps + t + 1) * d];
                mat_vec_acc(p.w_z.data(), &dpre_z, dxt);
                mat_vec_acc(p.w_r.data(), &dpre_r, dxt);
                mat_vec_acc(p.w_h.data(), &dpre_h, dxt);

                dh_next = dh_prev;
            }
            dh0.data_mut()[s * u..(s + 1) * u].copy_from_slice(&dh_next);
        }
        Ok(GruGrads {
            input: dx,
            h0: dh0,
            params: g,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layers::testutil::{check_grads, random_tensor};

    fn random_params(d: usize, u: usize, seed: u64) -> GruParams<f64> {
        let mut p = GruParams::zeros(d, u);
        for (i, (_, t)) in p.tensors_mut().into_iter().enumerate() {
            *t = random_tensor(t.shape(), seed * 31 + i as u64);
        }
        p
    }

    /// Scalar-loop transcription of the gate equations, no shared helpers.
    fn scalar_gru(x: &Tensor<f64>, p: &GruParams<f64>, h0: &Tensor<f64>) -> Tensor<f64> {
        let (b, steps, d) = (x.shape()[0], x.shape()[1], x.shape()[2]);
        let u = p.units();
        let sig = |v: f64| 1.0 / (1.0 + (-v).exp());
        let mut out = Tensor::zeros(&[b, steps, u]);
        for s in 0..b {
            let mut h: Vec<f64> = (0..u).map(|j| h0.at(&[s, j])).collect();
            for t in 0..steps {
                let mut next = vec![0.0; u];
                for j in 0..u {
                    let mut az = p.b_z.at(&[j]) + p.rb_z.at(&[j]);
                    let mut ar = p.b_r.at(&[j]) + p.rb_r.at(&[j]);
                    let mut ah = p.b_h.at(&[j]);
                    let mut rh = p.rb_h.at(&[j]);
                    for i in 0..d {
                        let xv = x.at(&[s, t, i]);
                        az += xv * p.w_z.at(&[i, j]);
                        ar += xv * p.w_r.at(&[i, j]);
                        ah += xv * p.w_h.at(&[i, j]);
                    }
                    for (i, &hi) in h.iter().enumerate() {
                        az += hi * p.u_z.at(&[i, j]);
                        ar += hi * p.u_r.at(&[i, j]);
                        rh += hi * p.u_h.at(&[i, j]);
                    }
                    let z = sig(az);
                    let r = sig(ar);
                    let cand = (ah + r * rh).tanh();
                    next[j] = (1.0 - z) * h[j] + z * cand;
                }
                h = next;
                for (j, &hj) in h.iter().enumerate() {
                    out.set(&[s, t, j], hj);
                }
            }
        }
        out
    }

    #[test]
    fn paper_param_count() {
        assert_eq!(GruParams::<f64>::zeros(1, 10).param_count(), 390);
    }

    #[test]
    fn zero_weights_zero_state_is_fixed_point() {
        let p = GruParams::<f64>::zeros(1, 10);
        let x = random_tensor(&[2, 16, 1], 1);
        let (h, cache) = gru_forward(&x, &p, None).unwrap();
        assert_eq!(h.shape(), &[2, 16, 10]);
        assert!(h.data().iter().all(|&v| v == 0.0));
        assert!(cache.z.iter().all(|&z| z == 0.5));
    }

    #[test]
    fn saturated_update_gate_passes_candidate() {
        let mut p = random_params(1, 4, 3);
        p.b_z = Tensor::filled(&[4], 50.0);
        let x = random_tensor(&[1, 5, 1], 4);
        let (h, cache) = gru_forward(&x, &p, None).unwrap();
        for (hv, cv) in h.data().iter().zip(&cache.cand) {
            assert!((hv - cv).abs() < 1e-12);
        }
    }

    #[test]
    fn matches_scalar_oracle() {
        let p = random_params(1, 3, 5);
        let x = random_tensor(&[2, 4, 1], 6);
        let h0 = random_tensor(&[2, 3], 7).scale(0.5);
        let (h, _) = gru_forward(&x, &p, Some(&h0)).unwrap();
        assert!(h.max_abs_diff(&scalar_gru(&x, &p, &h0)).unwrap() <= 1e-10);
    }

    #[test]
    fn hidden_states_stay_in_unit_interval() {
        let p = random_params(2, 5, 8).scale_all(2.0);
        let x = random_tensor(&[3, 12, 2], 9).scale(2.0);
        let h0 = random_tensor(&[3, 5], 10).scale(0.99);
        let (h, _) = gru_forward(&x, &p, Some(&h0)).unwrap();
        assert!(h.data().iter().all(|v| v.abs() < 1.0));
    }

    #[test]
    fn gradients_match_finite_differences() {
        let p = random_params(2, 3, 12);
        let x = random_tensor(&[2, 4, 2], 13);
        let h0 = random_tensor(&[2, 3], 14).scale(0.5);
        let w = random_tensor(&[2, 4, 3], 15);
        let loss = |x: &Tensor<f64>, p: &GruParams<f64>, h0: &Tensor<f64>| {
            let (h, _) = gru_forward(x, p, Some(h0)).unwrap();
            h.hadamard(&w).unwrap().sum()
        };
        let (_, cache) = gru_forward(&x, &p, Some(&h0)).unwrap();
        let g = cache.backward(&w, &p).unwrap();
        check_grads(&x, &g.input, |xp| loss(xp, &p, &h0));
        check_grads(&h0, &g.h0, |hp| loss(&x, &p, hp));
        for (i, (name, analytic)) in g.params.tensors().into_iter().enumerate() {
            let _ = name;
            check_grads(p.tensors()[i].1, analytic, |tp| {
                let mut q = p.clone();
                *q.tensors_mut()[i].1 = tp.clone();
                loss(&x, &q, &h0)
            });
        }
    }

    #[test]
    fn h0_gradient_with_saturated_update_gate() {
        // T = 1, z ≈ 1: h1 = tanh(a + r·(h0·U_h + b'_h)), so
        // dL/dh0 = U_h · ((1 − h1²) ⊙ r) for L = Σ h1 (r depends on h0 only through U_r).
        let mut p = random_params(1, 3, 21);
        p.b_z = Tensor::filled(&[3], 60.0);
        p.u_r = Tensor::zeros(&[3, 3]);
        let x = random_tensor(&[1, 1, 1], 22);
        let h0 = random_tensor(&[1, 3], 23).scale(0.5);
        let (h, cache) = gru_forward(&x, &p, Some(&h0)).unwrap();
        let r: Vec<f64> = cache.r.clone();
        let g = cache
            .backward(&Tensor::filled(&[1, 1, 3], 1.0), &p)
            .unwrap();
        for i in 0..3 {
            let expected: f64 = (0..3)
                .map(|j| p.u_h.at(&[i, j]) * (1.0 - h.data()[j].powi(2)) * r[j])
                .sum();
            assert!((g.h0.data()[i] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_upstream_gives_zero_grads() {
        let p = random_params(1, 3, 30);
        let x = random_tensor(&[2, 4, 1], 31);
        let (h, cache) = gru_forward(&x, &p, None).unwrap();
        let g = cache.backward(&Tensor::zeros(h.shape()), &p).unwrap();
        assert!(g.input.data().iter().all(|&v| v == 0.0));
        assert!(g
            .params
            .tensors()
            .iter()
            .all(|(_, t)| t.data().iter().all(|&v| v == 0.0)));
    }

    impl GruParams<f64> {
        fn scale_all(mut self, k: f64) -> Self {
            for (_, t) in self.tensors_mut() {
                *t = t.scale(k);
            }
            self
        }
    }
}
