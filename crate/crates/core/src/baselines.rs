//! Kernel ridge regression contrast.
//!
//! The KRR predictor with a radial kernel has an almost-surely full-rank
//! Jacobian `min(d_in, d_out)` regardless of the rank of the generating
//! function, which is exactly the overestimation the network certificates
//! are contrasted against.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::map::DifferentiableMap;
use crate::rank::jacobian_rank;

/// Gaussian radial profile `k(r) = exp(-r^2 / (2 l^2))`.
#[derive(Debug, Clone, Copy)]
pub struct GaussianKernel {
    length_scale: f64,
}

impl GaussianKernel {
    pub fn new(length_scale: f64) -> Self {
        assert!(length_scale > 0.0, "length scale must be positive");
        Self { length_scale }
    }

    /// Median pairwise input distance, the default length scale.
    pub fn median_heuristic(x: &Matrix) -> Self {
        let n = x.cols();
        let mut dists = Vec::with_capacity(n * (n - 1) / 2);
        for a in 0..n {
            for b in a + 1..n {
                let mut d2 = 0.0;
                for i in 0..x.rows() {
                    let diff = x.get(i, a) - x.get(i, b);
                    d2 += diff * diff;
                }
                dists.push(d2.sqrt());
            }
        }
        if dists.is_empty() {
            return Self::new(1.0);
        }
        dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = dists[dists.len() / 2];
        Self::new(if median > 0.0 { median } else { 1.0 })
    }

    pub fn length_scale(&self) -> f64 {
        self.length_scale
    }

    pub fn value(&self, r: f64) -> f64 {
        let l2 = self.length_scale * self.length_scale;
        (-r * r / (2.0 * l2)).exp()
    }

    /// `k'(r) / r`; smooth at `r = 0` for the Gaussian profile
    /// (`-1/l^2` in the limit).
    pub fn slope_over_r(&self, r: f64) -> f64 {
        let l2 = self.length_scale * self.length_scale;
        -self.value(r) / l2
    }
}

/// Fitted kernel ridge regression model with dual coefficients
/// `(K(X,X) + lambda I)^{-1} Y^T`.
#[derive(Debug, Clone)]
pub struct KrrModel {
    inputs: Matrix,
    dual: Matrix, // N x d_out
    kernel: GaussianKernel,
    lambda: f64,
}

/// Fits KRR by a Cholesky solve of `(K + lambda I) alpha = Y^T`; requires
/// `lambda > 0` and rejects systems whose solve residual exceeds
/// `1e-8 * (1 + ||Y||_F)`.
pub fn krr_fit(x: &Matrix, y: &Matrix, kernel: GaussianKernel, lambda: f64) -> Result<KrrModel> {
    assert!(lambda > 0.0, "ridge must be positive");
    let n = x.cols();
    if y.cols() != n {
        return Err(Error::Shape { expected: (y.rows(), n), got: y.shape() });
    }
    let mut gram = Matrix::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let mut d2 = 0.0;
            for i in 0..x.rows() {
                let diff = x.get(i, a) - x.get(i, b);
                d2 += diff * diff;
            }
            let v = kernel.value(d2.sqrt());
            gram.set(a, b, v);
            gram.set(b, a, v);
        }
    }
    for i in 0..n {
        gram.set(i, i, gram.get(i, i) + lambda);
    }
    let rhs = y.transpose();
    let dual = cholesky_solve(&gram, &rhs).ok_or(Error::IllConditioned)?;
    let residual = {
        let recon = gram.matmul(&dual);
        crate::linalg::frobenius_distance(&recon, &rhs)
    };
    if residual > 1e-8 * (1.0 + y.frobenius_norm()) {
        return Err(Error::IllConditioned);
    }
    Ok(KrrModel { inputs: x.clone(), dual, kernel, lambda })
}

impl KrrModel {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn kernel(&self) -> GaussianKernel {
        self.kernel
    }

    pub fn predict(&self, x: &[f64]) -> Vec<f64> {
        let n = self.inputs.cols();
        let d_out = self.dual.cols();
        let mut out = alloc::vec![0.0; d_out];
        for i in 0..n {
            let mut d2 = 0.0;
            for (r, &xr) in x.iter().enumerate() {
                let diff = xr - self.inputs.get(r, i);
                d2 += diff * diff;
            }
            let kv = self.kernel.value(d2.sqrt());
            for (c, o) in out.iter_mut().enumerate() {
                *o += kv * self.dual.get(i, c);
            }
        }
        out
    }

    /// Exact Jacobian `J(x)_{rc} = sum_i alpha_{ir} (x_i - x)_c k'(r_i)/r_i`.
    pub fn jacobian_at(&self, x: &[f64]) -> Matrix {
        let n = self.inputs.cols();
        let d_out = self.dual.cols();
        let d_in = self.inputs.rows();
        let mut jac = Matrix::zeros(d_out, d_in);
        for i in 0..n {
            let mut d2 = 0.0;
            for (r, &xr) in x.iter().enumerate() {
                let diff = xr - self.inputs.get(r, i);
                d2 += diff * diff;
            }
            let g = self.kernel.slope_over_r(d2.sqrt());
            for r in 0..d_out {
                let a = self.dual.get(i, r) * g;
                for c in 0..d_in {
                    // d/dx_c of k(||x - x_i||) = (x_c - x_i_c) k'(r)/r,
                    // written with the sign folded into (x_i - x).
                    let delta = x[c] - self.inputs.get(c, i);
                    jac.set(r, c, jac.get(r, c) + a * delta);
                }
            }
        }
        jac
    }
}

impl DifferentiableMap for KrrModel {
    fn input_dim(&self) -> usize {
        self.inputs.rows()
    }

    fn output_dim(&self) -> usize {
        self.dual.cols()
    }

    fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.predict(x)
    }

    fn jacobian(&self, x: &[f64]) -> Matrix {
        self.jacobian_at(x)
    }
}

/// Probe-based numerical rank of the KRR predictor's Jacobian.
pub fn krr_rank(m: &KrrModel, probes: &[Vec<f64>], rel_tol: f64) -> Result<(usize, Vec<f64>)> {
    jacobian_rank(m, probes, rel_tol)
}

/// Cholesky factor-and-solve for symmetric positive definite systems;
/// returns `None` on a non-positive pivot.
fn cholesky_solve(a: &Matrix, rhs: &Matrix) -> Option<Matrix> {
    let n = a.rows();
    let mut l = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a.get(i, j);
            for k in 0..j {
                sum -= l.get(i, k) * l.get(j, k);
            }
            if i == j {
                if sum <= 0.0 {
                    return None;
                }
                l.set(i, j, sum.sqrt());
            } else {
                l.set(i, j, sum / l.get(j, j));
            }
        }
    }
    let cols = rhs.cols();
    let mut out = Matrix::zeros(n, cols);
    for c in 0..cols {
        // Forward substitution L z = rhs.
        let mut z = alloc::vec![0.0; n];
        for i in 0..n {
            let mut sum = rhs.get(i, c);
            for k in 0..i {
                sum -= l.get(i, k) * z[k];
            }
            z[i] = sum / l.get(i, i);
        }
        // Back substitution L^T w = z.
        for i in (0..n).rev() {
            let mut sum = z[i];
            for k in i + 1..n {
                sum -= l.get(k, i) * out.get(k, c);
            }
            out.set(i, c, sum / l.get(i, i));
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_probes(dim: usize, n: usize, seed: u64, scale: f64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| (0..dim).map(|_| scale * (rng.random::<f64>() - 0.5)).collect())
            .collect()
    }

    #[test]
    fn krr_single_point_scalar_formula() {
        let x = Matrix::from_rows(&[&[0.7]]);
        let y = Matrix::from_rows(&[&[3.0]]);
        let lambda = 0.5;
        let m = krr_fit(&x, &y, GaussianKernel::new(1.0), lambda).unwrap();
        // f(x1) = y1 k(0) / (k(0) + lambda) with k(0) = 1.
        let got = m.predict(&[0.7])[0];
        assert!((got - 3.0 / 1.5).abs() < 1e-12);
    }

    #[test]
    fn krr_large_ridge_shrinks_to_zero() {
        let x = Matrix::from_fn(2, 10, |i, j| (i + j) as f64 * 0.1);
        let y = Matrix::from_fn(1, 10, |_, j| j as f64);
        let m = krr_fit(&x, &y, GaussianKernel::median_heuristic(&x), 1e9).unwrap();
        for j in 0..10 {
            assert!(m.predict(&x.column(j))[0].abs() < 1e-6);
        }
    }

    #[test]
    fn krr_fits_sine_closely() {
        let n = 20;
        let x = Matrix::from_fn(1, n, |_, j| j as f64 / (n - 1) as f64 * 4.0);
        let y = Matrix::from_fn(1, n, |_, j| (j as f64 / (n - 1) as f64 * 4.0).sin());
        let m = krr_fit(&x, &y, GaussianKernel::median_heuristic(&x), 1e-6).unwrap();
        let mse: f64 = (0..n)
            .map(|j| {
                let e = m.predict(&x.column(j))[0] - y.get(0, j);
                e * e
            })
            .sum::<f64>()
            / n as f64;
        assert!(mse < 1e-3, "train mse {mse}");
    }

    #[test]
    fn krr_jacobian_single_point_is_rank_one() {
        let x = Matrix::from_rows(&[&[1.0], &[0.0], &[-1.0]]);
        let y = Matrix::from_rows(&[&[2.0], &[1.0]]);
        let m = krr_fit(&x, &y, GaussianKernel::new(1.5), 1e-3).unwrap();
        let jac = m.jacobian_at(&[0.2, 0.4, 0.1]);
        let s = crate::linalg::svd(&jac).unwrap().s;
        assert_eq!(s.numerical_rank(1e-9), 1);
    }

    #[test]
    fn krr_jacobian_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = Matrix::from_fn(3, 15, |_, _| rng.random::<f64>() * 2.0 - 1.0);
        let y = Matrix::from_fn(2, 15, |_, _| rng.random::<f64>() * 2.0 - 1.0);
        let m = krr_fit(&x, &y, GaussianKernel::median_heuristic(&x), 1e-4).unwrap();
        for probe in random_probes(3, 100, 6, 2.0) {
            let jac = m.jacobian_at(&probe);
            let fd = crate::testutil::central_difference(&m, &probe, 1e-6);
            let denom = 1.0 + jac.frobenius_norm();
            assert!(
                crate::linalg::frobenius_distance(&jac, &fd) / denom < 1e-6,
                "fd mismatch at {probe:?}"
            );
        }
    }

    #[test]
    fn krr_rank_is_min_dimension_generically() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x = Matrix::from_fn(5, 40, |_, _| rng.random::<f64>() * 2.0 - 1.0);
        let y = Matrix::from_fn(3, 40, |_, _| rng.random::<f64>() * 2.0 - 1.0);
        let m = krr_fit(&x, &y, GaussianKernel::median_heuristic(&x), 1e-5).unwrap();
        let probes = random_probes(5, 30, 8, 2.0);
        let (rank, _) = krr_rank(&m, &probes, 1e-6).unwrap();
        assert_eq!(rank, 3);
    }

    #[test]
    fn krr_rank_zero_outputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x = Matrix::from_fn(4, 20, |_, _| rng.random::<f64>());
        let y = Matrix::zeros(2, 20);
        let m = krr_fit(&x, &y, GaussianKernel::median_heuristic(&x), 1e-4).unwrap();
        let probes = random_probes(4, 20, 10, 2.0);
        let (rank, _) = krr_rank(&m, &probes, 1e-6).unwrap();
        assert_eq!(rank, 0);
    }
}
