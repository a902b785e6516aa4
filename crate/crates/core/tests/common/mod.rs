//! Shared oracles for the property suite; independent of the library's
//! own Jacobian and SVD paths.

use rankscope_core::linalg::Matrix;
use rankscope_core::map::DifferentiableMap;

/// Central-difference Jacobian using only the evaluation contract.
pub fn central_difference(f: &dyn DifferentiableMap, x: &[f64], rel_step: f64) -> Matrix {
    let (din, dout) = (f.input_dim(), f.output_dim());
    let mut jac = Matrix::zeros(dout, din);
    for j in 0..din {
        let h = rel_step * (1.0 + x[j].abs());
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[j] += h;
        xm[j] -= h;
        let (yp, ym) = (f.eval(&xp), f.eval(&xm));
        for i in 0..dout {
            jac.set(i, j, (yp[i] - ym[i]) / (2.0 * h));
        }
    }
    jac
}

pub fn random_points(dim: usize, n: usize, seed: u64, scale: f64) -> Vec<Vec<f64>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (0..dim).map(|_| scale * (rng.random::<f64>() - 0.5)).collect())
        .collect()
}
