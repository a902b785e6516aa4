//! Test-only oracles, deliberately independent of the implementation
//! paths they check.

use alloc::vec::Vec;

use crate::linalg::Matrix;
use crate::map::DifferentiableMap;

/// Central-difference Jacobian using only the evaluation contract.
/// Per-coordinate step `rel_step * (1 + |x_j|)`.
pub(crate) fn central_difference(f: &dyn DifferentiableMap, x: &[f64], rel_step: f64) -> Matrix {
    let (din, dout) = (f.input_dim(), f.output_dim());
    let mut jac = Matrix::zeros(dout, din);
    for j in 0..din {
        let h = rel_step * (1.0 + x[j].abs());
        let mut xp: Vec<f64> = x.to_vec();
        let mut xm: Vec<f64> = x.to_vec();
        xp[j] += h;
        xm[j] -= h;
        let (yp, ym) = (f.eval(&xp), f.eval(&xm));
        for i in 0..dout {
            jac.set(i, j, (yp[i] - ym[i]) / (2.0 * h));
        }
    }
    jac
}
