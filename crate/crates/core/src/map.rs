//! Maps with an evaluation contract and a Jacobian contract.
//!
//! Networks, closed-form fixtures, and kernel predictors all expose the
//! same pair of contracts so the certification suite can probe any of them.
//! For piecewise-linear implementors the Jacobian must agree with central
//! finite differences away from nondifferentiable boundaries.

use alloc::vec::Vec;

use crate::linalg::Matrix;

pub trait DifferentiableMap {
    fn input_dim(&self) -> usize;
    fn output_dim(&self) -> usize;
    /// Evaluates the map; `x.len()` must equal `input_dim`.
    fn eval(&self, x: &[f64]) -> Vec<f64>;
    /// Jacobian at `x`, shaped `output_dim x input_dim`.
    fn jacobian(&self, x: &[f64]) -> Matrix;
}

/// Affine fixture `x -> Ax + b`, mostly useful as a rank test case: its
/// Jacobian rank equals `rank A` everywhere.
#[derive(Debug, Clone)]
pub struct AffineMap {
    matrix: Matrix,
    offset: Vec<f64>,
}

impl AffineMap {
    pub fn new(matrix: Matrix, offset: Vec<f64>) -> Self {
        assert_eq!(matrix.rows(), offset.len(), "offset length");
        Self { matrix, offset }
    }
}

impl DifferentiableMap for AffineMap {
    fn input_dim(&self) -> usize {
        self.matrix.cols()
    }

    fn output_dim(&self) -> usize {
        self.matrix.rows()
    }

    fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.matrix.matvec(x);
        for (v, b) in y.iter_mut().zip(&self.offset) {
            *v += b;
        }
        y
    }

    fn jacobian(&self, _x: &[f64]) -> Matrix {
        self.matrix.clone()
    }
}
