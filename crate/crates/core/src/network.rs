//! Fully-connected networks with the homogeneous nonlinearity family
//! `σ_a(x) = x for x >= 0, a·x otherwise`, `a in (-1, 1)`.
//!
//! The network function maps an input to the pre-activations of the last
//! layer (no nonlinearity on the output). Jacobians are the exact
//! chain-rule product `W_L D_{L-1} ... D_1 W_1` with `D_l` the diagonal of
//! slope indicators, using the convention `σ̇_a(0) = 1`; points within a
//! small margin of an activation boundary are flagged, not rejected.
//!
//! Besides evaluation this module carries the constructive compositions:
//! serial composition through identity layers (with an explicit bias-shift
//! ledger), parallel composition via block-diagonal weights, and the
//! ReLU-to-leaky conversion that doubles hidden widths.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::map::DifferentiableMap;

#[inline]
pub(crate) fn leaky(a: f64, x: f64) -> f64 {
    if x >= 0.0 {
        x
    } else {
        a * x
    }
}

#[inline]
pub(crate) fn leaky_slope_at(a: f64, x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        a
    }
}

/// Weights, biases, widths, and the leaky slope of a depth-`L` network.
/// Immutable after construction; the squared norm of this object is the
/// representation-cost candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    widths: Vec<usize>,
    weights: Vec<Matrix>,
    biases: Vec<Vec<f64>>,
    leaky_slope: f64,
}

/// Per-layer pre-activations and activations for a batch.
///
/// `preactivations[l]` is `Z~_{l+1}` (shape `n_{l+1} x batch`) and
/// `activations[l]` is `Z_l`, with `Z_0` the input batch itself.
#[derive(Debug, Clone)]
pub struct ActivationTrace {
    preactivations: Vec<Matrix>,
    activations: Vec<Matrix>,
    batch: usize,
}

impl ActivationTrace {
    pub fn preactivations(&self) -> &[Matrix] {
        &self.preactivations
    }

    pub fn activations(&self) -> &[Matrix] {
        &self.activations
    }

    pub fn batch(&self) -> usize {
        self.batch
    }
}

/// Exact Jacobian plus boundary metadata: `near_boundary` is set when some
/// hidden pre-activation sits within `1e-6 x` the layer RMS of zero, where
/// the derivative convention (rather than calculus) decides the slope.
#[derive(Debug, Clone)]
pub struct JacobianAt {
    pub matrix: Matrix,
    pub near_boundary: bool,
}

/// Norm ledger of a serial composition: `total` is the parameter norm of
/// the composed network and equals `g_norm + identity_cost + h_norm +
/// shift_cost` exactly as written.
#[derive(Debug, Clone, PartialEq)]
pub struct SerialLedger {
    pub g_norm: f64,
    pub identity_cost: f64,
    pub h_norm: f64,
    pub shift_cost: f64,
    pub total: f64,
}

impl NetworkParams {
    /// Validating constructor from explicit per-layer weights and biases.
    pub fn new(weights: Vec<Matrix>, biases: Vec<Vec<f64>>, leaky_slope: f64) -> Result<Self> {
        if weights.is_empty() || weights.len() != biases.len() {
            return Err(Error::InvalidArchitecture(String::from(
                "need the same positive number of weight and bias layers",
            )));
        }
        if !(-1.0 < leaky_slope && leaky_slope < 1.0) {
            return Err(Error::InvalidArchitecture(format!(
                "leaky slope must lie in (-1, 1), got {leaky_slope}"
            )));
        }
        let mut widths = Vec::with_capacity(weights.len() + 1);
        widths.push(weights[0].cols());
        for (l, (w, b)) in weights.iter().zip(&biases).enumerate() {
            if w.cols() != *widths.last().unwrap() {
                return Err(Error::InvalidArchitecture(format!(
                    "layer {} input width {} does not chain",
                    l + 1,
                    w.cols()
                )));
            }
            if w.rows() != b.len() {
                return Err(Error::InvalidArchitecture(format!(
                    "layer {} bias length {} != {} rows",
                    l + 1,
                    b.len(),
                    w.rows()
                )));
            }
            if !w.is_finite() || !b.iter().all(|x| x.is_finite()) {
                return Err(Error::InvalidMatrix);
            }
            widths.push(w.rows());
        }
        Ok(Self { widths, weights, biases, leaky_slope })
    }

    /// Seeded initialization: weight entries i.i.d. normal with standard
    /// deviation `scale / sqrt(fan_in)`, biases zero.
    pub fn init(widths: &[usize], leaky_slope: f64, seed: u64, scale: f64) -> Result<Self> {
        if widths.len() < 2 || widths.iter().any(|&w| w == 0) {
            return Err(Error::InvalidArchitecture(format!(
                "need at least two nonzero widths, got {widths:?}"
            )));
        }
        if !(-1.0 < leaky_slope && leaky_slope < 1.0) {
            return Err(Error::InvalidArchitecture(format!(
                "leaky slope must lie in (-1, 1), got {leaky_slope}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = StandardNormal;
        let mut weights = Vec::with_capacity(widths.len() - 1);
        let mut biases = Vec::with_capacity(widths.len() - 1);
        for l in 0..widths.len() - 1 {
            let (fan_in, fan_out) = (widths[l], widths[l + 1]);
            let sd = scale / (fan_in as f64).sqrt();
            let w = Matrix::from_fn(fan_out, fan_in, |_, _| {
                let z: f64 = normal.sample(&mut rng);
                sd * z
            });
            weights.push(w);
            biases.push(vec![0.0; fan_out]);
        }
        Ok(Self { widths: widths.to_vec(), weights, biases, leaky_slope })
    }

    /// Number of weight layers `L`.
    pub fn depth(&self) -> usize {
        self.weights.len()
    }

    pub fn input_width(&self) -> usize {
        self.widths[0]
    }

    pub fn output_width(&self) -> usize {
        *self.widths.last().unwrap()
    }

    /// Widths `n_0 ..= n_L`.
    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    /// Weight of layer `l + 1` (0-indexed).
    pub fn weight(&self, l: usize) -> &Matrix {
        &self.weights[l]
    }

    pub fn bias(&self, l: usize) -> &[f64] {
        &self.biases[l]
    }

    pub fn leaky_slope(&self) -> f64 {
        self.leaky_slope
    }

    pub(crate) fn weight_mut(&mut self, l: usize) -> &mut Matrix {
        &mut self.weights[l]
    }

    pub(crate) fn bias_mut(&mut self, l: usize) -> &mut Vec<f64> {
        &mut self.biases[l]
    }

    /// Sum of squares of every weight and bias entry, accumulated in layer
    /// order (weights then bias per layer).
    pub fn param_norm(&self) -> f64 {
        let mut total = 0.0;
        for (w, b) in self.weights.iter().zip(&self.biases) {
            for x in w.as_slice() {
                total += x * x;
            }
            for x in b {
                total += x * x;
            }
        }
        total
    }

    /// Batched forward pass; `x` must be `n_0 x batch`. Returns the output
    /// `Z~_L` (no output nonlinearity) and the full trace.
    pub fn forward(&self, x: &Matrix) -> Result<(Matrix, ActivationTrace)> {
        if x.rows() != self.input_width() {
            return Err(Error::Shape {
                expected: (self.input_width(), x.cols()),
                got: x.shape(),
            });
        }
        let depth = self.depth();
        let batch = x.cols();
        let mut activations = Vec::with_capacity(depth);
        let mut preactivations = Vec::with_capacity(depth);
        activations.push(x.clone());
        for l in 0..depth {
            let mut pre = self.weights[l].matmul(activations.last().unwrap());
            for i in 0..pre.rows() {
                let b = self.biases[l][i];
                for v in pre.row_mut(i) {
                    *v += b;
                }
            }
            if l + 1 < depth {
                let mut act = pre.clone();
                for v in act.as_mut_slice() {
                    *v = leaky(self.leaky_slope, *v);
                }
                activations.push(act);
            }
            preactivations.push(pre);
        }
        let y = preactivations.last().unwrap().clone();
        Ok((y, ActivationTrace { preactivations, activations, batch }))
    }

    /// Single-input forward without trace allocation (hot path; panics on a
    /// length mismatch).
    pub fn eval_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.input_width(), "input length");
        let depth = self.depth();
        let mut cur = x.to_vec();
        for l in 0..depth {
            let mut next = self.weights[l].matvec(&cur);
            for (v, b) in next.iter_mut().zip(&self.biases[l]) {
                *v += b;
            }
            if l + 1 < depth {
                for v in &mut next {
                    *v = leaky(self.leaky_slope, *v);
                }
            }
            cur = next;
        }
        cur
    }

    /// Exact chain-rule Jacobian at `x` with boundary metadata.
    pub fn jacobian(&self, x: &[f64]) -> JacobianAt {
        assert_eq!(x.len(), self.input_width(), "input length");
        let depth = self.depth();
        let mut jac = self.weights[0].clone();
        let mut cur = self.weights[0].matvec(x);
        for (v, b) in cur.iter_mut().zip(&self.biases[0]) {
            *v += b;
        }
        let mut near_boundary = pre_near_boundary(&cur) && depth > 1;
        for l in 1..depth {
            // Scale row i of the running Jacobian by the slope at pre_i.
            for (i, &pre) in cur.iter().enumerate() {
                let d = leaky_slope_at(self.leaky_slope, pre);
                if d != 1.0 {
                    for v in jac.row_mut(i) {
                        *v *= d;
                    }
                }
            }
            jac = self.weights[l].matmul(&jac);
            let mut act = cur;
            for v in &mut act {
                *v = leaky(self.leaky_slope, *v);
            }
            cur = self.weights[l].matvec(&act);
            for (v, b) in cur.iter_mut().zip(&self.biases[l]) {
                *v += b;
            }
            if l + 1 < depth && pre_near_boundary(&cur) {
                near_boundary = true;
            }
        }
        JacobianAt { matrix: jac, near_boundary }
    }

    /// ReLU-to-leaky conversion (requires `a = 0`): every hidden neuron is
    /// replaced by a `(z, -z)` pair so that
    /// `max(0, z) = (σ_a(z) + a σ_a(-z)) / (1 - a^2)` reproduces the
    /// original function exactly with slope `target_a`.
    pub fn convert_relu_to_leaky(&self, target_a: f64) -> Result<NetworkParams> {
        if self.leaky_slope != 0.0 {
            return Err(Error::NotRelu(self.leaky_slope));
        }
        if !(-1.0 < target_a && target_a < 1.0) {
            return Err(Error::InvalidArchitecture(format!(
                "target slope must lie in (-1, 1), got {target_a}"
            )));
        }
        let depth = self.depth();
        if depth == 1 {
            // No hidden nonlinearity ever fires.
            let mut out = self.clone();
            out.leaky_slope = target_a;
            return Ok(out);
        }
        let gain = 1.0 / (1.0 - target_a * target_a);
        // Incoming weights read a doubled previous layer: columns j and
        // n_prev + j carry the positive and negated copies of neuron j.
        let expand_cols = |w: &Matrix| -> Matrix {
            let (r, c) = w.shape();
            Matrix::from_fn(r, 2 * c, |i, j| {
                if j < c {
                    gain * w.get(i, j)
                } else {
                    target_a * gain * w.get(i, j - c)
                }
            })
        };
        let stack_neg = |w: &Matrix| -> Matrix {
            let (r, c) = w.shape();
            Matrix::from_fn(2 * r, c, |i, j| {
                if i < r {
                    w.get(i, j)
                } else {
                    -w.get(i - r, j)
                }
            })
        };
        let double_bias = |b: &[f64]| -> Vec<f64> {
            b.iter().copied().chain(b.iter().map(|x| -x)).collect()
        };

        let mut weights = Vec::with_capacity(depth);
        let mut biases = Vec::with_capacity(depth);
        for l in 0..depth {
            let incoming_doubled = l > 0;
            let outgoing_doubled = l + 1 < depth;
            let w = if incoming_doubled { expand_cols(&self.weights[l]) } else { self.weights[l].clone() };
            if outgoing_doubled {
                weights.push(stack_neg(&w));
                biases.push(double_bias(&self.biases[l]));
            } else {
                weights.push(w);
                biases.push(self.biases[l].clone());
            }
        }
        NetworkParams::new(weights, biases, target_a)
    }
}

impl DifferentiableMap for NetworkParams {
    fn input_dim(&self) -> usize {
        self.input_width()
    }

    fn output_dim(&self) -> usize {
        self.output_width()
    }

    fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.eval_vec(x)
    }

    fn jacobian(&self, x: &[f64]) -> Matrix {
        NetworkParams::jacobian(self, x).matrix
    }
}

/// Flag when any pre-activation sits within `1e-6 x` the layer RMS of the
/// activation boundary.
fn pre_near_boundary(pre: &[f64]) -> bool {
    let rms = (pre.iter().map(|x| x * x).sum::<f64>() / pre.len() as f64).sqrt();
    let margin = 1e-6 * rms;
    pre.iter().any(|x| x.abs() < margin)
}

/// Serial composition `h ∘ g` padded to depth `total_L` with identity
/// layers on the `k`-dimensional interface.
///
/// `domain_box` must bound g's outputs over the intended domain, one
/// `(lo, hi)` pair per interface coordinate. Identity layers only pass
/// nonnegative values through `σ_a` unchanged, so the construction adds a
/// constant shift `s_i = max(0, -lo_i)` to g's last bias and subtracts
/// `W_h1 · s` from h's first bias. The extra bias cost is reported in the
/// ledger as `shift_cost`, never folded into the `k`-per-layer term.
pub fn compose_serial(
    g: &NetworkParams,
    h: &NetworkParams,
    total_depth: usize,
    domain_box: &[(f64, f64)],
) -> Result<(NetworkParams, SerialLedger)> {
    let k = g.output_width();
    if h.input_width() != k {
        return Err(Error::Composition(format!(
            "h input width {} != g output width {k}",
            h.input_width()
        )));
    }
    if g.leaky_slope() != h.leaky_slope() {
        return Err(Error::Composition(String::from("leaky slopes differ")));
    }
    if domain_box.len() != k {
        return Err(Error::Composition(format!(
            "domain box has {} coordinates, interface needs {k}",
            domain_box.len()
        )));
    }
    if domain_box.iter().any(|(lo, hi)| !lo.is_finite() || !hi.is_finite() || lo > hi) {
        return Err(Error::Composition(String::from("domain box is not a finite box")));
    }
    let minimum = g.depth() + h.depth();
    if total_depth < minimum {
        return Err(Error::Depth { requested: total_depth, minimum });
    }
    let middle = total_depth - minimum;
    let shift: Vec<f64> = domain_box.iter().map(|(lo, _)| (-lo).max(0.0)).collect();

    let mut weights = Vec::with_capacity(total_depth);
    let mut biases = Vec::with_capacity(total_depth);
    for l in 0..g.depth() {
        weights.push(g.weight(l).clone());
        let mut b = g.bias(l).to_vec();
        if l + 1 == g.depth() {
            for (bi, si) in b.iter_mut().zip(&shift) {
                *bi += si;
            }
        }
        biases.push(b);
    }
    for _ in 0..middle {
        weights.push(Matrix::identity(k));
        biases.push(vec![0.0; k]);
    }
    for l in 0..h.depth() {
        weights.push(h.weight(l).clone());
        let mut b = h.bias(l).to_vec();
        if l == 0 {
            let correction = h.weight(0).matvec(&shift);
            for (bi, ci) in b.iter_mut().zip(&correction) {
                *bi -= ci;
            }
        }
        biases.push(b);
    }
    let composed = NetworkParams::new(weights, biases, g.leaky_slope())?;

    let g_norm = g.param_norm();
    let identity_cost = (k * middle) as f64;
    let h_norm = h.param_norm();
    let total = composed.param_norm();
    // Residual against the closed-form summands, computed so that
    // `g + identity + h + shift == total` holds as written in f64.
    let partial = g_norm + identity_cost + h_norm;
    let shift_cost = total - partial;
    let ledger = SerialLedger { g_norm, identity_cost, h_norm, shift_cost, total };
    Ok((composed, ledger))
}

/// Parallel composition computing `f + g`: stacked first layer,
/// block-diagonal middle layers, concatenated last layer. The output biases
/// add; parameter-norm additivity is exact whenever `<b_{f,L}, b_{g,L}> = 0`.
pub fn compose_parallel(f: &NetworkParams, g: &NetworkParams) -> Result<NetworkParams> {
    if f.depth() != g.depth() {
        return Err(Error::Composition(format!(
            "depths differ: {} vs {}",
            f.depth(),
            g.depth()
        )));
    }
    if f.input_width() != g.input_width() || f.output_width() != g.output_width() {
        return Err(Error::Composition(String::from("input/output widths differ")));
    }
    if f.leaky_slope() != g.leaky_slope() {
        return Err(Error::Composition(String::from("leaky slopes differ")));
    }
    let depth = f.depth();
    let add = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x + y).collect() };
    if depth == 1 {
        let w = Matrix::from_fn(f.output_width(), f.input_width(), |i, j| {
            f.weight(0).get(i, j) + g.weight(0).get(i, j)
        });
        return NetworkParams::new(vec![w], vec![add(f.bias(0), g.bias(0))], f.leaky_slope());
    }

    let mut weights = Vec::with_capacity(depth);
    let mut biases = Vec::with_capacity(depth);
    for l in 0..depth {
        let (wf, wg) = (f.weight(l), g.weight(l));
        let last = l + 1 == depth;
        let first = l == 0;
        let w = if first {
            Matrix::from_fn(wf.rows() + wg.rows(), wf.cols(), |i, j| {
                if i < wf.rows() {
                    wf.get(i, j)
                } else {
                    wg.get(i - wf.rows(), j)
                }
            })
        } else if last {
            Matrix::from_fn(wf.rows(), wf.cols() + wg.cols(), |i, j| {
                if j < wf.cols() {
                    wf.get(i, j)
                } else {
                    wg.get(i, j - wf.cols())
                }
            })
        } else {
            Matrix::from_fn(wf.rows() + wg.rows(), wf.cols() + wg.cols(), |i, j| {
                if i < wf.rows() && j < wf.cols() {
                    wf.get(i, j)
                } else if i >= wf.rows() && j >= wf.cols() {
                    wg.get(i - wf.rows(), j - wf.cols())
                } else {
                    0.0
                }
            })
        };
        let b = if last {
            add(f.bias(l), g.bias(l))
        } else {
            f.bias(l).iter().chain(g.bias(l)).copied().collect()
        };
        weights.push(w);
        biases.push(b);
    }
    NetworkParams::new(weights, biases, f.leaky_slope())
}
