//! L2-regularized empirical-risk minimization.
//!
//! The loss is `data + (lambda / L) * ||W||^2` where the data term is the
//! mean over samples of the squared error summed over output coordinates
//! (or the mean softmax cross-entropy for classification). Training runs
//! Adam with decoupled weight decay for a fixed budget, then plain
//! full-batch gradient descent to settle near a local minimum; each
//! gradient-descent step backtracks its step size until the total loss
//! does not increase, so the refinement phase is monotone by construction.
//!
//! [`estimate_repr_cost`] approximates the representation cost (the
//! minimal squared parameter norm among networks fitting a target) as the
//! minimum norm over restarts of annealed regularized training; it is an
//! upper-bound estimator up to the fit tolerance.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{DivergedState, Error, Result};
use crate::linalg::Matrix;
use crate::network::{leaky_slope_at, NetworkParams};

/// Optimization schedule: Adam with decoupled weight decay for `steps`,
/// then `gd_refine_steps` of plain gradient descent at `gd_lr`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    /// Ridge strength; the loss carries `lambda / L * ||W||^2`.
    pub lambda: f64,
    pub lr: f64,
    pub steps: usize,
    pub adam_betas: (f64, f64),
    pub seed: u64,
    pub gd_refine_steps: usize,
    pub gd_lr: f64,
    /// Mini-batch size; `None` trains full-batch (the default).
    pub batch: Option<usize>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            lambda: 0.0,
            lr: 1e-3,
            steps: 1000,
            adam_betas: (0.9, 0.999),
            seed: 0,
            gd_refine_steps: 0,
            gd_lr: 1e-4,
            batch: None,
        }
    }
}

impl TrainConfig {
    fn validate(&self) {
        assert!(self.lambda >= 0.0, "lambda must be nonnegative");
        assert!(self.lr > 0.0 && self.gd_lr > 0.0, "learning rates must be positive");
        let (b1, b2) = self.adam_betas;
        assert!((0.0..1.0).contains(&b1) && (0.0..1.0).contains(&b2), "betas must be in [0, 1)");
        if let Some(b) = self.batch {
            assert!(b >= 1, "batch size must be positive");
        }
    }
}

/// Per-step record of total loss, data term, and `||W||^2 / L`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainHistory {
    pub total: Vec<f64>,
    pub data: Vec<f64>,
    pub norm_over_depth: Vec<f64>,
}

impl TrainHistory {
    pub fn len(&self) -> usize {
        self.total.len()
    }

    pub fn is_empty(&self) -> bool {
        self.total.is_empty()
    }

    fn push(&mut self, total: f64, data: f64, norm_over_depth: f64) {
        self.total.push(total);
        self.data.push(data);
        self.norm_over_depth.push(norm_over_depth);
    }
}

/// Regression targets or 1-based class labels.
#[derive(Debug, Clone, Copy)]
pub enum Target<'a> {
    Values(&'a Matrix),
    Labels(&'a [usize]),
}

/// Gradient structure mirroring [`NetworkParams`].
#[derive(Debug, Clone)]
pub struct ParamGrads {
    weights: Vec<Matrix>,
    biases: Vec<Vec<f64>>,
}

impl ParamGrads {
    fn zeros_like(p: &NetworkParams) -> Self {
        let weights = (0..p.depth())
            .map(|l| Matrix::zeros(p.weight(l).rows(), p.weight(l).cols()))
            .collect();
        let biases = (0..p.depth()).map(|l| vec![0.0; p.bias(l).len()]).collect();
        Self { weights, biases }
    }

    pub fn weight(&self, l: usize) -> &Matrix {
        &self.weights[l]
    }

    pub fn bias(&self, l: usize) -> &[f64] {
        &self.biases[l]
    }
}

/// `(total, data, reg)` for the regularized MSE objective.
pub fn loss_mse_reg(
    p: &NetworkParams,
    x: &Matrix,
    y: &Matrix,
    lambda: f64,
) -> Result<(f64, f64, f64)> {
    if y.rows() != p.output_width() || y.cols() != x.cols() {
        return Err(Error::Shape {
            expected: (p.output_width(), x.cols()),
            got: y.shape(),
        });
    }
    let (out, _) = p.forward(x)?;
    let n = x.cols() as f64;
    let data = out
        .as_slice()
        .iter()
        .zip(y.as_slice())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / n;
    let reg = lambda / p.depth() as f64 * p.param_norm();
    Ok((data + reg, data, reg))
}

/// Mean softmax cross-entropy; labels are 1-based and the output width
/// must equal the number of classes.
pub fn loss_cross_entropy(p: &NetworkParams, x: &Matrix, labels: &[usize]) -> Result<f64> {
    let logits = forward_logits(p, x, labels)?;
    let classes = p.output_width();
    let mut sum = 0.0;
    for (col, &label) in labels.iter().enumerate() {
        let mut max = f64::NEG_INFINITY;
        for i in 0..classes {
            max = max.max(logits.get(i, col));
        }
        let lse: f64 = (0..classes).map(|i| (logits.get(i, col) - max).exp()).sum();
        sum += lse.ln() + max - logits.get(label - 1, col);
    }
    Ok(sum / labels.len() as f64)
}

fn forward_logits(p: &NetworkParams, x: &Matrix, labels: &[usize]) -> Result<Matrix> {
    if labels.len() != x.cols() {
        return Err(Error::Shape {
            expected: (p.output_width(), x.cols()),
            got: (p.output_width(), labels.len()),
        });
    }
    let classes = p.output_width();
    for &label in labels {
        if label == 0 || label > classes {
            return Err(Error::Label { label, classes });
        }
    }
    Ok(p.forward(x)?.0)
}

/// Reverse-mode gradient of the regularized loss; also returns
/// `(total, data)` evaluated on the same forward pass.
fn grad_with_loss(
    p: &NetworkParams,
    x: &Matrix,
    target: Target<'_>,
    lambda: f64,
) -> Result<(ParamGrads, f64, f64)> {
    let depth = p.depth();
    let n = x.cols() as f64;
    let (out, trace) = match target {
        Target::Values(y) => {
            if y.rows() != p.output_width() || y.cols() != x.cols() {
                return Err(Error::Shape {
                    expected: (p.output_width(), x.cols()),
                    got: y.shape(),
                });
            }
            p.forward(x)?
        }
        Target::Labels(labels) => {
            let classes = p.output_width();
            if labels.len() != x.cols() {
                return Err(Error::Shape {
                    expected: (classes, x.cols()),
                    got: (classes, labels.len()),
                });
            }
            for &label in labels {
                if label == 0 || label > classes {
                    return Err(Error::Label { label, classes });
                }
            }
            p.forward(x)?
        }
    };

    // Output-layer residual and the data term off the same pass.
    let mut data = 0.0;
    let mut delta = Matrix::zeros(out.rows(), out.cols());
    match target {
        Target::Values(y) => {
            for i in 0..out.rows() {
                for j in 0..out.cols() {
                    let r = out.get(i, j) - y.get(i, j);
                    data += r * r;
                    delta.set(i, j, 2.0 * r / n);
                }
            }
            data /= n;
        }
        Target::Labels(labels) => {
            for (j, &label) in labels.iter().enumerate() {
                let mut max = f64::NEG_INFINITY;
                for i in 0..out.rows() {
                    max = max.max(out.get(i, j));
                }
                let mut lse = 0.0;
                for i in 0..out.rows() {
                    lse += (out.get(i, j) - max).exp();
                }
                data += lse.ln() + max - out.get(label - 1, j);
                for i in 0..out.rows() {
                    let prob = (out.get(i, j) - max).exp() / lse;
                    let indicator = if i + 1 == label { 1.0 } else { 0.0 };
                    delta.set(i, j, (prob - indicator) / n);
                }
            }
            data /= n;
        }
    }

    let mut grads = ParamGrads::zeros_like(p);
    for l in (0..depth).rev() {
        let act_prev = &trace.activations()[l];
        grads.weights[l] = delta.matmul(&act_prev.transpose());
        for i in 0..delta.rows() {
            grads.biases[l][i] = delta.row(i).iter().sum();
        }
        if l > 0 {
            let mut back = p.weight(l).transpose().matmul(&delta);
            let pre = &trace.preactivations()[l - 1];
            for i in 0..back.rows() {
                for j in 0..back.cols() {
                    let d = leaky_slope_at(p.leaky_slope(), pre.get(i, j));
                    back.set(i, j, back.get(i, j) * d);
                }
            }
            delta = back;
        }
    }
    let wd = 2.0 * lambda / depth as f64;
    if wd != 0.0 {
        for l in 0..depth {
            for (g, w) in grads.weights[l]
                .as_mut_slice()
                .iter_mut()
                .zip(p.weight(l).as_slice())
            {
                *g += wd * w;
            }
            for (g, b) in grads.biases[l].iter_mut().zip(p.bias(l)) {
                *g += wd * b;
            }
        }
    }
    let total = data + lambda / depth as f64 * p.param_norm();
    Ok((grads, total, data))
}

/// Gradient of the regularized loss with respect to every parameter.
pub fn grad(p: &NetworkParams, x: &Matrix, target: Target<'_>, lambda: f64) -> Result<ParamGrads> {
    Ok(grad_with_loss(p, x, target, lambda)?.0)
}

struct AdamState {
    m: ParamGrads,
    v: ParamGrads,
    t: usize,
}

impl AdamState {
    fn new(p: &NetworkParams) -> Self {
        Self { m: ParamGrads::zeros_like(p), v: ParamGrads::zeros_like(p), t: 0 }
    }

    /// One step with decoupled weight decay: moments see the loss gradient
    /// only, the ridge acts as `w -= lr * wd * w` on the side.
    fn step(&mut self, p: &mut NetworkParams, g: &ParamGrads, lr: f64, betas: (f64, f64), wd: f64) {
        const EPS: f64 = 1e-8;
        self.t += 1;
        let (b1, b2) = betas;
        let bc1 = 1.0 - b1.powi(self.t as i32);
        let bc2 = 1.0 - b2.powi(self.t as i32);
        for l in 0..p.depth() {
            {
                let m = self.m.weights[l].as_mut_slice();
                let v = self.v.weights[l].as_mut_slice();
                let gw = g.weights[l].as_slice();
                let w = p.weight_mut(l).as_mut_slice();
                for i in 0..w.len() {
                    m[i] = b1 * m[i] + (1.0 - b1) * gw[i];
                    v[i] = b2 * v[i] + (1.0 - b2) * gw[i] * gw[i];
                    w[i] -= lr * ((m[i] / bc1) / ((v[i] / bc2).sqrt() + EPS) + wd * w[i]);
                }
            }
            let m = &mut self.m.biases[l];
            let v = &mut self.v.biases[l];
            let gb = &g.biases[l];
            let b = p.bias_mut(l);
            for i in 0..b.len() {
                m[i] = b1 * m[i] + (1.0 - b1) * gb[i];
                v[i] = b2 * v[i] + (1.0 - b2) * gb[i] * gb[i];
                b[i] -= lr * ((m[i] / bc1) / ((v[i] / bc2).sqrt() + EPS) + wd * b[i]);
            }
        }
    }
}

fn apply_gd_step(p: &NetworkParams, g: &ParamGrads, lr: f64) -> NetworkParams {
    let mut next = p.clone();
    for l in 0..p.depth() {
        for (w, gw) in next.weight_mut(l).as_mut_slice().iter_mut().zip(g.weights[l].as_slice()) {
            *w -= lr * gw;
        }
        for (b, gb) in next.bias_mut(l).iter_mut().zip(&g.biases[l]) {
            *b -= lr * gb;
        }
    }
    next
}

fn select_columns(x: &Matrix, idx: &[usize]) -> Matrix {
    Matrix::from_fn(x.rows(), idx.len(), |i, j| x.get(i, idx[j]))
}

fn total_loss(p: &NetworkParams, x: &Matrix, target: Target<'_>, lambda: f64) -> Result<(f64, f64)> {
    match target {
        Target::Values(y) => {
            let (total, data, _) = loss_mse_reg(p, x, y, lambda)?;
            Ok((total, data))
        }
        Target::Labels(labels) => {
            let data = loss_cross_entropy(p, x, labels)?;
            Ok((data + lambda / p.depth() as f64 * p.param_norm(), data))
        }
    }
}

/// Adam-then-GD training. Deterministic given the config seed. Returns the
/// trained parameters and the per-step history (`steps + gd_refine_steps`
/// entries, each recorded at the parameters the step starts from).
///
/// A non-finite loss aborts with [`Error::Divergence`] carrying the last
/// finite parameters and the history up to that point.
pub fn train(
    p0: &NetworkParams,
    x: &Matrix,
    target: Target<'_>,
    cfg: &TrainConfig,
) -> Result<(NetworkParams, TrainHistory)> {
    cfg.validate();
    let mut p = p0.clone();
    let mut history = TrainHistory::default();
    let mut adam = AdamState::new(&p);
    let wd = 2.0 * cfg.lambda / p.depth() as f64;
    let n = x.cols();
    let depth = p.depth() as f64;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut cursor = n; // forces an initial shuffle

    let mut prev = p.clone();
    for step in 0..cfg.steps {
        let (grads, total, data) = match cfg.batch {
            None => grad_with_loss(&p, x, target, cfg.lambda)?,
            Some(b) => {
                let b = b.min(n);
                let mut idx = Vec::with_capacity(b);
                while idx.len() < b {
                    if cursor >= n {
                        order.shuffle(&mut rng);
                        cursor = 0;
                    }
                    idx.push(order[cursor]);
                    cursor += 1;
                }
                let xb = select_columns(x, &idx);
                match target {
                    Target::Values(y) => {
                        let yb = select_columns(y, &idx);
                        grad_with_loss(&p, &xb, Target::Values(&yb), cfg.lambda)?
                    }
                    Target::Labels(labels) => {
                        let lb: Vec<usize> = idx.iter().map(|&i| labels[i]).collect();
                        grad_with_loss(&p, &xb, Target::Labels(&lb), cfg.lambda)?
                    }
                }
            }
        };
        if !total.is_finite() {
            return Err(Error::Divergence {
                step,
                last: Box::new(DivergedState { params: prev, history }),
            });
        }
        history.push(total, data, p.param_norm() / depth);
        prev = p.clone();
        adam.step(&mut p, &grads, cfg.lr, cfg.adam_betas, wd);
    }

    // Plain full-batch gradient descent; backtracking keeps the recorded
    // total loss nonincreasing across refinement steps.
    for step in 0..cfg.gd_refine_steps {
        let (grads, total, data) = grad_with_loss(&p, x, target, cfg.lambda)?;
        if !total.is_finite() {
            return Err(Error::Divergence {
                step: cfg.steps + step,
                last: Box::new(DivergedState { params: prev, history }),
            });
        }
        history.push(total, data, p.param_norm() / depth);
        prev = p.clone();
        let mut lr = cfg.gd_lr;
        let mut accepted = false;
        for _ in 0..40 {
            let candidate = apply_gd_step(&p, &grads, lr);
            let (cand_total, _) = total_loss(&candidate, x, target, cfg.lambda)?;
            if cand_total.is_finite() && cand_total <= total {
                p = candidate;
                accepted = true;
                break;
            }
            lr *= 0.5;
        }
        if !accepted {
            break; // no descent at f64 resolution; settled
        }
    }
    Ok((p, history))
}

/// Options for [`estimate_repr_cost`].
#[derive(Debug, Clone)]
pub struct ReprCostOptions {
    pub hidden_width: usize,
    pub restarts: usize,
    /// A run counts as fitting when its final data term is at most this.
    pub fit_tol: f64,
    pub lr: f64,
    pub gd_refine_steps: usize,
    pub gd_lr: f64,
    pub seed: u64,
}

impl Default for ReprCostOptions {
    fn default() -> Self {
        Self {
            hidden_width: 32,
            restarts: 3,
            fit_tol: 1e-4,
            lr: 1e-3,
            gd_refine_steps: 200,
            gd_lr: 1e-4,
            seed: 0,
        }
    }
}

/// Representation-cost estimate: the smallest `||W||^2` among restarts
/// whose final data term reached the fit tolerance. An upper bound on the
/// representation cost up to that tolerance.
#[derive(Debug, Clone)]
pub struct ReprCostEstimate {
    pub estimate: f64,
    pub params: NetworkParams,
    pub best_data_term: f64,
}

/// Multi-restart annealed estimator of the representation cost of the
/// function behind `(x, y)` at depth `depth`.
///
/// `schedule` is a finite list of `(lambda, adam_steps)` stages with
/// nonincreasing lambda; each restart runs the stages in order on the same
/// parameters, then a gradient-descent refinement. Diverged restarts are
/// skipped; if no restart fits, returns [`Error::Unfit`] with the best
/// data term seen.
pub fn estimate_repr_cost(
    x: &Matrix,
    y: &Matrix,
    depth: usize,
    schedule: &[(f64, usize)],
    opts: &ReprCostOptions,
) -> Result<ReprCostEstimate> {
    assert!(!schedule.is_empty(), "schedule must be nonempty");
    assert!(
        schedule.windows(2).all(|w| w[0].0 >= w[1].0),
        "schedule lambdas must be nonincreasing"
    );
    assert!(depth >= 1 && opts.restarts >= 1);

    let mut widths = vec![x.rows()];
    widths.extend(core::iter::repeat(opts.hidden_width).take(depth.saturating_sub(1)));
    widths.push(y.rows());

    let mut best: Option<(f64, NetworkParams)> = None;
    let mut best_data_term = f64::INFINITY;
    for restart in 0..opts.restarts {
        let mut p =
            NetworkParams::init(&widths, 0.0, opts.seed.wrapping_add(1000 * restart as u64), 1.0)?;
        let mut diverged = false;
        for (stage, &(lambda, steps)) in schedule.iter().enumerate() {
            let last = stage + 1 == schedule.len();
            let cfg = TrainConfig {
                lambda,
                lr: opts.lr,
                steps,
                seed: opts.seed.wrapping_add(restart as u64),
                gd_refine_steps: if last { opts.gd_refine_steps } else { 0 },
                gd_lr: opts.gd_lr,
                ..TrainConfig::default()
            };
            match train(&p, x, Target::Values(y), &cfg) {
                Ok((next, _)) => p = next,
                Err(Error::Divergence { .. }) => {
                    diverged = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if diverged {
            continue;
        }
        let (_, data, _) = loss_mse_reg(&p, x, y, 0.0)?;
        best_data_term = best_data_term.min(data);
        if data <= opts.fit_tol {
            let norm = p.param_norm();
            if best.as_ref().map_or(true, |(b, _)| norm < *b) {
                best = Some((norm, p));
            }
        }
    }
    match best {
        Some((estimate, params)) => Ok(ReprCostEstimate { estimate, params, best_data_term }),
        None => Err(Error::Unfit { best_data_term }),
    }
}
