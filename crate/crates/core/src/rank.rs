//! Certification suite for the low-rank bias of trained networks.
//!
//! This module turns the theory into checkable numbers:
//!
//! - probe-based Jacobian rank (the max over probes of the numerical rank
//!   of the Jacobian),
//! - the Schatten certificate `max_x ||Jf(x)||_{2/L}^{2/L} <= ||W||^2 / L`,
//! - per-layer activation spectra with the `s2/s1` bottleneck indicator
//!   and the nonlinearity-impact ratio `||Z~ - Z||_F / ||Z~||_F`,
//! - balancedness residuals `| ||W_l||^2 + ||b_l||^2 - ||W_{l+1}||^2 |`,
//! - open-path TSP (exact via Held-Karp for N <= 10, nearest-neighbor +
//!   2-opt beyond) and the lower bound `||W||^2 >= L (TSP/diam)^{2/L}`
//!   that any rank-1 interpolator must satisfy,
//! - a constructive rank-1 interpolator (project to a line, map the line
//!   piecewise-linearly to the outputs),
//! - tripoint detection for 2D classifiers and a denoising score for
//!   autoencoders.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{frobenius_distance, svd, Matrix, SingularSpectrum};
use crate::map::DifferentiableMap;
use crate::network::NetworkParams;

/// Aggregated certification output for one network.
#[derive(Debug, Clone)]
pub struct RankReport {
    pub jacobian_rank: usize,
    pub rank_tolerance: f64,
    /// `max_x ||Jf(x)||_{2/L}^{2/L}` over the probes.
    pub schatten_value: f64,
    /// `||W||^2 / L`, the certified upper bound on the Schatten value.
    pub norm_over_depth: f64,
    /// `norm_over_depth - schatten_value`; nonnegative up to 1e-9.
    pub bound_slack: f64,
    /// Hidden layer (1-based) minimizing `s2/s1` of its activations.
    pub bottleneck_layer: usize,
    pub bottleneck_ratio: f64,
    pub balancedness_residuals: Vec<f64>,
    pub probe_count: usize,
}

/// Max over probes of the numerical rank of the Jacobian, together with
/// the maximizing probe.
pub fn jacobian_rank<F: DifferentiableMap + ?Sized>(
    f: &F,
    probes: &[Vec<f64>],
    rel_tol: f64,
) -> Result<(usize, Vec<f64>)> {
    if probes.is_empty() {
        return Err(Error::NoProbes);
    }
    let mut best = 0;
    let mut argmax = probes[0].clone();
    for probe in probes {
        let jac = f.jacobian(probe);
        let rank = svd(&jac)?.s.numerical_rank(rel_tol);
        if rank > best {
            best = rank;
            argmax = probe.clone();
        }
    }
    Ok((best, argmax))
}

/// The Schatten certificate of a network at a probe set.
#[derive(Debug, Clone, Copy)]
pub struct SchattenCertificate {
    /// `max_x sum_k s_k(Jf(x))^{2/L}` over the probes (0 for no probes).
    pub max_value: f64,
    /// `||W||^2 / L`.
    pub bound: f64,
    /// `bound - max_value`.
    pub slack: f64,
}

pub fn schatten_certificate(
    p: &NetworkParams,
    probes: &[Vec<f64>],
) -> Result<SchattenCertificate> {
    let exponent = 2.0 / p.depth() as f64;
    let mut max_value = 0.0_f64;
    for probe in probes {
        let jac = p.jacobian(probe).matrix;
        max_value = max_value.max(svd(&jac)?.s.schatten(exponent));
    }
    let bound = p.param_norm() / p.depth() as f64;
    Ok(SchattenCertificate { max_value, bound, slack: bound - max_value })
}

/// Per-hidden-layer activation spectra (layers 1 through L-1, 1-based).
#[derive(Debug, Clone)]
pub struct BottleneckProfile {
    pub spectra: Vec<SingularSpectrum>,
    /// `s2/s1` per hidden layer.
    pub ratios: Vec<f64>,
    /// `||Z~_l - Z_l||_F / ||Z~_l||_F` per hidden layer.
    pub impacts: Vec<f64>,
    /// 1-based hidden layer minimizing `s2/s1`.
    pub bottleneck_layer: usize,
}

/// SVD spectra of the hidden activation matrices `Z_l` for a batch, the
/// bottleneck indicator `s2/s1`, and the nonlinearity impact per layer.
///
/// The batch must have at least two distinct columns; networks need at
/// least one hidden layer (depth >= 2).
pub fn bottleneck_profile(p: &NetworkParams, batch: &Matrix) -> Result<BottleneckProfile> {
    if p.depth() < 2 {
        return Err(Error::Depth { requested: p.depth(), minimum: 2 });
    }
    if batch.cols() < 2 || constant_columns(batch) {
        return Err(Error::DegenerateBatch);
    }
    let (_, trace) = p.forward(batch)?;
    let hidden = p.depth() - 1;
    let mut spectra = Vec::with_capacity(hidden);
    let mut ratios = Vec::with_capacity(hidden);
    let mut impacts = Vec::with_capacity(hidden);
    for l in 1..=hidden {
        let pre = &trace.preactivations()[l - 1];
        let act = &trace.activations()[l];
        let spectrum = svd(act)?.s;
        ratios.push(spectrum.ratio_2_1());
        spectra.push(spectrum);
        let pre_norm = pre.frobenius_norm();
        impacts.push(if pre_norm > 0.0 { frobenius_distance(pre, act) / pre_norm } else { 0.0 });
    }
    let bottleneck_layer = ratios
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.partial_cmp(b).unwrap())
        .map(|(i, _)| i + 1)
        .unwrap();
    Ok(BottleneckProfile { spectra, ratios, impacts, bottleneck_layer })
}

fn constant_columns(m: &Matrix) -> bool {
    let first = m.column(0);
    (1..m.cols()).all(|j| (0..m.rows()).all(|i| m.get(i, j) == first[i]))
}

/// Relative balancedness residuals
/// `| ||W_l||_F^2 + ||b_l||^2 - ||W_{l+1}||_F^2 | / max(||W_{l+1}||_F^2, 1e-12)`
/// for `l = 1..L-1`; empty for depth-1 networks.
pub fn balancedness_residuals(p: &NetworkParams) -> Vec<f64> {
    const EPS: f64 = 1e-12;
    let sq = |l: usize| -> f64 {
        p.weight(l).as_slice().iter().map(|x| x * x).sum::<f64>()
    };
    let bias_sq = |l: usize| -> f64 { p.bias(l).iter().map(|x| x * x).sum::<f64>() };
    (0..p.depth().saturating_sub(1))
        .map(|l| {
            let lhs = sq(l) + bias_sq(l);
            let rhs = sq(l + 1);
            (lhs - rhs).abs() / rhs.max(EPS)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TspMode {
    /// Held-Karp over all subsets; only for N <= 10.
    Exact,
    /// Best nearest-neighbor start, then 2-opt to a local optimum.
    Heuristic,
}

/// Shortest open path through all points (exact) or a 2-opt local optimum
/// (heuristic, never shorter than the optimum). Returns the length and the
/// visiting order.
pub fn tsp_path(points: &[Vec<f64>], mode: TspMode) -> Result<(f64, Vec<usize>)> {
    let n = points.len();
    if n < 2 {
        return Err(Error::TooFewPoints(n));
    }
    let dim = points[0].len();
    assert!(points.iter().all(|p| p.len() == dim), "points must share a dimension");
    let dist = |a: usize, b: usize| -> f64 {
        points[a]
            .iter()
            .zip(&points[b])
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    };
    let d: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| dist(i, j)).collect()).collect();
    match mode {
        TspMode::Exact => {
            assert!(n <= 10, "exact mode is limited to 10 points");
            Ok(held_karp_open(&d))
        }
        TspMode::Heuristic => Ok(two_opt(&d, nearest_neighbor_best(&d))),
    }
}

fn path_length(d: &[Vec<f64>], order: &[usize]) -> f64 {
    order.windows(2).map(|w| d[w[0]][w[1]]).sum()
}

fn held_karp_open(d: &[Vec<f64>]) -> (f64, Vec<usize>) {
    let n = d.len();
    let full = (1usize << n) - 1;
    let mut dp = vec![vec![f64::INFINITY; n]; full + 1];
    let mut parent = vec![vec![usize::MAX; n]; full + 1];
    for s in 0..n {
        dp[1 << s][s] = 0.0;
    }
    for mask in 1..=full {
        for last in 0..n {
            if mask & (1 << last) == 0 || dp[mask][last].is_infinite() {
                continue;
            }
            let base = dp[mask][last];
            for next in 0..n {
                if mask & (1 << next) != 0 {
                    continue;
                }
                let m2 = mask | (1 << next);
                let cand = base + d[last][next];
                if cand < dp[m2][next] {
                    dp[m2][next] = cand;
                    parent[m2][next] = last;
                }
            }
        }
    }
    let (mut last, mut best) = (0, f64::INFINITY);
    for s in 0..n {
        if dp[full][s] < best {
            best = dp[full][s];
            last = s;
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut mask = full;
    let mut cur = last;
    while cur != usize::MAX {
        order.push(cur);
        let prev = parent[mask][cur];
        mask &= !(1 << cur);
        cur = prev;
    }
    order.reverse();
    (best, order)
}

fn nearest_neighbor_best(d: &[Vec<f64>]) -> Vec<usize> {
    let n = d.len();
    let mut best_order: Vec<usize> = (0..n).collect();
    let mut best_len = f64::INFINITY;
    for start in 0..n {
        let mut order = Vec::with_capacity(n);
        let mut used = vec![false; n];
        order.push(start);
        used[start] = true;
        for _ in 1..n {
            let cur = *order.last().unwrap();
            let mut pick = usize::MAX;
            let mut pick_d = f64::INFINITY;
            for j in 0..n {
                if !used[j] && d[cur][j] < pick_d {
                    pick_d = d[cur][j];
                    pick = j;
                }
            }
            order.push(pick);
            used[pick] = true;
        }
        let len = path_length(d, &order);
        if len < best_len {
            best_len = len;
            best_order = order;
        }
    }
    best_order
}

/// 2-opt for open paths: reverse segments while an improving move exists.
fn two_opt(d: &[Vec<f64>], mut order: Vec<usize>) -> (f64, Vec<usize>) {
    let n = order.len();
    loop {
        let mut improved = false;
        for i in 0..n - 1 {
            for j in i + 1..n {
                // Cost delta of reversing order[i..=j]; endpoints have no
                // incident edge on their outer side.
                let mut delta = 0.0;
                if i > 0 {
                    delta += d[order[i - 1]][order[j]] - d[order[i - 1]][order[i]];
                }
                if j + 1 < n {
                    delta += d[order[i]][order[j + 1]] - d[order[j]][order[j + 1]];
                }
                if delta < -1e-12 {
                    order[i..=j].reverse();
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
    (path_length(d, &order), order)
}

/// The TSP lower bound on the squared parameter norm of any depth-`L`
/// rank-1 interpolator of `(X, Y)`.
#[derive(Debug, Clone)]
pub struct TspBound {
    pub tsp_length: f64,
    pub diameter: f64,
    pub depth: usize,
    /// `L * (tsp_length / diameter)^{2/L}`.
    pub norm_lower_bound: f64,
    pub mode: TspMode,
}

pub fn tsp_lower_bound(x: &Matrix, y: &Matrix, depth: usize, mode: TspMode) -> Result<TspBound> {
    let n = x.cols();
    if n < 2 {
        return Err(Error::TooFewPoints(n));
    }
    assert!(depth >= 1);
    assert_eq!(y.cols(), n, "inputs and outputs must pair up");
    let cols: Vec<Vec<f64>> = (0..n).map(|j| x.column(j)).collect();
    let mut diameter = 0.0_f64;
    for i in 0..n {
        for j in i + 1..n {
            let d: f64 = cols[i]
                .iter()
                .zip(&cols[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            diameter = diameter.max(d);
        }
    }
    if diameter == 0.0 {
        return Err(Error::DegenerateInputs);
    }
    let y_points: Vec<Vec<f64>> = (0..n).map(|j| y.column(j)).collect();
    let (tsp_length, _) = tsp_path(&y_points, mode)?;
    let norm_lower_bound = depth as f64 * (tsp_length / diameter).powf(2.0 / depth as f64);
    Ok(TspBound { tsp_length, diameter, depth, norm_lower_bound, mode })
}

/// Constructive BN-rank-1 interpolator: project inputs to a line along a
/// seeded generic direction, then map the line to the outputs with a
/// piecewise-linear ReLU network. Layer 1 has width 1, certifying
/// bottleneck rank 1; identity layers pad the depth.
///
/// Needs depth >= 2 for N <= 2 points and depth >= 3 otherwise (the knot
/// layer). The fit at the data is exact up to roundoff.
pub fn rank1_interpolator(x: &Matrix, y: &Matrix, depth: usize, seed: u64) -> Result<NetworkParams> {
    let n = x.cols();
    if n < 2 {
        return Err(Error::TooFewPoints(n));
    }
    assert_eq!(y.cols(), n, "inputs and outputs must pair up");
    let minimum = if n <= 2 { 2 } else { 3 };
    if depth < minimum {
        return Err(Error::Depth { requested: depth, minimum });
    }

    // Generic unit direction with collision-free projections.
    let d_in = x.rows();
    let mut projections: Option<(Vec<f64>, Vec<f64>)> = None; // (v, z)
    for attempt in 0..64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt));
        let normal = StandardNormal;
        let mut v: Vec<f64> = (0..d_in).map(|_| normal.sample(&mut rng)).collect();
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        for a in &mut v {
            *a /= norm;
        }
        let z: Vec<f64> = (0..n)
            .map(|j| (0..d_in).map(|i| v[i] * x.get(i, j)).sum())
            .collect();
        let mut sorted = z.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let spread = sorted[n - 1] - sorted[0];
        let min_gap = sorted.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        if spread > 0.0 && min_gap > 1e-9 * spread {
            projections = Some((v, z));
            break;
        }
    }
    let (v, z) = projections.ok_or(Error::Projection)?;

    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| z[a].partial_cmp(&z[b]).unwrap());
    let zs: Vec<f64> = idx.iter().map(|&i| z[i]).collect();
    let ys: Vec<Vec<f64>> = idx.iter().map(|&i| y.column(i)).collect();
    let d_out = y.rows();
    let shift = 1.0 - zs[0]; // u = z + shift >= 1 on the data

    // Segment slopes in output space.
    let slopes: Vec<Vec<f64>> = (0..n - 1)
        .map(|i| {
            let dz = zs[i + 1] - zs[i];
            (0..d_out).map(|r| (ys[i + 1][r] - ys[i][r]) / dz).collect()
        })
        .collect();

    let mut weights = Vec::with_capacity(depth);
    let mut biases = Vec::with_capacity(depth);
    weights.push(Matrix::from_rows(&[&v]));
    biases.push(vec![shift]);
    let identity_layers = depth - minimum;
    for _ in 0..identity_layers {
        weights.push(Matrix::identity(1));
        biases.push(vec![0.0]);
    }
    if n <= 2 {
        // Affine chain: y = y_0 + m_0 (u - shift - z_0).
        let w = Matrix::from_fn(d_out, 1, |r, _| slopes[0][r]);
        let b: Vec<f64> =
            (0..d_out).map(|r| ys[0][r] - slopes[0][r] * (zs[0] + shift)).collect();
        weights.push(w);
        biases.push(b);
    } else {
        // Knot layer: a passthrough unit plus one ReLU hinge per interior
        // breakpoint z_1..z_{n-2}.
        let hinge_count = n - 2;
        let knot_w = Matrix::from_fn(1 + hinge_count, 1, |_, _| 1.0);
        let mut knot_b = vec![0.0];
        for j in 1..=hinge_count {
            knot_b.push(-(zs[j] + shift));
        }
        weights.push(knot_w);
        biases.push(knot_b);
        let out_w = Matrix::from_fn(d_out, 1 + hinge_count, |r, c| {
            if c == 0 {
                slopes[0][r]
            } else {
                slopes[c][r] - slopes[c - 1][r]
            }
        });
        let out_b: Vec<f64> =
            (0..d_out).map(|r| ys[0][r] - slopes[0][r] * (zs[0] + shift)).collect();
        weights.push(out_w);
        biases.push(out_b);
    }
    NetworkParams::new(weights, biases, 0.0)
}

/// Rectangular probe grid over a 2D input domain.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    /// Cells per axis.
    pub resolution: usize,
}

impl GridSpec {
    pub fn spacing(&self) -> (f64, f64) {
        (
            (self.x_range.1 - self.x_range.0) / self.resolution as f64,
            (self.y_range.1 - self.y_range.0) / self.resolution as f64,
        )
    }

    /// The default tripoint radius: 1.5 grid spacings.
    pub fn default_radius(&self) -> f64 {
        let (sx, sy) = self.spacing();
        1.5 * sx.max(sy)
    }

    fn center(&self, i: usize, j: usize) -> [f64; 2] {
        let (sx, sy) = self.spacing();
        [self.x_range.0 + (i as f64 + 0.5) * sx, self.y_range.0 + (j as f64 + 0.5) * sy]
    }
}

/// Grid cells whose closed radius-neighborhood sees three or more distinct
/// predicted classes. The class at a cell is the argmax of the classifier
/// output at the cell center.
pub fn tripoints(classifier: &dyn DifferentiableMap, grid: &GridSpec, radius: f64) -> Vec<[f64; 2]> {
    assert_eq!(classifier.input_dim(), 2, "tripoints needs a 2D domain");
    assert!(grid.resolution >= 2 && radius >= 0.0);
    let res = grid.resolution;
    let (sx, sy) = grid.spacing();
    let mut classes = vec![0usize; res * res];
    for i in 0..res {
        for j in 0..res {
            let c = grid.center(i, j);
            let out = classifier.eval(&c);
            let argmax = out
                .iter()
                .enumerate()
                .max_by(|(_, a), (_, b)| a.partial_cmp(b).unwrap())
                .map(|(k, _)| k)
                .unwrap();
            classes[i * res + j] = argmax;
        }
    }
    // Offsets whose center-to-center distance fits in the radius.
    let reach_x = (radius / sx).floor() as isize;
    let reach_y = (radius / sy).floor() as isize;
    let mut offsets = Vec::new();
    for di in -reach_x..=reach_x {
        for dj in -reach_y..=reach_y {
            let dist2 = (di as f64 * sx).powi(2) + (dj as f64 * sy).powi(2);
            if dist2 <= radius * radius {
                offsets.push((di, dj));
            }
        }
    }
    let mut out = Vec::new();
    for i in 0..res {
        for j in 0..res {
            let mut seen: Vec<usize> = Vec::with_capacity(4);
            for &(di, dj) in &offsets {
                let (ni, nj) = (i as isize + di, j as isize + dj);
                if ni < 0 || nj < 0 || ni >= res as isize || nj >= res as isize {
                    continue;
                }
                let c = classes[ni as usize * res + nj as usize];
                if !seen.contains(&c) {
                    seen.push(c);
                }
                if seen.len() >= 3 {
                    break;
                }
            }
            if seen.len() >= 3 {
                out.push(grid.center(i, j));
            }
        }
    }
    out
}

/// Source of on-manifold points plus a dense resampling for
/// nearest-neighbor distance queries.
pub trait ManifoldSampler {
    fn ambient_dim(&self) -> usize;
    fn sample(&self, rng: &mut dyn RngCore) -> Vec<f64>;
    fn dense_sample(&self, count: usize) -> Matrix;
}

/// Dense-sample size used for manifold distances.
pub const DENSE_MANIFOLD_SAMPLES: usize = 10_000;

fn nearest_distance(point: &[f64], dense: &Matrix) -> f64 {
    let mut best = f64::INFINITY;
    for j in 0..dense.cols() {
        let mut d2 = 0.0;
        for (i, &xi) in point.iter().enumerate() {
            let diff = xi - dense.get(i, j);
            d2 += diff * diff;
        }
        best = best.min(d2);
    }
    best.sqrt()
}

/// Mean over trials of
/// `dist(f(x_noisy), manifold) / dist(x_noisy, manifold)` with isotropic
/// Gaussian noise of standard deviation `noise_scale`. Ratios below 1 mean
/// the map pulls noisy inputs back toward the manifold.
pub fn denoising_score(
    p: &NetworkParams,
    sampler: &dyn ManifoldSampler,
    noise_scale: f64,
    n_trials: usize,
    seed: u64,
) -> f64 {
    assert_eq!(p.input_width(), sampler.ambient_dim());
    assert_eq!(p.output_width(), sampler.ambient_dim());
    let dense = sampler.dense_sample(DENSE_MANIFOLD_SAMPLES);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let mut sum = 0.0;
    let mut count = 0usize;
    for _ in 0..n_trials {
        let mut point = sampler.sample(&mut rng);
        for v in &mut point {
            let eps: f64 = normal.sample(&mut rng);
            *v += noise_scale * eps;
        }
        let before = nearest_distance(&point, &dense);
        if before < 1e-12 {
            continue; // noise landed on the manifold; the ratio is undefined
        }
        let after = nearest_distance(&p.eval_vec(&point), &dense);
        sum += after / before;
        count += 1;
    }
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// Uniform probes over a box, plus (optionally) every training input
/// perturbed by `1e-3` of the per-coordinate box extent.
pub fn default_probes(
    domain_box: &[(f64, f64)],
    train_inputs: Option<&Matrix>,
    count: usize,
    seed: u64,
) -> Vec<Vec<f64>> {
    let dim = domain_box.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probes = Vec::with_capacity(count);
    for _ in 0..count {
        probes.push(
            domain_box
                .iter()
                .map(|(lo, hi)| lo + (hi - lo) * rng.random::<f64>())
                .collect(),
        );
    }
    if let Some(x) = train_inputs {
        assert_eq!(x.rows(), dim, "training inputs must match the domain box");
        let normal = StandardNormal;
        for j in 0..x.cols() {
            let probe: Vec<f64> = (0..dim)
                .map(|i| {
                    let (lo, hi) = domain_box[i];
                    let eps: f64 = normal.sample(&mut rng);
                    x.get(i, j) + 1e-3 * (hi - lo) * eps
                })
                .collect();
            probes.push(probe);
        }
    }
    probes
}

/// Full certification of one network: Jacobian rank, Schatten certificate,
/// bottleneck profile on `batch`, and balancedness residuals.
pub fn certify(
    p: &NetworkParams,
    probes: &[Vec<f64>],
    batch: &Matrix,
    rel_tol: f64,
) -> Result<RankReport> {
    let (rank, _) = jacobian_rank(p, probes, rel_tol)?;
    let cert = schatten_certificate(p, probes)?;
    let profile = bottleneck_profile(p, batch)?;
    Ok(RankReport {
        jacobian_rank: rank,
        rank_tolerance: rel_tol,
        schatten_value: cert.max_value,
        norm_over_depth: cert.bound,
        bound_slack: cert.slack,
        bottleneck_layer: profile.bottleneck_layer,
        bottleneck_ratio: profile.ratios[profile.bottleneck_layer - 1],
        balancedness_residuals: balancedness_residuals(p),
        probe_count: probes.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::AffineMap;

    fn random_points(dim: usize, n: usize, seed: u64, scale: f64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| (0..dim).map(|_| scale * (rng.random::<f64>() - 0.5)).collect())
            .collect()
    }

    #[test]
    fn jacobian_rank_of_affine_map_is_matrix_rank() {
        // Rank-3 5x4 matrix built as a product of full-rank factors.
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let b = Matrix::from_fn(5, 3, |_, _| rng.random::<f64>() - 0.5);
        let c = Matrix::from_fn(3, 4, |_, _| rng.random::<f64>() - 0.5);
        let map = AffineMap::new(b.matmul(&c), vec![0.5; 5]);
        let probes = random_points(4, 25, 3, 2.0);
        let (rank, _) = jacobian_rank(&map, &probes, 1e-6).unwrap();
        assert_eq!(rank, 3);
    }

    #[test]
    fn jacobian_rank_rejects_empty_probes() {
        let map = AffineMap::new(Matrix::identity(2), vec![0.0; 2]);
        assert_eq!(jacobian_rank(&map, &[], 1e-3).unwrap_err(), Error::NoProbes);
    }

    #[test]
    fn schatten_certificate_zero_network() {
        let mut p = NetworkParams::init(&[3, 4, 2], 0.0, 0, 0.0).unwrap();
        p.bias_mut(1).copy_from_slice(&[3.0, 4.0]);
        let probes = random_points(3, 10, 5, 2.0);
        let cert = schatten_certificate(&p, &probes).unwrap();
        assert_eq!(cert.max_value, 0.0);
        assert!((cert.bound - 25.0 / 2.0).abs() < 1e-12);
        assert!(cert.slack >= 0.0);
    }

    #[test]
    fn schatten_certificate_identity_chain_is_tight() {
        let k = 3;
        let depth = 7;
        let weights: Vec<Matrix> = (0..depth).map(|_| Matrix::identity(k)).collect();
        let biases = vec![vec![0.0; k]; depth];
        let p = NetworkParams::new(weights, biases, 0.0).unwrap();
        // Positive probes keep every pre-activation on the linear branch.
        let probes: Vec<Vec<f64>> = random_points(k, 20, 6, 1.0)
            .into_iter()
            .map(|v| v.into_iter().map(|x| x.abs() + 0.1).collect())
            .collect();
        let cert = schatten_certificate(&p, &probes).unwrap();
        assert!((cert.max_value - k as f64).abs() <= 1e-9);
        assert!((cert.bound - k as f64).abs() <= 1e-12);
        assert!(cert.slack.abs() <= 1e-9);
    }

    #[test]
    fn bottleneck_profile_rank_one_batch() {
        let depth = 4;
        let k = 3;
        let weights: Vec<Matrix> = (0..depth).map(|_| Matrix::identity(k)).collect();
        let p = NetworkParams::new(weights, vec![vec![0.0; k]; depth], 0.0).unwrap();
        // Rank-1 batch: positive multiples of one direction.
        let dir = [1.0, 2.0, 0.5];
        let batch = Matrix::from_fn(k, 6, |i, j| dir[i] * (j + 1) as f64 * 0.3);
        let profile = bottleneck_profile(&p, &batch).unwrap();
        for ratio in &profile.ratios {
            assert!(*ratio <= 1e-12, "ratio {ratio}");
        }
        for impact in &profile.impacts {
            assert_eq!(*impact, 0.0);
        }
    }

    #[test]
    fn bottleneck_profile_random_init_has_no_bottleneck() {
        let p = NetworkParams::init(&[6, 64, 64, 64, 6], 0.0, 9, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let batch = Matrix::from_fn(6, 48, |_, _| rng.random::<f64>() * 2.0 - 1.0);
        let profile = bottleneck_profile(&p, &batch).unwrap();
        for ratio in &profile.ratios {
            assert!(*ratio > 0.05, "untrained wide layers should not be near rank 1, got {ratio}");
        }
    }

    #[test]
    fn bottleneck_profile_rejects_constant_batch() {
        let p = NetworkParams::init(&[2, 4, 2], 0.0, 0, 1.0).unwrap();
        let batch = Matrix::from_fn(2, 5, |i, _| i as f64);
        assert_eq!(bottleneck_profile(&p, &batch).unwrap_err(), Error::DegenerateBatch);
        let single = Matrix::zeros(2, 1);
        assert_eq!(bottleneck_profile(&p, &single).unwrap_err(), Error::DegenerateBatch);
    }

    #[test]
    fn balancedness_residual_cases() {
        let equal = NetworkParams::new(
            vec![Matrix::identity(2), Matrix::identity(2), Matrix::identity(2)],
            vec![vec![0.0; 2]; 3],
            0.0,
        )
        .unwrap();
        for r in balancedness_residuals(&equal) {
            assert_eq!(r, 0.0);
        }
        // Norms 1 and 4: residual |1 - 4| / 4 = 0.75.
        let unbalanced = NetworkParams::new(
            vec![Matrix::from_rows(&[&[1.0]]), Matrix::from_rows(&[&[2.0]])],
            vec![vec![0.0], vec![0.0]],
            0.0,
        )
        .unwrap();
        assert_eq!(balancedness_residuals(&unbalanced), vec![0.75]);
    }

    #[test]
    fn tsp_collinear_points() {
        let points: Vec<Vec<f64>> = [0.0, 2.0, 1.0, 3.0].iter().map(|&v| vec![v]).collect();
        let (len, order) = tsp_path(&points, TspMode::Exact).unwrap();
        assert!((len - 3.0).abs() < 1e-12);
        let coords: Vec<f64> = order.iter().map(|&i| points[i][0]).collect();
        let increasing = coords.windows(2).all(|w| w[1] > w[0]);
        let decreasing = coords.windows(2).all(|w| w[1] < w[0]);
        assert!(increasing || decreasing, "optimal collinear path is monotone: {coords:?}");
    }

    #[test]
    fn tsp_unit_square_open_path() {
        let points = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
        ];
        let (len, _) = tsp_path(&points, TspMode::Exact).unwrap();
        assert!((len - 3.0).abs() < 1e-12);
        let (hlen, _) = tsp_path(&points, TspMode::Heuristic).unwrap();
        assert!(hlen >= len - 1e-12);
        assert!((hlen - 3.0).abs() < 1e-12);
    }

    #[test]
    fn tsp_rejects_single_point() {
        assert_eq!(
            tsp_path(&[vec![0.0]], TspMode::Exact).unwrap_err(),
            Error::TooFewPoints(1)
        );
    }

    #[test]
    fn tsp_bound_equal_outputs_is_zero() {
        let x = Matrix::from_fn(2, 5, |i, j| (i + j) as f64);
        let y = Matrix::from_fn(1, 5, |_, _| 2.5);
        let bound = tsp_lower_bound(&x, &y, 6, TspMode::Exact).unwrap();
        assert_eq!(bound.tsp_length, 0.0);
        assert_eq!(bound.norm_lower_bound, 0.0);
    }

    #[test]
    fn tsp_bound_identity_data_equals_depth() {
        // X on the unit segment, Y = X: tsp = diam, so the bound is L.
        let x = Matrix::from_fn(1, 6, |_, j| j as f64 / 5.0);
        let bound = tsp_lower_bound(&x, &x, 9, TspMode::Exact).unwrap();
        assert!((bound.tsp_length - 1.0).abs() < 1e-12);
        assert!((bound.diameter - 1.0).abs() < 1e-12);
        assert!((bound.norm_lower_bound - 9.0).abs() < 1e-12);
    }

    #[test]
    fn tsp_bound_rejects_zero_diameter() {
        let x = Matrix::from_fn(2, 4, |_, _| 1.0);
        let y = Matrix::from_fn(1, 4, |_, j| j as f64);
        assert_eq!(
            tsp_lower_bound(&x, &y, 4, TspMode::Exact).unwrap_err(),
            Error::DegenerateInputs
        );
    }

    #[test]
    fn rank1_two_points_is_affine_chain() {
        let x = Matrix::from_rows(&[&[0.0, 1.0], &[0.0, -1.0]]);
        let y = Matrix::from_rows(&[&[2.0, 4.0]]);
        let p = rank1_interpolator(&x, &y, 4, 0).unwrap();
        assert_eq!(p.widths(), &[2, 1, 1, 1, 1]);
        for j in 0..2 {
            let out = p.eval_vec(&x.column(j));
            assert!((out[0] - y.get(0, j)).abs() < 1e-10);
        }
    }

    #[test]
    fn rank1_fits_and_certifies_rank_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let n = 10;
        let x = Matrix::from_fn(3, n, |_, _| rng.random::<f64>() * 2.0 - 1.0);
        let y = Matrix::from_fn(2, n, |_, _| rng.random::<f64>() * 2.0 - 1.0);
        let p = rank1_interpolator(&x, &y, 5, 7).unwrap();
        assert_eq!(p.depth(), 5);
        for j in 0..n {
            let out = p.eval_vec(&x.column(j));
            for r in 0..2 {
                assert!(
                    (out[r] - y.get(r, j)).abs() <= 1e-8,
                    "fit error at point {j}: {} vs {}",
                    out[r],
                    y.get(r, j)
                );
            }
        }
        let probes = random_points(3, 200, 15, 2.0);
        let (rank, _) = jacobian_rank(&p, &probes, 1e-3).unwrap();
        assert_eq!(rank, 1);
        // Any rank-1 interpolator obeys the TSP lower bound.
        let bound = tsp_lower_bound(&x, &y, 5, TspMode::Exact).unwrap();
        assert!(p.param_norm() >= bound.norm_lower_bound - 1e-6);
    }

    #[test]
    fn rank1_norm_grows_by_one_per_identity_layer() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let x = Matrix::from_fn(2, 6, |_, _| rng.random::<f64>());
        let y = Matrix::from_fn(1, 6, |_, _| rng.random::<f64>());
        let p4 = rank1_interpolator(&x, &y, 4, 3).unwrap();
        let p5 = rank1_interpolator(&x, &y, 5, 3).unwrap();
        let p9 = rank1_interpolator(&x, &y, 9, 3).unwrap();
        assert_eq!(p5.param_norm() - p4.param_norm(), 1.0);
        assert_eq!(p9.param_norm() - p4.param_norm(), 5.0);
    }

    #[test]
    fn rank1_depth_and_projection_errors() {
        let x = Matrix::from_fn(2, 5, |i, j| (i * 5 + j) as f64);
        let y = Matrix::from_fn(1, 5, |_, j| j as f64);
        assert!(matches!(
            rank1_interpolator(&x, &y, 2, 0),
            Err(Error::Depth { requested: 2, minimum: 3 })
        ));
        // Duplicate inputs can never project to distinct values.
        let dup = Matrix::from_fn(2, 3, |i, j| if j == 2 { i as f64 } else { i as f64 });
        let ydup = Matrix::from_fn(1, 3, |_, j| j as f64);
        assert_eq!(rank1_interpolator(&dup, &ydup, 4, 0).unwrap_err(), Error::Projection);
    }

    #[test]
    fn tripoints_absent_for_two_class_linear_boundary() {
        // Two outputs split by a line: argmax can only meet 2 classes.
        let map = AffineMap::new(
            Matrix::from_rows(&[&[1.0, 0.0], &[-1.0, 0.0]]),
            vec![0.0, 0.0],
        );
        let grid = GridSpec { x_range: (-1.0, 1.0), y_range: (-1.0, 1.0), resolution: 40 };
        let pts = tripoints(&map, &grid, grid.default_radius());
        assert!(pts.is_empty());
    }

    #[test]
    fn tripoints_found_at_wedge_meeting_point() {
        // Three 120-degree wedges around the origin.
        let dirs = [(0.0_f64, 1.0_f64), (0.866, -0.5), (-0.866, -0.5)];
        let rows: Vec<Vec<f64>> = dirs.iter().map(|&(a, b)| vec![a, b]).collect();
        let slices: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        let map = AffineMap::new(Matrix::from_rows(&slices), vec![0.0; 3]);
        let grid = GridSpec { x_range: (-1.0, 1.0), y_range: (-1.0, 1.0), resolution: 41 };
        let radius = grid.default_radius();
        let pts = tripoints(&map, &grid, radius);
        assert!(!pts.is_empty());
        for p in &pts {
            let dist = (p[0] * p[0] + p[1] * p[1]).sqrt();
            assert!(dist <= 3.0 * radius, "tripoint far from origin: {p:?}");
        }
    }

    struct LineManifold {
        dir: [f64; 2],
    }

    impl ManifoldSampler for LineManifold {
        fn ambient_dim(&self) -> usize {
            2
        }

        fn sample(&self, rng: &mut dyn RngCore) -> Vec<f64> {
            let unit = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
            let t = unit * 4.0 - 2.0;
            vec![t * self.dir[0], t * self.dir[1]]
        }

        fn dense_sample(&self, count: usize) -> Matrix {
            Matrix::from_fn(2, count, |i, j| {
                let t = -3.0 + 6.0 * j as f64 / (count - 1) as f64;
                t * self.dir[i]
            })
        }
    }

    #[test]
    fn denoising_identity_network_scores_one() {
        let manifold = LineManifold { dir: [3.0 / 5.0, 4.0 / 5.0] };
        let id = NetworkParams::new(vec![Matrix::identity(2)], vec![vec![0.0; 2]], 0.0).unwrap();
        let score = denoising_score(&id, &manifold, 0.3, 64, 8);
        assert!((score - 1.0).abs() < 1e-12);
    }

    #[test]
    fn denoising_exact_projection_scores_near_zero() {
        let (dx, dy) = (3.0 / 5.0, 4.0 / 5.0);
        let manifold = LineManifold { dir: [dx, dy] };
        let proj = Matrix::from_rows(&[&[dx * dx, dx * dy], &[dx * dy, dy * dy]]);
        let p = NetworkParams::new(vec![proj], vec![vec![0.0; 2]], 0.0).unwrap();
        let score = denoising_score(&p, &manifold, 0.3, 64, 8);
        assert!(score < 0.01, "projection score {score}");
    }

    #[test]
    fn certify_assembles_report() {
        let p = NetworkParams::init(&[3, 8, 8, 2], 0.0, 33, 1.0).unwrap();
        let probes = random_points(3, 50, 34, 2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        let batch = Matrix::from_fn(3, 20, |_, _| rng.random::<f64>());
        let report = certify(&p, &probes, &batch, 1e-3).unwrap();
        assert!(report.jacobian_rank <= 2);
        assert!(report.bound_slack >= -1e-9);
        assert_eq!(report.balancedness_residuals.len(), 2);
        assert!(report.bottleneck_layer >= 1 && report.bottleneck_layer <= 2);
        assert!(report.bottleneck_ratio >= 0.0 && report.bottleneck_ratio <= 1.0);
        assert_eq!(report.probe_count, 50);
    }
}
