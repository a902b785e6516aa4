//! Seeded synthetic generators and closed-form fixtures.
//!
//! All generators are deterministic per seed. The low-rank generator draws
//! latent Gaussians, pushes them through seeded random shallow ReLU
//! networks, and certifies the claimed rank with a probe-based chain-rule
//! check before returning; seeds whose samples collide in input space are
//! rejected and retried.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::map::DifferentiableMap;
use crate::network::NetworkParams;
use crate::rank::{jacobian_rank, ManifoldSampler};
use crate::training::Target;

/// Generative metadata attached to a dataset.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DatasetMeta {
    pub latent_dim: Option<usize>,
    pub true_rank: Option<usize>,
    pub seed: Option<u64>,
    /// Per-coordinate input bounds.
    pub domain_box: Option<Vec<(f64, f64)>>,
}

/// Regression values or 1-based class labels.
#[derive(Debug, Clone, PartialEq)]
pub enum Targets {
    Values(Matrix),
    Labels { labels: Vec<usize>, classes: usize },
}

/// Input matrix (d_in x N) plus targets and metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: Matrix,
    pub targets: Targets,
    pub meta: DatasetMeta,
}

impl Dataset {
    pub fn n(&self) -> usize {
        self.x.cols()
    }

    pub fn d_in(&self) -> usize {
        self.x.rows()
    }

    /// Output width a network fitting this dataset needs.
    pub fn d_out(&self) -> usize {
        match &self.targets {
            Targets::Values(y) => y.rows(),
            Targets::Labels { classes, .. } => *classes,
        }
    }

    /// Borrowed training target view.
    pub fn target(&self) -> Target<'_> {
        match &self.targets {
            Targets::Values(y) => Target::Values(y),
            Targets::Labels { labels, .. } => Target::Labels(labels),
        }
    }

    /// Per-coordinate bounds of the stored inputs.
    pub fn input_box(&self) -> Vec<(f64, f64)> {
        column_box(&self.x)
    }
}

fn column_box(x: &Matrix) -> Vec<(f64, f64)> {
    (0..x.rows())
        .map(|i| {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for j in 0..x.cols() {
                lo = lo.min(x.get(i, j));
                hi = hi.max(x.get(i, j));
            }
            (lo, hi)
        })
        .collect()
}

fn standard_normal_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let normal = StandardNormal;
    Matrix::from_fn(rows, cols, |_, _| normal.sample(rng))
}

fn min_pairwise_column_distance(x: &Matrix) -> f64 {
    let mut best = f64::INFINITY;
    for a in 0..x.cols() {
        for b in a + 1..x.cols() {
            let mut d2 = 0.0;
            for i in 0..x.rows() {
                let diff = x.get(i, a) - x.get(i, b);
                d2 += diff * diff;
            }
            best = best.min(d2.sqrt());
        }
    }
    best
}

/// Low-rank regression data: latent `z ~ N(0, I)`, inputs `x = g(z)` and
/// outputs `y = h(z_1..z_k)` through seeded random shallow ReLU networks
/// of the given inner width. Also returns the two generator networks so
/// the rank witness can be probed externally.
pub fn synth_lowrank_with_generators(
    d_in: usize,
    d_out: usize,
    latent_dim: usize,
    k: usize,
    n: usize,
    inner_width: usize,
    seed: u64,
) -> Result<(Dataset, NetworkParams, NetworkParams)> {
    if k == 0 || k > latent_dim || latent_dim > d_in || k > d_out {
        return Err(Error::Dim(format!(
            "need 1 <= k <= latent <= d_in and k <= d_out, got k={k}, latent={latent_dim}, d_in={d_in}, d_out={d_out}"
        )));
    }
    if n == 0 || inner_width == 0 {
        return Err(Error::Dim(format!("need n >= 1 and inner width >= 1, got n={n}, width={inner_width}")));
    }
    for attempt in 0..32u64 {
        let base = seed.wrapping_add(attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut rng = ChaCha8Rng::seed_from_u64(base);
        let z = standard_normal_matrix(latent_dim, n, &mut rng);
        let g = NetworkParams::init(&[latent_dim, inner_width, d_in], 0.0, base ^ 0x5151, 1.0)?;
        let h = NetworkParams::init(&[k, inner_width, d_out], 0.0, base ^ 0xA3A3, 1.0)?;
        let (x, _) = g.forward(&z)?;
        // Injectivity guard: reject colliding samples.
        if min_pairwise_column_distance(&x) <= 1e-9 {
            continue;
        }
        // Certify the claimed rank: the map z -> y factors through h, so
        // its Jacobian rank is the rank of Jh, which must reach k.
        let probes: Vec<Vec<f64>> = (0..8)
            .map(|_| {
                let normal = StandardNormal;
                (0..k).map(|_| normal.sample(&mut rng)).collect()
            })
            .collect();
        let (rank, _) = jacobian_rank(&h, &probes, 1e-6)?;
        if rank != k {
            continue;
        }
        let zk = Matrix::from_fn(k, n, |i, j| z.get(i, j));
        let (y, _) = h.forward(&zk)?;
        let meta = DatasetMeta {
            latent_dim: Some(latent_dim),
            true_rank: Some(k),
            seed: Some(seed),
            domain_box: Some(column_box(&x)),
        };
        return Ok((Dataset { x, targets: Targets::Values(y), meta }, g, h));
    }
    Err(Error::Dim(format!("no injective rank-{k} sample after 32 reseeds")))
}

pub fn synth_lowrank(
    d_in: usize,
    d_out: usize,
    latent_dim: usize,
    k: usize,
    n: usize,
    inner_width: usize,
    seed: u64,
) -> Result<Dataset> {
    synth_lowrank_with_generators(d_in, d_out, latent_dim, k, n, inner_width, seed)
        .map(|(d, _, _)| d)
}

/// Default jitter for the S-shape classes: 0.03 of the curve extent (2.0).
pub const S_SHAPE_DEFAULT_JITTER: f64 = 0.06;

const S_SHAPE_SPACING: f64 = 1.2;
const S_SHAPE_AMPLITUDE: f64 = 1.0;

/// Labeled 2D classes: identical inverted-S curves translated along the
/// x-axis, one per class, with Gaussian jitter of the given standard
/// deviation. Labels are 1-based. Adjacent classes interleave vertically,
/// so no class pair is linearly separable at the default geometry.
pub fn s_shape_classes(
    n_classes: usize,
    n_per_class: usize,
    jitter: f64,
    seed: u64,
) -> Result<Dataset> {
    if n_classes < 2 {
        return Err(Error::Dim(format!("need at least 2 classes, got {n_classes}")));
    }
    if n_per_class == 0 {
        return Err(Error::Dim(alloc::string::String::from("need at least 1 point per class")));
    }
    let n = n_classes * n_per_class;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let mut x = Matrix::zeros(2, n);
    let mut labels = Vec::with_capacity(n);
    for c in 0..n_classes {
        for i in 0..n_per_class {
            let t: f64 = rng.random::<f64>() * 2.0 - 1.0;
            let jx: f64 = normal.sample(&mut rng);
            let jy: f64 = normal.sample(&mut rng);
            let col = c * n_per_class + i;
            let pi_t = core::f64::consts::PI * t;
            x.set(0, col, c as f64 * S_SHAPE_SPACING - S_SHAPE_AMPLITUDE * pi_t.sin() + jitter * jx);
            x.set(1, col, t + jitter * jy);
            labels.push(c + 1);
        }
    }
    let meta = DatasetMeta {
        seed: Some(seed),
        domain_box: Some(column_box(&x)),
        ..DatasetMeta::default()
    };
    Ok(Dataset { x, targets: Targets::Labels { labels, classes: n_classes }, meta })
}

/// A 1-dimensional curve in the plane: `x = g(z)` for scalar Gaussian `z`
/// and a seeded random shallow ReLU net `g`. Keeps the recorded latents
/// and exposes dense resampling for manifold-distance queries.
#[derive(Debug, Clone)]
pub struct Curve1d {
    net: NetworkParams,
    latents: Vec<f64>,
}

impl Curve1d {
    pub fn generator(&self) -> &NetworkParams {
        &self.net
    }

    pub fn latents(&self) -> &[f64] {
        &self.latents
    }

    pub fn point_at(&self, z: f64) -> Vec<f64> {
        self.net.eval_vec(&[z])
    }

    /// Largest pairwise distance within a dense sampling of the curve.
    pub fn extent(&self) -> f64 {
        let dense = self.dense_sample(512);
        let mut best = 0.0_f64;
        for a in 0..dense.cols() {
            for b in a + 1..dense.cols() {
                let dx = dense.get(0, a) - dense.get(0, b);
                let dy = dense.get(1, a) - dense.get(1, b);
                best = best.max((dx * dx + dy * dy).sqrt());
            }
        }
        best
    }
}

/// Latent range the dense resampling covers; fresh samples are drawn from
/// a standard normal truncated to this range.
const CURVE_LATENT_RANGE: f64 = 4.0;

impl ManifoldSampler for Curve1d {
    fn ambient_dim(&self) -> usize {
        2
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        let normal = StandardNormal;
        loop {
            let z: f64 = normal.sample(rng);
            if z.abs() <= CURVE_LATENT_RANGE {
                return self.point_at(z);
            }
        }
    }

    fn dense_sample(&self, count: usize) -> Matrix {
        assert!(count >= 2);
        let margin = 0.05 * CURVE_LATENT_RANGE;
        let lo = -CURVE_LATENT_RANGE - margin;
        let hi = CURVE_LATENT_RANGE + margin;
        let mut out = Matrix::zeros(2, count);
        for j in 0..count {
            let z = lo + (hi - lo) * j as f64 / (count - 1) as f64;
            let p = self.point_at(z);
            out.set(0, j, p[0]);
            out.set(1, j, p[1]);
        }
        out
    }
}

/// Autoencoder data on a 1D curve in the plane (`Y = X`, true rank 1).
pub fn curve1d_in_plane(n: usize, seed: u64) -> Result<(Dataset, Curve1d)> {
    if n == 0 {
        return Err(Error::Dim(alloc::string::String::from("need at least 1 sample")));
    }
    for attempt in 0..32u64 {
        let base = seed.wrapping_add(attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut rng = ChaCha8Rng::seed_from_u64(base);
        let normal = StandardNormal;
        let latents: Vec<f64> = (0..n).map(|_| normal.sample(&mut rng)).collect();
        let net = NetworkParams::init(&[1, 100, 2], 0.0, base ^ 0x1D1D, 1.0)?;
        let curve = Curve1d { net, latents };
        if curve.extent() < 1e-3 {
            continue; // degenerate draw: the curve collapsed
        }
        let x = Matrix::from_fn(2, n, |i, j| curve.point_at(curve.latents[j])[i]);
        let meta = DatasetMeta {
            latent_dim: Some(1),
            true_rank: Some(1),
            seed: Some(seed),
            domain_box: Some(column_box(&x)),
        };
        let dataset = Dataset { x: x.clone(), targets: Targets::Values(x), meta };
        return Ok((dataset, curve));
    }
    Err(Error::Dim(alloc::string::String::from("no non-degenerate curve after 32 reseeds")))
}

/// The x-cross map: retracts the plane onto the cross `|x0| = |x1|`,
/// equals the identity there, and has a rank-1 Jacobian inside every open
/// region — yet cannot factor through one dimension.
///
/// The two formula regions meet continuously on the cross rays. Like any
/// retraction onto a non-convex set, the map switches branches across the
/// open axes (where the nearest cross branch changes), so those lines are
/// jump boundaries, not linear-region boundaries.
#[derive(Debug, Clone, Copy, Default)]
pub struct XCross;

/// Closed-form fixture whose Jacobian rank (1) is strictly below its
/// bottleneck rank (2).
pub fn xcross_fixture() -> XCross {
    XCross
}

#[inline]
fn sign(v: f64) -> f64 {
    if v >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

impl DifferentiableMap for XCross {
    fn input_dim(&self) -> usize {
        2
    }

    fn output_dim(&self) -> usize {
        2
    }

    fn eval(&self, x: &[f64]) -> Vec<f64> {
        let (x0, x1) = (x[0], x[1]);
        if x0.abs() >= x1.abs() {
            vec![x0, sign(x1) * x0.abs()]
        } else {
            vec![sign(x0) * x1.abs(), x1]
        }
    }

    fn jacobian(&self, x: &[f64]) -> Matrix {
        let (x0, x1) = (x[0], x[1]);
        if x0.abs() >= x1.abs() {
            Matrix::from_rows(&[&[1.0, 0.0], &[sign(x1) * sign(x0), 0.0]])
        } else {
            Matrix::from_rows(&[&[0.0, sign(x0) * sign(x1)], &[0.0, 1.0]])
        }
    }
}

/// Samples a map over a box into a regression dataset; useful for turning
/// closed-form targets into training data.
pub fn sample_map(
    f: &dyn DifferentiableMap,
    domain_box: &[(f64, f64)],
    n: usize,
    seed: u64,
) -> Result<Dataset> {
    if domain_box.len() != f.input_dim() {
        return Err(Error::Dim(format!(
            "box has {} coordinates, map takes {}",
            domain_box.len(),
            f.input_dim()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = Matrix::from_fn(f.input_dim(), n, |i, _| {
        let (lo, hi) = domain_box[i];
        lo + (hi - lo) * rng.random::<f64>()
    });
    // from_fn fills row-major; evaluate per column instead.
    let mut y = Matrix::zeros(f.output_dim(), n);
    for j in 0..n {
        let out = f.eval(&x.column(j));
        for (i, &v) in out.iter().enumerate() {
            y.set(i, j, v);
        }
    }
    let meta = DatasetMeta {
        seed: Some(seed),
        domain_box: Some(domain_box.to_vec()),
        ..DatasetMeta::default()
    };
    Ok(Dataset { x, targets: Targets::Values(y), meta })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synth_lowrank_paper_scale_shapes() {
        let d = synth_lowrank(50, 50, 15, 5, 20, 30, 0).unwrap();
        assert_eq!(d.x.shape(), (50, 20));
        match &d.targets {
            Targets::Values(y) => assert_eq!(y.shape(), (50, 20)),
            _ => panic!("expected values"),
        }
        assert_eq!(d.meta.true_rank, Some(5));
        assert_eq!(d.meta.latent_dim, Some(15));
        assert_eq!(d.meta.domain_box.as_ref().unwrap().len(), 50);
    }

    #[test]
    fn synth_lowrank_full_latent_rank() {
        let d = synth_lowrank(8, 6, 4, 4, 12, 16, 3).unwrap();
        assert_eq!(d.meta.true_rank, Some(4));
    }

    #[test]
    fn synth_lowrank_is_deterministic() {
        let a = synth_lowrank(10, 4, 5, 2, 30, 20, 9).unwrap();
        let b = synth_lowrank(10, 4, 5, 2, 30, 20, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn synth_lowrank_rank_witness() {
        let (_, _, h) = synth_lowrank_with_generators(10, 6, 5, 2, 40, 24, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let normal = StandardNormal;
        let probes: Vec<Vec<f64>> = (0..1000)
            .map(|_| (0..2).map(|_| normal.sample(&mut rng)).collect())
            .collect();
        let (rank, _) = jacobian_rank(&h, &probes, 1e-6).unwrap();
        assert_eq!(rank, 2);
    }

    #[test]
    fn synth_lowrank_rejects_bad_dims() {
        assert!(matches!(synth_lowrank(4, 4, 5, 2, 10, 8, 0), Err(Error::Dim(_))));
        assert!(matches!(synth_lowrank(8, 1, 5, 2, 10, 8, 0), Err(Error::Dim(_))));
        assert!(matches!(synth_lowrank(8, 4, 5, 0, 10, 8, 0), Err(Error::Dim(_))));
    }

    #[test]
    fn s_shapes_means_increase_along_x() {
        let d = s_shape_classes(4, 200, S_SHAPE_DEFAULT_JITTER, 1).unwrap();
        let labels = match &d.targets {
            Targets::Labels { labels, .. } => labels.clone(),
            _ => panic!(),
        };
        let mut means = vec![0.0; 4];
        let mut counts = vec![0usize; 4];
        for (j, &label) in labels.iter().enumerate() {
            means[label - 1] += d.x.get(0, j);
            counts[label - 1] += 1;
        }
        for c in 0..4 {
            means[c] /= counts[c] as f64;
        }
        for w in means.windows(2) {
            assert!(w[1] > w[0], "class means must increase: {means:?}");
        }
    }

    #[test]
    fn s_shapes_zero_jitter_lies_on_curve() {
        let d = s_shape_classes(3, 50, 0.0, 2).unwrap();
        let labels = match &d.targets {
            Targets::Labels { labels, .. } => labels.clone(),
            _ => panic!(),
        };
        for (j, &label) in labels.iter().enumerate() {
            let c = (label - 1) as f64;
            let t = d.x.get(1, j);
            let expected = c * S_SHAPE_SPACING - S_SHAPE_AMPLITUDE * (core::f64::consts::PI * t).sin();
            assert!((d.x.get(0, j) - expected).abs() < 1e-12);
        }
    }

    // --- 2D linear-separability oracle: convex hulls of separable classes
    // cannot intersect. Andrew's monotone chain plus a separating-axis
    // check over both hulls' edges.

    fn convex_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
        let mut pts = points.to_vec();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
            (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
        };
        let mut hull: Vec<(f64, f64)> = Vec::new();
        for &p in pts.iter().chain(pts.iter().rev().skip(1)) {
            while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
        hull
    }

    fn hulls_separable(a: &[(f64, f64)], b: &[(f64, f64)]) -> bool {
        let axis_separates = |hull: &[(f64, f64)]| -> bool {
            let m = hull.len();
            for i in 0..m {
                let p = hull[i];
                let q = hull[(i + 1) % m];
                let normal = (q.1 - p.1, p.0 - q.0);
                let project = |pts: &[(f64, f64)]| {
                    pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |acc, &(x, y)| {
                        let v = normal.0 * x + normal.1 * y;
                        (acc.0.min(v), acc.1.max(v))
                    })
                };
                let (amin, amax) = project(a);
                let (bmin, bmax) = project(b);
                if amax < bmin || bmax < amin {
                    return true;
                }
            }
            false
        };
        axis_separates(&convex_hull(a)) || axis_separates(&convex_hull(b))
    }

    #[test]
    fn s_shapes_adjacent_classes_not_linearly_separable() {
        let d = s_shape_classes(4, 300, S_SHAPE_DEFAULT_JITTER, 7).unwrap();
        let labels = match &d.targets {
            Targets::Labels { labels, .. } => labels.clone(),
            _ => panic!(),
        };
        let class_points = |c: usize| -> Vec<(f64, f64)> {
            labels
                .iter()
                .enumerate()
                .filter(|(_, &l)| l == c)
                .map(|(j, _)| (d.x.get(0, j), d.x.get(1, j)))
                .collect()
        };
        for c in 1..4 {
            let (a, b) = (class_points(c), class_points(c + 1));
            assert!(!hulls_separable(&a, &b), "classes {c} and {} separable", c + 1);
            // Sanity for the oracle itself: distant classes are separable.
            if c + 2 <= 4 {
                let far = class_points(c + 2);
                assert!(hulls_separable(&a, &far));
            }
        }
    }

    #[test]
    fn curve1d_records_exact_latents() {
        let (d, curve) = curve1d_in_plane(40, 5).unwrap();
        assert_eq!(d.meta.true_rank, Some(1));
        for (j, &z) in curve.latents().iter().enumerate() {
            let p = curve.point_at(z);
            assert_eq!(p[0], d.x.get(0, j));
            assert_eq!(p[1], d.x.get(1, j));
        }
        match &d.targets {
            Targets::Values(y) => assert_eq!(*y, d.x),
            _ => panic!(),
        }
    }

    #[test]
    fn curve1d_dense_resampling_converges() {
        let (_, curve) = curve1d_in_plane(10, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(60);
        let fresh: Vec<Vec<f64>> = (0..50).map(|_| curve.sample(&mut rng)).collect();
        let worst = |count: usize| -> f64 {
            let dense = curve.dense_sample(count);
            fresh
                .iter()
                .map(|p| {
                    (0..dense.cols())
                        .map(|j| {
                            let dx = p[0] - dense.get(0, j);
                            let dy = p[1] - dense.get(1, j);
                            (dx * dx + dy * dy).sqrt()
                        })
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(0.0, f64::max)
        };
        let coarse = worst(100);
        let mid = worst(1000);
        let fine = worst(10000);
        assert!(mid <= coarse + 1e-15);
        assert!(fine <= mid + 1e-15);
        assert!(fine < 0.01 * curve.extent(), "fine = {fine}");
    }

    #[test]
    fn xcross_matches_closed_form() {
        let f = xcross_fixture();
        assert_eq!(f.eval(&[1.0, 0.5]), vec![1.0, 1.0]);
        assert_eq!(f.eval(&[1.0, -0.5]), vec![1.0, -1.0]);
        assert_eq!(f.eval(&[0.25, -2.0]), vec![2.0, -2.0]);
        assert_eq!(f.eval(&[-0.25, 2.0]), vec![-2.0, 2.0]);
        for &t in &[0.3, -0.7, 1.5] {
            assert_eq!(f.eval(&[t, t]), vec![t, t]);
            let m = f.eval(&[t, -t]);
            assert_eq!(m, vec![t, -t]);
        }
    }

    #[test]
    fn xcross_jacobian_rank_one_in_regions() {
        let f = xcross_fixture();
        let mut rng = ChaCha8Rng::seed_from_u64(70);
        for _ in 0..200 {
            let x = [rng.random::<f64>() * 4.0 - 2.0, rng.random::<f64>() * 4.0 - 2.0];
            if (x[0].abs() - x[1].abs()).abs() < 1e-3 || x[0].abs() < 1e-3 || x[1].abs() < 1e-3 {
                continue; // stay inside open regions
            }
            let jac = f.jacobian(&x);
            let s = crate::linalg::svd(&jac).unwrap().s;
            assert_eq!(s.numerical_rank(1e-6), 1);
            // And the Jacobian agrees with finite differences there.
            let fd = crate::testutil::central_difference(&f, &x, 1e-7);
            assert!(crate::linalg::frobenius_distance(&jac, &fd) < 1e-6);
        }
    }

    #[test]
    fn xcross_continuous_across_cross_rays() {
        // Straddle the |x0| = |x1| rays, where the two formula regions
        // meet; the values on both sides must agree to roundoff.
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let f = xcross_fixture();
        let eps = 1e-12;
        for _ in 0..200 {
            let t = rng.random::<f64>() * 4.0 - 2.0;
            if t.abs() < 1e-3 {
                continue;
            }
            for b in [[t, t], [t, -t]] {
                // Scaling one coordinate up and the other down lands the
                // two probes in different formula regions.
                let inside = f.eval(&[b[0] * (1.0 + eps), b[1] * (1.0 - eps)]);
                let outside = f.eval(&[b[0] * (1.0 - eps), b[1] * (1.0 + eps)]);
                for i in 0..2 {
                    assert!(
                        (inside[i] - outside[i]).abs() <= 1e-9,
                        "jump across the cross at {b:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn sample_map_covers_box() {
        let f = xcross_fixture();
        let d = sample_map(&f, &[(-2.0, 2.0), (-2.0, 2.0)], 100, 3).unwrap();
        assert_eq!(d.x.shape(), (2, 100));
        match &d.targets {
            Targets::Values(y) => {
                for j in 0..100 {
                    let expect = f.eval(&d.x.column(j));
                    assert_eq!(y.column(j), expect);
                }
            }
            _ => panic!(),
        }
    }
}
