//! Finite metric spaces sampled from Riemannian charts.
//!
//! Quasi-uniform samples (stratified in chart coordinates with density
//! proportional to the volume element) connected by a nearest-neighbor
//! graph with local Riemannian edge lengths; geodesic distances are
//! shortest paths on that graph. Deterministic for a fixed seed.

use crate::chart::MetricField;
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// A sampled point cloud with its pairwise distance matrix.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FiniteMetricSpace {
    pub labels: Vec<String>,
    pub d: DMatrix<f64>,
    pub provenance: String,
}

impl FiniteMetricSpace {
    pub fn len(&self) -> usize {
        self.d.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.d.nrows() == 0
    }

    pub fn diameter(&self) -> f64 {
        self.d.amax()
    }

    /// Symmetry, zero diagonal, nonnegativity and the triangle inequality
    /// (slack 1e-9 relative to the diameter).
    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        let slack = 1e-9 * self.diameter().max(1.0);
        for i in 0..n {
            if self.d[(i, i)].abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                if self.d[(i, j)] < 0.0 {
                    return Err(Error::InvalidParameter(format!("negative entry ({i},{j})")));
                }
                if (self.d[(i, j)] - self.d[(j, i)]).abs() > slack {
                    return Err(Error::InvalidParameter(format!("asymmetry at ({i},{j})")));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.d[(i, j)] > self.d[(i, k)] + self.d[(k, j)] + slack {
                        return Err(Error::InvalidParameter(format!(
                            "triangle violation at ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Sorted multiset of off-diagonal distances (each pair once).
    pub fn sorted_distances(&self) -> Vec<f64> {
        let n = self.len();
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                out.push(self.d[(i, j)]);
            }
        }
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out
    }

    /// Scale all distances by a factor.
    pub fn scaled(&self, factor: f64) -> Self {
        FiniteMetricSpace {
            labels: self.labels.clone(),
            d: &self.d * factor,
            provenance: format!("{}*{factor}", self.provenance),
        }
    }

    /// Two-point space with one gap.
    pub fn pair(gap: f64) -> Self {
        let mut d = DMatrix::zeros(2, 2);
        d[(0, 1)] = gap;
        d[(1, 0)] = gap;
        FiniteMetricSpace {
            labels: vec!["p0".into(), "p1".into()],
            d,
            provenance: format!("pair({gap})"),
        }
    }

    /// One-point space.
    pub fn point() -> Self {
        FiniteMetricSpace {
            labels: vec!["p0".into()],
            d: DMatrix::zeros(1, 1),
            provenance: "point".into(),
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SampleConfig {
    pub n: usize,
    pub graph_degree: usize,
    pub seed: u64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig { n: 300, graph_degree: 12, seed: 7 }
    }
}

/// Wrapped coordinate difference: periodic axes take the shortest
/// representative.
fn wrapped_delta(metric: &MetricField, a: &[f64], b: &[f64]) -> Vec<f64> {
    (0..metric.dim)
        .map(|i| {
            let mut d = b[i] - a[i];
            if let Some(p) = metric.periods[i] {
                if d > p / 2.0 {
                    d -= p;
                } else if d < -p / 2.0 {
                    d += p;
                }
            }
            d
        })
        .collect()
}

/// Riemannian length of the straight chart segment from a to b by
/// composite Simpson quadrature.
fn segment_length(metric: &MetricField, a: &[f64], b: &[f64], intervals: usize) -> f64 {
    let dim = metric.dim;
    let delta: Vec<f64> = wrapped_delta(metric, a, b);
    let speed = |t: f64| {
        let x: Vec<f64> = (0..dim).map(|i| a[i] + t * delta[i]).collect();
        let g = metric.at(&x);
        let mut q = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                q += delta[i] * g[(i, j)] * delta[j];
            }
        }
        q.max(0.0).sqrt()
    };
    let m = 2 * intervals;
    let h = 1.0 / m as f64;
    let mut acc = speed(0.0) + speed(1.0);
    for k in 1..m {
        acc += speed(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

#[derive(PartialEq)]
struct HeapNode {
    dist: f64,
    node: usize,
}

impl Eq for HeapNode {}
impl Ord for HeapNode {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .partial_cmp(&self.dist)
            .unwrap_or(Ordering::Equal)
            .then(other.node.cmp(&self.node))
    }
}
impl PartialOrd for HeapNode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sample a chart into a finite metric space.
pub fn sample_space(metric: &MetricField, cfg: &SampleConfig) -> Result<FiniteMetricSpace> {
    if cfg.n < 2 {
        return Err(Error::InvalidParameter("need at least 2 samples".into()));
    }
    let dim = metric.dim;
    // Stratify: weight grid cells by the volume element, then draw the
    // sample count of each cell from evenly spaced quantiles.
    let cells_per_axis = ((8.0 * cfg.n as f64).powf(1.0 / dim as f64).ceil() as usize).max(2);
    let mut cell_count = 1usize;
    for _ in 0..dim {
        cell_count = cell_count.saturating_mul(cells_per_axis);
    }
    let widths: Vec<f64> = metric.chart_box.iter().map(|&(lo, hi)| hi - lo).collect();
    let cell_center = |idx: usize| -> Vec<f64> {
        let mut rem = idx;
        (0..dim)
            .map(|ax| {
                let k = rem % cells_per_axis;
                rem /= cells_per_axis;
                metric.chart_box[ax].0 + widths[ax] * (k as f64 + 0.5) / cells_per_axis as f64
            })
            .collect()
    };
    let mut weights = Vec::with_capacity(cell_count);
    let mut total = 0.0;
    for idx in 0..cell_count {
        let c = cell_center(idx);
        let g = metric.at(&c);
        let w = g.determinant().max(0.0).sqrt();
        total += w;
        weights.push(total);
    }
    if total <= 0.0 {
        return Err(Error::NotPositiveDefinite { context: "sampling weights".into() });
    }
    // Inverse-CDF placement along the lexicographic cell order: the last
    // axis coordinate interpolates the quantile's position inside its
    // cell's weight mass, so the sampled cloud varies continuously with the
    // metric. The remaining axes take seeded jitter.
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut points = Vec::with_capacity(cfg.n);
    for k in 0..cfg.n {
        let jitter: f64 = rng.random_range(0.0..1.0);
        let u = total * (k as f64 + 0.983 * jitter.max(1e-3)) / cfg.n as f64;
        let idx = weights.partition_point(|&w| w < u).min(cell_count - 1);
        let cell_lo = if idx == 0 { 0.0 } else { weights[idx - 1] };
        let mass = (weights[idx] - cell_lo).max(1e-300);
        let frac = ((u - cell_lo) / mass).clamp(0.0, 1.0);
        let mut p = cell_center(idx);
        // Lexicographic order walks the first axis fastest; interpolate it.
        let cell_w0 = widths[0] / cells_per_axis as f64;
        p[0] += (frac - 0.5) * cell_w0;
        for ax in 1..dim {
            let half = 0.5 * widths[ax] / cells_per_axis as f64;
            p[ax] += rng.random_range(-half..half);
        }
        points.push(p);
    }

    // Nearest-neighbor graph with Riemannian edge lengths: candidates by the
    // cheap midpoint length, refined by Simpson quadrature.
    let n = cfg.n;
    let degree = cfg.graph_degree.clamp(1, n - 1);
    let mut approx = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let delta = wrapped_delta(metric, &points[i], &points[j]);
            let mid: Vec<f64> =
                (0..dim).map(|ax| points[i][ax] + 0.5 * delta[ax]).collect();
            let g = metric.at(&mid);
            let mut q = 0.0;
            for a in 0..dim {
                for b in 0..dim {
                    q += delta[a] * g[(a, b)] * delta[b];
                }
            }
            let l = q.max(0.0).sqrt();
            approx[i][j] = l;
            approx[j][i] = l;
        }
    }
    let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (i, row) in approx.iter().enumerate() {
        let mut order: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        order.sort_by(|&a, &b| row[a].partial_cmp(&row[b]).unwrap().then(a.cmp(&b)));
        for &j in order.iter().take(degree) {
            let len = segment_length(metric, &points[i], &points[j], 8);
            adjacency[i].push((j, len));
            adjacency[j].push((i, len));
        }
    }

    // All-pairs shortest paths.
    let mut d = DMatrix::zeros(n, n);
    for src in 0..n {
        let mut dist = vec![f64::INFINITY; n];
        dist[src] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(HeapNode { dist: 0.0, node: src });
        while let Some(HeapNode { dist: du, node: u }) = heap.pop() {
            if du > dist[u] {
                continue;
            }
            for &(v, w) in &adjacency[u] {
                let alt = du + w;
                if alt < dist[v] {
                    dist[v] = alt;
                    heap.push(HeapNode { dist: alt, node: v });
                }
            }
        }
        for (j, &val) in dist.iter().enumerate() {
            if !val.is_finite() {
                let comp = dist.iter().filter(|v| v.is_finite()).count();
                return Err(Error::DisconnectedGraph { component: comp, total: n });
            }
            d[(src, j)] = val;
        }
    }
    // Symmetrize the tiny asymmetries from heap tie-breaking.
    let dt = d.transpose();
    let d = (d + dt) * 0.5;

    Ok(FiniteMetricSpace {
        labels: (0..n).map(|k| format!("p{k:04}")).collect(),
        d,
        provenance: format!("{}:n={}:deg={}:seed={}", metric.label, n, degree, cfg.seed),
    })
}
