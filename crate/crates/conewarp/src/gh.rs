//! Two-sided Gromov-Hausdorff distance bounds and the tangent-cone
//! nonuniqueness experiment.
//!
//! Exact distances are intractable, so the artifact ships certified lower
//! bounds (diameter gap and distance-distribution mismatch) and heuristic
//! upper bounds from a correspondence search, exact by exhaustive
//! branch-and-bound when both spaces have at most six points.

use crate::error::{Error, Result};
use crate::lemma::LogRadius;
use crate::path::ComposedFamily;
use crate::sample::{sample_space, FiniteMetricSpace, SampleConfig};
use crate::chart::MetricField;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Two-sided bound with the witness correspondence for the upper side.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GHBoundPair {
    pub lower: f64,
    pub upper: f64,
    /// Pairs (i, j) of the correspondence witnessing the upper bound.
    pub witness: Vec<(usize, usize)>,
    pub method: String,
}

impl GHBoundPair {
    /// Reported suboptimality margin of the search.
    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }
}

fn distortion(x: &DMatrix<f64>, y: &DMatrix<f64>, pairs: &[(usize, usize)]) -> f64 {
    let mut worst = 0.0f64;
    for (a, &(i1, j1)) in pairs.iter().enumerate() {
        for &(i2, j2) in &pairs[a..] {
            let d = (x[(i1, i2)] - y[(j1, j2)]).abs();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

/// Correspondence in (f, g)-form: every x paired with f(x), every y not in
/// the image paired with g(y). Minimal correspondences have this shape, and
/// distortion is monotone under inclusion, so the exact optimum is attained
/// here.
fn assemble(f: &[usize], g_extra: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut pairs: Vec<(usize, usize)> = f.iter().enumerate().map(|(i, &j)| (i, j)).collect();
    pairs.extend_from_slice(g_extra);
    pairs
}

/// Exhaustive branch-and-bound over minimal correspondences.
fn exact_small(x: &DMatrix<f64>, y: &DMatrix<f64>, incumbent: f64) -> (f64, Vec<(usize, usize)>) {
    let nx = x.nrows();
    let mut best = incumbent;
    let mut best_pairs = Vec::new();

    fn partial_distortion(
        x: &DMatrix<f64>,
        y: &DMatrix<f64>,
        pairs: &[(usize, usize)],
        new: (usize, usize),
    ) -> f64 {
        let mut worst = 0.0f64;
        for &(i, j) in pairs {
            let d = (x[(i, new.0)] - y[(j, new.1)]).abs();
            if d > worst {
                worst = d;
            }
        }
        worst
    }

    fn recurse_g(
        x: &DMatrix<f64>,
        y: &DMatrix<f64>,
        pairs: &mut Vec<(usize, usize)>,
        uncovered: &[usize],
        current: f64,
        best: &mut f64,
        best_pairs: &mut Vec<(usize, usize)>,
    ) {
        if current >= *best {
            return;
        }
        match uncovered.split_first() {
            None => {
                *best = current;
                *best_pairs = pairs.clone();
            }
            Some((&j, rest)) => {
                for i in 0..x.nrows() {
                    let d = partial_distortion(x, y, pairs, (i, j)).max(current);
                    if d < *best {
                        pairs.push((i, j));
                        recurse_g(x, y, pairs, rest, d, best, best_pairs);
                        pairs.pop();
                    }
                }
            }
        }
    }

    fn recurse_f(
        x: &DMatrix<f64>,
        y: &DMatrix<f64>,
        f: &mut Vec<usize>,
        current: f64,
        best: &mut f64,
        best_pairs: &mut Vec<(usize, usize)>,
    ) {
        if current >= *best {
            return;
        }
        let nx = x.nrows();
        let ny = y.nrows();
        if f.len() == nx {
            let covered: std::collections::BTreeSet<usize> = f.iter().cloned().collect();
            let uncovered: Vec<usize> = (0..ny).filter(|j| !covered.contains(j)).collect();
            let mut pairs: Vec<(usize, usize)> =
                f.iter().enumerate().map(|(i, &j)| (i, j)).collect();
            recurse_g(x, y, &mut pairs, &uncovered, current, best, best_pairs);
            return;
        }
        let i = f.len();
        for j in 0..ny {
            let mut d = current;
            for (i2, &j2) in f.iter().enumerate() {
                d = d.max((x[(i, i2)] - y[(j, j2)]).abs());
            }
            if d < *best {
                f.push(j);
                recurse_f(x, y, f, d, best, best_pairs);
                f.pop();
            }
        }
    }

    let mut f = Vec::with_capacity(nx);
    recurse_f(x, y, &mut f, 0.0, &mut best, &mut best_pairs);
    (best, best_pairs)
}

/// Eccentricity-profile greedy: order points of both spaces by their sorted
/// distance profile and match by rank.
fn profile_maps(x: &DMatrix<f64>, y: &DMatrix<f64>) -> (Vec<usize>, Vec<usize>) {
    let rank = |d: &DMatrix<f64>| -> Vec<usize> {
        let n = d.nrows();
        let key: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let row: Vec<f64> = (0..n).map(|j| d[(i, j)]).collect();
                let max = row.iter().cloned().fold(0.0f64, f64::max);
                let sum: f64 = row.iter().sum();
                (max, sum)
            })
            .collect();
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| {
            key[a]
                .partial_cmp(&key[b])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        idx
    };
    let rx = rank(x);
    let ry = rank(y);
    let nx = x.nrows();
    let ny = y.nrows();
    let mut f = vec![0usize; nx];
    for (pos, &i) in rx.iter().enumerate() {
        let j = ry[(pos * ny) / nx.max(1)];
        f[i] = j;
    }
    let mut g = vec![0usize; ny];
    for (pos, &j) in ry.iter().enumerate() {
        let i = rx[(pos * nx) / ny.max(1)];
        g[j] = i;
    }
    (f, g)
}

fn g_extra_pairs(f: &[usize], g: &[usize]) -> Vec<(usize, usize)> {
    let covered: std::collections::BTreeSet<usize> = f.iter().cloned().collect();
    g.iter()
        .enumerate()
        .filter(|(j, _)| !covered.contains(j))
        .map(|(j, &i)| (i, j))
        .collect()
}

/// Distortion contribution of one f-pair (i, f_i) against all pairs.
fn pair_cost(
    x: &DMatrix<f64>,
    y: &DMatrix<f64>,
    f: &[usize],
    extra: &[(usize, usize)],
    i: usize,
    j: usize,
) -> f64 {
    let mut worst = 0.0f64;
    for (i2, &j2) in f.iter().enumerate() {
        if i2 == i {
            continue;
        }
        let d = (x[(i, i2)] - y[(j, j2)]).abs();
        if d > worst {
            worst = d;
        }
    }
    for &(i2, j2) in extra {
        let d = (x[(i, i2)] - y[(j, j2)]).abs();
        if d > worst {
            worst = d;
        }
    }
    worst
}

/// Local refinement over both sides of the correspondence: full sweeps that
/// reassign every x (and every uncovered y) to its locally best partner,
/// then worst-offender polishing. Monotone in the iteration count.
fn refine(
    x: &DMatrix<f64>,
    y: &DMatrix<f64>,
    mut f: Vec<usize>,
    g_init: &[usize],
    iterations: usize,
) -> (f64, Vec<usize>, Vec<usize>) {
    let nx = x.nrows();
    let ny = y.nrows();
    let mut g = g_init.to_vec();
    let sweeps = (iterations / nx.max(1)).clamp(1, 4);
    for _ in 0..sweeps {
        // Reassign each x against the current counterpart pairs.
        let extra = g_extra_pairs(&f, &g);
        for i in 0..nx {
            let mut best_j = f[i];
            let mut best = pair_cost(x, y, &f, &extra, i, f[i]);
            for j in 0..ny {
                if j == f[i] {
                    continue;
                }
                let c = pair_cost(x, y, &f, &extra, i, j);
                if c < best {
                    best = c;
                    best_j = j;
                }
            }
            f[i] = best_j;
        }
        // Reassign the g-partner of every uncovered y: transpose roles.
        let covered: std::collections::BTreeSet<usize> = f.iter().cloned().collect();
        let fixed_pairs = assemble(&f, &[]);
        for j in 0..ny {
            if covered.contains(&j) {
                continue;
            }
            let others: Vec<(usize, usize)> = g
                .iter()
                .enumerate()
                .filter(|(j2, _)| *j2 != j && !covered.contains(j2))
                .map(|(j2, &i2)| (i2, j2))
                .collect();
            let cost_of = |i: usize| -> f64 {
                let mut worst = 0.0f64;
                for &(i2, j2) in fixed_pairs.iter().chain(&others) {
                    let d = (x[(i, i2)] - y[(j, j2)]).abs();
                    if d > worst {
                        worst = d;
                    }
                }
                worst
            };
            let mut best_i = g[j];
            let mut best = cost_of(g[j]);
            for i in 0..nx {
                if i == g[j] {
                    continue;
                }
                let c = cost_of(i);
                if c < best {
                    best = c;
                    best_i = i;
                }
            }
            g[j] = best_i;
        }
    }
    let mut current = distortion(x, y, &assemble(&f, &g_extra_pairs(&f, &g)));
    for _ in 0..iterations {
        // Find the x-index participating in the worst pair.
        let pairs = assemble(&f, &g_extra_pairs(&f, &g));
        let mut worst = (0.0f64, usize::MAX);
        for (a, &(i1, j1)) in pairs.iter().enumerate() {
            for &(i2, j2) in &pairs[a..] {
                let d = (x[(i1, i2)] - y[(j1, j2)]).abs();
                if d > worst.0 {
                    let candidate = if i1 < nx { i1 } else { i2 };
                    worst = (d, candidate);
                }
            }
        }
        let i = worst.1;
        if i >= nx {
            break;
        }
        let mut improved = false;
        let mut best_j = f[i];
        let mut best_val = current;
        for j in 0..ny {
            if j == f[i] {
                continue;
            }
            let old = f[i];
            f[i] = j;
            let val = distortion(x, y, &assemble(&f, &g_extra_pairs(&f, &g)));
            if val < best_val {
                best_val = val;
                best_j = j;
                improved = true;
            }
            f[i] = old;
        }
        if improved {
            f[i] = best_j;
            current = best_val;
        } else {
            break;
        }
    }
    (current, f, g)
}

/// Upper bound: half the distortion of the best correspondence found, exact
/// for spaces with at most six points each. Symmetric in its arguments: the
/// pair is canonically ordered before the search and the witness mapped
/// back.
pub fn gh_upper_bound(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    iterations: usize,
) -> Result<GHBoundPair> {
    let key = |s: &FiniteMetricSpace| (s.len(), s.diameter());
    if key(y) < key(x) {
        let mut swapped = gh_upper_bound(y, x, iterations)?;
        for pair in &mut swapped.witness {
            *pair = (pair.1, pair.0);
        }
        return Ok(swapped);
    }
    if x.is_empty() || y.is_empty() {
        return Err(Error::InvalidParameter("empty space".into()));
    }
    let lower = gh_lower_bound(x, y)?.lower;
    // Single-point side: the only correspondence pairs the point with all.
    if x.len() == 1 || y.len() == 1 {
        let pairs: Vec<(usize, usize)> = if x.len() == 1 {
            (0..y.len()).map(|j| (0, j)).collect()
        } else {
            (0..x.len()).map(|i| (i, 0)).collect()
        };
        let upper = 0.5 * distortion(&x.d, &y.d, &pairs);
        return Ok(GHBoundPair { lower, upper, witness: pairs, method: "point".into() });
    }
    if x.len() <= 6 && y.len() <= 6 {
        let (dist, pairs) = exact_small(&x.d, &y.d, f64::INFINITY);
        return Ok(GHBoundPair {
            lower,
            upper: 0.5 * dist,
            witness: pairs,
            method: "exact".into(),
        });
    }

    let mut best = f64::INFINITY;
    let mut best_pairs = Vec::new();
    let mut consider = |dist: f64, pairs: Vec<(usize, usize)>| {
        if dist < best {
            best = dist;
            best_pairs = pairs;
        }
    };

    // Aligned candidate (natural for equally sampled spaces).
    if x.len() == y.len() {
        let f: Vec<usize> = (0..x.len()).collect();
        let g: Vec<usize> = (0..y.len()).collect();
        let (d, f, g) = refine(&x.d, &y.d, f, &g, iterations);
        let pairs = assemble(&f, &g_extra_pairs(&f, &g));
        consider(d, pairs);
    }
    // Distance-profile candidate.
    {
        let (f, g) = profile_maps(&x.d, &y.d);
        let (d, f, g) = refine(&x.d, &y.d, f, &g, iterations);
        let pairs = assemble(&f, &g_extra_pairs(&f, &g));
        consider(d, pairs);
    }
    // Seeded random restarts.
    let mut rng = ChaCha8Rng::seed_from_u64(929);
    for _ in 0..3 {
        let f: Vec<usize> = (0..x.len()).map(|_| rng.random_range(0..y.len())).collect();
        let g: Vec<usize> = (0..y.len()).map(|_| rng.random_range(0..x.len())).collect();
        let (d, f, g) = refine(&x.d, &y.d, f, &g, iterations / 2);
        let pairs = assemble(&f, &g_extra_pairs(&f, &g));
        consider(d, pairs);
    }

    Ok(GHBoundPair {
        lower,
        upper: 0.5 * best,
        witness: best_pairs,
        method: "greedy+refine".into(),
    })
}

/// Lower bound: maximum of the diameter gap and the distance-distribution
/// bound (half the largest mismatch of aligned distance quantiles, with the
/// top quantile pinned to the maximum).
pub fn gh_lower_bound(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<GHBoundPair> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::InvalidParameter("empty space".into()));
    }
    let diam_gap = 0.5 * (x.diameter() - y.diameter()).abs();
    let dx = x.sorted_distances();
    let dy = y.sorted_distances();
    let k = 512usize;
    let quantile = |v: &[f64], q: f64| -> f64 {
        if v.is_empty() {
            0.0
        } else {
            let pos = (q * (v.len() - 1) as f64).round() as usize;
            v[pos.min(v.len() - 1)]
        }
    };
    let mut dist_gap = 0.0f64;
    for i in 0..=k {
        let q = i as f64 / k as f64;
        dist_gap = dist_gap.max((quantile(&dx, q) - quantile(&dy, q)).abs());
    }
    let lower = diam_gap.max(0.5 * dist_gap);
    Ok(GHBoundPair { lower, upper: f64::INFINITY, witness: Vec::new(), method: "diam+dist".into() })
}

/// Configuration of the sampling/bounding stage of the experiment.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GhConfig {
    pub sample: SampleConfig,
    pub gh_iterations: usize,
}

impl Default for GhConfig {
    fn default() -> Self {
        GhConfig { sample: SampleConfig::default(), gh_iterations: 400 }
    }
}

/// One scale of the experiment: bounds from the snapshot to every target.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub target: String,
    pub l3: f64,
    pub snapshot_param: f64,
    pub h_scale: f64,
    /// Upper bound to the scale's own target.
    pub own_upper: f64,
    /// Lower bounds to every target, in target order.
    pub lowers: Vec<f64>,
    pub uppers: Vec<f64>,
}

/// Sample the snapshot cross-section (h^2-scaled family metric at the
/// snapshot parameter) over an explicit box.
pub fn snapshot_space(
    family: &ComposedFamily,
    s_param: f64,
    h_scale: f64,
    sample_box: &[(f64, f64)],
    periods: &[Option<f64>],
    cfg: &SampleConfig,
) -> Result<FiniteMetricSpace> {
    let omega = family.omega.clone();
    let u = family.curve_value(s_param);
    let scale = h_scale * h_scale * family.metric_scale;
    let m = omega.dim();
    let field = MetricField::new(
        m,
        sample_box.to_vec(),
        move |x| omega.metric_at(u, x) * scale,
        "snapshot",
    )
    .with_periods(periods.to_vec());
    sample_space(&field, cfg)
}

/// Sample a target cross-section at a fixed parameter value.
pub fn target_space(
    family: &ComposedFamily,
    u_value: f64,
    sample_box: &[(f64, f64)],
    periods: &[Option<f64>],
    cfg: &SampleConfig,
) -> Result<FiniteMetricSpace> {
    let omega = family.omega.clone();
    let m = omega.dim();
    let field = MetricField::new(
        m,
        sample_box.to_vec(),
        move |x| omega.metric_at(u_value, x),
        "target",
    )
    .with_periods(periods.to_vec());
    sample_space(&field, cfg)
}

/// Run the experiment: for each (target index, scale), sample the rescaled
/// cross-section and bound its distance to every target sample.
#[allow(clippy::too_many_arguments)]
pub fn tangent_cone_experiment(
    family: &Arc<ComposedFamily>,
    cone: &crate::lemma::ConeMetric,
    targets: &[(String, f64)],
    scales: &[(usize, LogRadius)],
    sample_box: &[(f64, f64)],
    periods: &[Option<f64>],
    cfg: &GhConfig,
) -> Result<Vec<ExperimentRow>> {
    let target_spaces: Vec<FiniteMetricSpace> = targets
        .iter()
        .map(|(_, u)| target_space(family, *u, sample_box, periods, &cfg.sample))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(scales.len());
    for &(k, lr) in scales {
        if k >= targets.len() {
            return Err(Error::InvalidParameter(format!("target index {k} out of range")));
        }
        let snap = crate::path::tangent_cone_at_scale(cone, lr);
        let space =
            snapshot_space(family, snap.s_param, snap.h_scale, sample_box, periods, &cfg.sample)?;
        let mut lowers = Vec::with_capacity(targets.len());
        let mut uppers = Vec::with_capacity(targets.len());
        for t in &target_spaces {
            lowers.push(gh_lower_bound(&space, t)?.lower);
            uppers.push(gh_upper_bound(&space, t, cfg.gh_iterations)?.upper);
        }
        rows.push(ExperimentRow {
            target: targets[k].0.clone(),
            l3: lr.l3(),
            snapshot_param: snap.s_param,
            h_scale: snap.h_scale,
            own_upper: uppers[k],
            lowers,
            uppers,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::round_sphere_chart;
    use std::f64::consts::PI;

    fn sphere_space(a: f64, n: usize, seed: u64) -> FiniteMetricSpace {
        let chart = round_sphere_chart(2, a).with_box(vec![(0.06, PI - 0.06), (0.02, 2.0 * PI - 0.02)]);
        sample_space(&chart, &SampleConfig { n, graph_degree: 10, seed }).unwrap()
    }

    #[test]
    fn identical_spaces_have_zero_bounds() {
        let s = sphere_space(0.5, 40, 3);
        let up = gh_upper_bound(&s, &s, 50).unwrap();
        assert_eq!(up.upper, 0.0);
        let lo = gh_lower_bound(&s, &s).unwrap();
        assert_eq!(lo.lower, 0.0);
    }

    #[test]
    fn point_against_space_gives_half_diameter_exactly() {
        let s = sphere_space(0.5, 30, 4);
        let p = FiniteMetricSpace::point();
        let up = gh_upper_bound(&p, &s, 10).unwrap();
        assert_eq!(up.upper, 0.5 * s.diameter());
        let lo = gh_lower_bound(&p, &s).unwrap();
        assert_eq!(lo.lower, up.upper);
    }

    #[test]
    fn two_point_spaces_exact_half_gap() {
        let x = FiniteMetricSpace::pair(1.0);
        let y = FiniteMetricSpace::pair(3.5);
        let up = gh_upper_bound(&x, &y, 10).unwrap();
        assert!((up.upper - 1.25).abs() < 1e-12);
        assert_eq!(up.method, "exact");
    }

    #[test]
    fn exact_matches_naive_enumeration_on_small_spaces() {
        // Independent oracle: full enumeration over (f, g) pairs.
        let naive = |x: &DMatrix<f64>, y: &DMatrix<f64>| -> f64 {
            let nx = x.nrows();
            let ny = y.nrows();
            let mut best = f64::INFINITY;
            let total_f = ny.pow(nx as u32);
            let total_g = nx.pow(ny as u32);
            for code_f in 0..total_f {
                let mut f = Vec::with_capacity(nx);
                let mut c = code_f;
                for _ in 0..nx {
                    f.push(c % ny);
                    c /= ny;
                }
                for code_g in 0..total_g {
                    let mut g = Vec::with_capacity(ny);
                    let mut c = code_g;
                    for _ in 0..ny {
                        g.push(c % nx);
                        c /= nx;
                    }
                    let mut pairs: Vec<(usize, usize)> =
                        f.iter().enumerate().map(|(i, &j)| (i, j)).collect();
                    pairs.extend(g.iter().enumerate().map(|(j, &i)| (i, j)));
                    best = best.min(distortion(x, y, &pairs));
                }
            }
            best
        };
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for trial in 0..6 {
            let nx = 2 + trial % 3;
            let ny = 2 + (trial + 1) % 3;
            let mk = |n: usize, rng: &mut ChaCha8Rng| -> DMatrix<f64> {
                // Distances from random points on a line: metric for free.
                let pts: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..4.0)).collect();
                DMatrix::from_fn(n, n, |i, j| (pts[i] - pts[j]).abs())
            };
            let x = FiniteMetricSpace {
                labels: (0..nx).map(|i| format!("x{i}")).collect(),
                d: mk(nx, &mut rng),
                provenance: "rand".into(),
            };
            let y = FiniteMetricSpace {
                labels: (0..ny).map(|i| format!("y{i}")).collect(),
                d: mk(ny, &mut rng),
                provenance: "rand".into(),
            };
            let up = gh_upper_bound(&x, &y, 10).unwrap();
            let want = 0.5 * naive(&x.d, &y.d);
            assert!(
                (up.upper - want).abs() < 1e-12,
                "trial {trial}: exact {} vs naive {want}",
                up.upper
            );
        }
    }

    #[test]
    fn lower_bound_separates_spheres_of_different_radius() {
        let x = sphere_space(0.5, 120, 3);
        let y = sphere_space(1.0, 120, 4);
        let lo = gh_lower_bound(&x, &y).unwrap();
        // Diameter gap alone gives about pi/4 / ... : (pi - pi/2)/2 = 0.785;
        // the distribution bound is at least as large.
        assert!(lo.lower >= 0.7, "lower bound {}", lo.lower);
        let lo_rev = gh_lower_bound(&y, &x).unwrap();
        assert!((lo.lower - lo_rev.lower).abs() < 1e-12);
    }

    #[test]
    fn upper_bound_is_monotone_in_iterations_and_bounds_lower() {
        let x = sphere_space(0.5, 40, 3);
        let y = sphere_space(0.55, 40, 6);
        let u1 = gh_upper_bound(&x, &y, 5).unwrap();
        let u2 = gh_upper_bound(&x, &y, 200).unwrap();
        assert!(u2.upper <= u1.upper + 1e-12);
        let lo = gh_lower_bound(&x, &y).unwrap();
        assert!(lo.lower <= u2.upper + 1e-12);
        // Witness distortion / 2 equals the reported upper bound.
        let wd = distortion(&x.d, &y.d, &u2.witness);
        assert!((0.5 * wd - u2.upper).abs() < 1e-12);
    }

    #[test]
    fn bounds_are_symmetric_in_their_arguments() {
        let x = sphere_space(0.5, 35, 3);
        let y = sphere_space(0.8, 42, 5);
        let ab = gh_upper_bound(&x, &y, 80).unwrap();
        let ba = gh_upper_bound(&y, &x, 80).unwrap();
        assert_eq!(ab.upper, ba.upper);
        assert_eq!(gh_lower_bound(&x, &y).unwrap().lower, gh_lower_bound(&y, &x).unwrap().lower);
        // The transposed witness certifies the same distortion.
        let wd = distortion(&y.d, &x.d, &ba.witness);
        assert!((0.5 * wd - ba.upper).abs() < 1e-12);
    }

    #[test]
    fn rescaling_covariance() {
        let x = sphere_space(0.5, 30, 3);
        let y = sphere_space(0.6, 30, 5);
        let lam = 2.5;
        let lo = gh_lower_bound(&x, &y).unwrap().lower;
        let lo_scaled = gh_lower_bound(&x.scaled(lam), &y.scaled(lam)).unwrap().lower;
        assert!((lo_scaled - lam * lo).abs() < 1e-9 * lo.max(1.0));
        let up = gh_upper_bound(&x, &y, 60).unwrap().upper;
        let up_scaled = gh_upper_bound(&x.scaled(lam), &y.scaled(lam), 60).unwrap().upper;
        assert!((up_scaled - lam * up).abs() < 1e-9 * up.max(1.0));
    }

    #[test]
    fn triangle_consistency_with_margin() {
        // L(X,Z) <= U(X,Y) + U(Y,Z): rigorous, no slack needed beyond eps.
        let x = sphere_space(0.5, 30, 3);
        let y = sphere_space(0.7, 30, 4);
        let z = sphere_space(0.9, 30, 5);
        let lxz = gh_lower_bound(&x, &z).unwrap().lower;
        let uxy = gh_upper_bound(&x, &y, 100).unwrap().upper;
        let uyz = gh_upper_bound(&y, &z, 100).unwrap().upper;
        assert!(lxz <= uxy + uyz + 1e-12, "{} vs {} + {}", lxz, uxy, uyz);
    }
}
