//! Finite-difference Ricci oracle.
//!
//! Independent verification path for every analytic curvature formula in the
//! crate: Christoffel symbols from central differences of the metric
//! coefficients, contracted to the Ricci tensor, with one optional level of
//! Richardson extrapolation.

use crate::chart::MetricField;
use crate::error::{Error, Result};
use nalgebra::DMatrix;

#[derive(Clone, Copy, Debug)]
pub struct OracleConfig {
    /// Step relative to the local coordinate scale.
    pub rel_step: f64,
    /// One level of Richardson extrapolation over steps h and h/2.
    pub richardson: bool,
}

impl Default for OracleConfig {
    /// Nested central differences lose ~eps/h^2 to roundoff; with one
    /// Richardson level the truncation is O(h^4), so the error floor sits
    /// near h = eps^(1/6) ~ 2e-3. A smaller default step drowns near-zero
    /// components in rounding noise.
    fn default() -> Self {
        OracleConfig { rel_step: 1.5e-3, richardson: true }
    }
}

fn metric_inverse(metric: &MetricField, x: &[f64]) -> Result<DMatrix<f64>> {
    metric.at(x).try_inverse().ok_or_else(|| Error::NotPositiveDefinite {
        context: format!("{} inverse at {:?}", metric.label, x),
    })
}

/// Christoffel symbols Gamma^k_{ij} at `x`; returned as one matrix per upper
/// index k. Steps are per axis so that narrow chart directions do not
/// degrade the differencing of the wide ones.
pub fn christoffel(metric: &MetricField, x: &[f64], h: &[f64]) -> Result<Vec<DMatrix<f64>>> {
    let d = metric.dim;
    let ginv = metric_inverse(metric, x)?;
    // dg[c] = partial_c g
    let mut dg = Vec::with_capacity(d);
    for c in 0..d {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[c] += h[c];
        xm[c] -= h[c];
        let gp = metric.at(&xp);
        let gm = metric.at(&xm);
        dg.push((gp - gm) / (2.0 * h[c]));
    }
    let mut gamma = vec![DMatrix::zeros(d, d); d];
    for k in 0..d {
        for i in 0..d {
            for j in 0..=i {
                let mut sum = 0.0;
                for l in 0..d {
                    sum += ginv[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                }
                gamma[k][(i, j)] = 0.5 * sum;
                gamma[k][(j, i)] = 0.5 * sum;
            }
        }
    }
    Ok(gamma)
}

fn ricci_single_step(metric: &MetricField, x: &[f64], h: &[f64]) -> Result<DMatrix<f64>> {
    let d = metric.dim;
    let gamma0 = christoffel(metric, x, h)?;
    // dgamma[c][k] = partial_c Gamma^k
    let mut dgamma = Vec::with_capacity(d);
    for c in 0..d {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[c] += h[c];
        xm[c] -= h[c];
        let gp = christoffel(metric, &xp, h)?;
        let gm = christoffel(metric, &xm, h)?;
        let diff: Vec<DMatrix<f64>> =
            gp.into_iter().zip(gm).map(|(p, m)| (p - m) / (2.0 * h[c])).collect();
        dgamma.push(diff);
    }
    // Ric_ij = d_k Gamma^k_ij - d_j Gamma^k_ik + Gamma^k_kl Gamma^l_ij
    //          - Gamma^k_jl Gamma^l_ik
    let mut ric = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let mut v = 0.0;
            for k in 0..d {
                v += dgamma[k][k][(i, j)] - dgamma[j][k][(i, k)];
                for l in 0..d {
                    v += gamma0[k][(k, l)] * gamma0[l][(i, j)]
                        - gamma0[k][(j, l)] * gamma0[l][(i, k)];
                }
            }
            ric[(i, j)] = v;
        }
    }
    // Ricci is symmetric; average out finite-difference noise.
    let ric_t = ric.transpose();
    Ok((ric + ric_t) * 0.5)
}

/// Ricci tensor of `metric` at `x` by nested central differences.
pub fn ricci_fd(metric: &MetricField, x: &[f64], cfg: OracleConfig) -> Result<DMatrix<f64>> {
    // Per-axis steps: proportional to the chart width of the axis, shrunk
    // near the box ends where warped charts typically degenerate and the
    // local variation scale is the distance to the end.
    let h: Vec<f64> = metric
        .chart_box
        .iter()
        .zip(x)
        .map(|(&(lo, hi), &xi)| {
            let width = (hi - lo).min(1.0);
            let edge = (xi - lo).min(hi - xi).max(1e-12);
            cfg.rel_step * width.min(4.0 * edge)
        })
        .collect();
    for (axis, (&xi, (&(lo, hi), &hc))) in
        x.iter().zip(metric.chart_box.iter().zip(&h)).enumerate()
    {
        if xi < lo + 2.5 * hc || xi > hi - 2.5 * hc {
            return Err(Error::StencilExitsChart { axis });
        }
    }
    let r_h = ricci_single_step(metric, x, &h)?;
    if !cfg.richardson {
        return Ok(r_h);
    }
    let h2: Vec<f64> = h.iter().map(|v| v / 2.0).collect();
    let r_h2 = ricci_single_step(metric, x, &h2)?;
    Ok((r_h2 * 4.0 - r_h) / 3.0)
}

/// Componentwise comparison of two Ricci tensors with relative tolerance and
/// an absolute floor for entries near zero.
pub fn ricci_close(a: &DMatrix<f64>, b: &DMatrix<f64>, rel: f64, abs_floor: f64) -> bool {
    let scale = a.amax().max(b.amax()).max(1.0);
    a.iter()
        .zip(b.iter())
        .all(|(&x, &y)| (x - y).abs() <= rel * x.abs().max(y.abs()) + abs_floor * scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{euclidean_chart, round_sphere_chart};

    #[test]
    fn flat_chart_has_zero_ricci() {
        let g = euclidean_chart(3);
        let ric = ricci_fd(&g, &[0.3, -1.2, 4.0], OracleConfig::default()).unwrap();
        assert!(ric.amax() < 1e-9, "flat Ricci {:.2e}", ric.amax());
    }

    #[test]
    fn unit_round_s3_has_ricci_twice_metric() {
        let g = round_sphere_chart(3, 1.0);
        let x = vec![1.1, 1.4, 2.5];
        let ric = ricci_fd(&g, &x, OracleConfig::default()).unwrap();
        let expect = g.at(&x) * 2.0;
        assert!(
            ricci_close(&ric, &expect, 1e-6, 1e-8),
            "S^3 oracle mismatch: {:?} vs {:?}",
            ric,
            expect
        );
    }

    #[test]
    fn sphere_of_radius_half_matches_constant_curvature() {
        // Ric = (m-1)/a^2 per unit vector, i.e. Ric = ((m-1)/a^2) g.
        let a = 0.5;
        let g = round_sphere_chart(2, a);
        let x = vec![1.3, 2.0];
        let ric = ricci_fd(&g, &x, OracleConfig::default()).unwrap();
        let expect = g.at(&x) * (1.0 / (a * a));
        assert!(ricci_close(&ric, &expect, 1e-6, 1e-8));
    }

    #[test]
    fn stencil_guard_rejects_boundary_points() {
        let g = round_sphere_chart(2, 1.0);
        let err = ricci_fd(&g, &[0.35, 1.0], OracleConfig::default());
        assert!(err.is_err());
    }
}
