//! Coordinate realizations of the metric ansätze.
//!
//! The curvature formulas work frame-only; the finite-difference oracle needs
//! genuine coordinates. The S^3 factor is realized in Euler angles with the
//! left-invariant coframe dual to the frame X, Y, Z, [X, Y] = 2Z:
//!
//!   sigma_X = (d psi + cos theta d phi) / 2
//!   sigma_Y = (cos psi d theta + sin psi sin theta d phi) / 2
//!   sigma_Z = (-sin psi d theta + cos psi sin theta d phi) / 2
//!
//! so the unit round sphere is sigma_X^2 + sigma_Y^2 + sigma_Z^2.

use crate::berger::{BergerAnsatz, DoubleAnsatz5D};
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use std::sync::Arc;

type MetricEval = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

/// A metric in coordinates: a chart box and a map point -> SPD matrix.
#[derive(Clone)]
pub struct MetricField {
    pub dim: usize,
    /// Box on which the evaluator is safe to call (already shrunk away from
    /// coordinate degeneracies).
    pub chart_box: Vec<(f64, f64)>,
    /// Period of each axis, when the coordinate is an angle; samplers use
    /// the wrapped difference for segment lengths.
    pub periods: Vec<Option<f64>>,
    eval: MetricEval,
    pub label: String,
}

impl MetricField {
    pub fn new<F>(dim: usize, chart_box: Vec<(f64, f64)>, eval: F, label: &str) -> Self
    where
        F: Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    {
        MetricField {
            dim,
            chart_box,
            periods: vec![None; dim],
            eval: Arc::new(eval),
            label: label.to_string(),
        }
    }

    pub fn with_periods(mut self, periods: Vec<Option<f64>>) -> Self {
        assert_eq!(periods.len(), self.dim);
        self.periods = periods;
        self
    }

    pub fn with_box(mut self, chart_box: Vec<(f64, f64)>) -> Self {
        assert_eq!(chart_box.len(), self.dim);
        self.chart_box = chart_box;
        self
    }

    pub fn at(&self, x: &[f64]) -> DMatrix<f64> {
        (self.eval)(x)
    }

    pub fn contains(&self, x: &[f64], margin: f64) -> bool {
        x.len() == self.dim
            && x.iter()
                .zip(&self.chart_box)
                .all(|(&xi, &(lo, hi))| xi >= lo + margin && xi <= hi - margin)
    }

    /// Symmetry and positive-definiteness spot check.
    pub fn validate_spd(&self, points: &[Vec<f64>]) -> Result<()> {
        for p in points {
            let g = self.at(p);
            for i in 0..self.dim {
                for j in 0..i {
                    if (g[(i, j)] - g[(j, i)]).abs() > 1e-12 * g[(i, i)].abs().max(1.0) {
                        return Err(Error::NotPositiveDefinite {
                            context: format!("{} asymmetric at {:?}", self.label, p),
                        });
                    }
                }
            }
            if g.clone().cholesky().is_none() {
                return Err(Error::NotPositiveDefinite {
                    context: format!("{} at {:?}", self.label, p),
                });
            }
        }
        Ok(())
    }
}

/// Flat Euclidean chart.
pub fn euclidean_chart(dim: usize) -> MetricField {
    MetricField::new(
        dim,
        vec![(-10.0, 10.0); dim],
        move |_x| DMatrix::identity(dim, dim),
        "euclidean",
    )
}

/// Round sphere S^m of radius `a` in iterated polar coordinates:
/// g = a^2 [d t1^2 + sin^2 t1 (d t2^2 + sin^2 t2 (...))].
pub fn round_sphere_chart(m: usize, a: f64) -> MetricField {
    assert!(m >= 1);
    let mut chart_box = vec![(0.35, std::f64::consts::PI - 0.35); m];
    chart_box[m - 1] = (0.1, 2.0 * std::f64::consts::PI - 0.1);
    let mut periods = vec![None; m];
    periods[m - 1] = Some(2.0 * std::f64::consts::PI);
    MetricField::new(
        m,
        chart_box,
        move |x| {
            let mut g = DMatrix::zeros(m, m);
            let mut factor = a * a;
            for i in 0..m {
                g[(i, i)] = factor;
                if i + 1 < m {
                    let s = x[i].sin();
                    factor *= s * s;
                }
            }
            g
        },
        "round-sphere",
    )
    .with_periods(periods)
}

/// The S^3 block in Euler angles for coefficients (a2, b2) = (A^2, B^2):
/// rows/cols ordered (psi, theta, phi).
pub fn berger_s3_block(a2: f64, b2: f64, theta: f64) -> [[f64; 3]; 3] {
    let ct = theta.cos();
    let st = theta.sin();
    let g_pp = a2 / 4.0;
    let g_pf = a2 * ct / 4.0;
    let g_tt = b2 / 4.0;
    let g_ff = (a2 * ct * ct + b2 * st * st) / 4.0;
    [[g_pp, 0.0, g_pf], [0.0, g_tt, 0.0], [g_pf, 0.0, g_ff]]
}

/// Chart for a Berger ansatz dr^2 + A^2 sigma_X^2 + B^2 (sigma_Y^2 + sigma_Z^2)
/// in coordinates (r, psi, theta, phi).
pub fn berger_chart(ansatz: &BergerAnsatz) -> MetricField {
    let wa = ansatz.warp_a.clone();
    let wb = ansatz.warp_b.clone();
    let (lo, hi) = ansatz.interval;
    let guard = 0.05 * (hi - lo);
    let chart_box = vec![
        (lo + guard, hi - guard),
        (0.1, 2.0),
        (0.4, std::f64::consts::PI - 0.4),
        (0.1, 2.0),
    ];
    MetricField::new(
        4,
        chart_box,
        move |x| {
            let a = wa.value(x[0]);
            let b = wb.value(x[0]);
            let blk = berger_s3_block(a * a, b * b, x[2]);
            let mut g = DMatrix::zeros(4, 4);
            g[(0, 0)] = 1.0;
            for i in 0..3 {
                for j in 0..3 {
                    g[(i + 1, j + 1)] = blk[i][j];
                }
            }
            g
        },
        "berger",
    )
}

/// Chart for the 5-d double ansatz
/// ds^2 + C^2 dr^2 + D^2 A^2 sigma_X^2 + E^2 B^2 (sigma_Y^2 + sigma_Z^2)
/// in coordinates (s, r, psi, theta, phi).
pub fn double5d_chart(ansatz: &DoubleAnsatz5D) -> MetricField {
    let (wc, wd, we) = (ansatz.warp_c.clone(), ansatz.warp_d.clone(), ansatz.warp_e.clone());
    let (wa, wb) = (ansatz.warp_a.clone(), ansatz.warp_b.clone());
    let (slo, shi) = ansatz.s_interval;
    let (rlo, rhi) = ansatz.r_interval;
    let sg = 0.05 * (shi - slo);
    let rg = 0.05 * (rhi - rlo);
    let chart_box = vec![
        (slo + sg, shi - sg),
        (rlo + rg, rhi - rg),
        (0.1, 2.0),
        (0.4, std::f64::consts::PI - 0.4),
        (0.1, 2.0),
    ];
    MetricField::new(
        5,
        chart_box,
        move |x| {
            let (s, r) = (x[0], x[1]);
            let c = wc.value(s);
            let d = wd.value(s);
            let e = we.value(s);
            let a = wa.value(r);
            let b = wb.value(r);
            let blk = berger_s3_block(d * d * a * a, e * e * b * b, x[3]);
            let mut g = DMatrix::zeros(5, 5);
            g[(0, 0)] = 1.0;
            g[(1, 1)] = c * c;
            for i in 0..3 {
                for j in 0..3 {
                    g[(i + 2, j + 2)] = blk[i][j];
                }
            }
            g
        },
        "double5d",
    )
}
