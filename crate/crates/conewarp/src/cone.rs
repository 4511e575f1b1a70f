//! Ricci curvature of warped cone metrics dr^2 + r^2 h(r)^2 g(f(r)) over a
//! one-parameter family of cross-section metrics.
//!
//! The assembly works with dimensionless radial combinations
//!
//!   P = r (rh)'/(rh),  Q = r^2 (rh)''/(rh),  S = r f'(r),  S2 = r^2 f''(r)
//!
//! so the same code serves both moderate radii (plain evaluation, checked
//! against the finite-difference oracle) and the triple-log regime where r
//! itself underflows and only log-radius data is available. Scaled outputs
//! are r^2 Ric(v, v) for unit directions v; signs and verdicts are unchanged.

use crate::chart::MetricField;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// A one-parameter family s -> g(s) of metrics on a fixed cross-section
/// chart, with derivative access.
pub trait CrossSectionFamily: Send + Sync {
    /// Cross-section dimension (n - 1 for an n-dimensional cone).
    fn dim(&self) -> usize;

    /// Admissible parameter interval (may be unbounded).
    fn param_range(&self) -> (f64, f64);

    /// True when the family keeps its volume form constant in s, so the
    /// trace identity g^{ab} d_s g_ab = 0 holds and the substituted Ricci
    /// equations apply.
    fn volume_normalized(&self) -> bool;

    fn metric(&self, s: f64, x: &[f64]) -> DMatrix<f64>;

    fn metric_ds(&self, s: f64, x: &[f64]) -> DMatrix<f64> {
        // One Richardson level keeps the truncation error at h^4, which the
        // volume-form trace check (1e-8) needs at late path times.
        let h = 1e-5 * s.abs().max(1.0);
        let cd = |h: f64| (self.metric(s + h, x) - self.metric(s - h, x)) / (2.0 * h);
        (cd(h / 2.0) * 4.0 - cd(h)) / 3.0
    }

    fn metric_ds2(&self, s: f64, x: &[f64]) -> DMatrix<f64> {
        let h = 2e-4 * s.abs().max(1.0);
        (self.metric(s + h, x) + self.metric(s - h, x) - self.metric(s, x) * 2.0) / (h * h)
    }

    fn metric_dx(&self, s: f64, x: &[f64]) -> Vec<DMatrix<f64>> {
        let mut out = Vec::with_capacity(x.len());
        for c in 0..x.len() {
            let h = 1e-6 * x[c].abs().max(1.0);
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[c] += h;
            xm[c] -= h;
            out.push((self.metric(s, &xp) - self.metric(s, &xm)) / (2.0 * h));
        }
        out
    }

    fn metric_ds_dx(&self, s: f64, x: &[f64]) -> Vec<DMatrix<f64>> {
        let mut out = Vec::with_capacity(x.len());
        for c in 0..x.len() {
            let h = 1e-5 * x[c].abs().max(1.0);
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[c] += h;
            xm[c] -= h;
            out.push((self.metric_ds(s, &xp) - self.metric_ds(s, &xm)) / (2.0 * h));
        }
        out
    }

    /// Intrinsic Ricci tensor of g(s) at x, in chart coordinates.
    fn intrinsic_ricci(&self, s: f64, x: &[f64]) -> DMatrix<f64>;

    /// Chart box safe for sampling and differentiation.
    fn chart_box(&self) -> Vec<(f64, f64)>;
}

/// Dimensionless radial data of the cone metric at one radius.
#[derive(Clone, Copy, Debug)]
pub struct RadialProfile {
    pub n: usize,
    pub h: f64,
    /// P = r (rh)'/(rh)
    pub p: f64,
    /// Q = r^2 (rh)''/(rh)
    pub q: f64,
    /// f(r), the family parameter at this radius
    pub f_val: f64,
    /// S = r f'(r)
    pub s: f64,
    /// S2 = r^2 f''(r)
    pub s2: f64,
}

impl RadialProfile {
    /// Profile from plain h, f values and derivatives at a moderate radius.
    pub fn from_plain(n: usize, r: f64, h: (f64, f64, f64), f: (f64, f64, f64)) -> Self {
        let (hv, h1, h2) = h;
        let (fv, f1, f2) = f;
        RadialProfile {
            n,
            h: hv,
            p: 1.0 + r * h1 / hv,
            q: r * (2.0 * h1 + r * h2) / hv,
            f_val: fv,
            s: r * f1,
            s2: r * r * f2,
        }
    }

    /// Flat cone: h = 1, stationary family.
    pub fn flat(n: usize, f_val: f64) -> Self {
        RadialProfile { n, h: 1.0, p: 1.0, q: 0.0, f_val, s: 0.0, s2: 0.0 }
    }
}

/// Scaled curvature data of the cone metric at one radius and cross-section
/// point. All entries carry the r-power scalings noted on the fields.
#[derive(Clone, Debug)]
pub struct ConeCurvature {
    pub profile: RadialProfile,
    pub g: DMatrix<f64>,
    /// r^2 Ric(d_r, d_r)
    pub rr_scaled: f64,
    /// r Ric(d_r, d_a), coordinate components
    pub mixed_scaled: DVector<f64>,
    /// Intrinsic Ricci of the cross-section at (f(r), x)
    pub ric_int: DMatrix<f64>,
    /// C with Ric_ab = ric_int_ab + h^2 C_ab (coordinate components; this
    /// combination is r-free)
    pub c_hat: DMatrix<f64>,
}

impl ConeCurvature {
    /// Tangential coordinate components Ric_ab of the cone metric.
    pub fn tangential(&self) -> DMatrix<f64> {
        &self.ric_int + &self.c_hat * (self.profile.h * self.profile.h)
    }

    /// r^2 Ric(v, v) for the unit direction
    /// v = delta d_r + (sqrt(1-delta^2)/(rh)) i with i the g-unit coordinate
    /// direction `u` (u^T g u = 1).
    pub fn direction_value(&self, delta: f64, u: &DVector<f64>) -> f64 {
        let w = (1.0 - delta * delta).max(0.0).sqrt();
        let h = self.profile.h;
        let mixed = self.mixed_scaled.dot(u);
        let tang_int = (u.transpose() * &self.ric_int * u)[(0, 0)];
        let tang_hat = (u.transpose() * &self.c_hat * u)[(0, 0)];
        delta * delta * self.rr_scaled
            + 2.0 * delta * w * mixed / h
            + w * w * (tang_int / (h * h) + tang_hat)
    }

    /// Full coordinate Ricci matrix at a moderate radius r (unscaling the
    /// stored combinations).
    pub fn to_matrix(&self, r: f64) -> DMatrix<f64> {
        let m = self.g.nrows();
        let mut out = DMatrix::zeros(m + 1, m + 1);
        out[(0, 0)] = self.rr_scaled / (r * r);
        let tang = self.tangential();
        for i in 0..m {
            out[(0, i + 1)] = self.mixed_scaled[i] / r;
            out[(i + 1, 0)] = out[(0, i + 1)];
            for j in 0..m {
                out[(i + 1, j + 1)] = tang[(i, j)];
            }
        }
        out
    }
}

/// Assemble the scaled Ricci data of dr^2 + r^2 h^2 g(f(r)) at one radius
/// (through its dimensionless profile) and one cross-section point.
pub fn cone_curvature(
    family: &dyn CrossSectionFamily,
    profile: RadialProfile,
    x: &[f64],
) -> Result<ConeCurvature> {
    let m = family.dim();
    if profile.n != m + 1 {
        return Err(Error::InvalidParameter(format!(
            "cone dimension {} inconsistent with cross-section dimension {m}",
            profile.n
        )));
    }
    let (plo, phi) = family.param_range();
    if profile.f_val < plo || profile.f_val > phi {
        return Err(Error::OutOfDomain {
            what: "family parameter f(r)".into(),
            point: profile.f_val,
            lo: plo,
            hi: phi,
        });
    }
    let s_par = profile.f_val;
    let g = family.metric(s_par, x);
    let ginv = g.clone().try_inverse().ok_or_else(|| Error::NotPositiveDefinite {
        context: format!("cross-section metric at s={s_par}, x={x:?}"),
    })?;
    if g.clone().cholesky().is_none() {
        return Err(Error::NotPositiveDefinite {
            context: format!("cross-section metric at s={s_par}, x={x:?}"),
        });
    }
    let n = profile.n as f64;
    let (p, q, s, s2) = (profile.p, profile.q, profile.s, profile.s2);

    let dg = family.metric_ds(s_par, x);
    let m1 = &ginv * &dg;
    let tr1 = m1.trace();
    let tr2 = (&m1 * &m1).trace();

    // r^2 Ric_rr; with a constant volume form the trace identity removes the
    // second s-derivative of g.
    let rr_scaled = if family.volume_normalized() {
        -(n - 1.0) * q - 0.25 * tr2 * s * s
    } else {
        let ddg = family.metric_ds2(s_par, x);
        let tr_dd = (&ginv * &ddg).trace();
        -(n - 1.0) * q + 0.25 * tr2 * s * s
            - p * tr1 * s
            - 0.5 * (tr_dd * s * s + tr1 * s2)
    };

    // Mixed term: r Ric_ra = S/2 [ div_a (g^{-1} dg) - d_a tr(g^{-1} dg) ].
    let dxg = family.metric_dx(s_par, x);
    let dxdg = family.metric_ds_dx(s_par, x);
    let mut christoffel = vec![DMatrix::zeros(m, m); m];
    for c in 0..m {
        for a in 0..m {
            for i in 0..m {
                let mut v = 0.0;
                for d in 0..m {
                    v += ginv[(c, d)] * (dxg[a][(d, i)] + dxg[i][(a, d)] - dxg[d][(a, i)]);
                }
                christoffel[c][(a, i)] = 0.5 * v;
            }
        }
    }
    let mut mixed = DVector::zeros(m);
    for i in 0..m {
        let mut div = 0.0;
        for a in 0..m {
            // d_a M^a_i with M = g^{-1} dg
            let dm = &ginv * (&dxdg[a] - &dxg[a] * (&ginv * &dg));
            div += dm[(a, i)];
        }
        // Gamma^a_{a c} = (1/2) tr(g^{-1} d_c g); contract against M^c_i.
        for c in 0..m {
            let gamma_trace = 0.5 * (&ginv * &dxg[c]).trace();
            div += gamma_trace * m1[(c, i)];
        }
        // - Gamma^c_{a i} M^a_c
        for a in 0..m {
            for c in 0..m {
                div -= christoffel[c][(a, i)] * m1[(a, c)];
            }
        }
        let dtr = (&ginv * (&dxdg[i] - &dxg[i] * (&ginv * &dg))).trace();
        mixed[i] = 0.5 * s * (div - dtr);
    }

    let ric_int = family.intrinsic_ricci(s_par, x);

    // Tangential correction: Ric_ab = ric_int + h^2 C with
    // C = (-(n-2)P^2 - Q - (P/2) tr1 S) g
    //   + (-((n-1)/2) P - tr1 S / 4) S dg - (S^2 ddg + S2 dg)/2
    //   + (S^2/2) dg g^{-1} dg.
    let tr1s = tr1 * s;
    let mut c_hat = &g * (-(n - 2.0) * p * p - q - 0.5 * p * tr1s);
    c_hat += &dg * ((-(n - 1.0) / 2.0 * p - 0.25 * tr1s) * s);
    let ddg = family.metric_ds2(s_par, x);
    c_hat -= (&ddg * (s * s) + &dg * s2) * 0.5;
    c_hat += (&dg * (&ginv * &dg)) * (0.5 * s * s);

    Ok(ConeCurvature { profile, g, rr_scaled, mixed_scaled: mixed, ric_int, c_hat })
}

/// Plain-radius entry point: Ricci of dr^2 + r^2 h^2 g(f(r)) in the
/// coordinate frame (r, chart of the cross-section).
///
/// `h` and `f` are (value, first, second derivative) at r.
pub fn ricci_cone_analytic(
    n: usize,
    r: f64,
    h: (f64, f64, f64),
    f: (f64, f64, f64),
    family: &dyn CrossSectionFamily,
    x: &[f64],
) -> Result<DMatrix<f64>> {
    if r <= 0.0 {
        return Err(Error::InadmissibleRadius(format!("r = {r}")));
    }
    let profile = RadialProfile::from_plain(n, r, h, f);
    let data = cone_curvature(family, profile, x)?;
    Ok(data.to_matrix(r))
}

/// Chart of the cone metric over a family, for oracle cross-checks at
/// moderate radii. `h_of_r` and `f_of_r` map r to the plain values.
pub fn cone_chart<H, F>(
    family: std::sync::Arc<dyn CrossSectionFamily>,
    r_range: (f64, f64),
    h_of_r: H,
    f_of_r: F,
) -> MetricField
where
    H: Fn(f64) -> f64 + Send + Sync + 'static,
    F: Fn(f64) -> f64 + Send + Sync + 'static,
{
    let mut chart_box = vec![r_range];
    chart_box.extend(family.chart_box());
    let m = family.dim();
    MetricField::new(
        m + 1,
        chart_box,
        move |x| {
            let r = x[0];
            let h = h_of_r(r);
            let s = f_of_r(r);
            let g = family.metric(s, &x[1..]);
            let mut out = DMatrix::zeros(m + 1, m + 1);
            out[(0, 0)] = 1.0;
            let scale = r * r * h * h;
            for i in 0..m {
                for j in 0..m {
                    out[(i + 1, j + 1)] = scale * g[(i, j)];
                }
            }
            out
        },
        "cone",
    )
}

type RicciEval = std::sync::Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

/// Stationary family: a fixed metric on a chart, with its Ricci tensor.
pub struct StationaryFamily {
    pub field: MetricField,
    ric: RicciEval,
}

impl StationaryFamily {
    pub fn new<R>(field: MetricField, ric: R) -> Self
    where
        R: Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    {
        StationaryFamily { field, ric: std::sync::Arc::new(ric) }
    }
}

impl CrossSectionFamily for StationaryFamily {
    fn dim(&self) -> usize {
        self.field.dim
    }
    fn param_range(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }
    fn volume_normalized(&self) -> bool {
        true
    }
    fn metric(&self, _s: f64, x: &[f64]) -> DMatrix<f64> {
        self.field.at(x)
    }
    fn metric_ds(&self, _s: f64, _x: &[f64]) -> DMatrix<f64> {
        DMatrix::zeros(self.field.dim, self.field.dim)
    }
    fn metric_ds2(&self, _s: f64, _x: &[f64]) -> DMatrix<f64> {
        DMatrix::zeros(self.field.dim, self.field.dim)
    }
    fn metric_ds_dx(&self, _s: f64, x: &[f64]) -> Vec<DMatrix<f64>> {
        vec![DMatrix::zeros(self.field.dim, self.field.dim); x.len()]
    }
    fn intrinsic_ricci(&self, _s: f64, x: &[f64]) -> DMatrix<f64> {
        (self.ric)(x)
    }
    fn chart_box(&self) -> Vec<(f64, f64)> {
        self.field.chart_box.clone()
    }
}

/// Stationary round sphere S^m of radius `a` in polar coordinates.
pub fn round_family(m: usize, a: f64) -> StationaryFamily {
    let field = crate::chart::round_sphere_chart(m, a);
    let field2 = field.clone();
    let k = (m as f64 - 1.0) / (a * a);
    StationaryFamily::new(field, move |x| field2.at(x) * k)
}

/// Measured maxima of the family hypotheses over sampled (parameter, point)
/// pairs: the derivative bounds, the volume-form trace, and the margin of
/// the lower Ricci bound Ric >= (n-2) g.
#[derive(Clone, Copy, Debug)]
pub struct FamilyConditions {
    pub max_dg: f64,
    pub max_ddg: f64,
    pub max_grad_dg: f64,
    pub max_trace: f64,
    /// Minimum over samples of the smallest eigenvalue of Ric - (n-2) g.
    pub ricci_margin: f64,
}

/// Evaluate the family conditions at the given parameter values and
/// deterministic chart samples.
pub fn family_conditions(
    family: &dyn CrossSectionFamily,
    s_values: &[f64],
    n_points: usize,
    seed: u64,
) -> Result<FamilyConditions> {
    use rand::{Rng, SeedableRng};
    let m = family.dim();
    let n = m + 1;
    let chart_box = family.chart_box();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec<f64>> = (0..n_points)
        .map(|_| chart_box.iter().map(|&(lo, hi)| rng.random_range(lo..hi)).collect())
        .collect();
    let mut out = FamilyConditions {
        max_dg: 0.0,
        max_ddg: 0.0,
        max_grad_dg: 0.0,
        max_trace: 0.0,
        ricci_margin: f64::INFINITY,
    };
    for &s in s_values {
        for x in &points {
            let g = family.metric(s, x);
            let ginv = g.clone().try_inverse().ok_or_else(|| Error::NotPositiveDefinite {
                context: format!("family at s={s}"),
            })?;
            let dg = family.metric_ds(s, x);
            let ddg = family.metric_ds2(s, x);
            // |T|_g^2 = g^{ac} g^{bd} T_ab T_cd for (0,2)-tensors.
            let norm2 = |t: &DMatrix<f64>| ((&ginv * t) * (&ginv * t)).trace();
            out.max_dg = out.max_dg.max(norm2(&dg).max(0.0).sqrt());
            out.max_ddg = out.max_ddg.max(norm2(&ddg).max(0.0).sqrt());
            out.max_trace = out.max_trace.max((&ginv * &dg).trace().abs());
            // Covariant derivative of dg: nabla_c dg_ab =
            // d_c dg_ab - Gamma^d_ca dg_db - Gamma^d_cb dg_ad.
            let dxg = family.metric_dx(s, x);
            let dxdg = family.metric_ds_dx(s, x);
            let mut gamma = vec![DMatrix::zeros(m, m); m];
            for c in 0..m {
                for a in 0..m {
                    for i in 0..m {
                        let mut v = 0.0;
                        for d in 0..m {
                            v += ginv[(c, d)]
                                * (dxg[a][(d, i)] + dxg[i][(a, d)] - dxg[d][(a, i)]);
                        }
                        gamma[c][(a, i)] = 0.5 * v;
                    }
                }
            }
            let mut grad2 = 0.0;
            for c in 0..m {
                let mut nab = dxdg[c].clone();
                for a in 0..m {
                    for b in 0..m {
                        for d in 0..m {
                            nab[(a, b)] -=
                                gamma[d][(c, a)] * dg[(d, b)] + gamma[d][(c, b)] * dg[(a, d)];
                        }
                    }
                }
                // Contract the c-index with g^{ce} against the mirror term;
                // diagonal contraction suffices for a norm since we sum
                // g^{ce} <nab_c, nab_e>.
                for e in 0..m {
                    let mut nab_e = dxdg[e].clone();
                    for a in 0..m {
                        for b in 0..m {
                            for d in 0..m {
                                nab_e[(a, b)] -= gamma[d][(e, a)] * dg[(d, b)]
                                    + gamma[d][(e, b)] * dg[(a, d)];
                            }
                        }
                    }
                    grad2 += ginv[(c, e)] * ((&ginv * &nab) * (&ginv * &nab_e)).trace();
                }
            }
            out.max_grad_dg = out.max_grad_dg.max(grad2.max(0.0).sqrt());
            // Ricci margin: smallest eigenvalue of g^-1 (Ric - (n-2) g).
            let ric = family.intrinsic_ricci(s, x);
            let shifted = &ric - &g * (n as f64 - 2.0);
            let endo = &ginv * &shifted;
            let margin = endo
                .complex_eigenvalues()
                .iter()
                .map(|z| z.re)
                .fold(f64::INFINITY, f64::min);
            out.ricci_margin = out.ricci_margin.min(margin);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{ricci_close, ricci_fd, OracleConfig};
    use std::sync::Arc;

    #[test]
    fn flat_cone_over_unit_round_sphere_is_euclidean() {
        for m in [2usize, 3] {
            let fam = round_family(m, 1.0);
            let x: Vec<f64> = fam.chart_box().iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect();
            let ric =
                ricci_cone_analytic(m + 1, 0.8, (1.0, 0.0, 0.0), (0.0, 0.0, 0.0), &fam, &x)
                    .unwrap();
            assert!(ric.amax() < 1e-9, "flat cone Ricci {:.2e}", ric.amax());
        }
    }

    #[test]
    fn cone_over_small_sphere_tangential_eigenvalues() {
        // h = 1, fixed round S^3(a), n = 4: per unit vector the tangential
        // directions carry 2 (1/a^2 - 1)/r^2 and the radial direction 0.
        let a = 0.7;
        let r = 1.3;
        let fam = round_family(3, a);
        let x = vec![1.2, 1.4, 2.0];
        let ric =
            ricci_cone_analytic(4, r, (1.0, 0.0, 0.0), (0.0, 0.0, 0.0), &fam, &x).unwrap();
        assert!(ric[(0, 0)].abs() < 1e-12);
        // Per-unit values: divide by the cone metric coefficient r^2 g_ii.
        let g = fam.metric(0.0, &x);
        let want = 2.0 * (1.0 / (a * a) - 1.0) / (r * r);
        for i in 0..3 {
            let per_unit = ric[(i + 1, i + 1)] / (r * r * g[(i, i)]);
            assert!((per_unit - want).abs() < 1e-9, "i={i}: {per_unit} vs {want}");
        }
    }

    #[test]
    fn stationary_generic_h_radial_value() {
        // Stationary family, generic h: Ric_rr = -(n-1)(rh)''/(rh), mixed 0.
        let fam = round_family(2, 0.9);
        let x = vec![1.1, 2.3];
        let r = 0.6;
        // h(r) = 1 - 0.2 r^2: h' = -0.4 r, h'' = -0.4.
        let h = (1.0 - 0.2 * r * r, -0.4 * r, -0.4);
        let ric = ricci_cone_analytic(3, r, h, (0.0, 0.0, 0.0), &fam, &x).unwrap();
        let rh = r * h.0;
        let rh2 = 2.0 * h.1 + r * h.2;
        let want = -2.0 * rh2 / rh;
        assert!((ric[(0, 0)] - want).abs() < 1e-12 * want.abs().max(1.0));
        assert!(ric[(0, 1)].abs() < 1e-14 && ric[(0, 2)].abs() < 1e-14);
    }

    #[test]
    fn oracle_agrees_on_static_cone_chart() {
        let a = 0.8;
        let fam = Arc::new(round_family(2, a));
        let chart = cone_chart(fam.clone(), (0.5, 1.5), |_r| 0.95, |_r| 0.0);
        let x = vec![1.0, 1.3, 2.2];
        let analytic =
            ricci_cone_analytic(3, x[0], (0.95, 0.0, 0.0), (0.0, 0.0, 0.0), fam.as_ref(), &x[1..])
                .unwrap();
        let fd = ricci_fd(&chart, &x, OracleConfig::default()).unwrap();
        assert!(ricci_close(&analytic, &fd, 1e-6, 1e-8), "\n{analytic}\nvs\n{fd}");
    }
}
