//! The triple-log cone construction and its positivity certificates.
//!
//! The profile functions are
//!
//!   h(r) = 1 - E / log(-log(r0 r)),   f(r) = -F log(log(-log(r0 r)))
//!
//! for r0 r < e^-e. Radii of interest go as deep as r0 r = e^(-e^(e^4)),
//! far below the smallest positive double, so radii are carried as the
//! log chain L1 = -log(r0 r), L2 = log L1, L3 = log L2 and every curvature
//! quantity is evaluated in r-scaled form (r^2 Ric for unit directions),
//! which is sign-equivalent to the unscaled value.

use crate::cone::{cone_curvature, CrossSectionFamily, RadialProfile};
use crate::error::{Error, Result};
use nalgebra::DVector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Parameters of the cone construction.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LemmaParams {
    /// Cone dimension n (cross-section dimension n - 1).
    pub n: usize,
    /// Amplitude E of the h-profile, in (0, 1].
    pub amp_e: f64,
    /// Amplitude F of the f-profile, in (0, 1].
    pub amp_f: f64,
    /// Scale anchor r0 in (0, 1).
    pub r0: f64,
    /// Prescribed limit of h at infinity, in (0, 1).
    pub h_inf: f64,
    /// Dimensional constant D bounding the mixed Ricci term.
    pub d_const: f64,
}

impl LemmaParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.amp_e > 0.0 && self.amp_e <= 1.0) {
            return Err(Error::InvalidParameter(format!("E = {} not in (0,1]", self.amp_e)));
        }
        if !(self.amp_f > 0.0 && self.amp_f <= 1.0) {
            return Err(Error::InvalidParameter(format!("F = {} not in (0,1]", self.amp_f)));
        }
        if self.amp_e + 1e-12 < self.d_const * self.amp_f {
            return Err(Error::InvalidParameter(format!(
                "E = {} < D F = {}",
                self.amp_e,
                self.d_const * self.amp_f
            )));
        }
        if !(self.r0 > 0.0 && self.r0 < 1.0) {
            return Err(Error::InvalidParameter(format!("r0 = {} not in (0,1)", self.r0)));
        }
        if !(self.h_inf > 0.0 && self.h_inf < 1.0) {
            return Err(Error::InvalidParameter(format!("h_inf = {} not in (0,1)", self.h_inf)));
        }
        Ok(())
    }
}

/// A small radius represented by its log chain. The outermost log
/// l3 = log log(-log(r0 r)) is the stored coordinate: radii like
/// r0 r = e^(-e^(e^40)) are perfectly representable even though l1 (and r
/// itself) overflow or underflow the double range. Derived quantities
/// degrade gracefully: 1/l1 and 1/(l1 l2) evaluate to zero at depths where
/// l1 is infinite, which is their exact limit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogRadius {
    l3: f64,
}

impl LogRadius {
    /// From a plain radius. Requires r0 r < e^-e so that all three logs are
    /// defined with L2 > 1.
    pub fn from_r(r: f64, r0: f64) -> Result<Self> {
        if r <= 0.0 {
            return Err(Error::InadmissibleRadius(format!("r = {r}")));
        }
        let l1 = -(r0 * r).ln();
        if l1 <= std::f64::consts::E {
            return Err(Error::InadmissibleRadius(format!(
                "r0 r = {} not below e^-e",
                r0 * r
            )));
        }
        Ok(LogRadius { l3: l1.ln().ln() })
    }

    /// From the outermost log, any l3 > 0.
    pub fn from_l3(l3: f64) -> Self {
        LogRadius { l3 }
    }

    /// May be infinite for l3 > ~6.5.
    pub fn l1(&self) -> f64 {
        self.l3.exp().exp()
    }

    pub fn l2(&self) -> f64 {
        self.l3.exp()
    }

    pub fn l3(&self) -> f64 {
        self.l3
    }

    /// ln r; negative infinity at depths beyond the double range.
    pub fn ln_r(&self, r0: f64) -> f64 {
        -self.l1() - r0.ln()
    }

    /// Plain radius; underflows to 0 for deep radii.
    pub fn r(&self, r0: f64) -> f64 {
        self.ln_r(r0).exp()
    }

    /// The radius scaled by a moderate factor: log chain of factor * r.
    /// At depths where l1 saturates the scaling is below representable
    /// resolution and the radius is returned unchanged.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let l1 = self.l1();
        if !l1.is_finite() {
            return Ok(*self);
        }
        let shifted = l1 - factor.ln();
        if shifted <= std::f64::consts::E {
            return Err(Error::InadmissibleRadius(format!(
                "scaled radius leaves range: l1 = {shifted}"
            )));
        }
        Ok(LogRadius { l3: shifted.ln().ln() })
    }
}

/// eps(r) = E / L2 and its first two derivatives in scaled form:
/// returns (eps, r eps', r^2 eps'').
pub fn eval_eps_scaled(lr: LogRadius, params: &LemmaParams) -> (f64, f64, f64) {
    let e = params.amp_e;
    let (l1, l2) = (lr.l1(), lr.l2());
    let eps = e / l2;
    let re1 = e / (l2 * l2 * l1);
    let re2 = e * (-1.0 + 1.0 / l1 + 2.0 / (l2 * l1)) / (l2 * l2 * l1);
    (eps, re1, re2)
}

/// eps and plain derivatives (eps, eps', eps'') at a moderate radius.
pub fn eval_eps(r: f64, params: &LemmaParams) -> Result<(f64, f64, f64)> {
    let lr = LogRadius::from_r(r, params.r0)?;
    let (eps, re1, re2) = eval_eps_scaled(lr, params);
    Ok((eps, re1 / r, re2 / (r * r)))
}

/// h = 1 - eps and plain derivatives (h, h', h'') at a moderate radius.
pub fn eval_h(r: f64, params: &LemmaParams) -> Result<(f64, f64, f64)> {
    let (eps, e1, e2) = eval_eps(r, params)?;
    Ok((1.0 - eps, -e1, -e2))
}

/// f = -F log L2 and its derivative (f, f') at a moderate radius.
/// f' = F / (L1 L2 r) > 0.
pub fn eval_f(r: f64, params: &LemmaParams) -> Result<(f64, f64)> {
    let lr = LogRadius::from_r(r, params.r0)?;
    let (l1, l2, l3) = (lr.l1(), lr.l2(), lr.l3());
    Ok((-params.amp_f * l3, params.amp_f / (l1 * l2 * r)))
}

/// f, S = r f' and S2 = r^2 f'' in scaled form.
pub fn eval_f_scaled(lr: LogRadius, params: &LemmaParams) -> (f64, f64, f64) {
    let (l1, l2, l3) = (lr.l1(), lr.l2(), lr.l3());
    let s = params.amp_f / (l1 * l2);
    let s2 = s * (-1.0 + 1.0 / l1 + 1.0 / (l1 * l2));
    (-params.amp_f * l3, s, s2)
}

/// h-profile variants of the cone metric.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub enum HProfile {
    /// h = 1 - E/L2 on the whole small-radius range.
    Standard,
    /// h identically 1 for l3 >= blend_hi (deepest radii), the standard
    /// profile for l3 <= blend_lo, and a monitored concave blend between.
    /// Used when the family is eventually constant near the tip.
    StabilizedTail { blend_lo: f64, blend_hi: f64 },
}

/// Scaled radial data (h, P, Q, f, S, S2) of the chosen profile at lr.
pub fn radial_profile(
    lr: LogRadius,
    params: &LemmaParams,
    profile: HProfile,
) -> RadialProfile {
    let (f_val, s, s2) = eval_f_scaled(lr, params);
    let (eps, re1, re2) = eval_eps_scaled(lr, params);
    let (h, rh1, r2h2) = match profile {
        HProfile::Standard => (1.0 - eps, -re1, -re2),
        HProfile::StabilizedTail { blend_lo, blend_hi } => {
            let l3 = lr.l3();
            if l3 >= blend_hi {
                (1.0, 0.0, 0.0)
            } else if l3 <= blend_lo {
                (1.0 - eps, -re1, -re2)
            } else {
                // chi goes from 1 at blend_lo to 0 at blend_hi; h = 1 - chi eps.
                let width = blend_hi - blend_lo;
                let u = (l3 - blend_lo) / width;
                let (sv, sd1, sd2) = crate::warp::smootherstep(u);
                let chi = 1.0 - sv;
                let (l1, l2) = (lr.l1(), lr.l2());
                // r dl3/dr = -1/(L1 L2); r^2 d^2 l3/dr^2 = (1/(L1 L2))(1 - (L2+1)/(L1 L2)).
                let v1 = -1.0 / (l1 * l2);
                let v2 = (1.0 - (l2 + 1.0) / (l1 * l2)) / (l1 * l2);
                let ru1 = v1 / width;
                let r2u2 = v2 / width;
                let rchi1 = -sd1 * ru1;
                let r2chi2 = -(sd2 * ru1 * ru1 + sd1 * (r2u2 - ru1));
                // r^2 d^2/dr^2 chi(u(r)) with r-weights: d/dr[chi_u u'] gives
                // chi_uu u'^2 + chi_u u''; in r-scaled form the u'^2 term uses
                // (r u')^2 and the u'' term r^2 u''; the extra -ru1 corrects
                // for scaling r^2 (u')' = r^2 u'' = (r^2 u'' ) directly.
                let h = 1.0 - chi * eps;
                let rh1 = -(rchi1 * eps + chi * re1);
                let r2h2 = -(r2chi2 * eps + 2.0 * rchi1 * re1 + chi * re2);
                (h, rh1, r2h2)
            }
        }
    };
    let p = 1.0 + rh1 / h;
    let q = (2.0 * rh1 + r2h2) / h;
    RadialProfile { n: params.n, h, p, q, f_val, s, s2 }
}

/// The three analytic lower bounds, r-scaled:
/// rr bound times r^2, mixed bound times r, tangential bound times r^2.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LemmaBounds {
    pub rr_scaled: f64,
    pub mixed_scaled: f64,
    pub tangential_scaled: f64,
}

pub fn lemma_bounds(lr: LogRadius, params: &LemmaParams) -> LemmaBounds {
    let (l1, l2) = (lr.l1(), lr.l2());
    let (e, f, d) = (params.amp_e, params.amp_f, params.d_const);
    let h = 1.0 - e / l2;
    LemmaBounds {
        rr_scaled: e / (2.0 * l2 * l2 * l1),
        mixed_scaled: -d * f / (l2 * l1),
        tangential_scaled: h * h * e / l2,
    }
}

/// The two delta-regime lower bounds from the positivity case split,
/// r^2-scaled. Case 1 applies when sqrt(1-delta^2) >= 1/L1, case 2 when
/// sqrt(1-delta^2) <= 1/L1 (where also delta >= 1/2).
pub fn case_bound(lr: LogRadius, delta: f64, params: &LemmaParams) -> (u8, f64) {
    let (l1, l2) = (lr.l1(), lr.l2());
    let (e, f, d) = (params.amp_e, params.amp_f, params.d_const);
    let w = (1.0 - delta * delta).max(0.0).sqrt();
    if w >= 1.0 / l1 {
        (1, w / (2.0 * l2) * (e - d * f) / l1)
    } else {
        (2, delta / (2.0 * l2 * l1) * (e / (2.0 * l2) - d * f / l1))
    }
}

/// The cone metric dr^2 + r^2 h^2 g(f(r)) over a parametrized family.
#[derive(Clone)]
pub struct ConeMetric {
    pub params: LemmaParams,
    pub profile: HProfile,
    pub family: Arc<dyn CrossSectionFamily>,
}

impl ConeMetric {
    pub fn new(params: LemmaParams, family: Arc<dyn CrossSectionFamily>) -> Result<Self> {
        params.validate()?;
        if family.dim() + 1 != params.n {
            return Err(Error::InvalidParameter(format!(
                "family dimension {} does not match n = {}",
                family.dim(),
                params.n
            )));
        }
        Ok(ConeMetric { params, profile: HProfile::Standard, family })
    }

    /// Construct without enforcing E >= D F, for verification runs that
    /// deliberately probe infeasible parameters.
    pub fn new_unchecked(params: LemmaParams, family: Arc<dyn CrossSectionFamily>) -> Self {
        ConeMetric { params, profile: HProfile::Standard, family }
    }

    pub fn with_profile(mut self, profile: HProfile) -> Self {
        self.profile = profile;
        self
    }

    pub fn radial(&self, lr: LogRadius) -> RadialProfile {
        radial_profile(lr, &self.params, self.profile)
    }

    /// h at a small radius.
    pub fn h_small(&self, lr: LogRadius) -> f64 {
        self.radial(lr).h
    }

    /// h on the mirrored large-radius branch: h -> h_inf as u1 -> infinity,
    /// where u1 = log(r / r0) > e (mirror of the small-radius chain).
    pub fn h_large(&self, u1: f64) -> f64 {
        let u2 = u1.max(std::f64::consts::E + 1e-9).ln();
        self.params.h_inf + self.params.amp_e * (1.0 - self.params.h_inf) / u2
    }

    /// f on the large branch: F log log log(r/r0) -> infinity.
    pub fn f_large(&self, u1: f64) -> f64 {
        self.params.amp_f * u1.max(std::f64::consts::E + 1e-9).ln().ln()
    }

    /// r f'(r) on the large branch.
    pub fn rf1_large(&self, u1: f64) -> f64 {
        let u2 = u1.ln();
        self.params.amp_f / (u1 * u2)
    }
}

/// Grid description for a directional verification run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DirectionalGrid {
    /// Range of the outermost log l3 (deep end first when l3_hi > l3_lo).
    pub l3_lo: f64,
    pub l3_hi: f64,
    pub n_radii: usize,
    pub n_deltas: usize,
    pub n_samples: usize,
    pub n_directions: usize,
    pub seed: u64,
}

impl Default for DirectionalGrid {
    fn default() -> Self {
        DirectionalGrid {
            l3_lo: 1.0,
            l3_hi: 4.0,
            n_radii: 200,
            n_deltas: 101,
            n_samples: 50,
            n_directions: 4,
            seed: 7,
        }
    }
}

impl DirectionalGrid {
    pub fn radii(&self) -> Vec<LogRadius> {
        (0..self.n_radii)
            .map(|i| {
                let t = if self.n_radii == 1 {
                    0.0
                } else {
                    i as f64 / (self.n_radii - 1) as f64
                };
                LogRadius::from_l3(self.l3_lo + t * (self.l3_hi - self.l3_lo))
            })
            .collect()
    }

    pub fn deltas(&self) -> Vec<f64> {
        (0..self.n_deltas)
            .map(|i| {
                if self.n_deltas == 1 {
                    0.0
                } else {
                    i as f64 / (self.n_deltas - 1) as f64
                }
            })
            .collect()
    }
}

/// Result of a grid verification of directional Ricci positivity.
///
/// Directional values r^2 Ric(v, v) collapse over fifty orders of magnitude
/// across the radius grid, so minima and slack are reported in units of the
/// local radial estimate E / (2 L2^2 L1): a normalized value of 1 means the
/// direction carries exactly the analytic radial lower bound. Positivity of
/// the normalized value is equivalent to positivity of the raw one.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RicciReport {
    pub grid: DirectionalGrid,
    /// Minimum over radii, samples and tangent directions of the exact
    /// in-plane minimum over delta (the smallest eigenvalue of the 2x2 form
    /// on span(radial, tangent direction)), normalized.
    pub min_value: f64,
    /// Minimum over the delta grid nodes only, normalized. Always >= min_value.
    pub grid_delta_min: f64,
    /// (l3, delta, sample index, direction index) at the grid minimum.
    pub argmin: (f64, f64, usize, usize),
    /// Minima of the radial, mixed (most negative), and tangential parts,
    /// in raw r-scaled units.
    pub component_minima: ComponentMinima,
    /// First-order slack: max adjacent variation of the normalized per-radius
    /// minima along the radius grid.
    pub slack: f64,
    /// min_value - slack >= 0.
    pub verdict: bool,
    /// Minima of the two analytic case bounds over the grid (r^2-scaled).
    pub case1_min: f64,
    pub case2_min: f64,
    /// Largest measured |M|_g of the mixed term (the empirical D constant).
    pub measured_mixed_norm: f64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ComponentMinima {
    pub rr_scaled: f64,
    pub mixed_scaled: f64,
    pub tangential_scaled: f64,
}

/// Deterministic sample points and raw frame directions for a grid run.
fn grid_samples(
    grid: &DirectionalGrid,
    chart_box: &[(f64, f64)],
    m: usize,
) -> (Vec<Vec<f64>>, Vec<Vec<DVector<f64>>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(grid.seed);
    let samples: Vec<Vec<f64>> = (0..grid.n_samples)
        .map(|_| chart_box.iter().map(|&(lo, hi)| rng.random_range(lo..hi)).collect())
        .collect();
    let directions: Vec<Vec<DVector<f64>>> = (0..grid.n_samples)
        .map(|_| {
            (0..grid.n_directions)
                .map(|_| {
                    let mut v = DVector::from_fn(m, |_, _| rng.random_range(-1.0f64..1.0));
                    if v.norm() < 1e-9 {
                        v[0] = 1.0;
                    }
                    v
                })
                .collect()
        })
        .collect();
    (samples, directions)
}

/// Evaluate the directional quadratic form over radius x delta x sample x
/// direction grids and report the minimum with slack and verdict.
pub fn directional_ricci_min(cone: &ConeMetric, grid: &DirectionalGrid) -> Result<RicciReport> {
    let radii = grid.radii();
    let deltas = grid.deltas();
    let m = cone.family.dim();
    let (samples, directions) = grid_samples(grid, &cone.family.chart_box(), m);

    struct RadiusRow {
        eigen_min: f64,
        delta_min: f64,
        argmin: (f64, usize, usize),
        comp: ComponentMinima,
        mixed_norm: f64,
        case1: f64,
        case2: f64,
    }

    let rows: Vec<RadiusRow> = radii
        .par_iter()
        .map(|&lr| -> Result<RadiusRow> {
            let prof = cone.radial(lr);
            let scale = lemma_bounds(lr, &cone.params).rr_scaled;
            let mut eigen_min = f64::INFINITY;
            let mut delta_min = f64::INFINITY;
            let mut arg = (f64::NAN, 0usize, 0usize);
            let mut comp = ComponentMinima {
                rr_scaled: f64::INFINITY,
                mixed_scaled: f64::INFINITY,
                tangential_scaled: f64::INFINITY,
            };
            let mut mixed_norm: f64 = 0.0;
            for (si, x) in samples.iter().enumerate() {
                let data = cone_curvature(cone.family.as_ref(), prof, x)?;
                let ginv = data.g.clone().try_inverse().ok_or_else(|| {
                    Error::NotPositiveDefinite { context: format!("grid sample {si}") }
                })?;
                comp.rr_scaled = comp.rr_scaled.min(data.rr_scaled);
                let mn = (data.mixed_scaled.transpose() * &ginv * &data.mixed_scaled)[(0, 0)]
                    .max(0.0)
                    .sqrt();
                // |M|_g relative to S (the mixed term carries one factor S).
                if prof.s > 0.0 {
                    mixed_norm = mixed_norm.max(mn / prof.s);
                }
                comp.mixed_scaled = comp.mixed_scaled.min(-mn);
                let chol = data.g.clone().cholesky().ok_or_else(|| {
                    Error::NotPositiveDefinite { context: format!("grid sample {si}") }
                })?;
                for (di, raw) in directions[si].iter().enumerate() {
                    // g-unit direction in coordinates.
                    let u = chol
                        .l()
                        .transpose()
                        .solve_upper_triangular(raw)
                        .unwrap_or_else(|| raw.clone());
                    let norm = (u.transpose() * &data.g * &u)[(0, 0)].sqrt();
                    let u = u / norm;
                    // 2x2 form on span(radial, u): [[a, b], [b, c]] in the
                    // scaled orthonormal frame.
                    let a = data.rr_scaled;
                    let b = data.mixed_scaled.dot(&u) / prof.h;
                    let tang = data.direction_value(0.0, &u);
                    let c = tang;
                    comp.tangential_scaled = comp.tangential_scaled.min(c);
                    // Smallest eigenvalue of [[a, b], [b, c]]; the direct
                    // formula cancels catastrophically when c >> a, so go
                    // through det / lambda_max whenever the larger eigenvalue
                    // is positive.
                    let disc = (0.25 * (a - c) * (a - c) + b * b).sqrt();
                    let lam_max = 0.5 * (a + c) + disc;
                    let lam = if lam_max > 0.0 {
                        (a * c - b * b) / lam_max
                    } else {
                        0.5 * (a + c) - disc
                    };
                    if lam / scale < eigen_min {
                        eigen_min = lam / scale;
                    }
                    for &delta in deltas.iter() {
                        let v = data.direction_value(delta, &u) / scale;
                        if v < delta_min {
                            delta_min = v;
                            arg = (delta, si, di);
                        }
                    }
                }
            }
            let mut case1 = f64::INFINITY;
            let mut case2 = f64::INFINITY;
            for &delta in &deltas {
                let (which, v) = case_bound(lr, delta, &cone.params);
                if which == 1 {
                    case1 = case1.min(v);
                } else {
                    case2 = case2.min(v);
                }
            }
            Ok(RadiusRow { eigen_min, delta_min, argmin: arg, comp, mixed_norm, case1, case2 })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut min_value = f64::INFINITY;
    let mut grid_delta_min = f64::INFINITY;
    let mut argmin = (f64::NAN, f64::NAN, 0usize, 0usize);
    let mut comp = ComponentMinima {
        rr_scaled: f64::INFINITY,
        mixed_scaled: f64::INFINITY,
        tangential_scaled: f64::INFINITY,
    };
    let mut mixed_norm: f64 = 0.0;
    let mut case1 = f64::INFINITY;
    let mut case2 = f64::INFINITY;
    for (ri, row) in rows.iter().enumerate() {
        min_value = min_value.min(row.eigen_min);
        if row.delta_min < grid_delta_min {
            grid_delta_min = row.delta_min;
            argmin = (radii[ri].l3(), row.argmin.0, row.argmin.1, row.argmin.2);
        }
        comp.rr_scaled = comp.rr_scaled.min(row.comp.rr_scaled);
        comp.mixed_scaled = comp.mixed_scaled.min(row.comp.mixed_scaled);
        comp.tangential_scaled = comp.tangential_scaled.min(row.comp.tangential_scaled);
        mixed_norm = mixed_norm.max(row.mixed_norm);
        case1 = case1.min(row.case1);
        case2 = case2.min(row.case2);
    }

    // First-order slack along the radius axis of the normalized per-radius
    // minima (the delta direction is already exact via the eigenvalue).
    let mut slack: f64 = 0.0;
    for ri in 1..rows.len() {
        slack = slack.max((rows[ri].eigen_min - rows[ri - 1].eigen_min).abs());
    }

    Ok(RicciReport {
        grid: grid.clone(),
        min_value,
        grid_delta_min,
        argmin,
        component_minima: comp,
        slack,
        verdict: min_value - slack >= 0.0,
        case1_min: case1,
        case2_min: case2,
        measured_mixed_norm: mixed_norm,
    })
}

/// Sweep schedule for the parameter search.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepSchedule {
    /// Descending F values.
    pub f_values: Vec<f64>,
    /// Ascending multipliers; E = mult * D * F.
    pub e_multipliers: Vec<f64>,
    /// Descending r0 values.
    pub r0_values: Vec<f64>,
}

impl Default for SweepSchedule {
    fn default() -> Self {
        SweepSchedule {
            f_values: vec![0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125],
            e_multipliers: vec![1.0, 1.5, 2.0, 4.0],
            r0_values: vec![0.5, 0.1, 0.02],
        }
    }
}

/// Search (E, F, r0, D) until the directional grid minimum minus slack is
/// nonnegative and both analytic case bounds hold. Deterministic in the
/// schedule order; the first feasible tuple wins.
pub fn feasibility_search(
    n: usize,
    family: Arc<dyn CrossSectionFamily>,
    h_inf: f64,
    schedule: &SweepSchedule,
    grid: &DirectionalGrid,
) -> Result<(LemmaParams, RicciReport)> {
    if schedule.f_values.is_empty() || schedule.e_multipliers.is_empty()
        || schedule.r0_values.is_empty()
    {
        return Err(Error::Config("empty sweep schedule".into()));
    }
    // Estimate the dimensional constant on a coarse grid with provisional
    // parameters, then refine: D = measured mixed norm with 25% headroom,
    // floored at 1 and capped by the 16 n default.
    let probe_params = LemmaParams {
        n,
        amp_e: 0.5,
        amp_f: 0.25,
        r0: schedule.r0_values[0],
        h_inf,
        d_const: 1.0,
    };
    let probe_cone = ConeMetric { params: probe_params, profile: HProfile::Standard, family: family.clone() };
    let probe_grid = DirectionalGrid {
        n_radii: (grid.n_radii / 8).max(4),
        n_deltas: 5,
        n_samples: (grid.n_samples / 4).max(4),
        ..grid.clone()
    };
    let probe = directional_ricci_min(&probe_cone, &probe_grid)?;
    let d_default = 16.0 * n as f64;
    let d_const = (1.25 * probe.measured_mixed_norm).max(1.0).min(d_default);

    let mut worst_violation = f64::NEG_INFINITY;
    let mut worst_context = String::new();
    for &f in &schedule.f_values {
        for &mult in &schedule.e_multipliers {
            let e = mult * d_const * f;
            if e > 1.0 {
                continue;
            }
            for &r0 in &schedule.r0_values {
                let params = LemmaParams { n, amp_e: e, amp_f: f, r0, h_inf, d_const };
                if params.validate().is_err() {
                    continue;
                }
                let cone =
                    ConeMetric { params, profile: HProfile::Standard, family: family.clone() };
                let report = directional_ricci_min(&cone, grid)?;
                let feasible =
                    report.verdict && report.case1_min >= 0.0 && report.case2_min >= 0.0;
                if feasible {
                    return Ok((params, report));
                }
                let violation = -(report.min_value - report.slack)
                    .min(report.case1_min)
                    .min(report.case2_min);
                if violation > worst_violation {
                    worst_violation = violation;
                    worst_context = format!(
                        "E={e} F={f} r0={r0}: min={} slack={} argmin l3={} delta={}",
                        report.min_value, report.slack, report.argmin.0, report.argmin.1
                    );
                }
            }
        }
    }
    Err(Error::SweepExhausted { violation: worst_violation, context: worst_context })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::round_family;

    fn test_params() -> LemmaParams {
        LemmaParams { n: 3, amp_e: 0.5, amp_f: 0.03, r0: 0.1, h_inf: 0.5, d_const: 10.0 }
    }

    #[test]
    fn h_closed_form_at_double_log_radius() {
        // r0 r = e^(-e^2): L2 = 2 exactly, so h = 1 - E/2.
        let p = test_params();
        let r = (-(2f64).exp()).exp() / p.r0;
        let (h, _, _) = eval_h(r, &p).unwrap();
        assert!((h - 0.75).abs() < 1e-12);
    }

    #[test]
    fn f_closed_form_at_triple_log_radius() {
        // r0 r = e^(-e^e): L3 = 1 so f = -F.
        let p = test_params();
        let lr = LogRadius::from_l3(1.0);
        let (f, _, _) = eval_f_scaled(lr, &p);
        assert!((f + p.amp_f).abs() < 1e-12);
        // r_k = r0^-1 e^(-e^(e^k)) gives f = -F k, unbounded below.
        for k in [2.0, 5.0, 20.0, 100.0] {
            let (fk, _, _) = eval_f_scaled(LogRadius::from_l3(k), &p);
            assert!((fk + p.amp_f * k).abs() < 1e-9 * k);
        }
    }

    #[test]
    fn eps_derivative_matches_central_difference() {
        let p = test_params();
        let r = (-(2f64).exp()).exp() / p.r0;
        let (_, e1, _) = eval_eps(r, &p).unwrap();
        let h = 1e-6 * r;
        let fd = (eval_eps(r + h, &p).unwrap().0 - eval_eps(r - h, &p).unwrap().0) / (2.0 * h);
        assert!(
            (e1 - fd).abs() < 1e-8 * e1.abs(),
            "eps' = {e1} vs central difference {fd}"
        );
    }

    #[test]
    fn f_derivative_matches_central_difference_and_is_positive() {
        let p = test_params();
        let r = (-(2.2f64).exp()).exp() / p.r0;
        let (_, f1) = eval_f(r, &p).unwrap();
        assert!(f1 > 0.0);
        let h = 1e-6 * r;
        let fd = (eval_f(r + h, &p).unwrap().0 - eval_f(r - h, &p).unwrap().0) / (2.0 * h);
        assert!((f1 - fd).abs() < 1e-8 * f1.abs());
    }

    #[test]
    fn h_increases_to_one_and_rf1_decreases_to_zero() {
        let p = test_params();
        let mut prev_h = 0.0;
        let mut prev_rf = f64::INFINITY;
        for k in 1..22 {
            let lr = LogRadius::from_l3(0.5 + 0.25 * k as f64);
            let prof = radial_profile(lr, &p, HProfile::Standard);
            assert!(prof.h > prev_h && prof.h < 1.0, "h monotone up to 1");
            assert!(prof.s < prev_rf && prof.s > 0.0, "r f' monotone down to 0");
            prev_h = prof.h;
            prev_rf = prof.s;
        }
        assert!(prev_h > 0.99);
        assert!(prev_rf < 1e-10);
        // Depths beyond the double range saturate at the exact limits.
        let deep = radial_profile(LogRadius::from_l3(50.0), &p, HProfile::Standard);
        assert_eq!(deep.h, 1.0);
        assert_eq!(deep.s, 0.0);
    }

    #[test]
    fn rh_is_concave_and_bounded_by_rr_estimate() {
        // (rh)''/(rh) <= -E / (2 L2^2 L1 r^2) on the admissible range.
        let p = test_params();
        for k in [1.0, 1.5, 2.0, 3.0, 4.0] {
            let lr = LogRadius::from_l3(k);
            let prof = radial_profile(lr, &p, HProfile::Standard);
            let bound = lemma_bounds(lr, &p);
            assert!(prof.q < 0.0);
            assert!(prof.q <= -bound.rr_scaled / (p.n as f64 - 1.0) * (p.n as f64 - 1.0));
            assert!(-(p.n as f64 - 1.0) * prof.q >= bound.rr_scaled);
        }
    }

    #[test]
    fn tangential_bound_dominates_mixed_bound_for_small_r() {
        let p = test_params();
        for k in [1.0, 2.0, 3.0, 4.0] {
            let lr = LogRadius::from_l3(k);
            let b = lemma_bounds(lr, &p);
            let rh_scaled = b.tangential_scaled;
            assert!(rh_scaled > b.mixed_scaled.abs() * (1.0 - p.amp_e / lr.l2()));
            assert!(b.rr_scaled > 0.0);
        }
    }

    #[test]
    fn frozen_bounds_at_double_log_radius() {
        // L1 = e^2, L2 = 2 with E = F = 1/2, D = 10, n = 3; values frozen
        // from direct substitution into the three bound expressions.
        let p = LemmaParams { n: 3, amp_e: 0.5, amp_f: 0.5, r0: 0.1, h_inf: 0.5, d_const: 10.0 };
        let lr = LogRadius::from_l3((2f64).ln());
        let b = lemma_bounds(lr, &p);
        let l1 = (2f64).exp();
        assert!((b.rr_scaled - 0.5 / (8.0 * l1)).abs() < 1e-15);
        assert!((b.mixed_scaled - (-5.0 / (2.0 * l1))).abs() < 1e-14);
        let h = 1.0 - 0.25;
        assert!((b.tangential_scaled - h * h * 0.25).abs() < 1e-15);
    }

    #[test]
    fn stationary_family_directional_minimum_is_radial_estimate() {
        // Pure radial direction, stationary family: value = -(n-1) Q > 0.
        let p = test_params();
        let fam = Arc::new(round_family(2, 1.0));
        let cone = ConeMetric::new(p, fam).unwrap();
        let lr = LogRadius::from_l3(2.0);
        let prof = cone.radial(lr);
        let x = [1.3, 2.1];
        let data = cone_curvature(cone.family.as_ref(), prof, &x).unwrap();
        let u = DVector::from_vec(vec![1.0, 0.0]);
        let g00 = data.g[(0, 0)];
        let u = u / g00.sqrt();
        let radial = data.direction_value(1.0, &u);
        assert!((radial - (-(2.0) * prof.q)).abs() < 1e-12);
        assert!(radial > 0.0);
    }

    #[test]
    fn tangential_direction_dominates_the_lemma_bound() {
        // Pure tangential direction over a round cross-section with
        // Ric = (n-2) g: the value sits above the tangential estimate.
        let p = test_params();
        let fam = Arc::new(round_family(2, 1.0));
        let cone = ConeMetric::new(p, fam).unwrap();
        for k in [1.0, 2.0, 3.5] {
            let lr = LogRadius::from_l3(k);
            let prof = cone.radial(lr);
            let x = [1.2, 2.5];
            let data = cone_curvature(cone.family.as_ref(), prof, &x).unwrap();
            let chol = data.g.clone().cholesky().unwrap();
            let raw = DVector::from_vec(vec![0.3, 0.7]);
            let u = chol.l().transpose().solve_upper_triangular(&raw).unwrap();
            let norm = (u.transpose() * &data.g * &u)[(0, 0)].sqrt();
            let u = u / norm;
            let value = data.direction_value(0.0, &u);
            let bound = lemma_bounds(lr, &p).tangential_scaled;
            assert!(value >= bound, "l3={k}: {value} < {bound}");
        }
    }

    #[test]
    fn flat_cone_directional_values_vanish() {
        let fam = Arc::new(round_family(2, 1.0));
        let prof = RadialProfile::flat(3, 0.0);
        let x = [1.1, 2.0];
        let data = cone_curvature(fam.as_ref(), prof, &x).unwrap();
        let chol = data.g.clone().cholesky().unwrap();
        for (delta, ang) in [(0.0, 0.3f64), (0.5, 1.2), (1.0, 2.0), (0.9, 0.0)] {
            let raw = DVector::from_vec(vec![ang.cos(), ang.sin()]);
            let u = chol.l().transpose().solve_upper_triangular(&raw).unwrap();
            let norm = (u.transpose() * &data.g * &u)[(0, 0)].sqrt();
            let u = u / norm;
            assert!(data.direction_value(delta, &u).abs() < 1e-9);
        }
    }

    #[test]
    fn stationary_round_family_is_feasible() {
        let fam = Arc::new(round_family(2, 1.0));
        let grid = DirectionalGrid {
            n_radii: 24,
            n_deltas: 21,
            n_samples: 6,
            n_directions: 3,
            ..Default::default()
        };
        let (params, report) =
            feasibility_search(3, fam, 0.5, &SweepSchedule::default(), &grid).unwrap();
        assert!(report.verdict, "report {report:?}");
        assert!(params.amp_e >= params.d_const * params.amp_f);
    }

    #[test]
    fn undersized_round_family_is_infeasible_at_small_delta() {
        // Ric = (n - 2.5) g < (n-2) g: the tangential term dominates and the
        // sweep must fail, reporting a violation.
        let a = (1.0f64 / 0.5).sqrt(); // Ric per unit = 1/a^2 = 0.5 = n - 2.5
        let fam = Arc::new(round_family(2, a));
        let grid = DirectionalGrid {
            n_radii: 12,
            n_deltas: 11,
            n_samples: 4,
            n_directions: 2,
            ..Default::default()
        };
        let err = feasibility_search(3, fam, 0.5, &SweepSchedule::default(), &grid);
        match err {
            Err(Error::SweepExhausted { violation, .. }) => assert!(violation > 0.0),
            other => panic!("expected exhausted sweep, got {other:?}"),
        }
    }

    #[test]
    fn stabilized_tail_is_flat_deep_and_concave_in_blend() {
        let p = test_params();
        let profile = HProfile::StabilizedTail { blend_lo: 2.0, blend_hi: 3.0 };
        let deep = radial_profile(LogRadius::from_l3(3.5), &p, profile);
        assert_eq!(deep.h, 1.0);
        assert_eq!(deep.q, 0.0);
        let shallow = radial_profile(LogRadius::from_l3(1.5), &p, profile);
        let standard = radial_profile(LogRadius::from_l3(1.5), &p, HProfile::Standard);
        assert!((shallow.h - standard.h).abs() < 1e-14);
        // Monitored concavity through the blend window.
        for k in 0..40 {
            let l3 = 2.0 + 0.025 * k as f64;
            let prof = radial_profile(LogRadius::from_l3(l3), &p, profile);
            assert!(prof.q <= 1e-12, "blend concavity violated at l3 = {l3}: q = {}", prof.q);
        }
    }
}
