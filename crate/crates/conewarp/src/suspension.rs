//! Iterated suspensions over the volume-constrained parameter manifold.
//!
//! The t-suspension of a space X is dr^2 + sin^2(r/t) d_X^2 on (0, t pi).
//! Iterating from a circle of radius t_{n-1} through factors t_{n-2}, ...,
//! t_1 produces a metric on S^{n-1} that is the round sphere of radius t
//! when all factors agree, and degenerates to k-fold suspensions of smaller
//! round spheres at the boundary of the ordered parameter set. Volumes
//! factor through Wallis integrals, so the volume constraint is the product
//! law prod t_k = 2^-(n-1).

use crate::chart::MetricField;
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Wallis integral I_m = int_0^pi sin^m u du.
/// I_0 = pi, I_1 = 2, I_m = I_{m-2} (m-1)/m.
pub fn wallis_integral(m: usize) -> f64 {
    match m {
        0 => PI,
        1 => 2.0,
        _ => wallis_integral(m - 2) * (m as f64 - 1.0) / m as f64,
    }
}

/// Parameters of an iterated suspension metric on S^{n-1}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuspensionSpec {
    /// Ambient dimension n >= 3 (the metric lives on S^{n-1}).
    pub n: usize,
    /// Suspension factors (t_1, ..., t_{n-1}), ordered
    /// 0 < t_{n-1} <= ... <= t_1 <= 1.
    pub ts: Vec<f64>,
    /// Smoothing collar scale; 0 means the exact singular metric.
    pub sigma: f64,
}

impl SuspensionSpec {
    pub fn new(n: usize, ts: Vec<f64>) -> Result<Self> {
        let spec = SuspensionSpec { n, ts, sigma: 0.0 };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::InvalidParameter(format!("n = {} must be >= 3", self.n)));
        }
        if self.ts.len() != self.n - 1 {
            return Err(Error::InvalidParameter(format!(
                "expected {} suspension factors, got {}",
                self.n - 1,
                self.ts.len()
            )));
        }
        let mut prev = 1.0 + 1e-12;
        for (k, &t) in self.ts.iter().enumerate() {
            if !(t > 0.0 && t <= 1.0) {
                return Err(Error::InvalidParameter(format!("t_{} = {t} outside (0, 1]", k + 1)));
            }
            if t > prev {
                return Err(Error::InvalidParameter(format!(
                    "ordering violated: t_{} = {t} > t_{} = {prev}",
                    k + 1,
                    k
                )));
            }
            prev = t;
        }
        Ok(())
    }

    /// True when all factors agree (the round sphere, already smooth).
    pub fn is_round(&self) -> bool {
        self.ts.windows(2).all(|w| (w[0] - w[1]).abs() < 1e-12)
    }
}

/// Closed-form volume: Vol = 2 pi t_{n-1} prod_{k=1}^{n-2} t_k I_{n-1-k}.
pub fn suspension_volume(spec: &SuspensionSpec) -> Result<f64> {
    spec.validate()?;
    let n = spec.n;
    let mut vol = 2.0 * PI * spec.ts[n - 2];
    for k in 1..=(n - 2) {
        vol *= spec.ts[k - 1] * wallis_integral(n - 1 - k);
    }
    Ok(vol)
}

/// Volume of the round reference (1/2, ..., 1/2).
pub fn reference_volume(n: usize) -> f64 {
    let spec = SuspensionSpec { n, ts: vec![0.5; n - 1], sigma: 0.0 };
    suspension_volume(&spec).expect("reference spec is valid")
}

/// A parameter point on the volume-constrained manifold: ordered factors
/// with prod t_k = 2^-(n-1) and t_1 < 1.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OmegaPoint {
    pub spec: SuspensionSpec,
}

impl OmegaPoint {
    pub fn new(spec: SuspensionSpec) -> Result<Self> {
        spec.validate()?;
        if spec.ts[0] >= 1.0 {
            return Err(Error::InvalidParameter("interior requires t_1 < 1".into()));
        }
        let vol = suspension_volume(&spec)?;
        let reference = reference_volume(spec.n);
        if ((vol - reference) / reference).abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "volume {vol} differs from the constrained value {reference}"
            )));
        }
        Ok(OmegaPoint { spec })
    }

    /// The equivalent product form of the volume constraint.
    pub fn product_law(spec: &SuspensionSpec) -> f64 {
        spec.ts.iter().product::<f64>() * 2.0f64.powi(spec.n as i32 - 1)
    }
}

/// The limiting parameter (1, ..., 1, t_k, ..., t_k) with the first k
/// entries 1; the volume law forces t_k = 2^(-(n-1)/(n-1-k)). The cone over
/// this metric splits off exactly an R^k factor.
pub fn omega_boundary_limit(n: usize, k: usize) -> Result<SuspensionSpec> {
    if n < 3 || k > n - 2 {
        return Err(Error::InvalidParameter(format!("k = {k} outside 0..={}", n - 2)));
    }
    let t = 2.0f64.powf(-((n - 1) as f64) / ((n - 1 - k) as f64));
    let mut ts = vec![1.0; k];
    ts.extend(vec![t; n - 1 - k]);
    Ok(SuspensionSpec { n, ts, sigma: 0.0 })
}

/// Chart of the iterated suspension in nested polar coordinates
/// (rho_1, ..., rho_{n-2}, theta): a diagonal metric with
/// g_11 = 1, g_{k+1,k+1} = prod_{j<=k} sin^2(rho_j / t_j), and the theta
/// coefficient carrying the extra circle radius t_{n-1}^2.
/// The chart box excludes collars around the singular strata.
pub fn suspension_metric(spec: &SuspensionSpec) -> Result<MetricField> {
    spec.validate()?;
    let ts = spec.ts.clone();
    let n = spec.n;
    let m = n - 1;
    let guard_frac = if spec.sigma > 0.0 { spec.sigma } else { 0.08 };
    let mut chart_box = Vec::with_capacity(m);
    for t in ts.iter().take(n - 2) {
        let len = t * PI;
        chart_box.push((guard_frac * len, (1.0 - guard_frac) * len));
    }
    chart_box.push((0.1, 2.0 * PI - 0.1));
    Ok(MetricField::new(
        m,
        chart_box,
        move |x| {
            let mut g = DMatrix::zeros(m, m);
            let mut factor = 1.0;
            for k in 0..(n - 2) {
                g[(k, k)] = factor;
                let s = (x[k] / ts[k]).sin();
                factor *= s * s;
            }
            g[(m - 1, m - 1)] = factor * ts[n - 2] * ts[n - 2];
            g
        },
        "suspension",
    ))
}

/// Closed-form Ricci tensor of the iterated suspension at a chart point,
/// via the warped-product recursion: for dr^2 + phi^2 g_inner with
/// d = dim inner,
///   Ric_rr = -d phi''/phi,
///   Ric_inner = Ric(g_inner) - (phi phi'' + (d-1) phi'^2) g_inner.
pub fn suspension_ricci(spec: &SuspensionSpec, x: &[f64]) -> Result<DMatrix<f64>> {
    spec.validate()?;
    let n = spec.n;
    let m = n - 1;
    if x.len() != m {
        return Err(Error::InvalidParameter(format!("expected {m} coordinates")));
    }
    // Innermost: circle of radius t_{n-1}, G = t^2, Ric = 0.
    let mut g_inner = DMatrix::from_element(1, 1, spec.ts[n - 2] * spec.ts[n - 2]);
    let mut ric_inner = DMatrix::zeros(1, 1);
    // Wrap levels from the inside out.
    for level in (0..(n - 2)).rev() {
        let t = spec.ts[level];
        let rho = x[level];
        if rho <= 0.0 || rho >= t * PI {
            return Err(Error::OutOfDomain {
                what: format!("rho_{}", level + 1),
                point: rho,
                lo: 0.0,
                hi: t * PI,
            });
        }
        let phi = (rho / t).sin();
        let dphi = (rho / t).cos() / t;
        let ddphi = -phi / (t * t);
        let d = g_inner.nrows();
        let dim = d + 1;
        let mut g = DMatrix::zeros(dim, dim);
        let mut ric = DMatrix::zeros(dim, dim);
        g[(0, 0)] = 1.0;
        ric[(0, 0)] = -(d as f64) * ddphi / phi;
        let coeff = phi * ddphi + (d as f64 - 1.0) * dphi * dphi;
        for i in 0..d {
            for j in 0..d {
                g[(i + 1, j + 1)] = phi * phi * g_inner[(i, j)];
                ric[(i + 1, j + 1)] = ric_inner[(i, j)] - coeff * g_inner[(i, j)];
            }
        }
        g_inner = g;
        ric_inner = ric;
    }
    Ok(ric_inner)
}

/// Sectional-curvature interval of one suspension level S_t(X) at radius r:
/// radial planes carry 1/t^2, tangential planes
/// (K_inner - cos^2(r/t)/t^2) / sin^2(r/t) ranged over the inner interval.
/// `inner` is None for a one-dimensional inner space (no tangential planes).
pub fn sec_suspension(t: f64, inner: Option<(f64, f64)>, r: f64) -> Result<(f64, f64)> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidParameter(format!("t = {t} outside (0, 1]")));
    }
    if r <= 0.0 || r >= t * PI {
        return Err(Error::OutOfDomain { what: "suspension radius".into(), point: r, lo: 0.0, hi: t * PI });
    }
    let radial = 1.0 / (t * t);
    match inner {
        None => Ok((radial, radial)),
        Some((klo, khi)) => {
            let s = (r / t).sin();
            let c = (r / t).cos();
            let tan_lo = (klo - c * c / (t * t)) / (s * s);
            let tan_hi = (khi - c * c / (t * t)) / (s * s);
            Ok((radial.min(tan_lo), radial.max(tan_hi)))
        }
    }
}

/// Sectional range of the whole iterated suspension away from the poles
/// (radius within [guard, t pi - guard] at every level). The returned upper
/// end can be infinite at interior conical strata when guard = 0.
pub fn sec_suspension_range(spec: &SuspensionSpec, guard_frac: f64) -> Result<(f64, f64)> {
    spec.validate()?;
    let n = spec.n;
    // Innermost 2-dimensional suspension over the circle: constant 1/t^2.
    let t_in = spec.ts[n - 3];
    let mut range = (1.0 / (t_in * t_in), 1.0 / (t_in * t_in));
    for level in (0..(n - 3)).rev() {
        let t = spec.ts[level];
        let lo_r = guard_frac.max(1e-6) * t * PI;
        let mut out = (f64::INFINITY, f64::NEG_INFINITY);
        for k in 0..64 {
            let r = lo_r + (t * PI - 2.0 * lo_r) * k as f64 / 63.0;
            let (lo, hi) = sec_suspension(t, Some(range), r)?;
            out.0 = out.0.min(lo);
            out.1 = out.1.max(hi);
        }
        range = out;
    }
    Ok(range)
}

/// A pole-smoothed profile of c sin(rho / t) on (0, t pi):
/// a sphere cap sin(k rho)/k (slope one at the pole, curvature k^2 > 1/t^2)
/// joined to the original profile at a collar, applied symmetrically at both
/// poles. The junction preserves the warper value and first derivative, so
/// the profile is C^1 with curvature piecewise in {k^2, 1/t^2}; values,
/// derivatives and the running integral are closed-form per branch.
#[derive(Clone, Debug)]
pub struct SmoothedWarp {
    pub t: f64,
    pub c: f64,
    /// Collar depth (in the original coordinate) where the cap takes over.
    pub sigma: f64,
    /// Cap frequency: curvature of the cap sphere is cap_k^2.
    pub cap_k: f64,
    /// Cap length in the smoothed coordinate.
    pub rho_star: f64,
    /// Total profile length (t pi - 2 sigma + 2 rho_star before rescaling).
    pub length: f64,
    /// Homothety applied after smoothing to restore the area (1 if none).
    pub rescale: f64,
}

impl SmoothedWarp {
    /// Smooth c sin(rho/t); requires c <= t (slope at most one) and a collar
    /// that stays clear of the equator.
    pub fn new(t: f64, c: f64, sigma: f64) -> Result<Self> {
        if !(c > 0.0 && t > 0.0 && c <= t + 1e-12) {
            return Err(Error::InvalidParameter(format!("need 0 < c <= t, got c={c}, t={t}")));
        }
        if sigma <= 0.0 || sigma >= t * PI / 3.0 {
            return Err(Error::InvalidParameter(format!(
                "collar sigma = {sigma} outside (0, t pi / 3)"
            )));
        }
        let slope = c / t;
        if 1.0 - slope < 1e-9 {
            // Already a smooth pole; identity profile.
            return Ok(SmoothedWarp {
                t,
                c,
                sigma: 0.0,
                cap_k: 1.0 / t,
                rho_star: 0.0,
                length: t * PI,
                rescale: 1.0,
            });
        }
        let w_sigma = c * (sigma / t).sin();
        let sl_sigma = slope * (sigma / t).cos();
        if sl_sigma <= 0.0 {
            return Err(Error::InvalidParameter("collar reaches past the equator".into()));
        }
        let cap_k = (1.0 - sl_sigma * sl_sigma).sqrt() / w_sigma;
        let rho_star = sl_sigma.acos() / cap_k;
        let length = t * PI - 2.0 * sigma + 2.0 * rho_star;
        Ok(SmoothedWarp { t, c, sigma, cap_k, rho_star, length, rescale: 1.0 })
    }

    fn cap_eval(&self, rho: f64) -> (f64, f64, f64) {
        let k = self.cap_k;
        let (s, c) = (k * rho).sin_cos();
        (s / k, c, -k * s)
    }

    /// The translated original profile: c sin((rho - rho* + sigma)/t).
    fn base_eval(&self, rho: f64) -> (f64, f64, f64) {
        let u = (rho - self.rho_star + self.sigma) / self.t;
        let (s, c) = u.sin_cos();
        (self.c * s, self.c * c / self.t, -self.c * s / (self.t * self.t))
    }

    /// One-sided evaluation before the symmetric reflection.
    fn eval_half(&self, rho: f64) -> (f64, f64, f64) {
        if self.rho_star == 0.0 {
            // Identity profile.
            let u = rho / self.t;
            let (s, c) = u.sin_cos();
            return (self.c * s, self.c * c / self.t, -self.c * s / (self.t * self.t));
        }
        if rho <= self.rho_star {
            self.cap_eval(rho)
        } else {
            self.base_eval(rho)
        }
    }

    /// Smoothed profile value and two derivatives (after rescaling).
    pub fn eval(&self, rho: f64) -> (f64, f64, f64) {
        let lam = self.rescale;
        let x = rho / lam;
        let half = self.length / 2.0;
        let (v, d1, d2) = if x <= half {
            self.eval_half(x)
        } else {
            let (v, d1, d2) = self.eval_half(self.length - x);
            (v, -d1, d2)
        };
        (lam * v, d1, d2 / lam)
    }

    pub fn value(&self, rho: f64) -> f64 {
        self.eval(rho).0
    }

    /// Domain length after rescaling.
    pub fn domain_length(&self) -> f64 {
        self.length * self.rescale
    }

    /// Running integral of the one-sided profile from 0.
    fn integral_half(&self, rho: f64) -> f64 {
        if self.rho_star == 0.0 {
            return self.c * self.t * (1.0 - (rho / self.t).cos());
        }
        let k = self.cap_k;
        let cap_int = |x: f64| (1.0 - (k * x).cos()) / (k * k);
        if rho <= self.rho_star {
            cap_int(rho)
        } else {
            let lo = self.sigma / self.t;
            let hi = (rho - self.rho_star + self.sigma) / self.t;
            cap_int(self.rho_star) + self.c * self.t * (lo.cos() - hi.cos())
        }
    }

    /// Running integral of the smoothed profile (after rescaling).
    pub fn integral(&self, rho: f64) -> f64 {
        let lam = self.rescale;
        let x = rho / lam;
        let half = self.length / 2.0;
        let total_half = self.integral_half(half);
        let v = if x <= half {
            self.integral_half(x)
        } else {
            2.0 * total_half - self.integral_half(self.length - x)
        };
        lam * lam * v
    }

    pub fn total_integral(&self) -> f64 {
        self.integral(self.domain_length())
    }

    /// Invert the running integral by bisection plus Newton.
    pub fn integral_inverse(&self, target: f64) -> Result<f64> {
        let total = self.total_integral();
        if target < -1e-12 || target > total * (1.0 + 1e-12) {
            return Err(Error::OutOfDomain {
                what: "warp integral".into(),
                point: target,
                lo: 0.0,
                hi: total,
            });
        }
        let target = target.clamp(0.0, total);
        let (mut lo, mut hi) = (0.0, self.domain_length());
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if self.integral(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut x = 0.5 * (lo + hi);
        for _ in 0..4 {
            let v = self.integral(x) - target;
            let d = self.value(x).max(1e-14);
            x = (x - v / d).clamp(lo - 1e-9, hi + 1e-9);
        }
        Ok(x.clamp(0.0, self.domain_length()))
    }

    /// Apply a homothety so the total integral matches `target`.
    /// (The area of the surface of revolution is 2 pi times the integral;
    /// the integral scales as lambda^2.)
    pub fn rescaled_to_integral(mut self, target: f64) -> Self {
        let current = self.total_integral();
        self.rescale *= (target / current).sqrt();
        self
    }

    /// Gauss curvature -w''/w at rho.
    pub fn curvature(&self, rho: f64) -> f64 {
        let (v, _, d2) = self.eval(rho);
        -d2 / v
    }

    pub fn to_warpfn(&self) -> crate::warp::WarpFn {
        let me = self.clone();
        let lam = self.rescale;
        let kinks = vec![
            self.rho_star * lam,
            (self.length - self.rho_star) * lam,
            self.length * lam / 2.0,
        ];
        crate::warp::WarpFn::from_fn(
            move |x| me.eval(x),
            (0.0, self.domain_length()),
            true,
            "smoothed-suspension",
        )
        .with_kinks(kinks)
    }
}

/// Report of a smoothing pass.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SmoothReport {
    /// Grid minimum of the sectional curvature of the smoothed space.
    pub sec_min: f64,
    /// |Vol(smoothed) - Vol(original)| before the restoring rescale.
    pub volume_change: f64,
    /// Homothety factor applied to restore the volume constraint.
    pub rescale: f64,
}

/// Smoothed n = 3 suspension: both conical poles of t2 sin(rho/t1) replaced
/// by spherical caps, rescaled to restore the original area. For round
/// specs the output is the identity profile and the volume change is zero.
pub fn smooth_suspension(spec: &SuspensionSpec, sigma: f64) -> Result<(SmoothedWarp, SmoothReport)> {
    spec.validate()?;
    if spec.n != 3 {
        return Err(Error::InvalidParameter(
            "pole-cap smoothing is implemented for n = 3; higher n uses per-level profiles".into(),
        ));
    }
    let (t1, t2) = (spec.ts[0], spec.ts[1]);
    let raw = SmoothedWarp::new(t1, t2, sigma)?;
    let target = suspension_volume(spec)? / (2.0 * PI);
    let volume_change = (raw.total_integral() - target).abs() * 2.0 * PI;
    let warp = raw.rescaled_to_integral(target);
    let mut sec_min = f64::INFINITY;
    let len = warp.domain_length();
    for k in 1..400 {
        let rho = len * k as f64 / 400.0;
        sec_min = sec_min.min(warp.curvature(rho));
    }
    let rescale = warp.rescale;
    Ok((warp, SmoothReport { sec_min, volume_change, rescale }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{ricci_close, ricci_fd, OracleConfig};

    fn quadrature_volume(spec: &SuspensionSpec) -> f64 {
        // The volume element factorizes; integrate each level by composite
        // Simpson with enough nodes for 1e-10 accuracy.
        let n = spec.n;
        let simpson = |power: usize, t: f64| {
            let steps = 4000;
            let h = t * PI / steps as f64;
            let f = |r: f64| (r / t).sin().powi(power as i32);
            let mut acc = f(0.0) + f(t * PI);
            for k in 1..steps {
                acc += f(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
            }
            acc * h / 3.0
        };
        let mut vol = 2.0 * PI * spec.ts[n - 2];
        for k in 1..=(n - 2) {
            vol *= simpson(n - 1 - k, spec.ts[k - 1]);
        }
        vol
    }

    #[test]
    fn wallis_values() {
        assert_eq!(wallis_integral(0), PI);
        assert_eq!(wallis_integral(1), 2.0);
        assert!((wallis_integral(2) - PI / 2.0).abs() < 1e-15);
        assert!((wallis_integral(3) - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn half_round_sphere_volume_is_pi() {
        // n = 3, (1/2, 1/2): the round 2-sphere of radius 1/2 has area pi.
        let spec = SuspensionSpec::new(3, vec![0.5, 0.5]).unwrap();
        assert!((suspension_volume(&spec).unwrap() - PI).abs() < 1e-14);
        // And (1, 1/4) has the same volume: an Omega closure point.
        let spec2 = SuspensionSpec::new(3, vec![1.0, 0.25]).unwrap();
        assert!((suspension_volume(&spec2).unwrap() - PI).abs() < 1e-14);
    }

    #[test]
    fn closed_form_volume_matches_quadrature() {
        for (n, ts) in [
            (3usize, vec![0.8, 0.3]),
            (4, vec![0.9, 0.5, 0.2]),
            (5, vec![1.0, 0.7, 0.4, 0.4]),
        ] {
            let spec = SuspensionSpec::new(n, ts).unwrap();
            let cf = suspension_volume(&spec).unwrap();
            let q = quadrature_volume(&spec);
            assert!(
                ((cf - q) / cf).abs() < 1e-8,
                "n={n}: closed form {cf} vs quadrature {q}"
            );
        }
    }

    #[test]
    fn volume_product_law() {
        // Vol(ts) / Vol(1/2,...,1/2) = 2^{n-1} prod t_k.
        for (n, ts) in [(3usize, vec![0.9, 0.35]), (4, vec![0.8, 0.6, 0.5])] {
            let spec = SuspensionSpec::new(n, ts.clone()).unwrap();
            let ratio = suspension_volume(&spec).unwrap() / reference_volume(n);
            let product: f64 = ts.iter().product::<f64>() * 2.0f64.powi(n as i32 - 1);
            assert!((ratio - product).abs() < 1e-12);
        }
    }

    #[test]
    fn boundary_limits_satisfy_product_law_exactly() {
        // n = 3: k = 0 gives t = 1/2, k = 1 gives t = 1/4.
        let l0 = omega_boundary_limit(3, 0).unwrap();
        assert!((l0.ts[0] - 0.5).abs() < 1e-15 && (l0.ts[1] - 0.5).abs() < 1e-15);
        let l1 = omega_boundary_limit(3, 1).unwrap();
        assert_eq!(l1.ts[0], 1.0);
        assert!((l1.ts[1] - 0.25).abs() < 1e-15);
        for n in 3..=6 {
            for k in 0..=(n - 2) {
                let spec = omega_boundary_limit(n, k).unwrap();
                assert!((OmegaPoint::product_law(&spec) - 1.0).abs() < 1e-12);
            }
        }
        assert!(omega_boundary_limit(3, 2).is_err());
    }

    #[test]
    fn omega_membership_requires_volume_and_ordering() {
        let good = SuspensionSpec::new(3, vec![0.8, 0.25 / 0.8]).unwrap();
        OmegaPoint::new(good).unwrap();
        let bad_vol = SuspensionSpec::new(3, vec![0.8, 0.4]).unwrap();
        assert!(OmegaPoint::new(bad_vol).is_err());
        assert!(SuspensionSpec::new(3, vec![0.3, 0.8]).is_err());
    }

    #[test]
    fn round_suspension_chart_has_constant_curvature_ricci() {
        // ts = (t, ..., t): the round sphere of radius t, so the oracle must
        // see Ric = (n-2)/t^2 per unit vector.
        for (n, t) in [(3usize, 0.5f64), (4, 0.5), (3, 1.0)] {
            let spec = SuspensionSpec::new(n, vec![t; n - 1]).unwrap();
            let chart = suspension_metric(&spec).unwrap();
            let x: Vec<f64> =
                chart.chart_box.iter().map(|&(lo, hi)| 0.4 * lo + 0.6 * hi).collect();
            let ric = ricci_fd(&chart, &x, OracleConfig::default()).unwrap();
            let expect = chart.at(&x) * ((n as f64 - 2.0) / (t * t));
            assert!(
                ricci_close(&ric, &expect, 1e-6, 1e-8),
                "n={n}, t={t}:\n{ric}\nvs\n{expect}"
            );
        }
    }

    #[test]
    fn recursive_ricci_matches_oracle_on_generic_spec() {
        let spec = SuspensionSpec::new(4, vec![0.9, 0.6, 0.3]).unwrap();
        let chart = suspension_metric(&spec).unwrap();
        let x: Vec<f64> = chart.chart_box.iter().map(|&(lo, hi)| 0.45 * lo + 0.55 * hi).collect();
        let analytic = suspension_ricci(&spec, &x).unwrap();
        let fd = ricci_fd(&chart, &x, OracleConfig::default()).unwrap();
        assert!(ricci_close(&analytic, &fd, 1e-5, 1e-8), "\n{analytic}\nvs\n{fd}");
    }

    #[test]
    fn football_chart_is_constant_curvature_one_over_t1_squared() {
        // n = 3, ts = (1, t): suspension of a circle, Gauss curvature 1.
        let spec = SuspensionSpec::new(3, vec![1.0, 0.3]).unwrap();
        let x = vec![1.2, 2.0];
        let ric = suspension_ricci(&spec, &x).unwrap();
        let g = suspension_metric(&spec).unwrap().at(&x);
        assert!(ricci_close(&ric, &g, 1e-10, 1e-12));
    }

    #[test]
    fn sec_suspension_examples() {
        // Round S^3: suspension of the unit S^2 with t = 1.
        let (lo, hi) = sec_suspension(1.0, Some((1.0, 1.0)), PI / 2.0).unwrap();
        assert!((lo - 1.0).abs() < 1e-14 && (hi - 1.0).abs() < 1e-14);
        // t = 1/2, inner K = 1, r = t pi / 2: radial 4, tangential 1.
        let (lo, hi) = sec_suspension(0.5, Some((1.0, 1.0)), 0.25 * PI).unwrap();
        assert!((lo - 1.0).abs() < 1e-13 && (hi - 4.0).abs() < 1e-13);
        // Smooth pole: inner round of radius t, r -> 0 tends to 1/t^2.
        let t = 0.7;
        let (lo, hi) = sec_suspension(t, Some((1.0 / (t * t), 1.0 / (t * t))), 1e-5).unwrap();
        assert!((lo - 1.0 / (t * t)).abs() < 1e-4 && (hi - 1.0 / (t * t)).abs() < 1e-4);
        // Pole evaluation is rejected.
        assert!(sec_suspension(0.5, None, 0.0).is_err());
    }

    #[test]
    fn iterated_sec_range_lower_bound_is_outermost_factor() {
        // Ordered factors: the minimum over planes away from strata is
        // 1/t_1^2 > 1.
        let spec = SuspensionSpec::new(4, vec![0.9, 0.6, 0.3]).unwrap();
        let (lo, _) = sec_suspension_range(&spec, 0.05).unwrap();
        assert!((lo - 1.0 / (0.9 * 0.9)).abs() < 1e-9, "lo = {lo}");
    }

    #[test]
    fn smoothed_warp_is_c1_and_round_pole() {
        let w = SmoothedWarp::new(0.8, 0.25 / 0.8, 0.35).unwrap();
        // Slope one at the pole, positive inside, symmetric.
        let (v0, d0, _) = w.eval(1e-9);
        assert!(v0 > 0.0 && (d0 - 1.0).abs() < 1e-6);
        let len = w.domain_length();
        for k in 1..60 {
            let rho = len * k as f64 / 60.0;
            let (v, _, _) = w.eval(rho);
            assert!(v > 0.0);
            assert!((v - w.value(len - rho)).abs() < 1e-12, "symmetry at {rho}");
        }
        // C1 with declared curvature-jump points; consistency away from them.
        let pts: Vec<f64> = (1..40).map(|k| len * k as f64 / 40.0).collect();
        w.to_warpfn().fd_consistency(&pts, 1e-5).unwrap();
        // Curvature at least the football value everywhere.
        let t1 = 0.8f64;
        for k in 1..200 {
            let rho = len * k as f64 / 200.0;
            let kk = w.curvature(rho);
            assert!(
                kk >= 1.0 / (t1 * t1) - 1e-6,
                "curvature dip at {rho}: {kk} < {}",
                1.0 / (t1 * t1)
            );
        }
    }

    #[test]
    fn smoothing_restores_area_and_keeps_curvature() {
        let spec = SuspensionSpec::new(3, vec![0.8, 0.25 / 0.8]).unwrap();
        let (warp, report) = smooth_suspension(&spec, 0.3).unwrap();
        let target = suspension_volume(&spec).unwrap() / (2.0 * PI);
        assert!((warp.total_integral() - target).abs() < 1e-10 * target);
        assert!(report.sec_min >= 1.0, "sec min {}", report.sec_min);
        assert!(report.volume_change > 0.0);
    }

    #[test]
    fn round_spec_needs_no_smoothing() {
        let spec = SuspensionSpec::new(3, vec![0.5, 0.5]).unwrap();
        let (warp, report) = smooth_suspension(&spec, 0.2).unwrap();
        assert!(report.volume_change < 1e-12);
        assert_eq!(warp.rescale, 1.0);
        // Identity profile: value matches t2 sin(rho/t1).
        for rho in [0.3, 0.8, 1.3] {
            assert!((warp.value(rho) - 0.5 * (rho / 0.5).sin()).abs() < 1e-14);
        }
    }

    #[test]
    fn volume_change_vanishes_with_sigma() {
        let spec = SuspensionSpec::new(3, vec![0.8, 0.25 / 0.8]).unwrap();
        let mut prev = f64::INFINITY;
        for sigma in [0.4, 0.2, 0.1, 0.05, 0.025] {
            let (_, report) = smooth_suspension(&spec, sigma).unwrap();
            assert!(report.volume_change < prev);
            prev = report.volume_change;
        }
        assert!(prev < 1e-3);
    }
}
