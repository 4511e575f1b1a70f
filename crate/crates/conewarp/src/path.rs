//! Recurrent parameter paths, the closability modification, and rescaled
//! tangent-cone snapshots.
//!
//! The cone construction composes a family over a parameter manifold with a
//! curve c(t) that is even in t and visits every neighborhood at arbitrarily
//! late times, so that c(-t_a) = c(t_a) lands in any prescribed box along a
//! recorded schedule. Rescaling the cone by a scale sequence r_a with
//! f(r_a) hitting the schedule reproduces each cross-section in the closure
//! as a tangent cone.

use crate::cone::CrossSectionFamily;
use crate::error::{Error, Result};
use crate::lemma::{ConeMetric, LogRadius};
use crate::warp::smootherstep;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// A family parametrized by a point of the parameter manifold (a single
/// real coordinate here: every family in this crate has a one-dimensional
/// parameter space, a curve segment inside the volume-constrained manifold).
pub trait OmegaFamily: Send + Sync {
    fn dim(&self) -> usize;
    /// Admissible coordinate range of the parameter manifold.
    fn value_range(&self) -> (f64, f64);
    fn volume_normalized(&self) -> bool;
    fn metric_at(&self, u: f64, x: &[f64]) -> DMatrix<f64>;
    fn intrinsic_ricci_at(&self, u: f64, x: &[f64]) -> DMatrix<f64>;
    fn chart_box(&self) -> Vec<(f64, f64)>;
}

/// One scheduled visit of the recurrent path.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Waypoint {
    pub time: f64,
    pub value: f64,
    /// The visit certifies entry into the box of this radius around `value`.
    pub box_radius: f64,
}

/// Piecewise-smooth even curve through a dense visit schedule.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PathSpec {
    pub domain: (f64, f64),
    pub speed_bound: f64,
    waypoints: Vec<Waypoint>,
}

impl PathSpec {
    pub fn waypoints(&self) -> &[Waypoint] {
        &self.waypoints
    }

    /// Position of the one-sided curve at u >= 0 (smootherstep segments
    /// between consecutive waypoints, constant after the last).
    fn gamma(&self, u: f64) -> (f64, f64, f64) {
        let w = &self.waypoints;
        if u <= w[0].time {
            return (w[0].value, 0.0, 0.0);
        }
        match w.binary_search_by(|p| p.time.partial_cmp(&u).unwrap()) {
            Ok(i) => (w[i].value, 0.0, 0.0),
            Err(i) => {
                if i >= w.len() {
                    return (w[w.len() - 1].value, 0.0, 0.0);
                }
                let (a, b) = (&w[i - 1], &w[i]);
                let dt = b.time - a.time;
                let s = (u - a.time) / dt;
                let (sv, sd1, sd2) = smootherstep(s);
                let dv = b.value - a.value;
                (a.value + dv * sv, dv * sd1 / dt, dv * sd2 / (dt * dt))
            }
        }
    }

    /// c(t) = gamma(|t|): even, so c(-t_a) = c(t_a) for every marker.
    pub fn value(&self, t: f64) -> f64 {
        self.gamma(t.abs()).0
    }

    /// (c, c', c'') at t; odd reflection of the first derivative.
    pub fn derivs(&self, t: f64) -> (f64, f64, f64) {
        let (v, d1, d2) = self.gamma(t.abs());
        if t < 0.0 {
            (v, -d1, d2)
        } else {
            (v, d1, d2)
        }
    }

    /// Maximum absolute curve speed (attained inside some segment).
    pub fn max_speed(&self) -> f64 {
        self.waypoints
            .windows(2)
            .map(|w| 1.875 * (w[1].value - w[0].value).abs() / (w[1].time - w[0].time))
            .fold(0.0, f64::max)
    }

    /// Replay the stored schedule: every marker must satisfy
    /// c(-t_a) = c(t_a) within `tol` and land inside its box.
    pub fn verify_schedule(&self, tol: f64) -> Result<()> {
        for (k, wp) in self.waypoints.iter().enumerate() {
            let plus = self.value(wp.time);
            let minus = self.value(-wp.time);
            if (plus - minus).abs() > tol {
                return Err(Error::InvalidParameter(format!(
                    "symmetry broken at marker {k}: {plus} vs {minus}"
                )));
            }
            if (plus - wp.value).abs() > wp.box_radius + tol {
                return Err(Error::InvalidParameter(format!(
                    "marker {k} missed its box: c = {plus}, target {} +- {}",
                    wp.value, wp.box_radius
                )));
            }
        }
        Ok(())
    }

    /// Earliest marker time > `after` whose box around `value` has radius at
    /// most `radius`.
    pub fn visit_after(&self, value: f64, radius: f64, after: f64) -> Option<&Waypoint> {
        self.waypoints.iter().find(|wp| {
            wp.time > after && (wp.value - value).abs() + wp.box_radius <= radius
        })
    }
}

/// Build a recurrent path through `schedule` (target value, box radius)
/// pairs, allocating segment times so the curve speed stays below
/// `speed_bound`.
pub fn recurrent_path(
    domain: (f64, f64),
    schedule: &[(f64, f64)],
    speed_bound: f64,
) -> Result<PathSpec> {
    if schedule.is_empty() {
        return Err(Error::InvalidParameter("empty visit schedule".into()));
    }
    if speed_bound <= 0.0 {
        return Err(Error::InvalidParameter("speed bound must be positive".into()));
    }
    for &(v, _) in schedule {
        if v < domain.0 || v > domain.1 {
            return Err(Error::OutOfDomain {
                what: "schedule value".into(),
                point: v,
                lo: domain.0,
                hi: domain.1,
            });
        }
    }
    let mut waypoints = Vec::with_capacity(schedule.len());
    let mut t = 0.0;
    let mut prev = schedule[0].0;
    waypoints.push(Waypoint { time: 0.0, value: prev, box_radius: schedule[0].1 });
    for &(v, r) in &schedule[1..] {
        // Peak smootherstep slope is 1.875 * |dv| / dt.
        let dt = (1.875 * (v - prev).abs() / speed_bound).max(0.25);
        t += dt;
        waypoints.push(Waypoint { time: t, value: v, box_radius: r });
        prev = v;
    }
    Ok(PathSpec { domain, speed_bound, waypoints })
}

/// Dyadic visit schedule: for each m <= m_max visit the centers of the m
/// uniform boxes of the domain, so every 1/m-neighborhood of every point is
/// entered at some recorded time beyond any horizon (cycles repeat).
pub fn dyadic_schedule(domain: (f64, f64), m_max: usize, cycles: usize) -> Vec<(f64, f64)> {
    let width = domain.1 - domain.0;
    let mut out = Vec::new();
    for _ in 0..cycles {
        for m in 1..=m_max {
            for j in 0..m {
                let center = domain.0 + width * (2 * j + 1) as f64 / (2 * m) as f64;
                out.push((center, width / (2 * m) as f64));
            }
        }
    }
    out
}

/// The closability modification of a path: equal to the base path for
/// t >= -alpha, frozen at s0 for t <= -2 alpha, smooth blend between.
#[derive(Clone, Debug)]
pub struct ClosabilityCurve {
    pub base: Arc<PathSpec>,
    pub alpha: f64,
    pub s0: f64,
}

impl ClosabilityCurve {
    pub fn new(base: Arc<PathSpec>, alpha: f64, s0: f64) -> Result<Self> {
        if alpha <= 1.0 {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} must exceed 1")));
        }
        if s0 < base.domain.0 || s0 > base.domain.1 {
            return Err(Error::OutOfDomain {
                what: "closable parameter".into(),
                point: s0,
                lo: base.domain.0,
                hi: base.domain.1,
            });
        }
        Ok(ClosabilityCurve { base, alpha, s0 })
    }

    pub fn value(&self, t: f64) -> f64 {
        if t >= -self.alpha {
            self.base.value(t)
        } else if t <= -2.0 * self.alpha {
            self.s0
        } else {
            let chi = smootherstep((t + 2.0 * self.alpha) / self.alpha).0;
            (1.0 - chi) * self.s0 + chi * self.base.value(t)
        }
    }
}

/// A cross-section family obtained by composing a parameter-manifold family
/// with a curve, optionally scaling the metric by a constant factor.
pub struct ComposedFamily {
    pub omega: Arc<dyn OmegaFamily>,
    curve: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub metric_scale: f64,
}

impl ComposedFamily {
    pub fn from_path(omega: Arc<dyn OmegaFamily>, path: Arc<PathSpec>) -> Self {
        ComposedFamily {
            omega,
            curve: Arc::new(move |t| path.value(t)),
            metric_scale: 1.0,
        }
    }

    pub fn from_closability(omega: Arc<dyn OmegaFamily>, curve: ClosabilityCurve) -> Self {
        let scale = 1.0 - 1.0 / curve.alpha;
        ComposedFamily {
            omega,
            curve: Arc::new(move |t| curve.value(t)),
            metric_scale: scale,
        }
    }

    pub fn curve_value(&self, t: f64) -> f64 {
        (self.curve)(t)
    }
}

impl CrossSectionFamily for ComposedFamily {
    fn dim(&self) -> usize {
        self.omega.dim()
    }
    fn param_range(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }
    fn volume_normalized(&self) -> bool {
        self.omega.volume_normalized()
    }
    fn metric(&self, s: f64, x: &[f64]) -> DMatrix<f64> {
        self.omega.metric_at((self.curve)(s), x) * self.metric_scale
    }
    fn intrinsic_ricci(&self, s: f64, x: &[f64]) -> DMatrix<f64> {
        // Ricci as a (0,2)-tensor is invariant under constant scaling.
        self.omega.intrinsic_ricci_at((self.curve)(s), x)
    }
    fn chart_box(&self) -> Vec<(f64, f64)> {
        self.omega.chart_box()
    }
}

/// Cross-section snapshot of the rescaled metric r_a^-2 g at unit scale:
/// parameter c(f(r_a)) and warp scale h(r_a).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ConeSnapshot {
    pub l3: f64,
    /// Family parameter s = f(r_a).
    pub s_param: f64,
    /// Warp factor h(r_a); the snapshot cross-section metric is
    /// (h_scale)^2 g(s_param).
    pub h_scale: f64,
}

/// Snapshot of the tangent-cone data at scale r_a.
pub fn tangent_cone_at_scale(cone: &ConeMetric, r_a: LogRadius) -> ConeSnapshot {
    let prof = cone.radial(r_a);
    ConeSnapshot { l3: r_a.l3(), s_param: prof.f_val, h_scale: prof.h }
}

/// Deviation of the rescaled metric from the frozen cone at scale r_a over
/// a radius window: sup |h(r_a r) - h(r_a)|/h(r_a) plus the sup-norm
/// coordinate distance between g(f(r_a r)) and g(f(r_a)) at sampled points.
pub fn cone_closeness(
    cone: &ConeMetric,
    r_a: LogRadius,
    window: (f64, f64),
    n_window: usize,
    points: &[Vec<f64>],
) -> Result<f64> {
    if window.0 <= 0.0 || window.1 < window.0 {
        return Err(Error::InvalidParameter(format!("bad window {window:?}")));
    }
    let base = cone.radial(r_a);
    let mut dev: f64 = 0.0;
    for k in 0..n_window.max(1) {
        let t = if n_window <= 1 { 0.0 } else { k as f64 / (n_window - 1) as f64 };
        let factor = window.0 + t * (window.1 - window.0);
        let lr = r_a.scaled(factor)?;
        let prof = cone.radial(lr);
        dev = dev.max((prof.h - base.h).abs() / base.h);
        for x in points {
            let ga = cone.family.metric(prof.f_val, x);
            let gb = cone.family.metric(base.f_val, x);
            dev = dev.max((ga - gb).amax());
        }
    }
    Ok(dev)
}
