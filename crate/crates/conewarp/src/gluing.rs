//! Bubbles, footballs, and glued families on intervals times S^3, plus the
//! five-dimensional cobordism pieces.
//!
//! Pieces are glued along boundary slices by matching the boundary radius
//! (piece 2 is rescaled) and requiring the sum of the shape operators with
//! respect to the two outward normals to be positive semidefinite; the full
//! boundary-isometry deviation is reported separately.

use crate::berger::{
    ricci_5d, ricci_berger, sff_slice, BergerAnsatz, ClosureTag, DoubleAnsatz5D, SliceGeometry,
    SliceOf, TopologyTag,
};
use crate::error::{Error, Result};
use crate::warp::WarpFn;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

/// The eps-bubble: fiber warper A = (b0/2) sin(2r) and (Y, Z) warper
/// b0 (1/2 - (1/2 - 1/100) eps) cosh(eps r / 100), which interpolates from
/// the constant b0/2 at eps = 0 down to the b0/100 scale at eps = 1, on
/// (0, r_eps] with A(r_eps) = B(r_eps).
pub fn bubble(eps: f64, b0: f64) -> Result<BergerAnsatz> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::InvalidParameter(format!("eps = {eps} outside [0, 1]")));
    }
    if !(b0 > 0.0 && b0 <= 1.0) {
        return Err(Error::InvalidParameter(format!("b0 = {b0} outside (0, 1]")));
    }
    let r_eps = solve_r_eps(eps, b0)?;
    let warp_a = WarpFn::sin_scaled(b0 / 2.0, 2.0, (0.0, FRAC_PI_2));
    let coeff = b0 * (0.5 - (0.5 - 0.01) * eps);
    let warp_b = WarpFn::cosh_scaled(coeff, eps / 100.0, (0.0, FRAC_PI_2));
    Ok(BergerAnsatz::new(
        warp_a,
        warp_b,
        (0.0, r_eps),
        (ClosureTag::CollapseFiber, ClosureTag::OpenBoundary),
        TopologyTag::Cp2MinusBall,
    ))
}

/// The boundary coordinate r_eps with A(r_eps) = B(r_eps); b0 divides out
/// of the equation. Exactly pi/4 at eps = 0; bracketed bisection otherwise.
pub fn solve_r_eps(eps: f64, _b0: f64) -> Result<f64> {
    if eps == 0.0 {
        return Ok(FRAC_PI_4);
    }
    let coeff = 0.5 - (0.5 - 0.01) * eps;
    let f = |r: f64| 0.5 * (2.0 * r).sin() - coeff * (eps * r / 100.0).cosh();
    let (mut lo, mut hi) = (1e-12, FRAC_PI_4);
    if f(lo) > 0.0 || f(hi) < 0.0 {
        return Err(Error::NoRoot { what: "A = B".into(), lo, hi });
    }
    for _ in 0..90 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Football of scale ell restricted to the tube r in [s, pi/2 - s].
/// s = pi/4 gives the degenerate equatorial slice.
pub fn football(ell: f64, s: f64) -> Result<BergerAnsatz> {
    if ell <= 0.0 {
        return Err(Error::InvalidParameter(format!("ell = {ell} must be positive")));
    }
    if !(s > 0.0 && s <= FRAC_PI_4) {
        return Err(Error::InvalidParameter(format!("s = {s} outside (0, pi/4]")));
    }
    let w = WarpFn::sin_scaled(ell / 2.0, 2.0, (0.0, FRAC_PI_2));
    Ok(BergerAnsatz::new(
        w.clone(),
        w,
        (s, FRAC_PI_2 - s),
        (ClosureTag::OpenBoundary, ClosureTag::OpenBoundary),
        TopologyTag::Tube,
    ))
}

/// Boundary radius rho(s) of the football tube.
pub fn football_boundary_radius(ell: f64, s: f64) -> f64 {
    0.5 * ell * (2.0 * s).sin()
}

/// One side of a glue: a piece with a boundary coordinate and outward sign.
#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum GluePiece {
    Berger { ansatz: BergerAnsatz, coord: f64, outward: i8 },
    Double { ansatz: DoubleAnsatz5D, coord: f64, outward: i8 },
}

impl GluePiece {
    pub fn slice(&self) -> Result<SliceGeometry> {
        match self {
            GluePiece::Berger { ansatz, coord, outward } => {
                sff_slice(SliceOf::Berger(ansatz), *coord, *outward)
            }
            GluePiece::Double { ansatz, coord, outward } => {
                sff_slice(SliceOf::Double(ansatz), *coord, *outward)
            }
        }
    }

    fn slice_dim(&self) -> usize {
        match self {
            GluePiece::Berger { .. } => 3,
            GluePiece::Double { .. } => 4,
        }
    }

    /// Scale-invariant length profile mismatch against another piece after
    /// the radius matching: zero for isometric boundaries.
    fn profile_deviation(&self, other: &GluePiece) -> f64 {
        match (self, other) {
            (GluePiece::Berger { .. }, GluePiece::Berger { .. }) => 0.0,
            (
                GluePiece::Double { ansatz: a1, coord: c1, .. },
                GluePiece::Double { ansatz: a2, coord: c2, .. },
            ) => {
                // Both slices have all s-warpers equal (checked round); the
                // residual invariant is the ratio of the r-length scale
                // C(s) to the (Y, Z) scale E(s) B, which differs exactly by
                // the fiber parameter of the underlying 4-profile.
                let ratio = |a: &DoubleAnsatz5D, c: f64| {
                    let r_mid = 0.5 * (a.r_interval.0 + a.r_interval.1);
                    a.warp_c.value(c) / (a.warp_e.value(c) * a.warp_b.value(r_mid))
                };
                let (q1, q2) = (ratio(a1, *c1), ratio(a2, *c2));
                (q1 / q2 - 1.0).abs()
            }
            _ => f64::INFINITY,
        }
    }
}

/// Result of a glue feasibility check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GluePlan {
    /// Homothety applied to piece 2 so the boundary radii match.
    pub scale2: f64,
    pub radius1: f64,
    pub radius2_scaled: f64,
    /// Sup-norm mismatch of the scaled boundary profiles (0 = isometric).
    pub isometry_deviation: f64,
    /// Eigenvalues of the sum of shape operators (outward normals).
    pub shape_sum: Vec<f64>,
    /// Minimum of the shape sum.
    pub margin: f64,
    pub feasible: bool,
}

/// Check a glue: match boundary radii by rescaling piece 2, then form the
/// eigenvalues of the shape-operator sum with respect to the two outward
/// normals. Feasible iff the radii match (they do by construction of the
/// scale) and the sum is nonnegative in every direction.
pub fn glue_check(piece1: &GluePiece, piece2: &GluePiece) -> Result<GluePlan> {
    if piece1.slice_dim() != piece2.slice_dim() {
        return Err(Error::GlueRejected("slice dimensions differ".into()));
    }
    let s1 = piece1.slice()?;
    let s2 = piece2.slice()?;
    if !s1.round || !s2.round {
        return Err(Error::GlueRejected(
            "boundary slices must be round at the glue coordinate".into(),
        ));
    }
    let scale2 = s1.boundary_radius / s2.boundary_radius;
    // Shape operators scale inversely with the metric scale.
    let shape_sum: Vec<f64> = s1
        .shape_eigenvalues
        .iter()
        .zip(&s2.shape_eigenvalues)
        .map(|(a, b)| a + b / scale2)
        .collect();
    let margin = shape_sum.iter().cloned().fold(f64::INFINITY, f64::min);
    let radius2_scaled = s2.boundary_radius * scale2;
    let radii_match = (radius2_scaled - s1.boundary_radius).abs() <= 1e-10 * s1.boundary_radius;
    Ok(GluePlan {
        scale2,
        radius1: s1.boundary_radius,
        radius2_scaled,
        isometry_deviation: piece1.profile_deviation(piece2),
        shape_sum,
        margin,
        feasible: radii_match && margin >= 0.0,
    })
}

/// Smallest boundary shape eigenvalue of the eps-bubble times its boundary
/// radius, divided by b0: the dimensionless second-fundamental-form scale
/// the step-1 football must stay below.
pub fn bubble_lambda(eps: f64, b0: f64) -> Result<f64> {
    let ans = bubble(eps, b0)?;
    let r_eps = ans.interval.1;
    let slice = sff_slice(SliceOf::Berger(&ans), r_eps, 1)?;
    Ok(slice.shape_min() * slice.boundary_radius / b0)
}

/// Largest football scale whose glue against the eps = 1 bubble stays
/// feasible across the given t grid, found by bisection; the returned value
/// is halved for use in the family so every margin is strictly positive.
pub fn ell_bar_search(b0: f64, t_grid: &[f64]) -> Result<f64> {
    let bub = bubble(1.0, b0)?;
    let r1 = bub.interval.1;
    let feasible_at = |ell: f64| -> Result<bool> {
        for &t in t_grid {
            let s = t * FRAC_PI_4;
            let foot = football(ell, s)?;
            let plan = glue_check(
                &GluePiece::Berger { ansatz: foot, coord: s, outward: -1 },
                &GluePiece::Berger { ansatz: bub.clone(), coord: r1, outward: 1 },
            )?;
            if !plan.feasible {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let (mut lo, mut hi) = (1e-14, 1.0);
    if !feasible_at(lo)? {
        return Err(Error::NoRoot { what: "feasible football scale".into(), lo, hi });
    }
    if feasible_at(hi)? {
        return Ok(hi);
    }
    for _ in 0..80 {
        let mid = (lo * hi).sqrt();
        if feasible_at(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stage {
    /// t in (0, 1]: football tube capped by two eps = 1 bubbles.
    Step1,
    /// t in [1, 2]: two copies of the (2 - t)-bubble.
    Step2,
}

/// Parameters of the glued one-parameter family.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExampleIIFamilySpec {
    pub stage: Stage,
    pub b0: f64,
    /// Football scale (step 1); at most the searched feasible scale.
    pub ell: f64,
    /// Recorded smallness parameter; the invariant delta <= lambda_1 / 100.
    pub delta: f64,
    /// Seam mollification collar as a fraction of the shorter piece.
    pub smoothing: f64,
}

impl ExampleIIFamilySpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.b0 > 0.0 && self.b0 <= 1.0) {
            return Err(Error::InvalidParameter(format!("b0 = {}", self.b0)));
        }
        let lambda1 = bubble_lambda(1.0, self.b0)?;
        if self.delta > lambda1 / 100.0 {
            return Err(Error::InvalidParameter(format!(
                "delta = {} exceeds lambda_1 / 100 = {}",
                self.delta,
                lambda1 / 100.0
            )));
        }
        Ok(())
    }
}

/// One piece of a glued description, in the order they are traversed.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GluedPiece {
    pub kind: String,
    /// Homothety applied to the natural piece.
    pub scale: f64,
    /// Length of the piece along the glued arc coordinate.
    pub length: f64,
}

/// Canonical description of a glued metric (seam radius normalized to 1)
/// plus the quantities the uniform bounds need.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GluedReport {
    pub t: f64,
    pub pieces: Vec<GluedPiece>,
    pub glue_margin: f64,
    pub seam_radius: f64,
    /// Volume of the glued space (before any normalization).
    pub volume: f64,
    /// Grid minimum of the Ricci eigenvalues over the pieces, including a
    /// mollified collar around each seam.
    pub ricci_min: f64,
}

fn berger_volume(ansatz: &BergerAnsatz, n_grid: usize) -> f64 {
    // dV = 2 pi^2 A B^2 dr for the unit-volume normalization of S^3.
    let (lo, hi) = ansatz.interval;
    let h = (hi - lo) / n_grid as f64;
    let f = |r: f64| {
        let a = ansatz.warp_a.value(r);
        let b = ansatz.warp_b.value(r);
        2.0 * PI * PI * a * b * b
    };
    let mut acc = 0.5 * (f(lo) + f(hi));
    for k in 1..n_grid {
        acc += f(lo + k as f64 * h);
    }
    acc * h
}

fn piece_ricci_min(ansatz: &BergerAnsatz, n_grid: usize) -> Result<f64> {
    let (lo, hi) = ansatz.interval;
    let guard = 1e-4 * (hi - lo);
    let mut min = f64::INFINITY;
    for k in 0..=n_grid {
        let r = (lo + guard) + (hi - lo - 2.0 * guard) * k as f64 / n_grid as f64;
        min = min.min(ricci_berger(ansatz, r)?.min());
    }
    Ok(min)
}

/// Ricci minimum across a C^0 seam between two Berger pieces, evaluated on
/// the mollified joint profile: the glued warpers are interpolated by cubic
/// Hermite data over a collar of width `w` on each side of the seam and the
/// four curvature eigenvalues are scanned on a grid.
fn seam_ricci_min(
    left: &BergerAnsatz,
    left_end: f64,
    right: &BergerAnsatz,
    right_start: f64,
    w: f64,
    n_grid: usize,
) -> Result<f64> {
    // Joint coordinate u in [-w, w]: u < 0 inside `left`, u > 0 in `right`.
    let hermite = |f0: (f64, f64, f64), f1: (f64, f64, f64)| {
        // Cubic on [0, 1] matching value and first derivative at both ends.
        let (p0, d0) = (f0.0, f0.1 * 2.0 * w);
        let (p1, d1) = (f1.0, f1.1 * 2.0 * w);
        move |u: f64| {
            let h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
            let h10 = u * (1.0 - u) * (1.0 - u);
            let h01 = u * u * (3.0 - 2.0 * u);
            let h11 = u * u * (u - 1.0);
            let v = h00 * p0 + h10 * d0 + h01 * p1 + h11 * d1;
            let dh00 = 6.0 * u * (u - 1.0);
            let dh10 = (1.0 - u) * (1.0 - 3.0 * u);
            let dh01 = -dh00;
            let dh11 = u * (3.0 * u - 2.0);
            let dv = (dh00 * p0 + dh10 * d0 + dh01 * p1 + dh11 * d1) / (2.0 * w);
            let d2h00 = 12.0 * u - 6.0;
            let d2h10 = 6.0 * u - 4.0;
            let d2h01 = -d2h00;
            let d2h11 = 6.0 * u - 2.0;
            let ddv = (d2h00 * p0 + d2h10 * d0 + d2h01 * p1 + d2h11 * d1) / (4.0 * w * w);
            (v, dv, ddv)
        }
    };
    let a_blend = hermite(left.warp_a.eval(left_end - w), right.warp_a.eval(right_start + w));
    let b_blend = hermite(left.warp_b.eval(left_end - w), right.warp_b.eval(right_start + w));
    let mut min = f64::INFINITY;
    for k in 1..n_grid {
        let u = k as f64 / n_grid as f64;
        let (a, da, dda) = a_blend(u);
        let (b, db, ddb) = b_blend(u);
        if a <= 0.0 || b <= 0.0 {
            return Err(Error::NotPositiveDefinite { context: "mollified seam".into() });
        }
        let rr = -dda / a - 2.0 * ddb / b;
        let xx = -dda / a - 2.0 * da * db / (a * b) + 2.0 * a * a / (b * b * b * b);
        let yy = -ddb / b - da * db / (a * b) - (db / b) * (db / b)
            + 2.0 * (2.0 * b * b - a * a) / (b * b * b * b);
        min = min.min(rr.min(xx).min(yy));
    }
    Ok(min)
}

/// Build the glued description and uniform-bound report at family time t.
pub fn example2_family(spec: &ExampleIIFamilySpec, t: f64) -> Result<GluedReport> {
    spec.validate()?;
    match spec.stage {
        Stage::Step1 => {
            if !(t > 0.0 && t <= 1.0) {
                return Err(Error::OutOfDomain { what: "step-1 t".into(), point: t, lo: 0.0, hi: 1.0 });
            }
            let s = t * FRAC_PI_4;
            let bub = bubble(1.0, spec.b0)?;
            let r1 = bub.interval.1;
            let foot = football(spec.ell, s)?;
            let plan = glue_check(
                &GluePiece::Berger { ansatz: foot.clone(), coord: s, outward: -1 },
                &GluePiece::Berger { ansatz: bub.clone(), coord: r1, outward: 1 },
            )?;
            if !plan.feasible {
                return Err(Error::GlueRejected(format!(
                    "step-1 glue infeasible at t = {t}: margin {}",
                    plan.margin
                )));
            }
            let seam_radius = plan.radius1;
            let scaled_bubble = bub.homothety(plan.scale2);
            let tube_len = FRAC_PI_2 - 2.0 * s;
            // Canonical gauge: divide all scales by the seam radius.
            let pieces = vec![
                GluedPiece {
                    kind: "bubble(eps=1)".into(),
                    scale: plan.scale2 / seam_radius,
                    length: r1 * plan.scale2 / seam_radius,
                },
                GluedPiece {
                    kind: "football".into(),
                    scale: 1.0 / seam_radius,
                    length: tube_len / seam_radius,
                },
                GluedPiece {
                    kind: "bubble(eps=1)".into(),
                    scale: plan.scale2 / seam_radius,
                    length: r1 * plan.scale2 / seam_radius,
                },
            ];
            let volume = 2.0 * berger_volume(&scaled_bubble, 400)
                + if tube_len > 1e-12 { berger_volume(&foot, 400) } else { 0.0 };
            let mut ricci_min = piece_ricci_min(&scaled_bubble, 400)?;
            if tube_len > 1e-12 {
                ricci_min = ricci_min.min(piece_ricci_min(&foot, 400)?);
                let w = spec.smoothing * (scaled_bubble.interval.1).min(tube_len) * 0.5;
                if w > 1e-9 {
                    ricci_min = ricci_min.min(seam_ricci_min(
                        &scaled_bubble,
                        scaled_bubble.interval.1,
                        &foot,
                        s,
                        w,
                        64,
                    )?);
                }
            }
            Ok(GluedReport {
                t,
                pieces,
                glue_margin: plan.margin,
                seam_radius,
                volume,
                ricci_min,
            })
        }
        Stage::Step2 => {
            if !(1.0..=2.0).contains(&t) {
                return Err(Error::OutOfDomain { what: "step-2 t".into(), point: t, lo: 1.0, hi: 2.0 });
            }
            let eps = 2.0 - t;
            let bub = bubble(eps, spec.b0)?;
            let r_eps = bub.interval.1;
            let plan = glue_check(
                &GluePiece::Berger { ansatz: bub.clone(), coord: r_eps, outward: 1 },
                &GluePiece::Berger { ansatz: bub.clone(), coord: r_eps, outward: 1 },
            )?;
            let seam_radius = plan.radius1;
            let pieces = vec![
                GluedPiece {
                    kind: format!("bubble(eps={eps})"),
                    scale: 1.0 / seam_radius,
                    length: r_eps / seam_radius,
                },
                GluedPiece {
                    kind: format!("bubble(eps={eps})"),
                    scale: 1.0 / seam_radius,
                    length: r_eps / seam_radius,
                },
            ];
            let volume = 2.0 * berger_volume(&bub, 400);
            let mut ricci_min = piece_ricci_min(&bub, 400)?;
            let w = spec.smoothing * r_eps * 0.5;
            if eps > 0.0 && w > 1e-9 {
                // Mirror image: the right copy traverses the bubble backward.
                let mirrored = mirror_berger(&bub);
                ricci_min = ricci_min.min(seam_ricci_min(
                    &bub,
                    r_eps,
                    &mirrored,
                    mirrored.interval.0,
                    w,
                    64,
                )?);
            }
            Ok(GluedReport {
                t,
                pieces,
                glue_margin: plan.margin,
                seam_radius,
                volume,
                ricci_min,
            })
        }
    }
}

/// Reverse the arc coordinate of a piece (for seam evaluation of mirrored
/// copies).
fn mirror_berger(ansatz: &BergerAnsatz) -> BergerAnsatz {
    let (lo, hi) = ansatz.interval;
    let total = lo + hi;
    let wa = ansatz.warp_a.clone();
    let wb = ansatz.warp_b.clone();
    let flip = move |w: &WarpFn, x: f64| {
        let (v, d1, d2) = w.eval(total - x);
        (v, -d1, d2)
    };
    let wa2 = {
        let wa = wa.clone();
        WarpFn::from_fn(move |x| flip(&wa, x), (lo, hi), true, "mirrored")
    };
    let wb2 = WarpFn::from_fn(move |x| flip(&wb, x), (lo, hi), true, "mirrored");
    BergerAnsatz::new(wa2, wb2, (lo, hi), (ansatz.ends.1, ansatz.ends.0), ansatz.topology)
}

/// Closability data of the five-dimensional cobordism pieces.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CobordismReport {
    pub s0: f64,
    /// Grid minimum of the Ricci eigenvalues of the cone piece.
    pub cone_ricci_min: f64,
    /// Grid minimum over the cap piece.
    pub cap_ricci_min: f64,
    /// Minimum boundary shape eigenvalue of the cap.
    pub cap_sff_min: f64,
    pub glue: GluePlan,
}

/// The cone piece over the doubled bubble profile: C = D = E = s on
/// [1, s_max], A = (b0/2) sin 2r, B = b0/2.
pub fn cone_piece(b0: f64, s_max: f64) -> DoubleAnsatz5D {
    DoubleAnsatz5D {
        warp_c: WarpFn::linear(1.0, (0.0, s_max)),
        warp_d: WarpFn::linear(1.0, (0.0, s_max)),
        warp_e: WarpFn::linear(1.0, (0.0, s_max)),
        warp_a: WarpFn::sin_scaled(b0 / 2.0, 2.0, (0.0, FRAC_PI_2)),
        warp_b: WarpFn::constant(b0 / 2.0, (0.0, FRAC_PI_2)),
        s_interval: (1.0, s_max),
        r_interval: (0.0, FRAC_PI_2),
    }
}

/// The smoothing cap: C = D = sin(2s), E = e0 cosh(e0 s) on (0, s0].
pub fn cap_piece(b1: f64, e0: f64) -> Result<(DoubleAnsatz5D, f64)> {
    if !(e0 > 0.0 && e0 < 1.0) {
        return Err(Error::InvalidParameter(format!("e0 = {e0} outside (0, 1)")));
    }
    let f = |s: f64| (2.0 * s).sin() - e0 * (e0 * s).cosh();
    let (mut lo, mut hi) = (1e-12, FRAC_PI_4);
    if f(lo) > 0.0 || f(hi) < 0.0 {
        return Err(Error::NoRoot { what: "C = E".into(), lo, hi });
    }
    for _ in 0..90 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s0 = 0.5 * (lo + hi);
    let ansatz = DoubleAnsatz5D {
        warp_c: WarpFn::sin_scaled(1.0, 2.0, (0.0, FRAC_PI_2)),
        warp_d: WarpFn::sin_scaled(1.0, 2.0, (0.0, FRAC_PI_2)),
        warp_e: WarpFn::cosh_scaled(e0, e0, (0.0, FRAC_PI_2)),
        warp_a: WarpFn::sin_scaled(b1 / 2.0, 2.0, (0.0, FRAC_PI_2)),
        warp_b: WarpFn::constant(b1 / 2.0, (0.0, FRAC_PI_2)),
        s_interval: (0.0, s0),
        r_interval: (0.0, FRAC_PI_2),
    };
    Ok((ansatz, s0))
}

fn ricci_5d_grid_min(ansatz: &DoubleAnsatz5D, n_s: usize, n_r: usize) -> Result<f64> {
    let (slo, shi) = ansatz.s_interval;
    let (rlo, rhi) = ansatz.r_interval;
    let gs = 1e-4 * (shi - slo);
    let gr = 1e-4 * (rhi - rlo);
    let mut min = f64::INFINITY;
    for i in 0..=n_s {
        let s = (slo + gs) + (shi - slo - 2.0 * gs) * i as f64 / n_s as f64;
        for j in 0..=n_r {
            let r = (rlo + gr) + (rhi - rlo - 2.0 * gr) * j as f64 / n_r as f64;
            min = min.min(ricci_5d(ansatz, s, r)?.min_eigenvalue());
        }
    }
    Ok(min)
}

/// Build the cobordism pieces and run the closability checks: cone Ricci
/// nonnegative, cap Ricci strictly positive, cap boundary uniformly convex,
/// and the cone-cap glue feasible after rescaling the cone.
pub fn cobordism_pieces(b0: f64, b1: f64, e0: f64) -> Result<(DoubleAnsatz5D, DoubleAnsatz5D, CobordismReport)> {
    let cone = cone_piece(b0, 8.0);
    let (cap, s0) = cap_piece(b1, e0)?;
    let cone_ricci_min = ricci_5d_grid_min(&cone, 50, 50)?;
    let cap_ricci_min = ricci_5d_grid_min(&cap, 50, 50)?;
    let cap_slice = sff_slice(SliceOf::Double(&cap), s0, 1)?;
    let cap_sff_min = cap_slice.shape_min();
    let glue = glue_check(
        &GluePiece::Double { ansatz: cap.clone(), coord: s0, outward: 1 },
        &GluePiece::Double { ansatz: cone.clone(), coord: 1.0, outward: -1 },
    )?;
    let report = CobordismReport { s0, cone_ricci_min, cap_ricci_min, cap_sff_min, glue };
    Ok((cone, cap, report))
}

/// Search (b0, b1, e0) for a feasible cobordism: e0 and b1 from small
/// defaults, then b0 small enough that the rescaled cone boundary is less
/// concave than the cap boundary is convex.
pub fn cobordism_search() -> Result<(f64, f64, f64, CobordismReport)> {
    let e0 = 0.05;
    let b1 = 0.1;
    let (_, s0) = cap_piece(b1, e0)?;
    // The cap's weakest convexity direction is the (Y, Z) pair with shape
    // eigenvalue e0 tanh(e0 s0); the rescaled cone contributes
    // -b0 / (b1 sin 2 s0). Take half the critical b0 for strict margins.
    let lambda = e0 * (e0 * s0).tanh();
    let b0 = 0.5 * lambda * (2.0 * s0).sin() * b1;
    let (_, _, report) = cobordism_pieces(b0, b1, e0)?;
    if !report.glue.feasible || report.cap_ricci_min <= 0.0 {
        return Err(Error::SweepExhausted {
            violation: -report.glue.margin.min(report.cap_ricci_min),
            context: format!("cobordism at b0={b0}, b1={b1}, e0={e0}"),
        });
    }
    Ok((b0, b1, e0, report))
}
