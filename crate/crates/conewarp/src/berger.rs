//! Warped metrics on intervals times S^3 and their Ricci curvature.
//!
//! Two ansätze: dr^2 + A(r)^2 dX^2 + B(r)^2 (dY^2 + dZ^2) on I x S^3, and
//! ds^2 + C(s)^2 dr^2 + D(s)^2 A(r)^2 dX^2 + E(s)^2 B(r)^2 (dY^2 + dZ^2) on
//! I x I' x S^3, where X, Y, Z is the left-invariant frame with [X, Y] = 2Z.
//! All curvature values are per unit vector (eigenvalues of the Ricci
//! endomorphism).

use crate::error::{Error, Result};
use crate::warp::WarpFn;
use serde::{Deserialize, Serialize};

/// Guard band around collapse endpoints, relative to the interval length;
/// the frame is singular there.
pub const COLLAPSE_GUARD: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClosureTag {
    /// A(r*) = 0 with B(r*) > 0: the Hopf fiber collapses over a 2-sphere.
    CollapseFiber,
    /// The piece stops here with a boundary slice.
    OpenBoundary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TopologyTag {
    Cp2MinusBall,
    Cp2ConnSumCp2Bar,
    Sphere4,
    Tube,
}

#[derive(Clone, Debug)]
pub struct BergerAnsatz {
    pub warp_a: WarpFn,
    pub warp_b: WarpFn,
    pub interval: (f64, f64),
    pub ends: (ClosureTag, ClosureTag),
    pub topology: TopologyTag,
}

/// Per-unit-vector Ricci eigenvalues of the Berger ansatz; yy and zz agree
/// identically and are both reported.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BergerRicci {
    pub rr: f64,
    pub xx: f64,
    pub yy: f64,
    pub zz: f64,
}

impl BergerRicci {
    pub fn min(&self) -> f64 {
        self.rr.min(self.xx).min(self.yy).min(self.zz)
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.rr, self.xx, self.yy, self.zz]
    }
}

impl BergerAnsatz {
    pub fn new(
        warp_a: WarpFn,
        warp_b: WarpFn,
        interval: (f64, f64),
        ends: (ClosureTag, ClosureTag),
        topology: TopologyTag,
    ) -> Self {
        BergerAnsatz { warp_a, warp_b, interval, ends, topology }
    }

    /// Homothety by `lambda`: metric scaled by lambda^2, interval stretched.
    pub fn homothety(&self, lambda: f64) -> Self {
        BergerAnsatz {
            warp_a: self.warp_a.homothety(lambda),
            warp_b: self.warp_b.homothety(lambda),
            interval: (self.interval.0 * lambda, self.interval.1 * lambda),
            ends: self.ends,
            topology: self.topology,
        }
    }

    pub fn check_interior(&self, r: f64) -> Result<()> {
        let (lo, hi) = self.interval;
        if r <= lo || r >= hi {
            return Err(Error::OutOfDomain { what: "berger r".into(), point: r, lo, hi });
        }
        let guard = COLLAPSE_GUARD * (hi - lo);
        if self.ends.0 == ClosureTag::CollapseFiber && r < lo + guard {
            return Err(Error::InadmissibleRadius(format!("r = {r} inside collapse guard")));
        }
        if self.ends.1 == ClosureTag::CollapseFiber && r > hi - guard {
            return Err(Error::InadmissibleRadius(format!("r = {r} inside collapse guard")));
        }
        Ok(())
    }

    /// Structural closure data at one end: (normalized fiber slope, B value,
    /// B'). The collapsing circle closes smoothly exactly when the normalized
    /// slope is 2, B > 0 and B' = 0; the normalization measures the slope in
    /// units where the collapsing fiber has period pi.
    pub fn closure_report(&self, end: usize) -> ClosureReport {
        let r = if end == 0 { self.interval.0 } else { self.interval.1 };
        let (a, da, _) = self.warp_a.eval(r);
        let (b, db, _) = self.warp_b.eval(r);
        let normalized_slope = 2.0 * da.abs();
        ClosureReport {
            tag: if end == 0 { self.ends.0 } else { self.ends.1 },
            a_value: a,
            normalized_slope,
            b_value: b,
            b_slope: db,
            smooth: (normalized_slope - 2.0).abs() < 1e-8 && b > 0.0 && db.abs() < 1e-8,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ClosureReport {
    pub tag: ClosureTag,
    pub a_value: f64,
    /// 2 |A'(r*)|: equals 2 exactly for a smooth closure of the Hopf fiber.
    pub normalized_slope: f64,
    pub b_value: f64,
    pub b_slope: f64,
    pub smooth: bool,
}

/// Ricci eigenvalues of dr^2 + A^2 dX^2 + B^2 (dY^2 + dZ^2):
///
///   Ric(r,r)          = -A''/A - 2 B''/B
///   Ric(X,X)/|X|^2    = -A''/A - 2 A'B'/(AB) + 2 A^2/B^4
///   Ric(Y,Y)/|Y|^2    = -B''/B - A'B'/(AB) - (B'/B)^2 + 2 (2B^2 - A^2)/B^4
///
/// with the Z value equal to the Y value.
pub fn ricci_berger(ansatz: &BergerAnsatz, r: f64) -> Result<BergerRicci> {
    ansatz.check_interior(r)?;
    let (a, da, dda) = ansatz.warp_a.eval(r);
    let (b, db, ddb) = ansatz.warp_b.eval(r);
    if a <= 0.0 || b <= 0.0 {
        return Err(Error::NotPositiveDefinite { context: format!("warper at r = {r}") });
    }
    let rr = -dda / a - 2.0 * ddb / b;
    let xx = -dda / a - 2.0 * da * db / (a * b) + 2.0 * a * a / (b * b * b * b);
    let yy = -ddb / b - da * db / (a * b) - (db / b) * (db / b)
        + 2.0 * (2.0 * b * b - a * a) / (b * b * b * b);
    Ok(BergerRicci { rr, xx, yy, zz: yy })
}

/// Serializable description of an ansatz: kind plus warper parameters.
/// Closure tags and intervals follow from the kind; `interval` restricts
/// the r-range when given.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum AnsatzRecord {
    /// A = B = (ell/2) sin 2r on [s, pi/2 - s].
    Football { ell: f64, s: f64 },
    /// A = (b0/2) sin 2r with the interpolating cosh fiber warper.
    Bubble { eps: f64, b0: f64 },
    /// A = amp (b0/2) sin 2r, B = b0/2 constant.
    ConstantFiber {
        b0: f64,
        amp: f64,
        #[serde(default)]
        interval: Option<(f64, f64)>,
    },
    /// C = D = E = s over the doubled b0-profile.
    ConePiece { b0: f64, s_max: f64 },
    /// C = D = sin 2s, E = e0 cosh(e0 s) over the b1-profile.
    CapPiece { b1: f64, e0: f64 },
}

impl AnsatzRecord {
    pub fn build_berger(&self) -> Result<BergerAnsatz> {
        match *self {
            AnsatzRecord::Football { ell, s } => crate::gluing::football(ell, s),
            AnsatzRecord::Bubble { eps, b0 } => crate::gluing::bubble(eps, b0),
            AnsatzRecord::ConstantFiber { b0, amp, interval } => {
                let iv = interval.unwrap_or((0.0, std::f64::consts::FRAC_PI_2));
                Ok(BergerAnsatz::new(
                    crate::warp::WarpFn::sin_scaled(amp * b0 / 2.0, 2.0, (0.0, std::f64::consts::FRAC_PI_2)),
                    crate::warp::WarpFn::constant(b0 / 2.0, (0.0, std::f64::consts::FRAC_PI_2)),
                    iv,
                    (ClosureTag::CollapseFiber, ClosureTag::CollapseFiber),
                    TopologyTag::Cp2ConnSumCp2Bar,
                ))
            }
            _ => Err(Error::InvalidParameter(format!("{self:?} is a 5-d record"))),
        }
    }

    pub fn build_5d(&self) -> Result<DoubleAnsatz5D> {
        match *self {
            AnsatzRecord::ConePiece { b0, s_max } => Ok(crate::gluing::cone_piece(b0, s_max)),
            AnsatzRecord::CapPiece { b1, e0 } => Ok(crate::gluing::cap_piece(b1, e0)?.0),
            _ => Err(Error::InvalidParameter(format!("{self:?} is a 4-d record"))),
        }
    }

    pub fn to_text(&self) -> String {
        serde_json::to_string_pretty(self).expect("records serialize")
    }

    pub fn from_text(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }
}

/// Coordinate Ricci tensor of a Berger ansatz at an Euler-angle chart point
/// (r, psi, theta, phi), assembled from the per-unit eigenvalues the same
/// way the chart assembles the metric. For oracle comparisons.
pub fn berger_ricci_coords(ansatz: &BergerAnsatz, x: &[f64]) -> Result<nalgebra::DMatrix<f64>> {
    let ric = ricci_berger(ansatz, x[0])?;
    let a = ansatz.warp_a.value(x[0]);
    let b = ansatz.warp_b.value(x[0]);
    let blk = crate::chart::berger_s3_block(ric.xx * a * a, ric.yy * b * b, x[2]);
    let mut out = nalgebra::DMatrix::zeros(4, 4);
    out[(0, 0)] = ric.rr;
    for i in 0..3 {
        for j in 0..3 {
            out[(i + 1, j + 1)] = blk[i][j];
        }
    }
    Ok(out)
}

/// Coordinate Ricci tensor of the 5-d ansatz at (s, r, psi, theta, phi).
pub fn five_d_ricci_coords(ansatz: &DoubleAnsatz5D, x: &[f64]) -> Result<nalgebra::DMatrix<f64>> {
    let ric = ricci_5d(ansatz, x[0], x[1])?;
    let c = ansatz.warp_c.value(x[0]);
    let d = ansatz.warp_d.value(x[0]);
    let e = ansatz.warp_e.value(x[0]);
    let a = ansatz.warp_a.value(x[1]);
    let b = ansatz.warp_b.value(x[1]);
    let blk = crate::chart::berger_s3_block(
        ric.xx * d * d * a * a,
        ric.yy * e * e * b * b,
        x[3],
    );
    let mut out = nalgebra::DMatrix::zeros(5, 5);
    out[(0, 0)] = ric.ss;
    out[(1, 1)] = ric.rr * c * c;
    out[(0, 1)] = ric.sr * c;
    out[(1, 0)] = ric.sr * c;
    for i in 0..3 {
        for j in 0..3 {
            out[(i + 2, j + 2)] = blk[i][j];
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct DoubleAnsatz5D {
    pub warp_c: WarpFn,
    pub warp_d: WarpFn,
    pub warp_e: WarpFn,
    pub warp_a: WarpFn,
    pub warp_b: WarpFn,
    pub s_interval: (f64, f64),
    pub r_interval: (f64, f64),
}

/// Per-unit-vector Ricci components of the 5-d ansatz, including the mixed
/// (s, r) term; all other components vanish by construction. The mixed
/// value is Ric(s^, r^) for unit vectors (the raw coordinate component
/// divided by C).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiveDRicci {
    pub ss: f64,
    pub sr: f64,
    pub rr: f64,
    pub xx: f64,
    pub yy: f64,
    pub zz: f64,
}

impl FiveDRicci {
    /// Minimum eigenvalue of the Ricci endomorphism: the (s, r) block is
    /// [[ss, sr], [sr, rr]] in an orthonormal frame, the rest is diagonal.
    pub fn min_eigenvalue(&self) -> f64 {
        let tr = self.ss + self.rr;
        let det = self.ss * self.rr - self.sr * self.sr;
        let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
        let block_min = tr / 2.0 - disc;
        block_min.min(self.xx).min(self.yy).min(self.zz)
    }
}

impl DoubleAnsatz5D {
    pub fn check_interior(&self, s: f64, r: f64) -> Result<()> {
        let (slo, shi) = self.s_interval;
        let (rlo, rhi) = self.r_interval;
        if s <= slo || s >= shi {
            return Err(Error::OutOfDomain { what: "5d s".into(), point: s, lo: slo, hi: shi });
        }
        if r <= rlo || r >= rhi {
            return Err(Error::OutOfDomain { what: "5d r".into(), point: r, lo: rlo, hi: rhi });
        }
        Ok(())
    }

    pub fn homothety(&self, lambda: f64) -> Self {
        DoubleAnsatz5D {
            warp_c: self.warp_c.homothety(lambda),
            warp_d: self.warp_d.homothety(lambda),
            warp_e: self.warp_e.homothety(lambda),
            // A, B are consumed through C D A, E B; the r-direction scale
            // lives in C. Scaling all five warpers would square the factor,
            // so A, B keep their shape and only the s-side warpers scale.
            warp_a: self.warp_a.clone(),
            warp_b: self.warp_b.clone(),
            s_interval: (self.s_interval.0 * lambda, self.s_interval.1 * lambda),
            r_interval: self.r_interval,
        }
    }
}

/// Ricci components of
/// ds^2 + C^2 dr^2 + D^2 A^2 dX^2 + E^2 B^2 (dY^2 + dZ^2),
/// dots are s-derivatives, primes r-derivatives.
pub fn ricci_5d(ansatz: &DoubleAnsatz5D, s: f64, r: f64) -> Result<FiveDRicci> {
    ansatz.check_interior(s, r)?;
    let (c, dc, ddc) = ansatz.warp_c.eval(s);
    let (d, dd, ddd) = ansatz.warp_d.eval(s);
    let (e, de, dde) = ansatz.warp_e.eval(s);
    let (a, da, dda) = ansatz.warp_a.eval(r);
    let (b, db, ddb) = ansatz.warp_b.eval(r);
    for (v, name) in [(c, "C"), (d, "D"), (e, "E"), (a, "A"), (b, "B")] {
        if v <= 0.0 {
            return Err(Error::NotPositiveDefinite { context: format!("{name} at (s,r)=({s},{r})") });
        }
    }
    let c2 = c * c;
    let ss = -ddc / c - ddd / d - 2.0 * dde / e;
    // Raw coordinate mixed component; per-unit vectors divide by |d_r| = C.
    let sr_coord =
        (dc / c) * (da / a + 2.0 * db / b) - (dd / d) * (da / a) - 2.0 * (de / e) * (db / b);
    let sr = sr_coord / c;
    let rr = -ddc / c - (dc / c) * (dd / d + 2.0 * de / e) - (dda / a + 2.0 * ddb / b) / c2;
    let xx = -ddd / d - dda / a / c2 - (dd / d) * (dc / c + 2.0 * de / e)
        - 2.0 * da * db / (a * b) / c2
        + 2.0 * d * d * a * a / (b * b * b * b * e * e * e * e);
    let yy = -dde / e - ddb / b / c2 - (de / e) * (dc / c + dd / d + de / e)
        - (db / b) * (da / a + db / b) / c2
        + 2.0 * (2.0 * b * b * e * e - a * a * d * d) / (b * b * b * b * e * e * e * e);
    Ok(FiveDRicci { ss, sr, rr, xx, yy, zz: yy })
}

/// Extrinsic geometry of a boundary slice.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SliceGeometry {
    /// Radius used for glue matching. For a round Berger slice (A = B) this
    /// is the round S^3 radius; for an s-slice of the 5-d ansatz it is the
    /// (Y, Z) core-sphere scale E(s) * B(r_mid).
    pub boundary_radius: f64,
    /// Shape-operator eigenvalues (1/length) with respect to the outward
    /// normal, ordered along the slice directions.
    pub shape_eigenvalues: Vec<f64>,
    /// Unnormalized second-form eigenvalues: shape eigenvalue times the
    /// squared warper of that direction.
    pub unnormalized_eigenvalues: Vec<f64>,
    /// +1 if the outward normal is the positive coordinate direction.
    pub outward_sign: i8,
    /// Whether the slice is a round S^3 (A = B at the boundary coordinate).
    pub round: bool,
}

impl SliceGeometry {
    pub fn shape_min(&self) -> f64 {
        self.shape_eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

pub enum SliceOf<'a> {
    Berger(&'a BergerAnsatz),
    Double(&'a DoubleAnsatz5D),
    /// A slice of a metric cone dr^2 + (r h)^2 g: every shape eigenvalue is
    /// (rh)'/(rh); supply that value, the slice dimension and the radius rh.
    Cone { p: f64, dim: usize, radius: f64 },
}

/// Shape operator of a constant-coordinate slice with the given outward sign.
///
/// For the Berger ansatz at r the eigenvalues are sign * (A'/A, B'/B, B'/B);
/// for the 5-d ansatz at s they are sign * (C./C, D./D, E./E, E./E).
pub fn sff_slice(piece: SliceOf<'_>, coord: f64, outward_sign: i8) -> Result<SliceGeometry> {
    let sgn = outward_sign as f64;
    match piece {
        SliceOf::Berger(ans) => {
            let (a, da, _) = ans.warp_a.eval(coord);
            let (b, db, _) = ans.warp_b.eval(coord);
            if a <= 0.0 || b <= 0.0 {
                return Err(Error::NotPositiveDefinite { context: format!("slice at r = {coord}") });
            }
            let shape = vec![sgn * da / a, sgn * db / b, sgn * db / b];
            let unnormalized = vec![sgn * da * a, sgn * db * b, sgn * db * b];
            let round = (a - b).abs() <= 1e-10 * a.abs().max(b.abs());
            Ok(SliceGeometry {
                boundary_radius: a,
                shape_eigenvalues: shape,
                unnormalized_eigenvalues: unnormalized,
                outward_sign,
                round,
            })
        }
        SliceOf::Double(ans) => {
            let (c, dc, _) = ans.warp_c.eval(coord);
            let (d, dd, _) = ans.warp_d.eval(coord);
            let (e, de, _) = ans.warp_e.eval(coord);
            if c <= 0.0 || d <= 0.0 || e <= 0.0 {
                return Err(Error::NotPositiveDefinite { context: format!("slice at s = {coord}") });
            }
            let r_mid = 0.5 * (ans.r_interval.0 + ans.r_interval.1);
            let b_mid = ans.warp_b.value(r_mid);
            let shape = vec![sgn * dc / c, sgn * dd / d, sgn * de / e, sgn * de / e];
            let unnormalized = vec![sgn * dc * c, sgn * dd * d, sgn * de * e, sgn * de * e];
            let round = (c - d).abs() <= 1e-10 * c.max(d) && (c - e).abs() <= 1e-10 * c.max(e);
            Ok(SliceGeometry {
                boundary_radius: e * b_mid,
                shape_eigenvalues: shape,
                unnormalized_eigenvalues: unnormalized,
                outward_sign,
                round,
            })
        }
        SliceOf::Cone { p, dim, radius } => {
            let shape = vec![sgn * p; dim];
            let unnormalized = shape.iter().map(|s| s * radius * radius).collect();
            Ok(SliceGeometry {
                boundary_radius: radius,
                shape_eigenvalues: shape,
                unnormalized_eigenvalues: unnormalized,
                outward_sign,
                round: true,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    pub(crate) fn football_ansatz(ell: f64) -> BergerAnsatz {
        let w = WarpFn::sin_scaled(ell / 2.0, 2.0, (0.0, FRAC_PI_2));
        BergerAnsatz::new(
            w.clone(),
            w,
            (0.0, FRAC_PI_2),
            (ClosureTag::OpenBoundary, ClosureTag::OpenBoundary),
            TopologyTag::Sphere4,
        )
    }

    #[test]
    fn football_unit_is_round_sphere_radius_half() {
        // A = B = sin(2r)/2 is round S^4 of radius 1/2: Ric = 12 everywhere.
        let f = football_ansatz(1.0);
        for r in [0.3, FRAC_PI_4, 1.1] {
            let ric = ricci_berger(&f, r).unwrap();
            for v in ric.as_array() {
                assert!((v - 12.0).abs() < 1e-9, "r={r}: {ric:?}");
            }
        }
    }

    #[test]
    fn degenerate_bubble_profile_closed_forms() {
        // A = (b0/2) sin 2r, B = b0/2 constant:
        // rr = 4, xx = 4 + 8 sin^2(2r)/b0^2, yy = (8/b0^2)(2 - sin^2 2r).
        let b0 = 0.1;
        let a = WarpFn::sin_scaled(b0 / 2.0, 2.0, (0.0, FRAC_PI_2));
        let b = WarpFn::constant(b0 / 2.0, (0.0, FRAC_PI_2));
        let ans = BergerAnsatz::new(
            a,
            b,
            (0.0, FRAC_PI_2),
            (ClosureTag::CollapseFiber, ClosureTag::CollapseFiber),
            TopologyTag::Cp2ConnSumCp2Bar,
        );
        for r in [0.2, 0.7, 1.3] {
            let ric = ricci_berger(&ans, r).unwrap();
            let s2 = (2.0 * r).sin().powi(2);
            assert!((ric.rr - 4.0).abs() < 1e-10);
            assert!((ric.xx - (4.0 + 8.0 * s2 / (b0 * b0))).abs() < 1e-7);
            assert!((ric.yy - (8.0 / (b0 * b0)) * (2.0 - s2)).abs() < 1e-7);
            assert_eq!(ric.yy, ric.zz);
        }
    }

    #[test]
    fn homothety_scales_ricci_inverse_square() {
        let f = football_ansatz(0.7);
        let lambda = 2.5;
        let scaled = f.homothety(lambda);
        let r = 0.8;
        let ric = ricci_berger(&f, r).unwrap();
        let ric_scaled = ricci_berger(&scaled, lambda * r).unwrap();
        for (v, w) in ric.as_array().iter().zip(ric_scaled.as_array()) {
            assert!((w - v / (lambda * lambda)).abs() < 1e-9 * v.abs().max(1.0));
        }
    }

    #[test]
    fn five_d_product_reduces_to_berger() {
        // Constant C, D, E: sr = 0 and the 4-d block reproduces the Berger
        // values of the rescaled warpers.
        let (c0, d0, e0) = (1.7, 0.8, 1.3);
        let f = football_ansatz(0.9);
        let ans = DoubleAnsatz5D {
            warp_c: WarpFn::constant(c0, (0.0, 10.0)),
            warp_d: WarpFn::constant(d0, (0.0, 10.0)),
            warp_e: WarpFn::constant(e0, (0.0, 10.0)),
            warp_a: f.warp_a.clone(),
            warp_b: f.warp_b.clone(),
            s_interval: (0.0, 10.0),
            r_interval: (0.0, FRAC_PI_2),
        };
        let (s, r) = (3.0, 0.6);
        let got = ricci_5d(&ans, s, r).unwrap();
        assert_eq!(got.ss, 0.0);
        assert_eq!(got.sr, 0.0);
        // Reference: Berger ansatz with A~ = d0 A(r~/c0), B~ = e0 B(r~/c0)
        // evaluated at r~ = c0 r.
        let at = ans.warp_a.clone();
        let bt = ans.warp_b.clone();
        let a_ref = WarpFn::from_fn(
            move |x| {
                let (v, d1, d2) = at.eval(x / c0);
                (d0 * v, d0 * d1 / c0, d0 * d2 / (c0 * c0))
            },
            (0.0, c0 * FRAC_PI_2),
            true,
            "a-ref",
        );
        let b_ref = WarpFn::from_fn(
            move |x| {
                let (v, d1, d2) = bt.eval(x / c0);
                (e0 * v, e0 * d1 / c0, e0 * d2 / (c0 * c0))
            },
            (0.0, c0 * FRAC_PI_2),
            true,
            "b-ref",
        );
        let reference = BergerAnsatz::new(
            a_ref,
            b_ref,
            (0.0, c0 * FRAC_PI_2),
            (ClosureTag::OpenBoundary, ClosureTag::OpenBoundary),
            TopologyTag::Tube,
        );
        let want = ricci_berger(&reference, c0 * r).unwrap();
        assert!((got.rr - want.rr).abs() < 1e-9 * want.rr.abs().max(1.0));
        assert!((got.xx - want.xx).abs() < 1e-9 * want.xx.abs().max(1.0));
        assert!((got.yy - want.yy).abs() < 1e-9 * want.yy.abs().max(1.0));
    }

    #[test]
    fn football_slice_geometry() {
        let f = football_ansatz(1.0);
        // At r = pi/4 the outward +dr slice has zero shape operator.
        let eq = sff_slice(SliceOf::Berger(&f), FRAC_PI_4, 1).unwrap();
        for v in &eq.shape_eigenvalues {
            assert!(v.abs() < 1e-12);
        }
        assert!(eq.round);
        // At r = s with outward -dr the eigenvalues are -2 cot 2s.
        let s = 0.4;
        let inner = sff_slice(SliceOf::Berger(&f), s, -1).unwrap();
        let want = -2.0 * (2.0 * s).cos() / (2.0 * s).sin();
        for v in &inner.shape_eigenvalues {
            assert!((v - want).abs() < 1e-12);
        }
        // Cross-check the unnormalized eigenvalues against shape * coefficient.
        for (sh, un) in inner.shape_eigenvalues.iter().zip(&inner.unnormalized_eigenvalues) {
            let coeff = f.warp_a.value(s).powi(2);
            assert!((un - sh * coeff).abs() < 1e-10);
        }
    }

    #[test]
    fn ansatz_records_round_trip_and_build() {
        let records = [
            AnsatzRecord::Football { ell: 1.0, s: 0.2 },
            AnsatzRecord::Bubble { eps: 0.5, b0: 0.3 },
            AnsatzRecord::ConstantFiber { b0: 0.4, amp: 0.8, interval: None },
            AnsatzRecord::ConePiece { b0: 0.1, s_max: 6.0 },
            AnsatzRecord::CapPiece { b1: 0.05, e0: 0.1 },
        ];
        for rec in &records {
            let back = AnsatzRecord::from_text(&rec.to_text()).unwrap();
            assert_eq!(&back, rec);
        }
        assert!(records[0].build_berger().is_ok());
        assert!(records[3].build_5d().is_ok());
        assert!(records[0].build_5d().is_err());
        assert!(records[4].build_berger().is_err());
        // Unknown keys are rejected.
        assert!(AnsatzRecord::from_text(r#"{"kind": "Football", "ell": 1.0, "s": 0.2, "x": 1}"#)
            .is_err());
    }

    #[test]
    fn closure_reports_detect_smooth_and_conical_fibers() {
        // b0 = 1: the collapsing Hopf fiber closes smoothly (normalized
        // slope exactly 2); smaller b0 leaves a conical closure.
        let smooth = crate::gluing::bubble(0.4, 1.0).unwrap();
        let rep = smooth.closure_report(0);
        assert_eq!(rep.tag, ClosureTag::CollapseFiber);
        assert!((rep.normalized_slope - 2.0).abs() < 1e-12);
        assert!(rep.smooth, "{rep:?}");
        let conical = crate::gluing::bubble(0.4, 0.5).unwrap();
        let rep = conical.closure_report(0);
        assert!((rep.normalized_slope - 1.0).abs() < 1e-12);
        assert!(!rep.smooth);
        assert!(rep.b_value > 0.0);
    }

    #[test]
    fn collapse_guard_rejects_endpoint_evaluation() {
        let b0 = 0.3;
        let a = WarpFn::sin_scaled(b0 / 2.0, 2.0, (0.0, FRAC_PI_2));
        let b = WarpFn::constant(b0 / 2.0, (0.0, FRAC_PI_2));
        let ans = BergerAnsatz::new(
            a,
            b,
            (0.0, FRAC_PI_2),
            (ClosureTag::CollapseFiber, ClosureTag::CollapseFiber),
            TopologyTag::Cp2ConnSumCp2Bar,
        );
        assert!(ricci_berger(&ans, 1e-8).is_err());
        assert!(ricci_berger(&ans, 0.2).is_ok());
    }
}
