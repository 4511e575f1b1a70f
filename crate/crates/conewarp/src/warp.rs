//! Scalar warping functions with two derivatives.
//!
//! Every metric ansatz in this crate is diagonal in a fixed frame with
//! coefficients built from one-variable warpers, so a warper carries its
//! value and first two derivatives, an open domain, and a positivity claim.

use crate::error::{Error, Result};
use std::sync::Arc;

type Eval = Arc<dyn Fn(f64) -> (f64, f64, f64) + Send + Sync>;

/// A scalar function on an interval together with its first two derivatives.
#[derive(Clone)]
pub struct WarpFn {
    eval: Eval,
    domain: (f64, f64),
    positive: bool,
    /// Points where the second derivative is allowed to jump (C¹ junctions).
    kinks: Vec<f64>,
    label: String,
}

impl std::fmt::Debug for WarpFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "WarpFn({}, domain [{}, {}])", self.label, self.domain.0, self.domain.1)
    }
}

impl WarpFn {
    pub fn from_fn<F>(f: F, domain: (f64, f64), positive: bool, label: &str) -> Self
    where
        F: Fn(f64) -> (f64, f64, f64) + Send + Sync + 'static,
    {
        WarpFn { eval: Arc::new(f), domain, positive, kinks: Vec::new(), label: label.to_string() }
    }

    pub fn constant(c: f64, domain: (f64, f64)) -> Self {
        Self::from_fn(move |_| (c, 0.0, 0.0), domain, c > 0.0, "const")
    }

    pub fn linear(slope: f64, domain: (f64, f64)) -> Self {
        Self::from_fn(move |x| (slope * x, slope, 0.0), domain, slope > 0.0 && domain.0 >= 0.0, "linear")
    }

    /// amp * sin(freq * x)
    pub fn sin_scaled(amp: f64, freq: f64, domain: (f64, f64)) -> Self {
        Self::from_fn(
            move |x| {
                let (s, c) = (freq * x).sin_cos();
                (amp * s, amp * freq * c, -amp * freq * freq * s)
            },
            domain,
            amp > 0.0,
            "sin",
        )
    }

    /// amp * cosh(freq * x)
    pub fn cosh_scaled(amp: f64, freq: f64, domain: (f64, f64)) -> Self {
        Self::from_fn(
            move |x| {
                let c = (freq * x).cosh();
                let s = (freq * x).sinh();
                (amp * c, amp * freq * s, amp * freq * freq * c)
            },
            domain,
            amp > 0.0,
            "cosh",
        )
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn positive(&self) -> bool {
        self.positive
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kinks(&self) -> &[f64] {
        &self.kinks
    }

    pub fn with_kinks(mut self, kinks: Vec<f64>) -> Self {
        self.kinks = kinks;
        self
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.domain.0 && x <= self.domain.1
    }

    pub fn check_domain(&self, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                what: self.label.clone(),
                point: x,
                lo: self.domain.0,
                hi: self.domain.1,
            })
        }
    }

    /// Value and first two derivatives. Panics outside the closed domain only
    /// through the underlying closure; callers gate with `check_domain`.
    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        (self.eval)(x)
    }

    pub fn value(&self, x: f64) -> f64 {
        self.eval(x).0
    }

    pub fn d1(&self, x: f64) -> f64 {
        self.eval(x).1
    }

    pub fn d2(&self, x: f64) -> f64 {
        self.eval(x).2
    }

    /// Homothety: `lambda * f(x / lambda)` on the stretched domain. Scaling a
    /// metric by lambda^2 rescales each warper this way.
    pub fn homothety(&self, lambda: f64) -> Self {
        let inner = self.eval.clone();
        let d = (self.domain.0 * lambda, self.domain.1 * lambda);
        let kinks = self.kinks.iter().map(|k| k * lambda).collect();
        WarpFn {
            eval: Arc::new(move |x| {
                let (v, d1, d2) = inner(x / lambda);
                (lambda * v, d1, d2 / lambda)
            }),
            domain: d,
            positive: self.positive,
            kinks,
            label: format!("{}*{:.3}", self.label, lambda),
        }
    }

    /// Shift the argument: `f(x - shift)` on the translated domain.
    pub fn shifted(&self, shift: f64) -> Self {
        let inner = self.eval.clone();
        let d = (self.domain.0 + shift, self.domain.1 + shift);
        let kinks = self.kinks.iter().map(|k| k + shift).collect();
        WarpFn {
            eval: Arc::new(move |x| inner(x - shift)),
            domain: d,
            positive: self.positive,
            kinks,
            label: self.label.clone(),
        }
    }

    /// Verify d1/d2 against Richardson-refined central differences of the
    /// value at the given interior points (skipping declared kinks).
    pub fn fd_consistency(&self, points: &[f64], rel_tol: f64) -> Result<()> {
        for &x in points {
            let scale = x.abs().max(1.0);
            let h = f64::EPSILON.cbrt() * scale;
            if x - 2.0 * h <= self.domain.0 || x + 2.0 * h >= self.domain.1 {
                continue;
            }
            if self.kinks.iter().any(|k| (x - k).abs() < 16.0 * h) {
                continue;
            }
            let (v, d1, d2) = self.eval(x);
            let cd = |h: f64| (self.value(x + h) - self.value(x - h)) / (2.0 * h);
            let d1_fd = (4.0 * cd(h / 2.0) - cd(h)) / 3.0;
            let cd2 = |h: f64| (self.value(x + h) - 2.0 * v + self.value(x - h)) / (h * h);
            let h2 = f64::EPSILON.powf(0.25) * scale;
            let d2_fd = (4.0 * cd2(h2 / 2.0) - cd2(h2)) / 3.0;
            let ref1 = d1.abs().max(v.abs() / scale).max(1e-12);
            let ref2 = d2.abs().max(v.abs() / (scale * scale)).max(1e-9);
            if (d1 - d1_fd).abs() > rel_tol * ref1 {
                return Err(Error::InvalidParameter(format!(
                    "{}: d1 inconsistent at {x}: {d1} vs fd {d1_fd}",
                    self.label
                )));
            }
            if (d2 - d2_fd).abs() > 50.0 * rel_tol * ref2 {
                return Err(Error::InvalidParameter(format!(
                    "{}: d2 inconsistent at {x}: {d2} vs fd {d2_fd}",
                    self.label
                )));
            }
        }
        Ok(())
    }
}

/// Quintic smoothstep: 0 at 0, 1 at 1, first and second derivatives vanish
/// at both ends.
pub fn smootherstep(u: f64) -> (f64, f64, f64) {
    if u <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    if u >= 1.0 {
        return (1.0, 0.0, 0.0);
    }
    let v = u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
    let d1 = 30.0 * u * u * (1.0 - u) * (1.0 - u);
    let d2 = 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u);
    (v, d1, d2)
}
