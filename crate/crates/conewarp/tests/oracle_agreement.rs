//! Analytic curvature kernels against the finite-difference oracle at
//! random parameters and points, plus the structural symmetries.

use conewarp::berger::{berger_ricci_coords, five_d_ricci_coords};
use conewarp::chart::{berger_chart, double5d_chart};
use conewarp::cone::{cone_chart, cone_curvature, StationaryFamily};
use conewarp::lemma::{radial_profile, HProfile, LemmaParams, LogRadius};
use conewarp::loop_family::SuspensionLoopOmega;
use conewarp::path::{recurrent_path, ComposedFamily, OmegaFamily};
use conewarp::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

fn random_berger(rng: &mut ChaCha8Rng) -> BergerAnsatz {
    match rng.random_range(0..3) {
        0 => football(rng.random_range(0.3..1.5), 0.05).unwrap(),
        1 => bubble(rng.random_range(0.0..1.0), rng.random_range(0.05..0.8)).unwrap(),
        _ => {
            // Constant-B profile (degenerate bubble shape, arbitrary scales).
            let b0: f64 = rng.random_range(0.1..0.9);
            let amp: f64 = rng.random_range(0.3..1.0);
            BergerAnsatz::new(
                WarpFn::sin_scaled(amp * b0 / 2.0, 2.0, (0.0, FRAC_PI_2)),
                WarpFn::constant(b0 / 2.0, (0.0, FRAC_PI_2)),
                (0.0, FRAC_PI_2),
                (ClosureTag::CollapseFiber, ClosureTag::CollapseFiber),
                TopologyTag::Cp2ConnSumCp2Bar,
            )
        }
    }
}

#[test]
fn berger_ricci_matches_oracle_at_100_random_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let started = std::time::Instant::now();
    for draw in 0..100 {
        let ansatz = random_berger(&mut rng);
        let chart = berger_chart(&ansatz);
        let x: Vec<f64> = chart
            .chart_box
            .iter()
            .map(|&(lo, hi)| lo + (0.05 + 0.9 * rng.random_range(0.0..1.0)) * (hi - lo))
            .collect();
        let analytic = berger_ricci_coords(&ansatz, &x).unwrap();
        let fd = ricci_fd(&chart, &x, OracleConfig::default()).unwrap();
        assert!(
            ricci_close(&analytic, &fd, 1e-5, 1e-8),
            "draw {draw}: analytic\n{analytic}\nvs oracle\n{fd}"
        );
    }
    assert!(started.elapsed().as_secs() < 60, "berger draws too slow");
}

fn random_double5d(rng: &mut ChaCha8Rng) -> DoubleAnsatz5D {
    match rng.random_range(0..3) {
        0 => gluing::cone_piece(rng.random_range(0.05..0.5), 6.0),
        1 => gluing::cap_piece(rng.random_range(0.02..0.2), rng.random_range(0.02..0.3)).unwrap().0,
        _ => {
            let base = random_berger(rng);
            DoubleAnsatz5D {
                warp_c: WarpFn::constant(rng.random_range(0.5..2.0), (0.0, 6.0)),
                warp_d: WarpFn::constant(rng.random_range(0.5..2.0), (0.0, 6.0)),
                warp_e: WarpFn::constant(rng.random_range(0.5..2.0), (0.0, 6.0)),
                warp_a: base.warp_a,
                warp_b: base.warp_b,
                s_interval: (0.0, 6.0),
                r_interval: base.interval,
            }
        }
    }
}

#[test]
fn five_d_ricci_matches_oracle_at_100_random_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let started = std::time::Instant::now();
    for draw in 0..100 {
        let ansatz = random_double5d(&mut rng);
        let chart = double5d_chart(&ansatz);
        let x: Vec<f64> = chart
            .chart_box
            .iter()
            .map(|&(lo, hi)| lo + (0.05 + 0.9 * rng.random_range(0.0..1.0)) * (hi - lo))
            .collect();
        let analytic = five_d_ricci_coords(&ansatz, &x).unwrap();
        let fd = ricci_fd(&chart, &x, OracleConfig::default()).unwrap();
        assert!(
            ricci_close(&analytic, &fd, 1e-5, 1e-8),
            "draw {draw}: analytic\n{analytic}\nvs oracle\n{fd}"
        );
    }
    assert!(started.elapsed().as_secs() < 60, "5d draws too slow");
}

/// A breathing round sphere: g(s) = (1 + 0.3 sin s)^2 g_round. Not volume
/// normalized, so the cone kernel keeps every second-derivative term.
struct BreathingSphere {
    base: StationaryFamily,
}

impl CrossSectionFamily for BreathingSphere {
    fn dim(&self) -> usize {
        2
    }
    fn param_range(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }
    fn volume_normalized(&self) -> bool {
        false
    }
    fn metric(&self, s: f64, x: &[f64]) -> DMatrix<f64> {
        let c = 1.0 + 0.3 * s.sin();
        self.base.metric(0.0, x) * (c * c)
    }
    fn intrinsic_ricci(&self, _s: f64, x: &[f64]) -> DMatrix<f64> {
        // Ricci of a 2-d metric is invariant under constant scaling.
        self.base.intrinsic_ricci(0.0, x)
    }
    fn chart_box(&self) -> Vec<(f64, f64)> {
        self.base.chart_box()
    }
}

#[test]
fn cone_kernel_matches_oracle_for_breathing_family() {
    // Full generality: h from the triple-log profile, f moving the family
    // parameter, no trace substitution.
    let params = LemmaParams { n: 3, amp_e: 0.5, amp_f: 0.8, r0: 0.3, h_inf: 0.5, d_const: 1.0 };
    let family = Arc::new(BreathingSphere { base: round_family(2, 0.8) });
    let h_params = params;
    let chart = cone_chart(
        family.clone(),
        (0.05, 0.2),
        move |r| eval_h(r, &h_params).unwrap().0,
        move |r| eval_f(r, &h_params).unwrap().0,
    );
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    for draw in 0..40 {
        let x: Vec<f64> = chart
            .chart_box
            .iter()
            .map(|&(lo, hi)| lo + (0.05 + 0.9 * rng.random_range(0.0..1.0)) * (hi - lo))
            .collect();
        let lr = LogRadius::from_r(x[0], params.r0).unwrap();
        let prof = radial_profile(lr, &params, HProfile::Standard);
        let data = cone_curvature(family.as_ref(), prof, &x[1..]).unwrap();
        let analytic = data.to_matrix(x[0]);
        let fd = ricci_fd(&chart, &x, OracleConfig::default()).unwrap();
        assert!(
            ricci_close(&analytic, &fd, 1e-5, 1e-7),
            "draw {draw} at {x:?}: analytic\n{analytic}\nvs oracle\n{fd}"
        );
    }
}

#[test]
fn cone_kernel_matches_oracle_for_volume_normalized_loop_family() {
    // The trace-substituted equations against the oracle on the transported
    // suspension family.
    let params = LemmaParams { n: 3, amp_e: 0.5, amp_f: 0.6, r0: 0.3, h_inf: 0.5, d_const: 1.0 };
    let omega: Arc<dyn OmegaFamily> = Arc::new(SuspensionLoopOmega::new(0.99, 0.06).unwrap());
    let schedule: Vec<(f64, f64)> = vec![(0.55, 0.1), (0.9, 0.1), (0.6, 0.1), (0.8, 0.1)];
    let path = Arc::new(recurrent_path((0.5, 0.99), &schedule, 0.05).unwrap());
    let family = Arc::new(ComposedFamily::from_path(omega, path));
    let h_params = params;
    let chart = cone_chart(
        family.clone(),
        (0.05, 0.2),
        move |r| eval_h(r, &h_params).unwrap().0,
        move |r| eval_f(r, &h_params).unwrap().0,
    );
    let mut rng = ChaCha8Rng::seed_from_u64(45);
    for draw in 0..25 {
        let x: Vec<f64> = chart
            .chart_box
            .iter()
            .map(|&(lo, hi)| lo + (0.05 + 0.9 * rng.random_range(0.0..1.0)) * (hi - lo))
            .collect();
        let lr = LogRadius::from_r(x[0], params.r0).unwrap();
        let prof = radial_profile(lr, &params, HProfile::Standard);
        let data = cone_curvature(family.as_ref(), prof, &x[1..]).unwrap();
        let analytic = data.to_matrix(x[0]);
        let fd = ricci_fd(&chart, &x, OracleConfig::default()).unwrap();
        assert!(
            ricci_close(&analytic, &fd, 1e-5, 2e-7),
            "draw {draw} at {x:?}: analytic\n{analytic}\nvs oracle\n{fd}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// Homothety covariance: scaling every warper (with the reparametrized
    /// interval) multiplies each per-unit Ricci value by lambda^-2.
    #[test]
    fn berger_scaling_covariance(
        ell in 0.3f64..1.5,
        lambda in 0.3f64..3.0,
        frac in 0.15f64..0.85,
    ) {
        let base = football(ell, 0.05).unwrap();
        let scaled = base.homothety(lambda);
        let r = base.interval.0 + frac * (base.interval.1 - base.interval.0);
        let ric = ricci_berger(&base, r).unwrap();
        let ric_scaled = ricci_berger(&scaled, lambda * r).unwrap();
        for (v, w) in ric.as_array().iter().zip(ric_scaled.as_array()) {
            prop_assert!((w - v / (lambda * lambda)).abs() <= 1e-9 * v.abs().max(1.0));
        }
    }

    /// The Y and Z components agree identically.
    #[test]
    fn berger_yy_equals_zz(eps in 0.0f64..1.0, b0 in 0.05f64..0.9, frac in 0.1f64..0.9) {
        let ans = bubble(eps, b0).unwrap();
        let (lo, hi) = ans.interval;
        let r = lo + frac * (hi - lo);
        let r = r.max(lo + 2e-6 * (hi - lo));
        let ric = ricci_berger(&ans, r).unwrap();
        prop_assert_eq!(ric.yy, ric.zz);
    }

    /// Unnormalized slice eigenvalues equal shape eigenvalues times the
    /// squared warper of the direction.
    #[test]
    fn slice_normalization_cross_check(
        eps in 0.0f64..1.0,
        b0 in 0.05f64..0.9,
        frac in 0.1f64..0.95,
    ) {
        let ans = bubble(eps, b0).unwrap();
        let (lo, hi) = ans.interval;
        let r = lo + frac * (hi - lo);
        let slice = sff_slice(SliceOf::Berger(&ans), r, 1).unwrap();
        let a = ans.warp_a.value(r);
        let b = ans.warp_b.value(r);
        let coeffs = [a * a, b * b, b * b];
        for ((sh, un), c) in slice
            .shape_eigenvalues
            .iter()
            .zip(&slice.unnormalized_eigenvalues)
            .zip(coeffs)
        {
            prop_assert!((un - sh * c).abs() <= 1e-10 * un.abs().max(1e-10));
        }
    }
}
