use proptest::prelude::*;
use std::f64::consts::PI;
use xilab::theta::*;

// 40-digit evaluations of the defining sums.
const W_AT_1: f64 = 0.043_217_405_606_654_007;
const E0_AT_0: f64 = 0.893_393_800_934_246_9;
const E0_AT_1: f64 = 2.755_627_881_271_267_5e-7;
const E0_AT_2: f64 = 1.020_400_267_804_889_8e-69;

/// The defining series summed literally, with no use of evenness. Only usable where the
/// termwise cancellation at negative `t` stays mild.
fn e0_raw(t: f64) -> f64 {
    (1..=60)
        .map(|n| {
            let a = PI * (n * n) as f64 * (2.0 * t).exp();
            2.0 * a * (2.0 * a - 3.0) * (-a).exp() * (0.5 * t).exp()
        })
        .sum()
}

#[test]
fn frozen_values() {
    assert!((theta_w(1.0, 1e-15).unwrap().value - W_AT_1).abs() < 1e-16);
    assert!((e0_value(0.0) - E0_AT_0).abs() < 1e-15);
    assert!(((e0_value(1.0) - E0_AT_1) / E0_AT_1).abs() < 1e-13);
    assert!(((log_e0(2.0) - E0_AT_2.ln()) / E0_AT_2.ln()).abs() < 1e-14);
    assert!(e0_value(0.0) < 1.0);
}

#[test]
fn theta_w_far_out_is_negligible() {
    let s = theta_w(50.0, 1e-15).unwrap();
    assert!(s.value < 1e-60);
    assert_eq!(s.terms_used, 1);
}

#[test]
fn jacobi_at_fixed_point_and_nearby() {
    assert_eq!(jacobi_identity_residual(1.0).unwrap(), 0.0);
    assert!(jacobi_identity_residual(2.0).unwrap() < 1e-14);
    assert!(jacobi_identity_residual(0.1).unwrap() < 1e-13);
}

#[test]
fn delta_identity_partial_sums() {
    let term = |n: u32| {
        let n2 = (n * n) as f64;
        (-PI * n2).exp() * (1.0 - 4.0 * PI * n2)
    };
    assert!((term(1) - (-PI).exp() * (1.0 - 4.0 * PI)).abs() < 1e-17);
    assert!((term(1) + 0.4998).abs() < 1e-4);
    for n in 2..6 {
        assert!(term(n + 1).abs() < (-3.0 * PI).exp() * term(n).abs());
    }
}

#[test]
fn tilted_and_shifted_examples() {
    assert_eq!(ep(1.3, 0.0, KERNEL_TOL).unwrap(), e0_value(1.3));
    assert_eq!(ep(0.0, 0.3, KERNEL_TOL).unwrap(), e0_value(0.0));
    let v = ep(2.0, 0.25, KERNEL_TOL).unwrap();
    assert!((v - e0_value(2.0) * (-0.5f64).exp()).abs() <= 1e-15 * v);
    assert!(ep(1.0, 0.5, KERNEL_TOL).is_err());

    assert_eq!(e0_shift_diff(0.7, 0.0, KERNEL_TOL).unwrap(), 0.0);
    assert_eq!(e0_shift_diff(0.0, 1.3, KERNEL_TOL).unwrap(), 0.0);
    let d = e0_shift_diff(1.0, 2.0, KERNEL_TOL).unwrap();
    assert!(d > 0.0);
    assert_eq!(d, e0_value(1.0) - e0_value(3.0));
}

#[test]
fn derivative_examples() {
    assert!(de0_value(0.5) < 0.0);
    assert_eq!(de0_value(-0.5), -de0_value(0.5));
    let s = de0_dt(0.5, 1e-15).unwrap();
    assert!(s.tail_bound <= 1e-15);
}

#[test]
fn slow_decay_bound_at_five() {
    assert!(e0_value(5.0) < (-1.5f64 * 5.0).exp() * e0_value(0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn e0_is_even(t in -8.0f64..8.0) {
        prop_assert_eq!(e0_value(t), e0_value(-t));
        prop_assert_eq!(log_e0(t), log_e0(-t));
    }

    #[test]
    fn raw_two_sided_sum_agrees(t in -0.75f64..0.75) {
        prop_assert!((e0_raw(t) - e0_value(t)).abs() < 1e-12);
    }

    #[test]
    fn e0_positive(t in -10.0f64..10.0) {
        prop_assert!(log_e0(t).is_finite());
        prop_assert!(e0_value(t) >= 0.0);
        if t.abs() < 2.5 {
            prop_assert!(e0_value(t) > 0.0);
        }
    }

    #[test]
    fn strictly_decreasing_right_of_origin(t in 0.01f64..10.0) {
        prop_assert!(dlog_e0(t) < 0.0);
        prop_assert!(de0_value(t) <= 0.0);
    }

    #[test]
    fn tail_bound_is_honest(t in -2.0f64..2.0, tol in 1e-12f64..1e-4) {
        let s = e0(t, tol).unwrap();
        let more = e0_terms(t, 2 * s.terms_used);
        prop_assert!((more - s.value).abs() <= s.tail_bound + 4.0 * f64::EPSILON);
    }

    #[test]
    fn theta_tail_bound_is_honest(x in 0.05f64..5.0, tol in 1e-14f64..1e-4) {
        let s = theta_w(x, tol).unwrap();
        let more: f64 = (1..=2 * s.terms_used).map(|n| (-PI * (n * n) as f64 * x).exp()).sum();
        prop_assert!(s.tail_bound <= tol);
        prop_assert!((more - s.value).abs() <= s.tail_bound + 4.0 * f64::EPSILON * more);
    }

    #[test]
    fn derivative_matches_central_difference(t in -2.5f64..2.5) {
        let d = de0_value(t);
        prop_assume!(d.abs() > 1e-10);
        let h = 1e-5;
        let fd = (e0_value(t + h) - e0_value(t - h)) / (2.0 * h);
        prop_assert!(((fd - d) / d).abs() < 1e-6, "t = {}, fd = {}, d = {}", t, fd, d);
    }

    #[test]
    fn reflected_shift_is_negated(t in -4.0f64..4.0, t2 in -3.0f64..3.0) {
        let a = e0_shift_diff(t, t2, KERNEL_TOL).unwrap();
        let b = e0n_shift_diff(t, t2, KERNEL_TOL).unwrap();
        prop_assert!((a + b).abs() <= 1e-15);
    }

    #[test]
    fn jacobi_residual_small(x in 0.1f64..10.0) {
        prop_assert!(jacobi_identity_residual(x).unwrap() < 1e-12);
    }
}
