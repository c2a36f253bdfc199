use proptest::prelude::*;
use std::f64::consts::FRAC_PI_2;
use xilab::fourier::{gr, WindowParams};
use xilab::tracker::*;
use xilab::Error;

fn win(sigma: f64, t2: f64, t0: f64) -> WindowParams {
    WindowParams::new(sigma, t2, t0).unwrap()
}

fn check_post_conditions(w: &WindowParams, r: &CrossingRecord) {
    let (lo, hi) = r.bracket;
    assert!(lo <= r.omega_z && r.omega_z <= hi);
    assert!(hi - lo <= 1e-10);
    assert!(gr(r.omega_z, w, 1e-14).unwrap().value.abs() < 1e-10);
    let a = gr(lo, w, 1e-14).unwrap().value;
    let b = gr(hi, w, 1e-14).unwrap().value;
    assert!(a * b <= 0.0);
}

#[test]
fn representative_window() {
    let w = win(0.25, 1.0, 0.5);
    let r = first_crossing(&w, 40.0, 0.05, 1e-12)
        .unwrap()
        .expect("crossing below 40");
    check_post_conditions(&w, &r);
    assert!(!r.degenerate);
    // G_R keeps one sign on (0, omega_z).
    let s0 = gr(0.01, &w, 1e-14).unwrap().value.signum();
    let mut om = 0.01;
    while om < r.bracket.0 {
        assert_eq!(
            gr(om, &w, 1e-14).unwrap().value.signum(),
            s0,
            "omega = {om}"
        );
        om += 0.01;
    }
}

#[test]
fn crossing_is_even_in_t0() {
    for (s, t2, t0) in [(0.25, 1.0, 0.5), (0.1, 0.5, 1.0), (0.4, 2.0, 1.5)] {
        let a = first_crossing(&win(s, t2, t0), 50.0, 0.05, 1e-12)
            .unwrap()
            .unwrap();
        let b = first_crossing(&win(s, t2, -t0), 50.0, 0.05, 1e-12)
            .unwrap()
            .unwrap();
        assert!((a.omega_z - b.omega_z).abs() < 1e-8);
    }
}

#[test]
fn degenerate_window_has_no_crossing() {
    let scan = scan_first_crossing(&win(0.25, 0.0, 0.5), &ScanOptions::default()).unwrap();
    assert!(scan.identically_zero);
    assert!(scan.crossing.is_none());
    assert_eq!(podd(1.3, &win(0.25, 0.0, 0.5), 1e-12).unwrap().value, 0.0);
}

#[test]
fn continuation_is_lipschitz() {
    let path: Vec<(f64, f64)> = (0..=20).map(|k| (0.3 + 0.01 * k as f64, 1.0)).collect();
    let track = continue_crossing(0.25, &path, &StepControl::default()).unwrap();
    assert_eq!(track.end, TrackEnd::Completed);
    assert_eq!(track.records.len(), path.len());
    let max_jump = track
        .records
        .windows(2)
        .map(|p| (p[1].omega_z - p[0].omega_z).abs())
        .fold(0.0, f64::max);
    assert!(max_jump < 0.5, "{max_jump}");
    for r in &track.records {
        check_post_conditions(&win(0.25, r.t2, r.t0), r);
    }
}

#[test]
fn first_crossing_jumps_at_a_fold() {
    // At t2 = 1 the first two roots of G_R merge near omega = 2.45 when t0
    // passes about 0.5183, so the first crossing is not continuous there.
    let path: Vec<(f64, f64)> = (0..=20).map(|k| (0.5 + 0.01 * k as f64, 1.0)).collect();
    let track = continue_crossing(0.25, &path, &StepControl::default()).unwrap();
    match track.end {
        TrackEnd::BranchLost { t0, .. } | TrackEnd::DegenerateSlope { t0, .. } => {
            assert!((0.518..0.52).contains(&t0), "{t0}")
        }
        TrackEnd::Completed => panic!("tracked through the fold"),
    }
    // One long segment must not hop onto the next root either.
    let one = continue_crossing(0.25, &[(0.5, 1.0), (0.53, 1.0)], &StepControl::default()).unwrap();
    assert!(matches!(one.end, TrackEnd::BranchLost { .. }), "{:?}", one);
    let before = first_crossing(&win(0.25, 1.0, 0.518), 50.0, 0.05, 1e-12)
        .unwrap()
        .unwrap();
    let after = first_crossing(&win(0.25, 1.0, 0.519), 50.0, 0.05, 1e-12)
        .unwrap()
        .unwrap();
    assert!(before.slope.abs() < 0.05);
    assert!(after.omega_z - before.omega_z > 1.0);
}

#[test]
fn continuation_matches_fresh_scans() {
    let path = [(0.5, 1.0), (0.6, 1.2), (0.7, 1.4)];
    let track = continue_crossing(0.25, &path, &StepControl::default()).unwrap();
    for r in &track.records {
        let fresh = first_crossing(&win(0.25, r.t2, r.t0), 50.0, 0.05, 1e-12)
            .unwrap()
            .unwrap();
        assert!((fresh.omega_z - r.omega_z).abs() < 1e-8);
    }
}

#[test]
fn continuation_into_degenerate_window_loses_branch() {
    let track =
        continue_crossing(0.25, &[(0.5, 1.0), (0.5, 0.0)], &StepControl::default()).unwrap();
    assert!(matches!(track.end, TrackEnd::BranchLost { .. }));
    assert_eq!(track.records.len(), 1);
    let e = continue_crossing(0.25, &[(0.5, 0.0)], &StepControl::default()).unwrap_err();
    assert!(matches!(e, Error::NoInitialCrossing { .. }));
}

#[test]
fn quarter_period_outcome_is_consistent() {
    let q = solve_quarter_period(0.25, (0.05, 1.0), 12, 1e-10, &StepControl::default()).unwrap();
    assert!(!q.samples.is_empty());
    let below = q.samples.iter().all(|s| s.1 < FRAC_PI_2);
    let above = q.samples.iter().all(|s| s.1 > FRAC_PI_2);
    match q.root {
        None => assert!(below || above || q.end != TrackEnd::Completed),
        Some((t0c, wz)) => assert!((t0c * wz - FRAC_PI_2).abs() < 1e-10),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn p_decomposition(sigma in 0.05f64..0.45, t2 in 0.2f64..2.0, t0 in -1.5f64..1.5, omega in 0.1f64..10.0) {
        let w = win(sigma, t2, t0);
        let g = gr(omega, &w, 1e-14).unwrap().value;
        let p = podd(omega, &w, 1e-14).unwrap().value + podd(omega, &w.with_t0(-t0), 1e-14).unwrap().value;
        prop_assert!((g - p).abs() <= 1e-6 * g.abs().max(1e-8), "{} vs {}", g, p);
    }

    #[test]
    fn crossings_satisfy_post_conditions(sigma in 0.1f64..0.45, t2 in 0.3f64..2.0, t0 in -1.5f64..1.5) {
        let w = win(sigma, t2, t0);
        if let Some(r) = first_crossing(&w, 50.0, 0.05, 1e-12).unwrap() {
            check_post_conditions(&w, &r);
            let p = podd(r.omega_z, &w, 1e-14).unwrap().value + podd(r.omega_z, &w.with_t0(-t0), 1e-14).unwrap().value;
            prop_assert!(p.abs() < 1e-9);
        }
    }
}
