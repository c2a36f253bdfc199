use proptest::prelude::*;
use xilab::xi::*;
use xilab::{Complex64, Error};

// From xi(s) = s (s - 1) / 2 pi^{-s/2} Gamma(s/2) zeta(s) at 40 digits.
const XI_HALF: f64 = 0.497_120_778_188_314_1;
const XI_075_3I: (f64, f64) = (0.403_524_926_975_541_35, 0.014_199_307_890_322_673);
const XI_CRIT_10: f64 = 0.037_967_850_310_935_684;

#[test]
fn frozen_values() {
    let v = xi_direct(Complex64::new(0.5, 0.0), 1e-14).unwrap().value;
    assert!((v.re - XI_HALF).abs() < 1e-14);
    let v = xi_direct(Complex64::new(0.75, 3.0), 1e-14).unwrap().value;
    assert!(
        (v.re - XI_075_3I.0).abs() < 1e-13 && (v.im - XI_075_3I.1).abs() < 1e-13,
        "{v}"
    );
    let (re, _) = xi_critical_line(10.0, 1e-14).unwrap();
    assert!((re - XI_CRIT_10).abs() < 1e-13);
}

#[test]
fn functional_equation_examples() {
    assert!(xi_functional_residual(Complex64::new(0.8, 7.0), 1e-13).unwrap() < 1e-10);
    assert!(xi_functional_residual(Complex64::new(0.1, 0.0), 1e-13).unwrap() < 1e-12);
}

#[test]
fn critical_zeros() {
    let z = find_critical_zero(14.0, 15.0, 1e-10).unwrap();
    assert!((z - 14.134_725_141_734_69).abs() < 1e-9);
    let z = find_critical_zero(20.0, 22.0, 1e-10).unwrap();
    assert!((z - 21.022_039_638_771_55).abs() < 1e-9);
    assert!(xi_critical_line(0.0, 1e-13).unwrap().0 > 0.0);
    assert!(matches!(
        find_critical_zero(2.0, 1.0, 1e-8),
        Err(Error::Domain { .. })
    ));
}

#[test]
fn strip_point_bounds() {
    assert!(StripPoint::new(0.5, 0.0).is_err());
    assert!(StripPoint::new(-0.5, 0.0).is_err());
    assert!(StripPoint::new(0.0, f64::NAN).is_err());
    assert_eq!(
        StripPoint::new(0.2, 3.0).unwrap().s(),
        Complex64::new(0.7, 3.0)
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn real_on_critical_line(omega in 0.0f64..30.0) {
        let v = xi_direct(Complex64::new(0.5, omega), 1e-13).unwrap().value;
        prop_assert!(v.im.abs() < 1e-10);
    }

    #[test]
    fn functional_equation(sigma in -0.45f64..0.45, omega in 0.0f64..25.0) {
        let r = xi_functional_residual(Complex64::new(0.5 + sigma, omega), 1e-13).unwrap();
        prop_assert!(r < 1e-10);
    }

    #[test]
    fn conjugate_symmetry(sigma in -0.45f64..0.45, omega in 0.0f64..25.0) {
        let a = xi_direct(Complex64::new(0.5 + sigma, omega), 1e-13).unwrap().value;
        let b = xi_direct(Complex64::new(0.5 + sigma, -omega), 1e-13).unwrap().value;
        prop_assert!((a - b.conj()).norm() < 1e-12);
    }
}
