use proptest::prelude::*;
use twrc::{cap, db_to_linear, linear_to_db, validate_gains, Error};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn cap_is_strictly_increasing(x in 0.0f64..1e6, dx in 1e-6f64..1e3) {
        prop_assert!(cap(x).unwrap() < cap(x + dx).unwrap());
    }

    #[test]
    fn cap_is_subadditive(a in 0.0f64..1e4, b in 0.0f64..1e4) {
        prop_assert!(cap(a + b).unwrap() <= cap(a).unwrap() + cap(b).unwrap() + 1e-12);
    }

    #[test]
    fn decibel_round_trip(x in 1e-6f64..1e9) {
        let back = db_to_linear(linear_to_db(x).unwrap()).unwrap();
        prop_assert!(((back - x) / x).abs() < 1e-12);
    }

    #[test]
    fn validation_is_idempotent(g1 in 0.0f64..1e3, g2 in 0.0f64..1e3, f in 0.0f64..=1.0) {
        let g3 = f * g1.min(g2);
        let once = validate_gains(g1, g2, g3, true).unwrap();
        prop_assert_eq!(once.swapped(), g1 > g2);
        let twice = validate_gains(once.gamma1(), once.gamma2(), once.gamma3(), false).unwrap();
        prop_assert_eq!((twice.gamma1(), twice.gamma2(), twice.gamma3()), (once.gamma1(), once.gamma2(), once.gamma3()));
        prop_assert!(once.is_ordered());
    }
}

#[test]
fn scalar_anchors() {
    assert_eq!(cap(0.0).unwrap(), 0.0);
    assert_eq!(cap(1.0).unwrap(), 1.0);
    assert_eq!(cap(3.0).unwrap(), 2.0);
    assert!((db_to_linear(20.0).unwrap() - 100.0).abs() < 1e-12);
    assert!((linear_to_db(10.0).unwrap() - 10.0).abs() < 1e-12);
    assert!(matches!(cap(-1.0), Err(Error::Domain(_))));
    assert!(matches!(cap(f64::NAN), Err(Error::Domain(_))));
    assert_eq!(linear_to_db(0.0).unwrap(), f64::NEG_INFINITY);
    assert!(linear_to_db(-1.0).is_err());
    assert!((db_to_linear(3.0).unwrap() - 1.9953).abs() < 1e-4);
    assert!(db_to_linear(f64::INFINITY).is_err());
}

#[test]
fn ordering_violations_name_the_inequality() {
    let e = validate_gains(10.0, 1.0, 0.5, false).unwrap_err();
    assert!(matches!(e, Error::Validation(_)) && e.to_string().contains("gamma1 > gamma2"));
    let e = validate_gains(1.0, 10.0, 5.0, true).unwrap_err();
    assert!(e.to_string().contains("gamma3 > gamma1"));
    assert!(validate_gains(-1.0, 1.0, 0.0, false).is_err());
    assert!(validate_gains(1.0, f64::NAN, 0.0, false).is_err());
    let g = validate_gains(1.0, 2.0, 0.0, false).unwrap();
    assert_eq!(g.gamma3(), 0.0);
    let m = g.mirrored();
    assert_eq!((m.gamma1(), m.gamma2(), m.swapped()), (2.0, 1.0, true));
}
