use proptest::prelude::*;
use pxlap::luxemburg::{luxemburg_norm, modular, SampledField};

const TOL: f64 = 1e-12;

/// Random sampled field with positive weights, its exponent and a companion field.
fn field_pair() -> impl Strategy<Value = (SampledField, SampledField, Vec<f64>)> {
    (1usize..24).prop_flat_map(|n| {
        (
            prop::collection::vec(-5.0f64..5.0, n),
            prop::collection::vec(-5.0f64..5.0, n),
            prop::collection::vec(0.01f64..1.0, n),
            prop::collection::vec(1.1f64..30.0, n),
        )
            .prop_map(|(a, b, w, p)| {
                (
                    SampledField::scalar(a, w.clone()).unwrap(),
                    SampledField::scalar(b, w).unwrap(),
                    p,
                )
            })
    })
}

proptest! {
    #[test]
    fn norm_is_absolutely_homogeneous((f, _, p) in field_pair(), omega in -50.0f64..50.0) {
        let n = luxemburg_norm(&f, &p, TOL).unwrap();
        let scaled = luxemburg_norm(&f.scaled(omega), &p, TOL).unwrap();
        prop_assert!((scaled - omega.abs() * n).abs() <= 1e-10 * (1.0 + omega.abs() * n));
    }

    #[test]
    fn norm_satisfies_the_triangle_inequality((f, g, p) in field_pair()) {
        let sum = luxemburg_norm(&f.axpy(1.0, &g).unwrap(), &p, TOL).unwrap();
        let nf = luxemburg_norm(&f, &p, TOL).unwrap();
        let ng = luxemburg_norm(&g, &p, TOL).unwrap();
        prop_assert!(sum <= (nf + ng) * (1.0 + 1e-10));
    }

    #[test]
    fn modular_is_one_at_the_norm((f, _, p) in field_pair()) {
        let n = luxemburg_norm(&f, &p, TOL).unwrap();
        prop_assume!(n > 0.0);
        prop_assert!((modular(&f, &p, n).unwrap() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn constant_exponent_gives_a_scaled_lp_norm((f, _, p) in field_pair()) {
        let q = p[0];
        let p = vec![q; f.len()];
        let lq: f64 = f.values().iter().zip(f.weights()).map(|(v, w)| w * v.abs().powf(q)).sum::<f64>();
        let expected = (lq / q).powf(1.0 / q);
        let n = luxemburg_norm(&f, &p, TOL).unwrap();
        prop_assert!((n - expected).abs() <= 1e-10 * (1.0 + expected));
    }
}

#[test]
fn zero_field_has_zero_norm() {
    let f = SampledField::scalar(vec![0.0; 4], vec![0.25; 4]).unwrap();
    assert_eq!(luxemburg_norm(&f, &[3.0; 4], TOL).unwrap(), 0.0);
}
