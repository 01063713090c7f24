//! Cross-checks of the quadratic form machinery against independent laws:
//! SL2(Z) invariance of the reduced representative, the group axioms under
//! composition, 2-torsion counting, and the Pell-sign criterion relating
//! narrow and wide class numbers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha_predict::arith::fundamental_pell;
use sha_predict::qforms::{
    class_group_definite, class_numbers_indefinite, compose, enumerate_reduced,
    enumerate_reduced_indefinite, is_reduced_indefinite, principal_form, reduce_definite,
    BinaryQuadraticForm,
};

/// Applies the GL2 substitution (x, y) -> (px + qy, rx + sy) to a form.
fn transform(f: &BinaryQuadraticForm, m: [i64; 4]) -> BinaryQuadraticForm {
    let [p, q, r, s] = m.map(i128::from);
    let (a, b, c) = (f.a as i128, f.b as i128, f.c as i128);
    let a2 = a * p * p + b * p * r + c * r * r;
    let b2 = 2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s;
    let c2 = a * q * q + b * q * s + c * s * s;
    BinaryQuadraticForm::new(
        i64::try_from(a2).unwrap(),
        i64::try_from(b2).unwrap(),
        i64::try_from(c2).unwrap(),
    )
}

fn mat_mul(x: [i64; 4], y: [i64; 4]) -> [i64; 4] {
    [
        x[0] * y[0] + x[1] * y[2],
        x[0] * y[1] + x[1] * y[3],
        x[2] * y[0] + x[3] * y[2],
        x[2] * y[1] + x[3] * y[3],
    ]
}

/// A random SL2(Z) element as a short word in the standard generators.
fn random_sl2(rng: &mut ChaCha8Rng) -> [i64; 4] {
    let mut m = [1, 0, 0, 1];
    for _ in 0..rng.gen_range(1..=5) {
        if rng.gen_bool(0.5) {
            let k = rng.gen_range(-3..=3);
            m = mat_mul(m, [1, k, 0, 1]);
        } else {
            m = mat_mul(m, [0, -1, 1, 0]);
        }
    }
    m
}

fn valid_negative_discriminants(lo: i64, hi: i64) -> Vec<i64> {
    (lo..=hi)
        .filter(|d| *d < 0 && d.rem_euclid(4) <= 1)
        .collect()
}

#[test]
fn reduction_fixes_random_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut checked = 0usize;
    while checked < 10_000 {
        let a = rng.gen_range(1..=60i64);
        let b = rng.gen_range(-60..=60i64);
        let c_min = (b * b) / (4 * a) + 1;
        let c = rng.gen_range(c_min..=c_min + 80);
        let f = BinaryQuadraticForm::new(a, b, c);
        if !f.is_primitive() || f.discriminant() >= 0 {
            continue;
        }
        let r = reduce_definite(&f).unwrap();
        assert!(r.is_reduced_definite(), "{f:?} reduced to {r:?}");
        assert_eq!(r.discriminant(), f.discriminant());
        assert_eq!(reduce_definite(&r).unwrap(), r, "idempotence at {f:?}");
        checked += 1;
    }
}

#[test]
fn reduced_representative_is_sl2_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    for delta in valid_negative_discriminants(-400, -3) {
        for f in enumerate_reduced(delta).unwrap() {
            for _ in 0..3 {
                let g = transform(&f, random_sl2(&mut rng));
                assert_eq!(g.discriminant(), delta);
                assert_eq!(
                    reduce_definite(&g).unwrap(),
                    f,
                    "transform of {f:?} reduced elsewhere (delta {delta})"
                );
            }
        }
    }
}

#[test]
fn composition_satisfies_group_axioms() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    for delta in [-23, -47, -71, -84, -163, -231, -420, -1011] {
        let forms = enumerate_reduced(delta).unwrap();
        let e = principal_form(delta).unwrap();
        let e = reduce_definite(&e).unwrap();
        for f in &forms {
            assert_eq!(compose(&e, f).unwrap(), *f, "identity at {delta}");
            assert_eq!(
                compose(f, &f.inverse()).unwrap(),
                e,
                "inverse of {f:?} at {delta}"
            );
            for g in &forms {
                let fg = compose(f, g).unwrap();
                assert!(forms.contains(&fg), "closure at {delta}");
                assert_eq!(fg, compose(g, f).unwrap(), "commutativity at {delta}");
            }
        }
        for _ in 0..200 {
            let f = &forms[rng.gen_range(0..forms.len())];
            let g = &forms[rng.gen_range(0..forms.len())];
            let h = &forms[rng.gen_range(0..forms.len())];
            let left = compose(&compose(f, g).unwrap(), h).unwrap();
            let right = compose(f, &compose(g, h).unwrap()).unwrap();
            assert_eq!(left, right, "associativity at {delta}");
        }
    }
}

#[test]
fn group_structure_matches_enumeration_and_torsion() {
    for delta in valid_negative_discriminants(-2000, -3) {
        let forms = enumerate_reduced(delta).unwrap();
        let group = class_group_definite(delta).unwrap();
        assert_eq!(group.order(), forms.len() as u128, "order at {delta}");

        let e = reduce_definite(&principal_form(delta).unwrap()).unwrap();
        let exponent = group.elementary_divisors().last().copied().unwrap_or(1);
        let two_torsion_expected: u128 = group
            .elementary_divisors()
            .iter()
            .map(|d| if d % 2 == 0 { 2u128 } else { 1 })
            .product();
        let mut two_torsion_found = 0u128;
        for f in &forms {
            let mut acc = e;
            for _ in 0..exponent {
                acc = compose(&acc, f).unwrap();
            }
            assert_eq!(acc, e, "exponent law at {delta} for {f:?}");
            if compose(f, f).unwrap() == e {
                two_torsion_found += 1;
            }
        }
        assert_eq!(
            two_torsion_found, two_torsion_expected,
            "2-torsion count at {delta}"
        );
    }
}

#[test]
fn frozen_class_groups() {
    let expect: [(i64, &[u64]); 10] = [
        (-3, &[]),
        (-4, &[]),
        (-20, &[2]),
        (-23, &[3]),
        (-39, &[4]),
        (-47, &[5]),
        (-71, &[7]),
        (-84, &[2, 2]),
        (-163, &[]),
        (-3299, &[3, 9]),
    ];
    for (delta, divisors) in expect {
        let g = class_group_definite(delta).unwrap();
        assert_eq!(
            g.elementary_divisors(),
            divisors,
            "class group of {delta}"
        );
    }
}

#[test]
fn indefinite_enumeration_is_reduced_and_primitive() {
    for delta in (2..=600).filter(|d| d % 4 <= 1) {
        let Ok(forms) = enumerate_reduced_indefinite(delta) else {
            continue;
        };
        assert!(!forms.is_empty(), "no reduced forms at {delta}");
        for f in &forms {
            assert!(f.is_primitive());
            assert_eq!(f.discriminant(), delta);
            assert!(is_reduced_indefinite(f).unwrap(), "{f:?} at {delta}");
        }
    }
}

#[test]
fn narrow_wide_ratio_follows_pell_sign() {
    for delta in (5..=1500).filter(|d| d % 4 <= 1) {
        let Ok(pell) = fundamental_pell(delta) else {
            continue;
        };
        assert!(pell.verify());
        let (narrow, wide) = class_numbers_indefinite(delta).unwrap();
        if pell.sign == -4 {
            assert_eq!(narrow, wide, "unit of norm -1 at {delta}");
        } else {
            assert_eq!(narrow, 2 * wide, "unit of norm +1 at {delta}");
        }
    }
}

#[test]
fn frozen_indefinite_class_numbers() {
    let expect = [
        (5, (1, 1)),
        (8, (1, 1)),
        (12, (2, 1)),
        (13, (1, 1)),
        (40, (2, 2)),
        (60, (4, 2)),
        (229, (3, 3)),
    ];
    for (delta, pair) in expect {
        assert_eq!(
            class_numbers_indefinite(delta).unwrap(),
            pair,
            "class numbers at {delta}"
        );
    }
}
