//! Order and functional-equation checks for the question-mark map: strict
//! monotonicity along the Farey sequence and on random quadratic
//! irrationals, the mediant averaging identity, and the reflection symmetry
//! ?(1 - x) = 1 - ?(x).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha_predict::arith::quad::ExactReal;
use sha_predict::minkowski::{question_mark, question_mark_exact};

fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// All reduced fractions p/q in [0, 1] with q <= n, ascending.
fn farey(n: i64) -> Vec<(i64, i64)> {
    let mut out = vec![(0, 1)];
    let (mut a, mut b, mut c, mut d) = (0i64, 1i64, 1i64, n);
    while c <= n {
        let k = (n + b) / d;
        let (a2, b2) = (c, d);
        let (c2, d2) = (k * c - a, k * d - b);
        out.push((a2, b2));
        a = a2;
        b = b2;
        c = c2;
        d = d2;
    }
    out
}

#[test]
fn farey_images_are_strictly_increasing_dyadic_and_symmetric() {
    let points = farey(64);
    let one = BigRational::one();
    let mut prev: Option<BigRational> = None;
    for &(p, q) in &points {
        let x = ratio(p, q);
        let y = question_mark(&x).unwrap();
        assert!(y.is_dyadic(), "rational input gave non-dyadic image");
        if let Some(prev) = prev {
            assert!(prev < *y.as_rational(), "not increasing at {p}/{q}");
        }
        let mirror = question_mark(&(&one - &x)).unwrap();
        assert_eq!(
            y.as_rational() + mirror.as_rational(),
            one,
            "symmetry at {p}/{q}"
        );
        prev = Some(y.as_rational().clone());
    }
}

#[test]
fn mediant_identity_on_farey_neighbours() {
    let points = farey(64);
    let two = BigRational::from(BigInt::from(2));
    for w in points.windows(2) {
        let ((p1, q1), (p2, q2)) = (w[0], w[1]);
        assert_eq!(p2 * q1 - p1 * q2, 1, "not neighbours");
        let left = question_mark(&ratio(p1, q1)).unwrap();
        let right = question_mark(&ratio(p2, q2)).unwrap();
        let mediant = question_mark(&ratio(p1 + p2, q1 + q2)).unwrap();
        assert_eq!(
            mediant.as_rational() * &two,
            left.as_rational() + right.as_rational(),
            "mediant identity between {p1}/{q1} and {p2}/{q2}"
        );
    }
}

const RADICANDS: [i64; 12] = [2, 3, 5, 6, 7, 10, 11, 13, 14, 15, 17, 19];

fn random_unit_interval_quadratic(rng: &mut ChaCha8Rng) -> ExactReal {
    loop {
        let d = RADICANDS[rng.gen_range(0..RADICANDS.len())];
        let a = rng.gen_range(-30..=30i64);
        let b = rng.gen_range(1..=10i64);
        let c = rng.gen_range(1..=30i64);
        let x = ExactReal::quadratic(a, b, c, d).unwrap();
        if x.is_rational() {
            continue;
        }
        let shifted = x.add_int(-x.floor());
        if shifted.is_rational() {
            continue;
        }
        return shifted;
    }
}

#[test]
fn random_quadratics_are_monotone_and_symmetric() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    let mut sample: Vec<ExactReal> = (0..200)
        .map(|_| random_unit_interval_quadratic(&mut rng))
        .collect();
    sample.sort_by(|x, y| x.cmp_exact(y));
    sample.dedup_by(|x, y| x.cmp_exact(y) == std::cmp::Ordering::Equal);

    let one = BigRational::one();
    let mut prev: Option<BigRational> = None;
    for x in &sample {
        let y = question_mark_exact(x).unwrap();
        assert!(!y.is_dyadic(), "irrational input gave dyadic image");
        let mirror = question_mark_exact(&x.neg().add_int(1)).unwrap();
        assert_eq!(y.as_rational() + mirror.as_rational(), one, "symmetry");
        if let Some(prev) = prev {
            assert!(prev < *y.as_rational(), "monotonicity on quadratics");
        }
        prev = Some(y.as_rational().clone());
    }
    assert!(sample.len() > 150, "sample collapsed: {}", sample.len());
}

#[test]
fn quadratics_interleave_with_rational_neighbours() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    for _ in 0..60 {
        let x = random_unit_interval_quadratic(&mut rng);
        let q = rng.gen_range(2..=40i64);
        let p = rng.gen_range(1..q);
        let r = ratio(p, q);
        let rx = ExactReal::rational(r.clone());
        let qm_x = question_mark_exact(&x).unwrap();
        let qm_r = question_mark(&r).unwrap();
        match x.cmp_exact(&rx) {
            std::cmp::Ordering::Less => {
                assert!(qm_x.as_rational() < qm_r.as_rational(), "order flipped")
            }
            std::cmp::Ordering::Greater => {
                assert!(qm_x.as_rational() > qm_r.as_rational(), "order flipped")
            }
            std::cmp::Ordering::Equal => unreachable!("irrational equals rational"),
        }
    }
}
