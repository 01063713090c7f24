//! Property tests over randomized inputs: reduction idempotence, rational
//! question-mark laws, literal parsing round-trips, and abelian group
//! normalization invariants.

use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;
use sha_predict::arith::quad::ExactReal;
use sha_predict::minkowski::question_mark;
use sha_predict::qforms::{reduce_definite, AbelianGroupStructure, BinaryQuadraticForm};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn reduce_is_idempotent(a in 1..40i64, b in -40..40i64, c_off in 1..40i64) {
        let c = (b * b) / (4 * a) + c_off;
        let f = BinaryQuadraticForm::new(a, b, c);
        prop_assume!(f.is_primitive() && f.discriminant() < 0);
        let r = reduce_definite(&f).unwrap();
        prop_assert!(r.is_reduced_definite());
        prop_assert_eq!(r.discriminant(), f.discriminant());
        prop_assert_eq!(reduce_definite(&r).unwrap(), r);
    }

    #[test]
    fn question_mark_rational_laws(p in 0i64..200, q in 1i64..200) {
        prop_assume!(p <= q);
        let x = BigRational::new(p.into(), q.into());
        let y = question_mark(&x).unwrap();
        prop_assert!(y.is_dyadic());
        let mirror = question_mark(&(BigRational::one() - &x)).unwrap();
        prop_assert_eq!(
            y.as_rational() + mirror.as_rational(),
            BigRational::one()
        );
    }

    #[test]
    fn parse_literal_round_trips_display(
        a in -50i64..50,
        b in -20i64..20,
        c in 1i64..30,
        d in 0i64..60,
    ) {
        let x = ExactReal::quadratic(a, b, c, d).unwrap();
        let reparsed = ExactReal::parse_literal(&x.to_string()).unwrap();
        prop_assert_eq!(reparsed.cmp_exact(&x), std::cmp::Ordering::Equal);
    }

    #[test]
    fn group_normalization_invariants(
        parts in proptest::collection::vec(1u64..40, 0..5),
    ) {
        let g = AbelianGroupStructure::from_cyclic_parts(&parts).unwrap();
        let expected: u128 = parts.iter().map(|&p| p as u128).product();
        prop_assert_eq!(g.order(), expected);
        for w in g.elementary_divisors().windows(2) {
            prop_assert_eq!(w[1] % w[0], 0);
        }
        let doubled = g.direct_sum(&g);
        prop_assert_eq!(doubled.order(), expected * expected);
        let odd = g.odd_part();
        prop_assert_eq!(odd.order() % 2, 1);
        prop_assert!((g.order() / odd.order()).is_power_of_two());
    }
}
