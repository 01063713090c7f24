//! Predicted Tate-Shafarevich structure assembled from class-group data,
//! the complex-multiplication pipeline pairing an imaginary quadratic order
//! with a real-side order of equal class number, and the integer companion
//! matrices carrying local Frobenius data.

use std::fmt;

use crate::arith::ints::is_prime;
use crate::error::{Error, Result};
use crate::latmac::IntMatrix;
use crate::orders::{
    conductor_search, order_from_cm_input, QuadFieldSign, QuadOrder, DEFAULT_CONDUCTOR_BOUND,
};
use crate::qforms::{class_group_definite, AbelianGroupStructure};

/// Parity of the 2-adic valuation k that selects the assembly branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::Even => write!(f, "even"),
            Parity::Odd => write!(f, "odd"),
        }
    }
}

/// Predicted Tate-Shafarevich structure derived from a class group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShaPrediction {
    pub input_class_group: AbelianGroupStructure,
    /// 2-adic valuation of the class number.
    pub k: u32,
    pub parity: Parity,
    pub result: AbelianGroupStructure,
    pub order: u128,
}

fn two_adic_valuation(n: u128) -> u32 {
    n.trailing_zeros()
}

/// Assembles the prediction for a class group with cyclic 2-Sylow subgroup:
/// k even gives G + G; k odd gives Z/2^k plus two copies of the odd part.
pub fn sha_from_class_group(g: &AbelianGroupStructure) -> Result<ShaPrediction> {
    if !g.has_cyclic_two_sylow() {
        return Err(Error::invalid_input(format!(
            "decomposition hypothesis violated: the 2-Sylow subgroup of {g} is not cyclic"
        )));
    }
    let k = two_adic_valuation(g.order());
    if k >= 64 {
        return Err(Error::invalid_input("2-part of the class number too large"));
    }
    let (parity, result) = if k % 2 == 0 {
        (Parity::Even, g.direct_sum(g))
    } else {
        let odd = g.odd_part();
        let two_part = AbelianGroupStructure::new(vec![1u64 << k])?;
        (Parity::Odd, two_part.direct_sum(&odd.direct_sum(&odd)))
    };
    let order = result.order();
    Ok(ShaPrediction {
        input_class_group: g.clone(),
        k,
        parity,
        result,
        order,
    })
}

/// The doubled assembly G + G used by the complex-multiplication pipeline,
/// which always reports the even branch regardless of the parity of k.
fn doubled_prediction(g: &AbelianGroupStructure) -> ShaPrediction {
    let result = g.direct_sum(g);
    let order = result.order();
    ShaPrediction {
        input_class_group: g.clone(),
        k: two_adic_valuation(g.order()),
        parity: Parity::Even,
        result,
        order,
    }
}

/// Outcome of the complex-multiplication pipeline for one (D, f) input.
#[derive(Debug, Clone)]
pub struct CMCurveReport {
    pub d: i64,
    pub f: i64,
    pub imaginary_order: QuadOrder,
    pub class_group: AbelianGroupStructure,
    /// Least real-side conductor whose order has the same class number.
    pub twin_conductor: i64,
    pub real_order: QuadOrder,
    pub sha: ShaPrediction,
}

/// Runs the pipeline: order of conductor f in Q(sqrt(-D)), its class group,
/// the least real-side conductor with equal wide class number, and the
/// predicted group Cl + Cl.
pub fn sha_cm_curve(d: i64, f: i64) -> Result<CMCurveReport> {
    sha_cm_curve_bounded(d, f, DEFAULT_CONDUCTOR_BOUND)
}

/// Same as [`sha_cm_curve`] with an explicit conductor search bound.
pub fn sha_cm_curve_bounded(d: i64, f: i64, conductor_bound: i64) -> Result<CMCurveReport> {
    let imaginary_order = order_from_cm_input(d, f, QuadFieldSign::Imaginary)?;
    let class_group = class_group_definite(imaginary_order.discriminant())?;
    let h = u64::try_from(class_group.order())
        .map_err(|_| Error::invalid_input("class number overflows u64"))?;
    let twin_conductor = conductor_search(d, h, conductor_bound)?;
    let real_order = order_from_cm_input(d, twin_conductor, QuadFieldSign::Real)?;
    let sha = doubled_prediction(&class_group);
    Ok(CMCurveReport {
        d,
        f,
        imaginary_order,
        class_group,
        twin_conductor,
        real_order,
        sha,
    })
}

fn validate_companion_input(a: &[i64], p: i64) -> Result<usize> {
    if a.is_empty() || a.len() % 2 == 0 {
        return Err(Error::invalid_input(format!(
            "coefficient list must have odd length 2n-1, got {}",
            a.len()
        )));
    }
    if p < 2 || !is_prime(p as u64) {
        return Err(Error::invalid_input(format!("{p} is not prime")));
    }
    Ok(a.len() + 1)
}

/// The 2n x 2n companion shape: first column a1..a_{2n-1}, p and a
/// superdiagonal of ones; its characteristic polynomial is
/// x^{2n} - a1 x^{2n-1} - ... - a_{2n-1} x - p.
pub fn companion_l(a: &[i64], p: i64) -> Result<IntMatrix> {
    let dim = validate_companion_input(a, p)?;
    let mut rows = vec![vec![0i64; dim]; dim];
    for (i, &ai) in a.iter().enumerate() {
        rows[i][0] = ai;
    }
    rows[dim - 1][0] = p;
    for (i, row) in rows.iter_mut().enumerate().take(dim - 1) {
        row[i + 1] = 1;
    }
    IntMatrix::new(rows)
}

/// The signed companion shape for a Frobenius lift: first column
/// a1, -a2, a3, ..., a_{2n-1}, -p with a superdiagonal of ones; its
/// characteristic polynomial alternates, x^{2n} - a1 x^{2n-1} + a2 x^{2n-2}
/// - ... + p.
pub fn companion_fr(a: &[i64], p: i64) -> Result<IntMatrix> {
    let dim = validate_companion_input(a, p)?;
    let mut rows = vec![vec![0i64; dim]; dim];
    for (i, &ai) in a.iter().enumerate() {
        rows[i][0] = if i % 2 == 0 { ai } else { -ai };
    }
    rows[dim - 1][0] = -p;
    for (i, row) in rows.iter_mut().enumerate().take(dim - 1) {
        row[i + 1] = 1;
    }
    IntMatrix::new(rows)
}

/// Whether the leading coefficient satisfies the Hasse bound a1^2 <= 4p.
pub fn satisfies_hasse_bound(a: &[i64], p: i64) -> Result<bool> {
    validate_companion_input(a, p)?;
    Ok(a[0].checked_mul(a[0]).is_some_and(|sq| sq <= 4 * p))
}

/// Maps a signed Frobenius companion matrix to its unsigned counterpart by
/// flipping the sign of every other first-column entry; applying the same
/// flip twice is the identity.
pub fn functor_map(fr: &IntMatrix) -> Result<IntMatrix> {
    let dim = fr.dim();
    if dim < 2 || dim % 2 != 0 {
        return Err(Error::invalid_input(format!(
            "companion dimension must be even and >= 2, got {dim}"
        )));
    }
    for i in 0..dim {
        for j in 1..dim {
            let e = fr.entry(i, j);
            let expected = i64::from(j == i + 1);
            if e != expected {
                return Err(Error::invalid_input(format!(
                    "entry ({i}, {j}) = {e} breaks the companion shape"
                )));
            }
        }
    }
    let corner = fr.entry(dim - 1, 0);
    if corner >= 0 || !is_prime(corner.unsigned_abs()) {
        return Err(Error::invalid_input(format!(
            "corner entry {corner} must be the negative of a prime"
        )));
    }
    let rows: Vec<Vec<i64>> = fr
        .rows()
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            if i % 2 == 1 {
                r[0] = -r[0];
            }
            r
        })
        .collect();
    IntMatrix::new(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orders::class_number_order;

    fn group(divisors: &[u64]) -> AbelianGroupStructure {
        AbelianGroupStructure::new(divisors.to_vec()).unwrap()
    }

    #[test]
    fn assembly_frozen_examples() {
        let t = sha_from_class_group(&AbelianGroupStructure::trivial()).unwrap();
        assert_eq!((t.k, t.parity, t.order), (0, Parity::Even, 1));
        assert!(t.result.is_trivial());

        let g3 = sha_from_class_group(&group(&[3])).unwrap();
        assert_eq!(g3.result, group(&[3, 3]));
        assert_eq!((g3.k, g3.parity, g3.order), (0, Parity::Even, 9));

        let g2 = sha_from_class_group(&group(&[2])).unwrap();
        assert_eq!(g2.result, group(&[2]));
        assert_eq!((g2.k, g2.parity, g2.order), (1, Parity::Odd, 2));

        let g6 = sha_from_class_group(&group(&[6])).unwrap();
        assert_eq!(g6.result, group(&[3, 6]));
        assert_eq!((g6.k, g6.parity, g6.order), (1, Parity::Odd, 18));

        let g4 = sha_from_class_group(&group(&[4])).unwrap();
        assert_eq!(g4.result, group(&[4, 4]));
        assert_eq!((g4.k, g4.parity, g4.order), (2, Parity::Even, 16));

        let err = sha_from_class_group(&group(&[2, 6])).unwrap_err();
        assert!(err.to_string().contains("decomposition hypothesis violated"));
    }

    #[test]
    fn assembly_order_formula_and_square_dichotomy() {
        for divisors in [
            vec![2u64],
            vec![3],
            vec![4],
            vec![5],
            vec![8],
            vec![12],
            vec![3, 6],
            vec![5, 10],
            vec![3, 3],
            vec![7, 14],
        ] {
            let g = group(&divisors);
            let p = sha_from_class_group(&g).unwrap();
            let odd = g.odd_part().order();
            let expected = if p.k % 2 == 0 {
                g.order() * g.order()
            } else {
                (1u128 << p.k) * odd * odd
            };
            assert_eq!(p.order, expected, "order formula for {g}");
            let root = (p.order as f64).sqrt().round() as u128;
            let is_square = root * root == p.order;
            assert_eq!(is_square, p.k % 2 == 0, "square dichotomy for {g}");
            assert_eq!(p.order, p.result.order());
        }
    }

    #[test]
    fn cm_pipeline_trivial_class_group_inputs() {
        for d in [3i64, 7] {
            let r = sha_cm_curve(d, 1).unwrap();
            assert!(r.class_group.is_trivial());
            assert!(r.sha.result.is_trivial());
            assert_eq!(r.sha.order, 1);
            assert_eq!(r.twin_conductor, 1);
            assert!(r.imaginary_order.is_imaginary());
            assert!(!r.real_order.is_imaginary());
        }
    }

    #[test]
    fn cm_pipeline_search_exhaustion_propagates() {
        let err = sha_cm_curve_bounded(23, 1, 200).unwrap_err();
        assert!(matches!(err, Error::SearchExhausted { bound: 200, .. }));
    }

    #[test]
    fn cm_pipeline_nontrivial_inputs() {
        let r = sha_cm_curve_bounded(5, 1, 300).unwrap();
        assert_eq!(r.class_group, group(&[2]));
        assert_eq!(r.twin_conductor, 8);
        assert_eq!(r.sha.result, group(&[2, 2]));
        assert_eq!(r.sha.order, 4);
        assert_eq!(r.sha.parity, Parity::Even);
        assert_eq!(r.sha.k, 1);
        let real_h = class_number_order(&r.real_order).unwrap();
        assert_eq!(u128::from(real_h), r.class_group.order());

        let r = sha_cm_curve_bounded(5, 2, 300).unwrap();
        assert_eq!(r.class_group, group(&[4]));
        assert_eq!(r.twin_conductor, 21);
        assert_eq!(r.sha.result, group(&[4, 4]));
        assert_eq!(r.sha.order, 16);
        let real_h = class_number_order(&r.real_order).unwrap();
        assert_eq!(real_h, 4);
    }

    #[test]
    fn cm_pipeline_survey_keeps_square_orders() {
        let mut completed = 0;
        for d in 2..=100i64 {
            let r = match sha_cm_curve_bounded(d, 1, 300) {
                Ok(r) => r,
                Err(_) => continue,
            };
            completed += 1;
            let h = r.class_group.order();
            assert_eq!(r.sha.order, h * h, "doubled order for D = {d}");
            let real_h = class_number_order(&r.real_order).unwrap();
            assert_eq!(u128::from(real_h), h, "class numbers agree for D = {d}");
        }
        assert!(completed >= 50, "only {completed} inputs completed");
    }

    fn int_poly(coeffs: &[i64]) -> Vec<num_bigint::BigInt> {
        coeffs.iter().map(|&c| num_bigint::BigInt::from(c)).collect()
    }

    #[test]
    fn companion_shapes_two_by_two() {
        let l = companion_l(&[1], 2).unwrap();
        assert_eq!(l.rows(), &[vec![1, 1], vec![2, 0]]);
        assert_eq!(l.det(), num_bigint::BigInt::from(-2));
        assert_eq!(l.char_poly(), int_poly(&[1, -1, -2]));

        let fr = companion_fr(&[1], 2).unwrap();
        assert_eq!(fr.rows(), &[vec![1, 1], vec![-2, 0]]);
        assert_eq!(fr.det(), num_bigint::BigInt::from(2));
        assert_eq!(fr.char_poly(), int_poly(&[1, -1, 2]));
    }

    #[test]
    fn companion_shapes_four_by_four() {
        let l = companion_l(&[2, -3, 4], 5).unwrap();
        assert_eq!(
            l.rows(),
            &[
                vec![2, 1, 0, 0],
                vec![-3, 0, 1, 0],
                vec![4, 0, 0, 1],
                vec![5, 0, 0, 0],
            ]
        );
        assert_eq!(l.char_poly(), int_poly(&[1, -2, 3, -4, -5]));

        let fr = companion_fr(&[2, -3, 4], 5).unwrap();
        assert_eq!(
            fr.rows(),
            &[
                vec![2, 1, 0, 0],
                vec![3, 0, 1, 0],
                vec![4, 0, 0, 1],
                vec![-5, 0, 0, 0],
            ]
        );
        assert_eq!(fr.char_poly(), int_poly(&[1, -2, -3, -4, 5]));
    }

    #[test]
    fn companion_rejections_and_hasse() {
        assert!(companion_l(&[1, 2], 3).is_err());
        assert!(companion_l(&[], 3).is_err());
        assert!(companion_l(&[1], 4).is_err());
        assert!(companion_fr(&[1], 9).is_err());
        assert!(satisfies_hasse_bound(&[1], 2).unwrap());
        assert!(satisfies_hasse_bound(&[2], 2).unwrap());
        assert!(!satisfies_hasse_bound(&[3], 2).unwrap());
        assert!(!satisfies_hasse_bound(&[-5], 5).unwrap());
    }

    #[test]
    fn functor_map_strips_signs() {
        let fr = companion_fr(&[1], 2).unwrap();
        let img = functor_map(&fr).unwrap();
        assert_eq!(img, companion_l(&[1], 2).unwrap());

        let fr4 = companion_fr(&[2, -3, 4], 5).unwrap();
        assert_eq!(functor_map(&fr4).unwrap(), companion_l(&[2, -3, 4], 5).unwrap());
    }

    #[test]
    fn functor_map_validates_shape() {
        let not_companion = IntMatrix::new(vec![vec![1, 2], vec![-2, 0]]).unwrap();
        assert!(functor_map(&not_companion).is_err());
        let positive_corner = companion_l(&[1], 2).unwrap();
        assert!(functor_map(&positive_corner).is_err());
        let odd_dim = IntMatrix::identity(3);
        assert!(functor_map(&odd_dim).is_err());
    }

    #[test]
    fn sign_flip_is_an_involution() {
        let flip = |m: &IntMatrix| {
            let rows: Vec<Vec<i64>> = m
                .rows()
                .iter()
                .enumerate()
                .map(|(i, row)| {
                    let mut r = row.clone();
                    if i % 2 == 1 {
                        r[0] = -r[0];
                    }
                    r
                })
                .collect();
            IntMatrix::new(rows).unwrap()
        };
        let fr = companion_fr(&[7, -1, 3], 11).unwrap();
        assert_eq!(flip(&flip(&fr)), fr);
        assert_eq!(flip(&fr), companion_l(&[7, -1, 3], 11).unwrap());
    }
}
