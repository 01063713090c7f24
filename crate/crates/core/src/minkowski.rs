//! Exact evaluation of the Minkowski question-mark function on rationals and
//! quadratic irrationals, and the lattice scale-embedding it induces.
//!
//! Rational inputs give a finite alternating series with a dyadic value;
//! quadratic irrationals have an eventually periodic continued fraction, so
//! the series tail is a geometric sum with signed ratio and the value is a
//! non-dyadic rational, both computed in closed form.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::cf::cf_expand;
use crate::arith::quad::{ExactReal, QuadIrrational};
use crate::error::{Error, Result};

/// Cap on the dyadic exponents appearing in the series; guards memory.
pub const MAX_DYADIC_EXPONENT: u64 = 1_000_000;

/// A rational in [0, 1] tagged as the value of the question-mark function;
/// its denominator is a power of two exactly when the input was rational.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DyadicOrRational {
    value: BigRational,
}

impl DyadicOrRational {
    pub fn new(value: BigRational) -> Result<Self> {
        if value.is_negative() || value > BigRational::one() {
            return Err(Error::invalid_input(format!(
                "question-mark value {value} outside [0, 1]"
            )));
        }
        Ok(DyadicOrRational { value })
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.value
    }

    pub fn numerator(&self) -> &BigInt {
        self.value.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.value.denom()
    }

    /// Whether the denominator is a power of two.
    pub fn is_dyadic(&self) -> bool {
        let d = self.value.denom();
        let dm1 = d - BigInt::one();
        (d & &dm1).is_zero()
    }
}

impl std::fmt::Display for DyadicOrRational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// 1 / 2^s as an exact rational.
fn pow2_recip(s: u64) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << (s as usize))
}

/// Adds quotient `a` to the running exponent, guarding the configured cap.
fn bump_exponent(s: &mut u64, a: &BigInt) -> Result<()> {
    let step = a
        .to_u64()
        .filter(|&v| v <= MAX_DYADIC_EXPONENT)
        .ok_or_else(|| Error::bound_exceeded("series exponent", MAX_DYADIC_EXPONENT))?;
    *s = s
        .checked_add(step)
        .filter(|&v| v <= MAX_DYADIC_EXPONENT)
        .ok_or_else(|| Error::bound_exceeded("series exponent", MAX_DYADIC_EXPONENT))?;
    Ok(())
}

/// ?(x) for rational x in [0, 1]: the finite series a0 + 2 sum over the
/// continued fraction quotients of (-1)^(k+1) 2^(-(a1+...+ak)).
pub fn question_mark(x: &BigRational) -> Result<DyadicOrRational> {
    if x.is_negative() || x > &BigRational::one() {
        return Err(Error::invalid_input(format!("{x} outside [0, 1]")));
    }
    let cf = cf_expand(&ExactReal::rational(x.clone()))?;
    let pre = cf.preperiod();
    let mut sum = BigRational::from(pre[0].clone());
    let mut s: u64 = 0;
    for (k, a) in pre[1..].iter().enumerate() {
        bump_exponent(&mut s, a)?;
        let term = pow2_recip(s - 1);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    DyadicOrRational::new(sum)
}

/// ?(x) for a quadratic irrational x in (0, 1), summed in closed form: the
/// head covers the preperiod and the periodic tail is a geometric series
/// with ratio (-1)^T 2^(-S) over one period of length T and quotient sum S.
pub fn question_mark_quad(x: &QuadIrrational) -> Result<DyadicOrRational> {
    let zero = BigRational::zero();
    let one = BigRational::one();
    if x.cmp_rational(&zero) != std::cmp::Ordering::Greater
        || x.cmp_rational(&one) != std::cmp::Ordering::Less
    {
        return Err(Error::invalid_input("input must lie in (0, 1)"));
    }
    let cf = cf_expand(&ExactReal::from(x.clone()))?;
    let pre = cf.preperiod();
    let per = cf.period();
    if per.is_empty() {
        return Err(Error::Inconsistency(
            "quadratic irrational produced a finite expansion".into(),
        ));
    }
    let mut head = BigRational::from(pre[0].clone());
    let mut s: u64 = 0;
    for (k, a) in pre[1..].iter().enumerate() {
        bump_exponent(&mut s, a)?;
        let term = pow2_recip(s - 1);
        if k % 2 == 0 {
            head += term;
        } else {
            head -= term;
        }
    }
    // Signed sum of 2^(-(b0+...+bi)) across one period.
    let s0 = s;
    let mut inner = BigRational::zero();
    let mut sigma: u64 = 0;
    for (i, b) in per.iter().enumerate() {
        bump_exponent(&mut sigma, b)?;
        let term = pow2_recip(sigma);
        if i % 2 == 0 {
            inner += term;
        } else {
            inner -= term;
        }
    }
    let ratio = if per.len() % 2 == 0 {
        pow2_recip(sigma)
    } else {
        -pow2_recip(sigma)
    };
    let lead_sign = if pre.len() % 2 == 0 {
        -BigRational::from(BigInt::from(2))
    } else {
        BigRational::from(BigInt::from(2))
    };
    let tail = lead_sign * pow2_recip(s0) * inner / (BigRational::one() - ratio);
    let out = DyadicOrRational::new(head + tail)?;
    if out.is_dyadic() {
        return Err(Error::Inconsistency(
            "question-mark value of an irrational collapsed to a dyadic".into(),
        ));
    }
    Ok(out)
}

/// ?( ) for any exact real in [0, 1].
pub fn question_mark_exact(x: &ExactReal) -> Result<DyadicOrRational> {
    match x {
        ExactReal::Rational(r) => question_mark(r),
        ExactReal::Quadratic(q) => question_mark_quad(q),
    }
}

/// All lattice points m + n*theta in [0, 1] with |m|, |n| <= n_bound, each
/// with its exact question-mark image, sorted by value; the images are
/// checked to be strictly increasing.
pub fn scale_embedding(
    theta: &QuadIrrational,
    n_bound: i64,
) -> Result<Vec<((i64, i64), DyadicOrRational)>> {
    let zero = BigRational::zero();
    let one = BigRational::one();
    if theta.cmp_rational(&zero) != std::cmp::Ordering::Greater
        || theta.cmp_rational(&one) != std::cmp::Ordering::Less
    {
        return Err(Error::invalid_input("theta must lie in (0, 1)"));
    }
    if n_bound < 1 {
        return Err(Error::invalid_input("bound must be >= 1"));
    }
    let lo = ExactReal::zero();
    let hi = ExactReal::one();
    let mut rows: Vec<((i64, i64), ExactReal, DyadicOrRational)> = Vec::new();
    for n in -n_bound..=n_bound {
        let scaled = if n == 0 {
            ExactReal::zero()
        } else {
            theta.mul_rational(&BigRational::from(BigInt::from(n)))
        };
        for m in -n_bound..=n_bound {
            let v = scaled.add_int(m);
            if v.cmp_exact(&lo) == std::cmp::Ordering::Less
                || v.cmp_exact(&hi) == std::cmp::Ordering::Greater
            {
                continue;
            }
            let image = question_mark_exact(&v)?;
            rows.push(((m, n), v, image));
        }
    }
    rows.sort_by(|x, y| x.1.cmp_exact(&y.1));
    for w in rows.windows(2) {
        if w[0].2 >= w[1].2 {
            return Err(Error::Inconsistency(format!(
                "question-mark images out of order at {} and {}",
                w[0].2, w[1].2
            )));
        }
    }
    Ok(rows.into_iter().map(|(mn, _, img)| (mn, img)).collect())
}
