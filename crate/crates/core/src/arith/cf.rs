//! Continued fractions: exact expansion of rationals and quadratic
//! irrationals, minimal-period detection, value reconstruction, and the
//! lexicographic comparison rule that orders values across distinct radicands.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::ints::{div_floor_big, isqrt_big};
use super::quad::{ExactReal, QuadIrrational};
use crate::error::{Error, Result};

/// Hard ceiling on expansion steps; periods at desk scale are far smaller.
const MAX_CF_STEPS: usize = 1_000_000;

/// Eventually periodic continued fraction: preperiod terms, then the period
/// repeating forever. An empty period means the value is rational.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ContinuedFraction {
    preperiod: Vec<BigInt>,
    period: Vec<BigInt>,
}

/// Quotient generator for (p + sqrt(n))/q with non-square n and q | n - p^2.
pub(crate) struct SurdExpansion {
    p: BigInt,
    q: BigInt,
    n: BigInt,
    sqrt_n: BigInt,
}

impl SurdExpansion {
    /// Builds the generator, rescaling the triple so q divides n - p^2.
    pub(crate) fn new(mut p: BigInt, mut q: BigInt, mut n: BigInt) -> Self {
        assert!(!q.is_zero() && n.is_positive());
        if ((&n - &p * &p) % &q) != BigInt::zero() {
            let scale = q.abs();
            p *= &scale;
            n *= &q * &q;
            q *= &scale;
        }
        let sqrt_n = isqrt_big(&n);
        debug_assert_ne!(&sqrt_n * &sqrt_n, n, "radicand must not be a square");
        SurdExpansion { p, q, n, sqrt_n }
    }

    pub(crate) fn state(&self) -> (BigInt, BigInt) {
        (self.p.clone(), self.q.clone())
    }

    /// Emits the next partial quotient and advances.
    pub(crate) fn step(&mut self) -> BigInt {
        let a = if self.q.is_positive() {
            div_floor_big(&(&self.p + &self.sqrt_n), &self.q)
        } else {
            div_floor_big(&(-&self.p - &self.sqrt_n - 1u8), &(-&self.q))
        };
        let p_next = &a * &self.q - &self.p;
        let q_next = (&self.n - &p_next * &p_next) / &self.q;
        self.p = p_next;
        self.q = q_next;
        a
    }
}

/// Product of [[a,1],[1,0]] over the terms, left to right.
pub(crate) fn fold_matrix(terms: &[BigInt]) -> (BigInt, BigInt, BigInt, BigInt) {
    let (mut m00, mut m01, mut m10, mut m11) = (
        BigInt::one(),
        BigInt::zero(),
        BigInt::zero(),
        BigInt::one(),
    );
    for a in terms {
        let n00 = &m00 * a + &m01;
        let n10 = &m10 * a + &m11;
        m01 = m00;
        m11 = m10;
        m00 = n00;
        m10 = n10;
    }
    (m00, m01, m10, m11)
}

impl ContinuedFraction {
    /// Builds a continued fraction from raw terms, canonicalizing the period
    /// (primitive length, rotation absorbed into the preperiod).
    pub fn new(preperiod: Vec<BigInt>, period: Vec<BigInt>) -> Result<Self> {
        if preperiod.is_empty() && period.is_empty() {
            return Err(Error::invalid_input("continued fraction needs a term"));
        }
        for (i, t) in preperiod.iter().enumerate().skip(1) {
            if t < &BigInt::one() {
                return Err(Error::invalid_input(format!(
                    "partial quotient {t} at position {i} must be >= 1"
                )));
            }
        }
        if period.iter().any(|t| t < &BigInt::one()) {
            return Err(Error::invalid_input("period terms must be >= 1"));
        }
        if !period.is_empty() && preperiod.is_empty() && period[0] < BigInt::one() {
            return Err(Error::invalid_input("leading period term must be >= 1"));
        }
        let mut cf = ContinuedFraction { preperiod, period };
        cf.canonicalize();
        Ok(cf)
    }

    fn canonicalize(&mut self) {
        if self.period.is_empty() {
            return;
        }
        // Shrink to the primitive period.
        let t = self.period.len();
        for len in 1..t {
            if t % len == 0 && (len..t).all(|i| self.period[i] == self.period[i % len]) {
                self.period.truncate(len);
                break;
            }
        }
        // Absorb trailing preperiod terms that merely rotate the period.
        while let Some(last) = self.preperiod.last() {
            if last == self.period.last().unwrap() {
                let rotated = self.period.pop().unwrap();
                self.period.insert(0, rotated);
                self.preperiod.pop();
            } else {
                break;
            }
        }
    }

    pub fn preperiod(&self) -> &[BigInt] {
        &self.preperiod
    }

    pub fn period(&self) -> &[BigInt] {
        &self.period
    }

    pub fn is_finite(&self) -> bool {
        self.period.is_empty()
    }

    /// Iterator over partial quotients; endless when the period is nonempty.
    pub fn quotients(&self) -> Quotients<'_> {
        Quotients { cf: self, idx: 0 }
    }

    /// Reconstructs the exact value.
    pub fn value(&self) -> Result<ExactReal> {
        if self.period.is_empty() {
            let mut rev = self.preperiod.iter().rev();
            let last = rev
                .next()
                .ok_or_else(|| Error::invalid_input("empty continued fraction"))?;
            let mut v = BigRational::from_integer(last.clone());
            for a in rev {
                if v.is_zero() {
                    return Err(Error::invalid_input("zero tail in continued fraction"));
                }
                v = BigRational::from_integer(a.clone()) + v.recip();
            }
            return Ok(ExactReal::Rational(v));
        }
        // The purely periodic tail y satisfies a y^2 + b y + c = 0 read off the
        // period matrix; dividing out the content first keeps the radicand at
        // the size of y's primitive minimal polynomial.
        let (m00, m01, m10, m11) = fold_matrix(&self.period);
        let (a, b, c) = (m10, m11 - m00, -m01);
        let g = a.gcd(&b).gcd(&c);
        let (a, b) = (a / &g, b / &g);
        let c = c / &g;
        let disc = &b * &b - BigInt::from(4) * &a * &c;
        // y is the root greater than 1, hence the + branch with a > 0.
        let tail = match ExactReal::quadratic(-&b, 1, BigInt::from(2) * &a, disc)? {
            ExactReal::Quadratic(q) => q,
            ExactReal::Rational(_) => {
                return Err(Error::Inconsistency(
                    "periodic continued fraction reconstructed to a rational".into(),
                ))
            }
        };
        let mut v = ExactReal::Quadratic(tail);
        for a in self.preperiod.iter().rev() {
            v = v.recip()?.add_int(a.clone());
        }
        Ok(v)
    }
}

impl fmt::Display for ContinuedFraction {
    /// Renders as `[a0; a1, a2, (p0, p1)]` with the period parenthesized.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, a) in self.preperiod.iter().enumerate() {
            match i {
                0 => write!(f, "{a}")?,
                1 => write!(f, "; {a}")?,
                _ => write!(f, ", {a}")?,
            }
        }
        if !self.period.is_empty() {
            if self.preperiod.is_empty() {
                write!(f, "(")?;
            } else if self.preperiod.len() == 1 {
                write!(f, "; (")?;
            } else {
                write!(f, ", (")?;
            }
            for (i, a) in self.period.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{a}")?;
            }
            write!(f, ")")?;
        }
        write!(f, "]")
    }
}

/// Iterator over the partial quotients of a continued fraction.
pub struct Quotients<'a> {
    cf: &'a ContinuedFraction,
    idx: usize,
}

impl<'a> Iterator for Quotients<'a> {
    type Item = &'a BigInt;

    fn next(&mut self) -> Option<&'a BigInt> {
        let pre = self.cf.preperiod.len();
        if self.idx < pre {
            self.idx += 1;
            return Some(&self.cf.preperiod[self.idx - 1]);
        }
        if self.cf.period.is_empty() {
            return None;
        }
        let k = (self.idx - pre) % self.cf.period.len();
        self.idx += 1;
        Some(&self.cf.period[k])
    }
}

/// Finite expansion of a rational by the Euclidean algorithm; the final
/// quotient is automatically >= 2 whenever the expansion has length > 1.
pub fn of_rational(r: &BigRational) -> ContinuedFraction {
    let mut p = r.numer().clone();
    let mut q = r.denom().clone();
    let mut quotients = Vec::new();
    loop {
        let a = div_floor_big(&p, &q);
        let rem = &p - &a * &q;
        quotients.push(a);
        if rem.is_zero() {
            break;
        }
        p = q;
        q = rem;
    }
    ContinuedFraction {
        preperiod: quotients,
        period: Vec::new(),
    }
}

/// Eventually periodic expansion with minimal preperiod and period, found by
/// detecting the first repeated state of the quotient generator.
pub fn of_quadratic(x: &QuadIrrational) -> Result<ContinuedFraction> {
    let (p, q) = if x.b().is_positive() {
        (x.a().clone(), x.c().clone())
    } else {
        (-x.a(), -x.c())
    };
    let n = x.b() * x.b() * x.d();
    let mut machine = SurdExpansion::new(p, q, n);
    let mut seen: HashMap<(BigInt, BigInt), usize> = HashMap::new();
    let mut quotients: Vec<BigInt> = Vec::new();
    loop {
        let state = machine.state();
        if let Some(&i) = seen.get(&state) {
            let period = quotients.split_off(i);
            return Ok(ContinuedFraction {
                preperiod: quotients,
                period,
            });
        }
        if quotients.len() >= MAX_CF_STEPS {
            return Err(Error::bound_exceeded(
                "continued fraction expansion steps",
                MAX_CF_STEPS as u64,
            ));
        }
        seen.insert(state, quotients.len());
        quotients.push(machine.step());
    }
}

/// Expands any exact real value.
pub fn cf_expand(x: &ExactReal) -> Result<ContinuedFraction> {
    match x {
        ExactReal::Rational(r) => Ok(of_rational(r)),
        ExactReal::Quadratic(q) => of_quadratic(q),
    }
}

enum QuotientStream {
    Finite(std::vec::IntoIter<BigInt>),
    Surd(SurdExpansion),
}

impl QuotientStream {
    fn of(x: &ExactReal) -> Self {
        match x {
            ExactReal::Rational(r) => QuotientStream::Finite(of_rational(r).preperiod.into_iter()),
            ExactReal::Quadratic(q) => {
                let (p, c) = if q.b().is_positive() {
                    (q.a().clone(), q.c().clone())
                } else {
                    (-q.a(), -q.c())
                };
                let n = q.b() * q.b() * q.d();
                QuotientStream::Surd(SurdExpansion::new(p, c, n))
            }
        }
    }

    fn next(&mut self) -> Option<BigInt> {
        match self {
            QuotientStream::Finite(it) => it.next(),
            QuotientStream::Surd(m) => Some(m.step()),
        }
    }
}

/// Orders two values by comparing quotient streams: at the first index where
/// they differ, larger quotient means larger value at even depth and smaller
/// value at odd depth; an exhausted finite stream counts as +infinity there.
pub(crate) fn cmp_by_expansion(x: &ExactReal, y: &ExactReal) -> Ordering {
    if x == y {
        return Ordering::Equal;
    }
    let mut sx = QuotientStream::of(x);
    let mut sy = QuotientStream::of(y);
    for depth in 0..MAX_CF_STEPS {
        let ax = sx.next();
        let ay = sy.next();
        let ord = match (ax, ay) {
            (None, None) => return Ordering::Equal,
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (Some(a), Some(b)) => match a.cmp(&b) {
                Ordering::Equal => continue,
                o => o,
            },
        };
        return if depth % 2 == 0 { ord } else { ord.reverse() };
    }
    unreachable!("distinct values must diverge within the step bound")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn bigs(v: &[i64]) -> Vec<BigInt> {
        v.iter().copied().map(BigInt::from).collect()
    }

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(big(p), big(q))
    }

    #[test]
    fn expansion_of_one_half() {
        let cf = of_rational(&rat(1, 2));
        assert_eq!(cf.preperiod(), bigs(&[0, 2]).as_slice());
        assert!(cf.is_finite());
    }

    #[test]
    fn expansion_of_sqrt2() {
        let x = QuadIrrational::new(0, 1, 1, 2).unwrap();
        let cf = of_quadratic(&x).unwrap();
        assert_eq!(cf.preperiod(), bigs(&[1]).as_slice());
        assert_eq!(cf.period(), bigs(&[2]).as_slice());
        assert_eq!(cf.to_string(), "[1; (2)]");
    }

    #[test]
    fn expansion_of_golden_conjugate() {
        // (sqrt5 - 1)/2 = [0; (1)]
        let x = QuadIrrational::new(-1, 1, 2, 5).unwrap();
        let cf = of_quadratic(&x).unwrap();
        assert_eq!(cf.preperiod(), bigs(&[0]).as_slice());
        assert_eq!(cf.period(), bigs(&[1]).as_slice());
    }

    #[test]
    fn sqrt2_convergents_solve_pell() {
        // Convergents p/q of sqrt2 satisfy p^2 - 2q^2 = +-1.
        let x = QuadIrrational::new(0, 1, 1, 2).unwrap();
        let cf = of_quadratic(&x).unwrap();
        let terms: Vec<BigInt> = cf.quotients().take(12).cloned().collect();
        for k in 1..=terms.len() {
            let (p, _, q, _) = fold_matrix(&terms[..k]);
            let val = &p * &p - big(2) * &q * &q;
            assert!(val == big(1) || val == big(-1), "k={k} gave {val}");
        }
    }

    #[test]
    fn reconstruction_round_trips() {
        for (a, b, c, d) in [
            (0i64, 1i64, 1i64, 2i64),
            (-1, 1, 2, 5),
            (3, -2, 7, 13),
            (-5, 3, 4, 6),
            (1, 1, 3, 19),
        ] {
            let x = QuadIrrational::new(a, b, c, d).unwrap();
            let cf = of_quadratic(&x).unwrap();
            let back = cf.value().unwrap();
            assert_eq!(back, ExactReal::Quadratic(x.clone()), "input {x}");
        }
        for (p, q) in [(1i64, 2i64), (7, 3), (-9, 5), (22, 7)] {
            let r = rat(p, q);
            assert_eq!(
                of_rational(&r).value().unwrap(),
                ExactReal::Rational(r.clone())
            );
        }
    }

    #[test]
    fn negative_values_expand_and_round_trip() {
        // -sqrt2 = [-2; (2, ...)] style expansion with a0 < 0.
        let x = QuadIrrational::new(0, -1, 1, 2).unwrap();
        let cf = of_quadratic(&x).unwrap();
        assert_eq!(cf.preperiod()[0], big(-2));
        assert_eq!(cf.value().unwrap(), ExactReal::Quadratic(x));
    }

    #[test]
    fn canonicalization_of_raw_terms() {
        // Period (2,2) shrinks to (2); trailing rotation folds away.
        let cf = ContinuedFraction::new(bigs(&[1]), bigs(&[2, 2])).unwrap();
        assert_eq!(cf.period(), bigs(&[2]).as_slice());
        let a = ContinuedFraction::new(bigs(&[1, 2]), bigs(&[3, 2])).unwrap();
        let b = ContinuedFraction::new(bigs(&[1]), bigs(&[2, 3])).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.value().unwrap(), b.value().unwrap());
    }

    #[test]
    fn comparison_rule_orders_values() {
        use std::cmp::Ordering::*;
        let sqrt = |d: i64| ExactReal::quadratic(0, 1, 1, d).unwrap();
        assert_eq!(cmp_by_expansion(&sqrt(2), &sqrt(3)), Less);
        assert_eq!(cmp_by_expansion(&sqrt(3), &sqrt(2)), Greater);
        assert_eq!(cmp_by_expansion(&sqrt(2), &sqrt(2)), Equal);
        let half = ExactReal::Rational(rat(1, 2));
        let two_fifths = ExactReal::Rational(rat(2, 5));
        assert_eq!(cmp_by_expansion(&half, &two_fifths), Greater);
        let phi = ExactReal::quadratic(-1, 1, 2, 5).unwrap();
        assert_eq!(cmp_by_expansion(&phi, &half), Greater);
        assert_eq!(cmp_by_expansion(&phi, &sqrt(2)), Less);
    }

    #[test]
    fn quotient_stream_cycles() {
        let cf = ContinuedFraction::new(bigs(&[1, 2]), bigs(&[3, 4])).unwrap();
        let taken: Vec<i64> = cf
            .quotients()
            .take(8)
            .map(|b| i64::try_from(b).unwrap())
            .collect();
        assert_eq!(taken, vec![1, 2, 3, 4, 3, 4, 3, 4]);
    }
}
