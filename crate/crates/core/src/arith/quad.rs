//! Exact arithmetic for real quadratic irrationals (a + b*sqrt(d))/c and for
//! the mixed rational/irrational values the rest of the crate passes around.
//!
//! Every value is kept in a canonical form so that structural equality is
//! value equality: d squarefree and > 1, b nonzero, c positive, and
//! gcd(a, b, c) = 1. Constructors that would produce a rational value (b = 0,
//! or d collapsing to a perfect square) return the `Rational` variant instead.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ints::{div_floor_big, isqrt_big, square_part};
use crate::error::{Error, Result};

/// A real quadratic irrational (a + b*sqrt(d))/c in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadIrrational {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

/// Either an exact rational or an exact quadratic irrational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExactReal {
    Rational(BigRational),
    Quadratic(QuadIrrational),
}

/// Sign of u + v*sqrt(d) for squarefree d > 1, computed exactly.
fn sign_linear(u: &BigInt, v: &BigInt, d: &BigInt) -> Ordering {
    if v.is_zero() {
        return u.cmp(&BigInt::zero());
    }
    if u.is_zero() {
        return v.cmp(&BigInt::zero());
    }
    match (u.is_positive(), v.is_positive()) {
        (true, true) => Ordering::Greater,
        (false, false) => Ordering::Less,
        _ => {
            // Mixed signs: compare u^2 against v^2 d; equality would force
            // sqrt(d) rational, so it cannot occur.
            let uu = u * u;
            let vvd = v * v * d;
            debug_assert_ne!(uu, vvd);
            if v.is_positive() {
                vvd.cmp(&uu)
            } else {
                uu.cmp(&vvd)
            }
        }
    }
}

impl QuadIrrational {
    /// Builds (a + b*sqrt(d))/c, normalizing; errors if the value is rational.
    pub fn new(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
        d: impl Into<BigInt>,
    ) -> Result<Self> {
        match ExactReal::quadratic(a, b, c, d)? {
            ExactReal::Quadratic(q) => Ok(q),
            ExactReal::Rational(r) => Err(Error::invalid_input(format!(
                "value is rational ({r}), not a quadratic irrational"
            ))),
        }
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn c(&self) -> &BigInt {
        &self.c
    }

    /// The squarefree radicand d > 1.
    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn conjugate(&self) -> Self {
        QuadIrrational {
            a: self.a.clone(),
            b: -&self.b,
            c: self.c.clone(),
            d: self.d.clone(),
        }
    }

    pub fn neg(&self) -> Self {
        QuadIrrational {
            a: -&self.a,
            b: -&self.b,
            c: self.c.clone(),
            d: self.d.clone(),
        }
    }

    /// Multiplicative inverse; always irrational again.
    pub fn recip(&self) -> Self {
        // c/(a + b sqrt d) = c(a - b sqrt d)/(a^2 - b^2 d)
        let norm = &self.a * &self.a - &self.b * &self.b * &self.d;
        debug_assert!(!norm.is_zero());
        let q = ExactReal::quadratic(
            &self.c * &self.a,
            -(&self.c * &self.b),
            norm,
            self.d.clone(),
        )
        .expect("reciprocal of an irrational is irrational");
        match q {
            ExactReal::Quadratic(q) => q,
            ExactReal::Rational(_) => unreachable!("reciprocal collapsed to a rational"),
        }
    }

    pub fn add_rational(&self, r: &BigRational) -> Self {
        let (p, q) = (r.numer(), r.denom());
        let quad = ExactReal::quadratic(
            &self.a * q + p * &self.c,
            &self.b * q,
            &self.c * q,
            self.d.clone(),
        )
        .expect("radicand unchanged");
        match quad {
            ExactReal::Quadratic(q) => q,
            ExactReal::Rational(_) => unreachable!("adding a rational keeps irrationality"),
        }
    }

    pub fn add_int(&self, n: impl Into<BigInt>) -> Self {
        let n: BigInt = n.into();
        self.add_rational(&BigRational::from_integer(n))
    }

    /// Scales by a rational; returns a rational zero when r = 0.
    pub fn mul_rational(&self, r: &BigRational) -> ExactReal {
        if r.is_zero() {
            return ExactReal::Rational(BigRational::zero());
        }
        ExactReal::quadratic(
            &self.a * r.numer(),
            &self.b * r.numer(),
            &self.c * r.denom(),
            self.d.clone(),
        )
        .expect("radicand unchanged")
    }

    /// Sum with another value over the same radicand; may collapse to Q.
    pub fn add_quad(&self, other: &Self) -> Result<ExactReal> {
        if self.d != other.d {
            return Err(Error::invalid_input(format!(
                "radicands differ: sqrt({}) vs sqrt({})",
                self.d, other.d
            )));
        }
        ExactReal::quadratic(
            &self.a * &other.c + &other.a * &self.c,
            &self.b * &other.c + &other.b * &self.c,
            &self.c * &other.c,
            self.d.clone(),
        )
    }

    /// Product with another value over the same radicand; may collapse to Q.
    pub fn mul_quad(&self, other: &Self) -> Result<ExactReal> {
        if self.d != other.d {
            return Err(Error::invalid_input(format!(
                "radicands differ: sqrt({}) vs sqrt({})",
                self.d, other.d
            )));
        }
        ExactReal::quadratic(
            &self.a * &other.a + &self.b * &other.b * &self.d,
            &self.a * &other.b + &self.b * &other.a,
            &self.c * &other.c,
            self.d.clone(),
        )
    }

    /// Exact floor.
    pub fn floor(&self) -> BigInt {
        // floor(b sqrt d) first; b^2 d is never a perfect square here.
        let bbd = &self.b * &self.b * &self.d;
        let root = isqrt_big(&bbd);
        let s = if self.b.is_positive() {
            root
        } else {
            -root - 1
        };
        div_floor_big(&(&self.a + s), &self.c)
    }

    pub fn cmp_rational(&self, r: &BigRational) -> Ordering {
        let u = &self.a * r.denom() - r.numer() * &self.c;
        let v = &self.b * r.denom();
        sign_linear(&u, &v, &self.d)
    }

    /// Total order against another value over the same radicand.
    pub fn cmp_same_d(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.d, other.d);
        let u = &self.a * &other.c - &other.a * &self.c;
        let v = &self.b * &other.c - &other.b * &self.c;
        sign_linear(&u, &v, &self.d)
    }

    pub fn is_positive(&self) -> bool {
        sign_linear(&self.a, &self.b, &self.d) == Ordering::Greater
    }

    /// Loose double-precision value, for display only.
    pub fn to_f64_lossy(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        let c = self.c.to_f64().unwrap_or(f64::NAN);
        let d = self.d.to_f64().unwrap_or(f64::NAN);
        (a + b * d.sqrt()) / c
    }
}

impl fmt::Display for QuadIrrational {
    /// Canonical literal form `(a+b*sqrtD)/c`, always fully parenthesized.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.b.is_negative() { "-" } else { "+" };
        write!(
            f,
            "({}{}{}*sqrt{})/{}",
            self.a,
            sign,
            self.b.abs(),
            self.d,
            self.c
        )
    }
}

impl ExactReal {
    /// Builds (a + b*sqrt(d))/c for any integer radicand d >= 0, extracting
    /// the square part of d and collapsing to a rational when possible.
    pub fn quadratic(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
        d: impl Into<BigInt>,
    ) -> Result<Self> {
        let mut a: BigInt = a.into();
        let mut b: BigInt = b.into();
        let mut c: BigInt = c.into();
        let d: BigInt = d.into();
        if c.is_zero() {
            return Err(Error::invalid_input("zero denominator"));
        }
        if d.is_negative() {
            return Err(Error::invalid_input(format!(
                "negative radicand {d}: value is not real"
            )));
        }
        let d_u64 = d
            .to_u64()
            .ok_or_else(|| Error::invalid_input(format!("radicand {d} out of supported range")))?;
        let (s, k) = square_part(d_u64)?;
        b *= BigInt::from(s);
        if k <= 1 || b.is_zero() {
            // sqrt(k) is an integer (k in {0, 1}) or the surd term vanishes.
            if k == 1 {
                a += &b;
            }
            return Ok(ExactReal::Rational(BigRational::new(a, c)));
        }
        if c.is_negative() {
            a = -a;
            b = -b;
            c = -c;
        }
        let g = a.gcd(&b).gcd(&c);
        if !g.is_one() {
            a /= &g;
            b /= &g;
            c /= &g;
        }
        Ok(ExactReal::Quadratic(QuadIrrational {
            a,
            b,
            c,
            d: BigInt::from(k),
        }))
    }

    pub fn rational(r: BigRational) -> Self {
        ExactReal::Rational(r)
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        ExactReal::Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, ExactReal::Rational(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            ExactReal::Rational(r) => Some(r),
            ExactReal::Quadratic(_) => None,
        }
    }

    pub fn as_quadratic(&self) -> Option<&QuadIrrational> {
        match self {
            ExactReal::Rational(_) => None,
            ExactReal::Quadratic(q) => Some(q),
        }
    }

    pub fn floor(&self) -> BigInt {
        match self {
            ExactReal::Rational(r) => r.floor().to_integer(),
            ExactReal::Quadratic(q) => q.floor(),
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            ExactReal::Rational(r) => ExactReal::Rational(-r),
            ExactReal::Quadratic(q) => ExactReal::Quadratic(q.neg()),
        }
    }

    pub fn recip(&self) -> Result<Self> {
        match self {
            ExactReal::Rational(r) => {
                if r.is_zero() {
                    Err(Error::invalid_input("reciprocal of zero"))
                } else {
                    Ok(ExactReal::Rational(r.recip()))
                }
            }
            ExactReal::Quadratic(q) => Ok(ExactReal::Quadratic(q.recip())),
        }
    }

    pub fn add_rational(&self, r: &BigRational) -> Self {
        match self {
            ExactReal::Rational(x) => ExactReal::Rational(x + r),
            ExactReal::Quadratic(q) => ExactReal::Quadratic(q.add_rational(r)),
        }
    }

    pub fn add_int(&self, n: impl Into<BigInt>) -> Self {
        self.add_rational(&BigRational::from_integer(n.into()))
    }

    pub fn is_positive(&self) -> bool {
        match self {
            ExactReal::Rational(r) => r.is_positive(),
            ExactReal::Quadratic(q) => q.is_positive(),
        }
    }

    /// Exact total order across both variants. Values over distinct radicands
    /// are separated through their continued fraction expansions.
    pub fn cmp_exact(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExactReal::Rational(x), ExactReal::Rational(y)) => x.cmp(y),
            (ExactReal::Quadratic(q), ExactReal::Rational(r)) => q.cmp_rational(r),
            (ExactReal::Rational(r), ExactReal::Quadratic(q)) => q.cmp_rational(r).reverse(),
            (ExactReal::Quadratic(x), ExactReal::Quadratic(y)) => {
                if x.d() == y.d() {
                    x.cmp_same_d(y)
                } else {
                    super::cf::cmp_by_expansion(self, other)
                }
            }
        }
    }

    /// Parses the canonical literal grammar:
    /// integers `-3`, fractions `2/7`, surds `sqrt2`, shifted surds
    /// `sqrt2-1` / `sqrt5+2`, and the full form `(a+b*sqrtD)/c`.
    pub fn parse_literal(input: &str) -> Result<Self> {
        let s = input.trim();
        let bad = |msg: &str| Error::invalid_input(format!("cannot parse `{s}`: {msg}"));
        if s.is_empty() {
            return Err(bad("empty literal"));
        }
        let parse_int = |t: &str| -> Result<BigInt> {
            t.parse::<BigInt>()
                .map_err(|_| bad(&format!("`{t}` is not an integer")))
        };
        if let Some(rest) = s.strip_prefix("sqrt") {
            // sqrtD, sqrtD+k, sqrtD-k
            if rest.is_empty() {
                return Err(bad("missing radicand"));
            }
            let split = rest
                .char_indices()
                .skip(1)
                .find(|(_, ch)| *ch == '+' || *ch == '-')
                .map(|(i, _)| i)
                .unwrap_or(rest.len());
            let (d_str, shift) = rest.split_at(split);
            let d = parse_int(d_str)?;
            let k: BigInt = if shift.is_empty() {
                BigInt::zero()
            } else {
                parse_int(shift)?
            };
            return ExactReal::quadratic(k, 1, 1, d);
        }
        if let Some(body) = s.strip_prefix('(') {
            // (a+b*sqrtD)/c or (a-b*sqrtD)/c, with /c optional
            let (inner, tail) = body
                .split_once(')')
                .ok_or_else(|| bad("missing closing parenthesis"))?;
            let c = match tail {
                "" => BigInt::one(),
                t => {
                    let t = t
                        .strip_prefix('/')
                        .ok_or_else(|| bad("expected `/denominator` after `)`"))?;
                    parse_int(t)?
                }
            };
            let star = inner.find("*sqrt").ok_or_else(|| bad("missing `*sqrt`"))?;
            let (ab, d_str) = inner.split_at(star);
            let d = parse_int(&d_str["*sqrt".len()..])?;
            // Split ab into a and signed b; the sign separator is the last
            // +/- that is not a leading sign of a.
            let sep = ab
                .rfind(['+', '-'])
                .filter(|&i| i > 0)
                .ok_or_else(|| bad("expected `a+b*sqrtD` or `a-b*sqrtD`"))?;
            let a = parse_int(&ab[..sep])?;
            let b = parse_int(&ab[sep..])?;
            return ExactReal::quadratic(a, b, c, d);
        }
        // Plain integer or fraction.
        if let Some((p, q)) = s.split_once('/') {
            let p = parse_int(p)?;
            let q = parse_int(q)?;
            if q.is_zero() {
                return Err(bad("zero denominator"));
            }
            return Ok(ExactReal::Rational(BigRational::new(p, q)));
        }
        Ok(ExactReal::Rational(BigRational::from_integer(parse_int(
            s,
        )?)))
    }
}

impl fmt::Display for ExactReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactReal::Rational(r) => write!(f, "{r}"),
            ExactReal::Quadratic(q) => write!(f, "{q}"),
        }
    }
}

impl From<QuadIrrational> for ExactReal {
    fn from(q: QuadIrrational) -> Self {
        ExactReal::Quadratic(q)
    }
}

impl From<BigRational> for ExactReal {
    fn from(r: BigRational) -> Self {
        ExactReal::Rational(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(a: i64, b: i64, c: i64, d: i64) -> QuadIrrational {
        QuadIrrational::new(a, b, c, d).unwrap()
    }

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn normalization_canonicalizes() {
        // (2 + 2*sqrt8)/4 = (1 + 2*sqrt2)/2
        let x = quad(2, 2, 4, 8);
        assert_eq!((x.a(), x.b(), x.c(), x.d()), (
            &BigInt::from(1),
            &BigInt::from(2),
            &BigInt::from(2),
            &BigInt::from(2)
        ));
        // Negative denominator flips all signs.
        let y = quad(1, -1, -2, 5);
        assert_eq!(y, quad(-1, 1, 2, 5));
    }

    #[test]
    fn rational_collapse_detected() {
        assert!(matches!(
            ExactReal::quadratic(1, 2, 3, 9).unwrap(),
            ExactReal::Rational(r) if r == rat(7, 3)
        ));
        assert!(matches!(
            ExactReal::quadratic(5, 0, 2, 7).unwrap(),
            ExactReal::Rational(r) if r == rat(5, 2)
        ));
        assert!(QuadIrrational::new(1, 1, 1, 4).is_err());
    }

    #[test]
    fn floor_matches_value() {
        // sqrt2 - 1 is in (0, 1)
        assert_eq!(quad(-1, 1, 1, 2).floor(), BigInt::zero());
        // (1 + sqrt5)/2 is in (1, 2)
        assert_eq!(quad(1, 1, 2, 5).floor(), BigInt::one());
        // -(sqrt2) has floor -2
        assert_eq!(quad(0, -1, 1, 2).floor(), BigInt::from(-2));
        // 10 - sqrt2 has floor 8
        assert_eq!(quad(10, -1, 1, 2).floor(), BigInt::from(8));
    }

    #[test]
    fn arithmetic_identities() {
        let x = quad(-1, 1, 1, 2); // sqrt2 - 1
        let recip = x.recip(); // 1/(sqrt2 - 1) = sqrt2 + 1
        assert_eq!(recip, quad(1, 1, 1, 2));
        let prod = x.mul_quad(&recip).unwrap();
        assert_eq!(prod, ExactReal::one());
        let sum = x.add_quad(&x.neg()).unwrap();
        assert_eq!(sum, ExactReal::zero());
        // sqrt2 * sqrt2 = 2
        let r2 = quad(0, 1, 1, 2);
        assert_eq!(r2.mul_quad(&r2).unwrap(), ExactReal::from_integer(2));
    }

    #[test]
    fn ordering_mixed_signs() {
        let x = quad(-1, 1, 1, 2); // ~0.414
        assert_eq!(x.cmp_rational(&rat(2, 5)), Ordering::Greater);
        assert_eq!(x.cmp_rational(&rat(1, 2)), Ordering::Less);
        assert_eq!(x.cmp_rational(&rat(0, 1)), Ordering::Greater);
        let y = quad(1, -1, 1, 2); // 1 - sqrt2 < 0
        assert!(!y.is_positive());
        assert_eq!(x.cmp_same_d(&y), Ordering::Greater);
        assert_eq!(x.cmp_same_d(&x), Ordering::Equal);
    }

    #[test]
    fn cross_radicand_ordering() {
        let r2 = ExactReal::quadratic(0, 1, 1, 2).unwrap(); // 1.414..
        let r3 = ExactReal::quadratic(0, 1, 1, 3).unwrap(); // 1.732..
        assert_eq!(r2.cmp_exact(&r3), Ordering::Less);
        assert_eq!(r3.cmp_exact(&r2), Ordering::Greater);
        let phi = ExactReal::quadratic(-1, 1, 2, 5).unwrap(); // 0.618..
        let x = ExactReal::quadratic(-1, 1, 1, 2).unwrap(); // 0.414..
        assert_eq!(x.cmp_exact(&phi), Ordering::Less);
        assert_eq!(
            x.cmp_exact(&ExactReal::Rational(rat(1, 2))),
            Ordering::Less
        );
    }

    #[test]
    fn literal_round_trip() {
        for text in [
            "(1+2*sqrt5)/3",
            "(-1+1*sqrt2)/1",
            "(0-3*sqrt7)/2",
            "(4-1*sqrt13)/6",
        ] {
            let v = ExactReal::parse_literal(text).unwrap();
            assert_eq!(v.to_string(), text, "display not canonical for {text}");
            assert_eq!(ExactReal::parse_literal(&v.to_string()).unwrap(), v);
        }
    }

    #[test]
    fn literal_sugar_forms() {
        assert_eq!(
            ExactReal::parse_literal("sqrt2-1").unwrap(),
            ExactReal::quadratic(-1, 1, 1, 2).unwrap()
        );
        assert_eq!(
            ExactReal::parse_literal("sqrt5+2").unwrap(),
            ExactReal::quadratic(2, 1, 1, 5).unwrap()
        );
        assert_eq!(
            ExactReal::parse_literal("sqrt9").unwrap(),
            ExactReal::from_integer(3)
        );
        assert_eq!(
            ExactReal::parse_literal("2/7").unwrap(),
            ExactReal::Rational(rat(2, 7))
        );
        assert_eq!(
            ExactReal::parse_literal("-4").unwrap(),
            ExactReal::from_integer(-4)
        );
    }

    #[test]
    fn literal_rejects_garbage() {
        for text in ["", "sqrt", "(1+2sqrt5)/3", "1/0", "(1+2*sqrt5", "x+1", "sqrt-4"] {
            assert!(
                ExactReal::parse_literal(text).is_err(),
                "accepted `{text}`"
            );
        }
    }
}
