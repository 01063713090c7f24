//! Integer matrices with a fixed quadratic characteristic polynomial: one
//! similarity-class representative per ideal class (the Latimer-MacDuffee
//! correspondence in degree 2), a bounded conjugator search, and exact
//! Perron eigenvector data.

use num_bigint::BigInt;
use num_traits::One;

use crate::arith::ints::is_square64;
use crate::arith::quad::{ExactReal, QuadIrrational};
use crate::error::{Error, Result};
use crate::qforms::{enumerate_reduced, wide_class_representatives, BinaryQuadraticForm};

/// Largest entry magnitude accepted by matrix operations here.
pub const MAX_MATRIX_ENTRY: i64 = 1_000_000_000;

/// A square integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    entries: Vec<Vec<i64>>,
}

impl IntMatrix {
    pub fn new(entries: Vec<Vec<i64>>) -> Result<Self> {
        let n = entries.len();
        if n == 0 || entries.iter().any(|row| row.len() != n) {
            return Err(Error::invalid_input("matrix must be square and nonempty"));
        }
        if entries
            .iter()
            .flatten()
            .any(|&x| x.abs() > MAX_MATRIX_ENTRY)
        {
            return Err(Error::invalid_input(format!(
                "matrix entry exceeds supported magnitude {MAX_MATRIX_ENTRY}"
            )));
        }
        Ok(IntMatrix { entries })
    }

    pub fn identity(n: usize) -> Self {
        let entries = (0..n)
            .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
            .collect();
        IntMatrix { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.entries
    }

    pub fn trace(&self) -> i64 {
        (0..self.dim()).map(|i| self.entries[i][i]).sum()
    }

    /// Coefficients of the characteristic polynomial in descending powers,
    /// leading 1 first, computed by the Faddeev-LeVerrier recurrence.
    pub fn char_poly(&self) -> Vec<BigInt> {
        let n = self.dim();
        let a: Vec<Vec<BigInt>> = self
            .entries
            .iter()
            .map(|row| row.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        let mul = |x: &Vec<Vec<BigInt>>, y: &Vec<Vec<BigInt>>| -> Vec<Vec<BigInt>> {
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| (0..n).map(|k| &x[i][k] * &y[k][j]).sum())
                        .collect()
                })
                .collect()
        };
        let trace = |x: &Vec<Vec<BigInt>>| -> BigInt { (0..n).map(|i| x[i][i].clone()).sum() };
        let mut coeffs = vec![BigInt::one()];
        let mut m = a.clone();
        for k in 1..=n {
            let c = -trace(&m) / BigInt::from(k);
            coeffs.push(c.clone());
            if k == n {
                break;
            }
            let mut shifted = m;
            for (i, row) in shifted.iter_mut().enumerate() {
                row[i] += &c;
            }
            m = mul(&a, &shifted);
        }
        coeffs
    }

    /// Determinant, read off the characteristic polynomial.
    pub fn det(&self) -> BigInt {
        let c0 = self.char_poly().pop().expect("constant term");
        if self.dim() % 2 == 0 {
            c0
        } else {
            -c0
        }
    }
}

impl std::fmt::Display for IntMatrix {
    /// Renders as `[[a, b], [c, d]]`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, x) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// The monic quadratic x^2 + c1 x + c0, irreducible over the rationals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonicIntPolynomial {
    c1: i64,
    c0: i64,
}

impl MonicIntPolynomial {
    pub fn new(c1: i64, c0: i64) -> Result<Self> {
        if c1.abs() > MAX_MATRIX_ENTRY || c0.abs() > MAX_MATRIX_ENTRY {
            return Err(Error::invalid_input("polynomial coefficient too large"));
        }
        let disc = c1 as i128 * c1 as i128 - 4 * c0 as i128;
        if disc >= 0 && crate::arith::ints::is_square128(disc as u128) {
            return Err(Error::invalid_input(format!(
                "x^2 + {c1}x + {c0} is reducible over the rationals"
            )));
        }
        Ok(MonicIntPolynomial { c1, c0 })
    }

    pub fn c1(&self) -> i64 {
        self.c1
    }

    pub fn c0(&self) -> i64 {
        self.c0
    }

    /// c1^2 - 4 c0; always 0 or 1 mod 4.
    pub fn discriminant(&self) -> i64 {
        (self.c1 as i128 * self.c1 as i128 - 4 * self.c0 as i128)
            .try_into()
            .expect("discriminant fits i64 for range-checked coefficients")
    }
}

impl std::fmt::Display for MonicIntPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "x^2")?;
        match self.c1 {
            0 => {}
            1 => write!(f, " + x")?,
            -1 => write!(f, " - x")?,
            c if c > 0 => write!(f, " + {c}x")?,
            c => write!(f, " - {}x", -c)?,
        }
        match self.c0 {
            0 => {}
            c if c > 0 => write!(f, " + {c}")?,
            c => write!(f, " - {}", -c)?,
        }
        Ok(())
    }
}

/// The matrix [[t, -c], [a, t-b]] with t = (b - c1)/2: multiplication by a
/// root of the polynomial on the ideal lattice attached to the form.
fn matrix_for_form(q: &BinaryQuadraticForm, p: &MonicIntPolynomial) -> Result<IntMatrix> {
    let t = (q.b - p.c1) / 2;
    let m = IntMatrix::new(vec![vec![t, -q.c], vec![q.a, t - q.b]])?;
    let tr = m.trace() as i128;
    let det = t as i128 * (t - q.b) as i128 + q.a as i128 * q.c as i128;
    if tr != -(p.c1 as i128) || det != p.c0 as i128 {
        return Err(Error::Inconsistency(format!(
            "matrix for {q} fails the characteristic polynomial check"
        )));
    }
    Ok(m)
}

/// One integer matrix per ideal class of Z[root of p]: pairwise non-similar
/// over GL(2, Z), each with characteristic polynomial exactly p.
pub fn ideal_class_matrices(p: &MonicIntPolynomial) -> Result<Vec<IntMatrix>> {
    let delta = p.discriminant();
    let reps = if delta < 0 {
        enumerate_reduced(delta)?
    } else {
        wide_class_representatives(delta)?
    };
    reps.iter().map(|q| matrix_for_form(q, p)).collect()
}

/// Searches for U with entries in [-bound, bound], det U = +-1, and
/// U A = B U. `None` means no conjugator exists in that box, which is
/// never a proof of non-similarity.
pub fn similar_over_z(a: &IntMatrix, b: &IntMatrix, bound: i64) -> Result<Option<IntMatrix>> {
    if a.dim() != 2 || b.dim() != 2 {
        return Err(Error::invalid_input("similarity search handles 2x2 only"));
    }
    if bound < 1 {
        return Err(Error::invalid_input("bound must be >= 1"));
    }
    if a == b {
        return Ok(Some(IntMatrix::identity(2)));
    }
    let (a00, a01, a10, a11) = (
        a.entry(0, 0) as i128,
        a.entry(0, 1) as i128,
        a.entry(1, 0) as i128,
        a.entry(1, 1) as i128,
    );
    let (b00, b01, b10, b11) = (
        b.entry(0, 0) as i128,
        b.entry(0, 1) as i128,
        b.entry(1, 0) as i128,
        b.entry(1, 1) as i128,
    );
    for p in -bound..=bound {
        for q in -bound..=bound {
            for r in -bound..=bound {
                for s in -bound..=bound {
                    let (p, q, r, s) = (p as i128, q as i128, r as i128, s as i128);
                    let det = p * s - q * r;
                    if det != 1 && det != -1 {
                        continue;
                    }
                    let ua = (
                        p * a00 + q * a10,
                        p * a01 + q * a11,
                        r * a00 + s * a10,
                        r * a01 + s * a11,
                    );
                    let bu = (
                        b00 * p + b01 * r,
                        b00 * q + b01 * s,
                        b10 * p + b11 * r,
                        b10 * q + b11 * s,
                    );
                    if ua == bu {
                        return Ok(Some(IntMatrix::new(vec![
                            vec![p as i64, q as i64],
                            vec![r as i64, s as i64],
                        ])?));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Exact dominant-eigenvector data of a Perron matrix: the eigenvalue and
/// the theta with (1, theta) an eigenvector.
#[derive(Debug, Clone)]
pub struct PerronLattice {
    pub eigenvalue: QuadIrrational,
    pub theta: QuadIrrational,
}

impl PerronLattice {
    /// The lattice basis (1, theta).
    pub fn basis(&self) -> (ExactReal, ExactReal) {
        (ExactReal::one(), ExactReal::from(self.theta.clone()))
    }
}

/// Computes the exact Perron data of a nonnegative irreducible 2x2 integer
/// matrix with irrational dominant eigenvalue.
pub fn perron_vector_lattice(b: &IntMatrix) -> Result<PerronLattice> {
    if b.dim() != 2 {
        return Err(Error::invalid_input("Perron data handled for 2x2 only"));
    }
    let (m00, m01, m10, m11) = (b.entry(0, 0), b.entry(0, 1), b.entry(1, 0), b.entry(1, 1));
    if [m00, m01, m10, m11].iter().any(|&x| x < 0) {
        return Err(Error::invalid_input("matrix must be entrywise nonnegative"));
    }
    if m01 == 0 || m10 == 0 {
        return Err(Error::invalid_input(
            "matrix is reducible: both off-diagonal entries must be positive",
        ));
    }
    let tau = m00 + m11;
    let disc = (m00 - m11) as i128 * (m00 - m11) as i128 + 4 * m01 as i128 * m10 as i128;
    let disc = i64::try_from(disc).map_err(|_| Error::invalid_input("entries too large"))?;
    if is_square64(disc) {
        return Err(Error::invalid_input(format!(
            "dominant eigenvalue is rational (discriminant {disc} is a square)"
        )));
    }
    let lambda = ExactReal::quadratic(tau, 1, 2, disc)?;
    let lambda = lambda
        .as_quadratic()
        .ok_or_else(|| Error::Inconsistency("irrational eigenvalue collapsed".into()))?
        .clone();
    // Row 0 of B (1, theta)^T = lambda (1, theta)^T gives theta.
    let theta = lambda
        .add_int(-m00)
        .mul_rational(&num_rational::BigRational::new(
            BigInt::one(),
            BigInt::from(m01),
        ));
    let theta = theta
        .as_quadratic()
        .ok_or_else(|| Error::Inconsistency("theta collapsed to a rational".into()))?
        .clone();
    // Row 1 must hold exactly: m10 + m11 theta = lambda theta.
    let lhs = theta
        .mul_rational(&num_rational::BigRational::from(BigInt::from(m11)))
        .add_int(m10);
    let rhs = lambda.mul_quad(&theta)?;
    if lhs.cmp_exact(&rhs) != std::cmp::Ordering::Equal {
        return Err(Error::Inconsistency(
            "Perron eigen-equation failed in exact arithmetic".into(),
        ));
    }
    if !theta.is_positive() {
        return Err(Error::Inconsistency("Perron theta is not positive".into()));
    }
    Ok(PerronLattice {
        eigenvalue: lambda,
        theta,
    })
}
