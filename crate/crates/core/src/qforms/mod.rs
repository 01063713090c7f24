//! Binary quadratic forms: definite reduction and enumeration, Gauss
//! composition on classes, class group structure, and cycle-based class
//! numbers for indefinite discriminants.

mod group;
mod indefinite;

pub use group::AbelianGroupStructure;
pub use indefinite::{class_numbers_indefinite, enumerate_reduced_indefinite, is_reduced_indefinite};
pub(crate) use indefinite::wide_class_representatives;

use std::collections::HashMap;

use num_integer::Integer;

use crate::arith::ints::{gcd128, xgcd128};
use crate::error::{Error, Result};

/// Largest coefficient magnitude accepted by form operations; keeps every
/// intermediate of reduction and composition inside i128.
pub const MAX_FORM_COEFFICIENT: i64 = 1_000_000_000;

/// Default cap on the class number when building a full Cayley table.
pub const DEFAULT_CLASS_NUMBER_BOUND: usize = 10_000;

/// The integral binary quadratic form a x^2 + b xy + c y^2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryQuadraticForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl BinaryQuadraticForm {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        BinaryQuadraticForm { a, b, c }
    }

    /// b^2 - 4ac; callers must keep coefficients within MAX_FORM_COEFFICIENT.
    pub fn discriminant(&self) -> i64 {
        let d = self.b as i128 * self.b as i128 - 4 * self.a as i128 * self.c as i128;
        i64::try_from(d).expect("form coefficients out of supported range")
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c) == 1
    }

    /// The inverse class representative (a, -b, c).
    pub fn inverse(&self) -> Self {
        BinaryQuadraticForm::new(self.a, -self.b, self.c)
    }

    /// (-a, b, -c): same discriminant, used for narrow-vs-wide bookkeeping.
    pub(crate) fn flip(&self) -> Self {
        BinaryQuadraticForm::new(-self.a, self.b, -self.c)
    }

    /// Whether |b| <= a <= c with b >= 0 on the boundary cases.
    pub fn is_reduced_definite(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        a > 0 && b.abs() <= a && a <= c && (b >= 0 || (b.abs() < a && a < c))
    }
}

impl std::fmt::Display for BinaryQuadraticForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

fn check_coefficient_range(f: &BinaryQuadraticForm) -> Result<()> {
    if [f.a, f.b, f.c]
        .iter()
        .any(|&x| x.abs() > MAX_FORM_COEFFICIENT)
    {
        return Err(Error::invalid_input(format!(
            "form coefficient exceeds supported magnitude {MAX_FORM_COEFFICIENT}"
        )));
    }
    Ok(())
}

fn validate_definite_primitive(f: &BinaryQuadraticForm) -> Result<i64> {
    check_coefficient_range(f)?;
    if !f.is_primitive() {
        return Err(Error::invalid_input(format!("form {f} is imprimitive")));
    }
    let delta = f.discriminant();
    if delta >= 0 {
        return Err(Error::invalid_input(format!(
            "form {f} has discriminant {delta}, expected negative"
        )));
    }
    if f.a <= 0 {
        return Err(Error::invalid_input(format!(
            "form {f} is not positive definite"
        )));
    }
    Ok(delta)
}

fn check_discriminant_negative(delta: i64) -> Result<()> {
    if delta >= 0 {
        return Err(Error::invalid_input(format!(
            "discriminant {delta} must be negative"
        )));
    }
    if delta.rem_euclid(4) > 1 {
        return Err(Error::invalid_input(format!(
            "{delta} is not a discriminant (must be 0 or 1 mod 4)"
        )));
    }
    Ok(())
}

/// Core reduction loop over i128 coefficients; `delta` must be negative and
/// equal to the discriminant of (a, b, c).
fn reduce_definite_raw(mut a: i128, mut b: i128, delta: i64) -> BinaryQuadraticForm {
    let d = delta as i128;
    let mut c;
    loop {
        let m = b.rem_euclid(2 * a);
        b = if m > a { m - 2 * a } else { m };
        c = (b * b - d) / (4 * a);
        if a > c {
            (a, b) = (c, -b);
            continue;
        }
        break;
    }
    if b < 0 && (a == c || -b == a) {
        b = -b;
    }
    BinaryQuadraticForm::new(a as i64, b as i64, c as i64)
}

/// Reduces a primitive positive definite form to its unique reduced
/// class representative.
pub fn reduce_definite(f: &BinaryQuadraticForm) -> Result<BinaryQuadraticForm> {
    let delta = validate_definite_primitive(f)?;
    Ok(reduce_definite_raw(f.a as i128, f.b as i128, delta))
}

/// All primitive reduced forms of negative discriminant `delta`, sorted by
/// (a, b); the list length is the class number h(delta).
pub fn enumerate_reduced(delta: i64) -> Result<Vec<BinaryQuadraticForm>> {
    check_discriminant_negative(delta)?;
    let abs = -(delta as i128);
    let a_max = crate::arith::ints::isqrt128((abs / 3) as u128) as i64;
    let parity = delta.rem_euclid(2);
    let mut out = Vec::new();
    for a in 1..=a_max {
        let four_a = 4 * a as i128;
        for b in (1 - a)..=a {
            if b.rem_euclid(2) != parity {
                continue;
            }
            let num = b as i128 * b as i128 + abs;
            if num % four_a != 0 {
                continue;
            }
            let c = num / four_a;
            if c < a as i128 {
                continue;
            }
            let c = c as i64;
            if b < 0 && a == c {
                continue;
            }
            let f = BinaryQuadraticForm::new(a, b, c);
            if f.is_primitive() {
                out.push(f);
            }
        }
    }
    Ok(out)
}

/// The principal form of discriminant `delta` (any sign, 0 or 1 mod 4).
pub fn principal_form(delta: i64) -> Result<BinaryQuadraticForm> {
    let r = delta.rem_euclid(4);
    if r > 1 {
        return Err(Error::invalid_input(format!(
            "{delta} is not a discriminant (must be 0 or 1 mod 4)"
        )));
    }
    let b = delta.rem_euclid(2);
    let c = (b as i128 * b as i128 - delta as i128) / 4;
    let c = i64::try_from(c)
        .map_err(|_| Error::invalid_input("discriminant out of supported range"))?;
    Ok(BinaryQuadraticForm::new(1, b, c))
}

/// Gauss composition: the reduced representative of the product class of two
/// primitive positive definite forms of equal discriminant.
///
/// Computed as an ideal product: each form corresponds to the lattice
/// spanned by a and (-b + sqrt(delta))/2; the product lattice is put in
/// Hermite form and read back as a form.
pub fn compose(
    f: &BinaryQuadraticForm,
    g: &BinaryQuadraticForm,
) -> Result<BinaryQuadraticForm> {
    let df = validate_definite_primitive(f)?;
    let dg = validate_definite_primitive(g)?;
    if df != dg {
        return Err(Error::invalid_input(format!(
            "discriminant mismatch: {df} vs {dg}"
        )));
    }
    let delta = df as i128;
    let (a1, b1) = (f.a as i128, f.b as i128);
    let (a2, b2) = (g.a as i128, g.b as i128);
    // Generators of the product lattice, written (u + v sqrt(delta))/2.
    let rows = [
        (2 * a1 * a2, 0),
        (-a1 * b2, a1),
        (-a2 * b1, a2),
        ((b1 * b2 + delta) / 2, -(b1 + b2) / 2),
    ];
    // Hermite form: (p, e) spans the v-column, then gcd the cleared u-column.
    let (mut p, mut e) = (0i128, 0i128);
    for &(u, v) in &rows {
        let (d, s, t) = xgcd128(e, v);
        p = s * p + t * u;
        e = d;
    }
    let mut lead = 0i128;
    for &(u, v) in &rows {
        lead = gcd128(lead, u - (v / e) * p);
    }
    // Basis [lead/2, (p + e sqrt(delta))/2] must be e times a form lattice.
    if lead % (2 * e) != 0 || p % e != 0 {
        return Err(Error::Inconsistency(
            "ideal product basis failed normalization".into(),
        ));
    }
    let a3 = lead / (2 * e);
    let two_a = 2 * a3;
    let mut b3 = (-(p / e)).rem_euclid(two_a);
    if b3 > a3 {
        b3 -= two_a;
    }
    let num = b3 * b3 - delta;
    if num % (4 * a3) != 0 {
        return Err(Error::Inconsistency(
            "composite form has non-integral trailing coefficient".into(),
        ));
    }
    let c3 = num / (4 * a3);
    if gcd128(gcd128(a3, b3), c3) != 1 {
        return Err(Error::Inconsistency("composite form is imprimitive".into()));
    }
    Ok(reduce_definite_raw(a3, b3, df))
}

/// Elementary divisor structure of the form class group of a negative
/// discriminant, via the full Cayley table over the reduced forms.
pub fn class_group_definite(delta: i64) -> Result<AbelianGroupStructure> {
    class_group_definite_bounded(delta, DEFAULT_CLASS_NUMBER_BOUND)
}

/// Same as [`class_group_definite`] with an explicit class number cap.
pub fn class_group_definite_bounded(
    delta: i64,
    bound: usize,
) -> Result<AbelianGroupStructure> {
    let forms = enumerate_reduced(delta)?;
    if forms.len() > bound {
        return Err(Error::bound_exceeded(
            format!("class number {} of discriminant {delta}", forms.len()),
            bound as u64,
        ));
    }
    let index: HashMap<BinaryQuadraticForm, usize> = forms
        .iter()
        .enumerate()
        .map(|(i, f)| (*f, i))
        .collect();
    let h = forms.len();
    let mut table = vec![vec![0usize; h]; h];
    for i in 0..h {
        for j in i..h {
            let prod = compose(&forms[i], &forms[j])?;
            let k = *index.get(&prod).ok_or_else(|| {
                Error::Inconsistency(format!("composite {prod} is not a reduced form"))
            })?;
            table[i][j] = k;
            table[j][i] = k;
        }
    }
    AbelianGroupStructure::from_cayley_table(&table)
}
