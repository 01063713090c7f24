//! Quadratic orders: class numbers of non-maximal orders via the conductor
//! formula, and the least-conductor search used by the CM pipeline.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::arith::ints::{is_squarefree, kronecker, prime_factors};
use crate::arith::pell::fundamental_pell;
use crate::error::{Error, Result};
use crate::qforms::{class_numbers_indefinite, enumerate_reduced};

/// Default cap for the least-conductor search.
pub const DEFAULT_CONDUCTOR_BOUND: i64 = 10_000;

/// Default cap on unit powers when computing the index [O_K^x : O_f^x].
pub const DEFAULT_UNIT_POWER_BOUND: u64 = 1_000_000;

/// Which quadratic field a square-free D > 1 refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadFieldSign {
    /// Q(sqrt(-D))
    Imaginary,
    /// Q(sqrt(D))
    Real,
}

/// The order Z + f*O_K of conductor f inside the quadratic field of
/// fundamental discriminant d_K; its discriminant is f^2 * d_K.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadOrder {
    d_k: i64,
    conductor: i64,
    delta: i64,
}

/// Whether d is a fundamental discriminant: square-free and 1 mod 4, or
/// 4m with m square-free and 2 or 3 mod 4.
pub fn is_fundamental_discriminant(d: i64) -> Result<bool> {
    if d == 0 || d == 1 {
        return Ok(false);
    }
    if d.rem_euclid(4) == 1 {
        return is_squarefree(d.unsigned_abs());
    }
    if d % 4 == 0 {
        let m = d / 4;
        if matches!(m.rem_euclid(4), 2 | 3) {
            return is_squarefree(m.unsigned_abs());
        }
    }
    Ok(false)
}

impl QuadOrder {
    pub fn new(d_k: i64, conductor: i64) -> Result<Self> {
        if !is_fundamental_discriminant(d_k)? {
            return Err(Error::invalid_input(format!(
                "{d_k} is not a fundamental discriminant"
            )));
        }
        if conductor < 1 {
            return Err(Error::invalid_input("conductor must be >= 1"));
        }
        let delta = conductor as i128 * conductor as i128 * d_k as i128;
        let delta = i64::try_from(delta)
            .map_err(|_| Error::invalid_input("order discriminant overflows"))?;
        Ok(QuadOrder {
            d_k,
            conductor,
            delta,
        })
    }

    /// Fundamental discriminant of the ambient field.
    pub fn fundamental_discriminant(&self) -> i64 {
        self.d_k
    }

    pub fn conductor(&self) -> i64 {
        self.conductor
    }

    /// f^2 * d_K.
    pub fn discriminant(&self) -> i64 {
        self.delta
    }

    pub fn is_imaginary(&self) -> bool {
        self.d_k < 0
    }
}

/// Builds the order of conductor f in Q(sqrt(-D)) or Q(sqrt(D)) for a
/// square-free D > 1, deriving d_K by the mod-4 rule.
pub fn order_from_cm_input(d: i64, f: i64, sign: QuadFieldSign) -> Result<QuadOrder> {
    if d <= 1 {
        return Err(Error::invalid_input(format!("D must be > 1, got {d}")));
    }
    if !is_squarefree(d.unsigned_abs())? {
        return Err(Error::invalid_input(format!("D = {d} is not square-free")));
    }
    let m = match sign {
        QuadFieldSign::Imaginary => -d,
        QuadFieldSign::Real => d,
    };
    let d_k = if m.rem_euclid(4) == 1 { m } else { 4 * m };
    QuadOrder::new(d_k, f)
}

/// Class number of the maximal order: reduced-form count for d_K < 0, wide
/// cycle count for d_K > 0.
fn fundamental_class_number(d_k: i64) -> Result<u64> {
    if d_k < 0 {
        Ok(enumerate_reduced(d_k)?.len() as u64)
    } else {
        Ok(class_numbers_indefinite(d_k)?.1)
    }
}

/// Least m >= 1 with eps^m in the order of conductor f, where eps is the
/// fundamental unit of the real field of discriminant d_k. Writing units as
/// s + t*omega with omega = (d_k + sqrt(d_k))/2, membership is f | t.
fn real_unit_index(d_k: i64, f: i64, bound: u64) -> Result<u64> {
    if f == 1 {
        return Ok(1);
    }
    let eps = fundamental_pell(d_k)?;
    let fm = BigInt::from(f);
    let num = &eps.x - BigInt::from(d_k) * &eps.y;
    let (half, rem) = num.div_rem(&BigInt::from(2));
    if !rem.is_zero() {
        return Err(Error::Inconsistency(
            "fundamental unit is not integral in the omega basis".into(),
        ));
    }
    let to_mod = |v: &BigInt| -> i128 {
        v.mod_floor(&fm).to_i128().expect("residue fits i128")
    };
    let (s0, t0) = (to_mod(&half), to_mod(&eps.y));
    let fm = f as i128;
    // omega^2 = sigma*omega - nu with sigma = d_k, nu = (d_k^2 - d_k)/4.
    let sigma = (d_k as i128).rem_euclid(fm);
    let nu = ((d_k as i128 * d_k as i128 - d_k as i128) / 4).rem_euclid(fm);
    let (mut s, mut t) = (s0, t0);
    for m in 1..=bound {
        if t == 0 {
            return Ok(m);
        }
        let s_next = (s * s0 - t * t0 % fm * nu).rem_euclid(fm);
        let t_next = (s * t0 + t * s0 + t * t0 % fm * sigma).rem_euclid(fm);
        (s, t) = (s_next, t_next);
    }
    Err(Error::bound_exceeded(
        format!("unit power search for conductor {f}"),
        bound,
    ))
}

/// Index [O_K^x : O_f^x] of the unit groups.
fn unit_index(o: &QuadOrder, bound: u64) -> Result<u64> {
    if o.conductor == 1 {
        return Ok(1);
    }
    if o.d_k < 0 {
        Ok(match o.d_k {
            -3 => 3,
            -4 => 2,
            _ => 1,
        })
    } else {
        real_unit_index(o.d_k, o.conductor, bound)
    }
}

/// Class number of the order by the conductor formula
/// h(O_f) = h(d_K) * f * prod_{p | f} (1 - (d_K/p)/p) / [O_K^x : O_f^x],
/// evaluated in exact integers.
pub fn class_number_order(o: &QuadOrder) -> Result<u64> {
    class_number_order_bounded(o, DEFAULT_UNIT_POWER_BOUND)
}

/// Same as [`class_number_order`] with an explicit unit-power cap.
pub fn class_number_order_bounded(o: &QuadOrder, unit_bound: u64) -> Result<u64> {
    let h_k = fundamental_class_number(o.d_k)? as i128;
    let mut t = o.conductor as i128;
    for p in prime_factors(o.conductor as u64) {
        let chi = kronecker(o.d_k, p as i64)? as i128;
        t = t / p as i128 * (p as i128 - chi);
    }
    let numerator = h_k * t;
    let u = unit_index(o, unit_bound)? as i128;
    if numerator % u != 0 {
        return Err(Error::Inconsistency(format!(
            "unit index {u} does not divide h(d_K) * Euler factor {numerator}"
        )));
    }
    u64::try_from(numerator / u)
        .map_err(|_| Error::invalid_input("class number overflows u64"))
}

/// Least conductor f' in [1, bound] whose real order over Q(sqrt(D)) has
/// wide class number h_target.
pub fn conductor_search(d: i64, h_target: u64, bound: i64) -> Result<i64> {
    if h_target < 1 {
        return Err(Error::invalid_input("target class number must be >= 1"));
    }
    if bound < 1 {
        return Err(Error::invalid_input("search bound must be >= 1"));
    }
    for f in 1..=bound {
        let o = order_from_cm_input(d, f, QuadFieldSign::Real)?;
        if class_number_order(&o)? == h_target {
            return Ok(f);
        }
    }
    Err(Error::search_exhausted(
        format!("conductor f' with wide class number {h_target} over Q(sqrt {d})"),
        bound as u64,
    ))
}
