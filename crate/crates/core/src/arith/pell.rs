//! Fundamental solutions of x^2 - D y^2 = +-4, computed from one period of
//! the continued fraction of (D + sqrt(D))/2 rather than by scanning y.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::cf::{fold_matrix, SurdExpansion};
use super::ints::is_square64;
use crate::error::{Error, Result};

/// Step cap for the period scan; real-quadratic periods are O(sqrt(D) log D).
const MAX_PELL_STEPS: usize = 1_000_000;

/// Smallest solution of x^2 - D y^2 = sign with sign in {+4, -4};
/// (x + y sqrt(D))/2 is the fundamental unit of the order of discriminant D.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PellSolution {
    pub delta: i64,
    pub x: BigInt,
    pub y: BigInt,
    pub sign: i8,
}

impl PellSolution {
    /// Exact check of the defining equation.
    pub fn verify(&self) -> bool {
        let delta = BigInt::from(self.delta);
        &self.x * &self.x - delta * &self.y * &self.y == BigInt::from(self.sign)
    }
}

/// Validates that delta is a positive non-square discriminant.
pub(crate) fn check_indefinite_discriminant(delta: i64) -> Result<()> {
    if delta <= 0 {
        return Err(Error::invalid_input(format!(
            "discriminant {delta} must be positive"
        )));
    }
    if delta % 4 > 1 {
        return Err(Error::invalid_input(format!(
            "discriminant {delta} is not 0 or 1 mod 4"
        )));
    }
    if is_square64(delta) {
        return Err(Error::invalid_input(format!(
            "discriminant {delta} is a perfect square"
        )));
    }
    Ok(())
}

/// Returns the solution with minimal y > 0, preferring -4 when both signs
/// occur at the minimal unit.
pub fn fundamental_pell(delta: i64) -> Result<PellSolution> {
    check_indefinite_discriminant(delta)?;
    // Expand (delta + sqrt(delta))/2, whose coefficient module is the whole
    // order of discriminant delta; the first repeated state closes one period
    // and its convergent matrix yields the fundamental unit.
    let mut machine = SurdExpansion::new(BigInt::from(delta), BigInt::from(2), BigInt::from(delta));
    let mut seen: HashMap<(BigInt, BigInt), usize> = HashMap::new();
    let mut quotients: Vec<BigInt> = Vec::new();
    loop {
        let state = machine.state();
        if let Some(&i) = seen.get(&state) {
            // The colliding state is the one first seen at index i, so the
            // periodic tail there is beta = (p + sqrt(delta))/q.
            let (p_i, q_i) = state;
            let period = &quotients[i..];
            let (_, _, m10, m11) = fold_matrix(period);
            // The unit fixing the tail is m10 * beta + m11 = (u + v sqrt(delta))/q.
            let u = &m10 * &p_i + &m11 * &q_i;
            let v = m10;
            let (two_u, two_v) = (BigInt::from(2) * u, BigInt::from(2) * v);
            if !(&two_u % &q_i).is_zero() || !(&two_v % &q_i).is_zero() {
                return Err(Error::Inconsistency(format!(
                    "unit coordinates for discriminant {delta} are not half-integral"
                )));
            }
            let x = two_u / &q_i;
            let y = two_v / &q_i;
            let sign: i8 = if period.len() % 2 == 0 { 4 } else { -4 };
            let sol = PellSolution { delta, x, y, sign };
            if !sol.verify() || !sol.x.is_positive() || !sol.y.is_positive() {
                return Err(Error::Inconsistency(format!(
                    "period matrix for discriminant {delta} gave an invalid unit"
                )));
            }
            return Ok(sol);
        }
        if quotients.len() >= MAX_PELL_STEPS {
            return Err(Error::bound_exceeded(
                "Pell period scan steps",
                MAX_PELL_STEPS as u64,
            ));
        }
        seen.insert(state, quotients.len());
        quotients.push(machine.step());
    }
}
