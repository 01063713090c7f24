//! Cycle-based class numbers for indefinite binary quadratic forms.
//!
//! Reduced forms of a positive non-square discriminant fall into cycles under
//! the rho step; the cycle count is the narrow class number, and pairing
//! cycles with their sign-flipped mirrors yields the wide class number.

use std::collections::HashMap;

use num_integer::Integer;

use super::BinaryQuadraticForm;
use crate::arith::ints::isqrt64;
use crate::arith::pell::check_indefinite_discriminant;
use crate::error::{Error, Result};

/// Whether f is reduced for its positive discriminant: 0 < b < sqrt(delta)
/// and sqrt(delta) - b < 2|a| < sqrt(delta) + b, tested in exact integers.
pub fn is_reduced_indefinite(f: &BinaryQuadraticForm) -> Result<bool> {
    super::check_coefficient_range(f)?;
    let delta = f.discriminant();
    check_indefinite_discriminant(delta)?;
    let r = isqrt64(delta);
    let two_abs_a = 2 * f.a.abs();
    Ok(f.b >= 1 && f.b <= r && two_abs_a >= r - f.b + 1 && two_abs_a <= r + f.b)
}

/// One rho step: (a, b, c) -> (c, b', (b'^2 - delta)/(4c)) with b' the
/// residue of -b mod 2|c| lying in (sqrt(delta) - 2|c|, sqrt(delta)).
fn rho(f: &BinaryQuadraticForm, delta: i64, r: i64) -> BinaryQuadraticForm {
    let two_c = 2 * f.c.abs();
    let bp = r - (r + f.b).rem_euclid(two_c);
    let cp = (bp as i128 * bp as i128 - delta as i128) / (4 * f.c as i128);
    BinaryQuadraticForm::new(f.c, bp, cp as i64)
}

/// All primitive reduced forms of positive non-square discriminant `delta`,
/// sorted by (a, b, c).
pub fn enumerate_reduced_indefinite(delta: i64) -> Result<Vec<BinaryQuadraticForm>> {
    check_indefinite_discriminant(delta)?;
    let r = isqrt64(delta);
    let parity = delta.rem_euclid(2);
    let mut out = Vec::new();
    let mut b = if parity == 0 { 2 } else { 1 };
    while b <= r {
        let k = (delta - b * b) / 4;
        let d_lo = ((r - b + 2) / 2).max(1);
        let d_hi = (r + b) / 2;
        for d in d_lo..=d_hi {
            if k % d != 0 {
                continue;
            }
            let q = k / d;
            if d.gcd(&b).gcd(&q) != 1 {
                continue;
            }
            out.push(BinaryQuadraticForm::new(d, b, -q));
            out.push(BinaryQuadraticForm::new(-d, b, q));
        }
        b += 2;
    }
    out.sort_unstable();
    Ok(out)
}

struct CyclePartition {
    forms: Vec<BinaryQuadraticForm>,
    index: HashMap<BinaryQuadraticForm, usize>,
    cycle_id: Vec<usize>,
    n_cycles: usize,
}

fn partition_into_cycles(delta: i64) -> Result<CyclePartition> {
    let forms = enumerate_reduced_indefinite(delta)?;
    let r = isqrt64(delta);
    let index: HashMap<BinaryQuadraticForm, usize> =
        forms.iter().enumerate().map(|(i, f)| (*f, i)).collect();
    let n = forms.len();
    let mut cycle_id = vec![usize::MAX; n];
    let mut n_cycles = 0;
    for start in 0..n {
        if cycle_id[start] != usize::MAX {
            continue;
        }
        let id = n_cycles;
        n_cycles += 1;
        let mut at = start;
        for _ in 0..=n {
            cycle_id[at] = id;
            let next = rho(&forms[at], delta, r);
            at = *index.get(&next).ok_or_else(|| {
                Error::Inconsistency(format!("rho left the reduced set at {next}"))
            })?;
            if at == start {
                break;
            }
            if cycle_id[at] != usize::MAX {
                return Err(Error::Inconsistency(
                    "rho walk merged into a foreign cycle".into(),
                ));
            }
        }
        if at != start {
            return Err(Error::Inconsistency("rho walk failed to close".into()));
        }
    }
    Ok(CyclePartition {
        forms,
        index,
        cycle_id,
        n_cycles,
    })
}

/// Groups cycle ids into orbits of the flip; orbit sizes must be uniform.
fn flip_orbits(p: &CyclePartition) -> Result<Vec<Vec<usize>>> {
    let mut partner = vec![usize::MAX; p.n_cycles];
    for (i, f) in p.forms.iter().enumerate() {
        let flipped = f.flip();
        let j = *p.index.get(&flipped).ok_or_else(|| {
            Error::Inconsistency(format!("flip left the reduced set at {flipped}"))
        })?;
        let (ci, cj) = (p.cycle_id[i], p.cycle_id[j]);
        if partner[ci] == usize::MAX {
            partner[ci] = cj;
        } else if partner[ci] != cj {
            return Err(Error::Inconsistency(
                "flip pairing is inconsistent within a cycle".into(),
            ));
        }
    }
    let mut seen = vec![false; p.n_cycles];
    let mut orbits = Vec::new();
    for id in 0..p.n_cycles {
        if seen[id] {
            continue;
        }
        seen[id] = true;
        let twin = partner[id];
        if twin == id {
            orbits.push(vec![id]);
        } else {
            if seen[twin] || partner[twin] != id {
                return Err(Error::Inconsistency("flip pairing is not involutive".into()));
            }
            seen[twin] = true;
            orbits.push(vec![id, twin]);
        }
    }
    if orbits.iter().any(|o| o.len() != orbits[0].len()) {
        return Err(Error::Inconsistency(
            "flip orbits of mixed size: narrow-to-wide degree is ambiguous".into(),
        ));
    }
    Ok(orbits)
}

/// (h_narrow, h_wide): the narrow class number counts rho cycles, the wide
/// class number counts orbits of cycles under the (-a, b, -c) flip.
pub fn class_numbers_indefinite(delta: i64) -> Result<(u64, u64)> {
    let part = partition_into_cycles(delta)?;
    let orbits = flip_orbits(&part)?;
    Ok((part.n_cycles as u64, orbits.len() as u64))
}

/// One reduced form per wide ideal class: the least form of each flip orbit.
pub(crate) fn wide_class_representatives(delta: i64) -> Result<Vec<BinaryQuadraticForm>> {
    let part = partition_into_cycles(delta)?;
    let orbits = flip_orbits(&part)?;
    let mut reps = Vec::with_capacity(orbits.len());
    for orbit in &orbits {
        let rep = part
            .forms
            .iter()
            .enumerate()
            .filter(|(i, _)| orbit.contains(&part.cycle_id[*i]))
            .map(|(_, f)| *f)
            .min()
            .ok_or_else(|| Error::Inconsistency("empty flip orbit".into()))?;
        reps.push(rep);
    }
    reps.sort_unstable();
    Ok(reps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_enumeration_small() {
        let forms = enumerate_reduced_indefinite(5).unwrap();
        assert_eq!(
            forms,
            vec![
                BinaryQuadraticForm::new(-1, 1, 1),
                BinaryQuadraticForm::new(1, 1, -1)
            ]
        );
        assert_eq!(enumerate_reduced_indefinite(12).unwrap().len(), 4);
        assert_eq!(enumerate_reduced_indefinite(60).unwrap().len(), 8);
        for f in enumerate_reduced_indefinite(229).unwrap() {
            assert!(is_reduced_indefinite(&f).unwrap());
        }
    }

    #[test]
    fn rho_cycles_and_class_numbers() {
        assert_eq!(class_numbers_indefinite(5).unwrap(), (1, 1));
        assert_eq!(class_numbers_indefinite(8).unwrap(), (1, 1));
        assert_eq!(class_numbers_indefinite(12).unwrap(), (2, 1));
        assert_eq!(class_numbers_indefinite(13).unwrap(), (1, 1));
        assert_eq!(class_numbers_indefinite(40).unwrap(), (2, 2));
        assert_eq!(class_numbers_indefinite(60).unwrap(), (4, 2));
        assert_eq!(class_numbers_indefinite(229).unwrap(), (3, 3));
    }

    #[test]
    fn rejects_non_indefinite_discriminants() {
        assert!(class_numbers_indefinite(16).is_err());
        assert!(class_numbers_indefinite(-23).is_err());
        assert!(class_numbers_indefinite(7).is_err());
        assert!(is_reduced_indefinite(&BinaryQuadraticForm::new(1, 0, 1)).is_err());
    }

    #[test]
    fn wide_representatives_count_and_reduction() {
        for delta in [5i64, 12, 40, 60, 229] {
            let reps = wide_class_representatives(delta).unwrap();
            let (_, wide) = class_numbers_indefinite(delta).unwrap();
            assert_eq!(reps.len() as u64, wide, "delta={delta}");
            for f in &reps {
                assert!(is_reduced_indefinite(f).unwrap());
            }
        }
    }

    #[test]
    fn narrow_wide_factor_matches_pell_sign() {
        for delta in [5i64, 8, 12, 13, 21, 24, 28, 29, 33, 40, 44, 56, 60, 229] {
            let (narrow, wide) = class_numbers_indefinite(delta).unwrap();
            let pell = crate::arith::pell::fundamental_pell(delta).unwrap();
            let factor = if pell.sign == -4 { 1 } else { 2 };
            assert_eq!(narrow, wide * factor, "delta={delta}");
        }
    }
}
