//! Finite abelian groups as elementary divisor chains, including extraction
//! of the chain from an explicit multiplication table.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// A finite abelian group recorded by its elementary divisors
/// d_1 | d_2 | ... | d_r, each >= 2; the empty chain is the trivial group.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbelianGroupStructure {
    elementary_divisors: Vec<u64>,
}

impl AbelianGroupStructure {
    pub fn trivial() -> Self {
        AbelianGroupStructure {
            elementary_divisors: Vec::new(),
        }
    }

    /// Builds from a divisor chain, validating divisibility and sizes.
    pub fn new(divisors: Vec<u64>) -> Result<Self> {
        for w in divisors.windows(2) {
            if w[1] % w[0] != 0 {
                return Err(Error::invalid_input(format!(
                    "elementary divisors must form a chain: {} does not divide {}",
                    w[0], w[1]
                )));
            }
        }
        if divisors.iter().any(|&d| d < 2) {
            return Err(Error::invalid_input("elementary divisors must be >= 2"));
        }
        let mut order: u128 = 1;
        for &d in &divisors {
            order = order
                .checked_mul(d as u128)
                .ok_or_else(|| Error::invalid_input("group order overflows"))?;
        }
        Ok(AbelianGroupStructure {
            elementary_divisors: divisors,
        })
    }

    /// Canonicalizes an arbitrary direct sum of cyclic groups into the
    /// elementary divisor chain via primary decomposition.
    pub fn from_cyclic_parts(parts: &[u64]) -> Result<Self> {
        // exponents[p] = multiset of exponents of p across the parts
        let mut exponents: HashMap<u64, Vec<u32>> = HashMap::new();
        let mut rank = 0usize;
        for &part in parts {
            if part == 0 {
                return Err(Error::invalid_input("cyclic factor of order 0"));
            }
            if part == 1 {
                continue;
            }
            rank += 1;
            for p in crate::arith::ints::prime_factors(part) {
                let mut e = 0u32;
                let mut m = part;
                while m % p == 0 {
                    e += 1;
                    m /= p;
                }
                exponents.entry(p).or_default().push(e);
            }
        }
        for list in exponents.values_mut() {
            list.sort_unstable_by(|x, y| y.cmp(x));
        }
        // divisor r-i is the product of the (i+1)-largest prime powers
        let mut chain: Vec<u64> = vec![1; rank];
        for (&p, list) in &exponents {
            for (i, &e) in list.iter().enumerate() {
                chain[i] = chain[i]
                    .checked_mul(p.pow(e))
                    .ok_or_else(|| Error::invalid_input("group order overflows"))?;
            }
        }
        chain.retain(|&d| d > 1);
        chain.reverse();
        Self::new(chain)
    }

    pub fn elementary_divisors(&self) -> &[u64] {
        &self.elementary_divisors
    }

    pub fn is_trivial(&self) -> bool {
        self.elementary_divisors.is_empty()
    }

    pub fn order(&self) -> u128 {
        self.elementary_divisors
            .iter()
            .map(|&d| d as u128)
            .product()
    }

    /// Direct sum, re-canonicalized into a single chain.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let parts: Vec<u64> = self
            .elementary_divisors
            .iter()
            .chain(other.elementary_divisors.iter())
            .copied()
            .collect();
        Self::from_cyclic_parts(&parts).expect("sum of valid chains is valid")
    }

    /// Whether the 2-Sylow subgroup is cyclic (at most one even divisor).
    pub fn has_cyclic_two_sylow(&self) -> bool {
        self.elementary_divisors
            .iter()
            .filter(|&&d| d % 2 == 0)
            .count()
            <= 1
    }

    /// The odd part: every divisor stripped of its 2-power content.
    pub fn odd_part(&self) -> Self {
        let odd: Vec<u64> = self
            .elementary_divisors
            .iter()
            .map(|&d| {
                let mut m = d;
                while m % 2 == 0 {
                    m /= 2;
                }
                m
            })
            .filter(|&m| m > 1)
            .collect();
        Self::from_cyclic_parts(&odd).expect("odd parts form a valid chain")
    }

    /// Extracts the structure of the group given by a multiplication table
    /// over elements 0..n, by repeatedly splitting off a maximal-order cyclic
    /// summand and passing to the quotient.
    pub fn from_cayley_table(table: &[Vec<usize>]) -> Result<Self> {
        let n = table.len();
        if n == 0 || table.iter().any(|row| row.len() != n) {
            return Err(Error::invalid_input("multiplication table must be square"));
        }
        for (i, row) in table.iter().enumerate() {
            let mut seen = vec![false; n];
            for (j, &v) in row.iter().enumerate() {
                if v >= n {
                    return Err(Error::invalid_input("table entry out of range"));
                }
                if table[j][i] != v {
                    return Err(Error::invalid_input("table is not commutative"));
                }
                if seen[v] {
                    return Err(Error::invalid_input("table row is not a permutation"));
                }
                seen[v] = true;
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x))
            .ok_or_else(|| Error::invalid_input("table has no identity"))?;

        // Work on coset representatives; mul maps through the original table.
        let mut elements: Vec<usize> = (0..n).collect();
        let mut rep: Vec<usize> = (0..n).collect();
        let mut divisors_desc: Vec<u64> = Vec::new();
        while elements.len() > 1 {
            let order_of = |g: usize, rep: &[usize]| -> u64 {
                let mut x = g;
                let mut k = 1u64;
                while x != identity {
                    x = rep[table[x][g]];
                    k += 1;
                }
                k
            };
            let (&g, ord) = elements
                .iter()
                .map(|e| (e, order_of(*e, &rep)))
                .max_by_key(|&(_, o)| o)
                .ok_or_else(|| Error::Inconsistency("empty group layer".into()))?;
            divisors_desc.push(ord);
            // Partition the current elements by cosets of <g>.
            let mut coset_rep: HashMap<usize, usize> = HashMap::new();
            for &x in &elements {
                if coset_rep.contains_key(&x) {
                    continue;
                }
                let mut members = vec![x];
                let mut y = rep[table[x][g]];
                while y != x {
                    members.push(y);
                    y = rep[table[y][g]];
                }
                let lead = *members.iter().min().unwrap();
                for m in members {
                    coset_rep.insert(m, lead);
                }
            }
            for r in rep.iter_mut() {
                *r = coset_rep[r];
            }
            elements = {
                let mut reps: Vec<usize> = coset_rep.values().copied().collect();
                reps.sort_unstable();
                reps.dedup();
                reps
            };
        }
        divisors_desc.reverse();
        let chain: Vec<u64> = divisors_desc.into_iter().filter(|&d| d > 1).collect();
        let g = Self::new(chain)?;
        if g.order() != n as u128 {
            return Err(Error::Inconsistency(format!(
                "decomposition order {} does not match table size {n}",
                g.order()
            )));
        }
        Ok(g)
    }
}

impl std::fmt::Display for AbelianGroupStructure {
    /// Renders as `[d1, d2, ...]`, or `[1]` for the trivial group.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_trivial() {
            return write!(f, "[1]");
        }
        write!(f, "[")?;
        for (i, d) in self.elementary_divisors.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, "]")
    }
}
