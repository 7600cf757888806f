//! Finite semigroups given by Cayley tables.
//!
//! A finite semigroup with the discrete topology is a compact right
//! topological semigroup, so everything here is the constructive, exhaustive
//! counterpart of the idempotent theory used for the envelope computations.

mod checks;
mod enumerate;
mod ideals;
mod poset;
mod transform;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use checks::{
    check_idempotent_exists, check_left_zero_in_minimal_ideals, check_minimal_below,
    check_similarity_below_minimal, CheckOutcome,
};
pub use enumerate::{enumerate_semigroups, SemigroupEnumerator};
pub use ideals::{left_ideal, minimal_idempotent_below, minimal_left_ideal_below, minimal_left_ideals};
pub use poset::{idempotent_poset, IdempotentPoset};
pub use transform::{full_transformation_table, random_subsemigroup, TransformationMonoid};

/// Multiplication table of a finite semigroup; `table[s][t] = s·t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CayleyTable {
    order: usize,
    table: Vec<usize>,
}

impl CayleyTable {
    /// Validate a square table: indices in range, associativity on every
    /// triple. The first violating triple in lexicographic order is reported.
    pub fn validate(rows: Vec<Vec<usize>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::domain("a semigroup must be nonempty"));
        }
        let mut table = Vec::with_capacity(n * n);
        for (s, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::dim(format!("row {s} has {} entries, expected {n}", row.len())));
            }
            for (t, &v) in row.iter().enumerate() {
                if v >= n {
                    return Err(Error::domain(format!("table[{s}][{t}] = {v} is not < {n}")));
                }
            }
            table.extend_from_slice(row);
        }
        let candidate = CayleyTable { order: n, table };
        match candidate.first_non_associative() {
            Some((s, t, u)) => Err(Error::NonAssociative { s, t, u }),
            None => Ok(candidate),
        }
    }

    /// Caller guarantees associativity (e.g. a subsemigroup of a valid table).
    pub(crate) fn from_flat_unchecked(order: usize, table: Vec<usize>) -> Self {
        debug_assert_eq!(table.len(), order * order);
        CayleyTable { order, table }
    }

    pub(crate) fn is_associative_flat(order: usize, table: &[usize]) -> bool {
        let m = |a: usize, b: usize| table[a * order + b];
        (0..order).all(|s| {
            (0..order).all(|t| {
                let st = m(s, t);
                (0..order).all(|u| m(st, u) == m(s, m(t, u)))
            })
        })
    }

    fn first_non_associative(&self) -> Option<(usize, usize, usize)> {
        let n = self.order;
        for s in 0..n {
            for t in 0..n {
                let st = self.mul(s, t);
                for u in 0..n {
                    if self.mul(st, u) != self.mul(s, self.mul(t, u)) {
                        return Some((s, t, u));
                    }
                }
            }
        }
        None
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, s: usize, t: usize) -> usize {
        self.table[s * self.order + t]
    }

    pub fn is_idempotent(&self, e: usize) -> bool {
        self.mul(e, e) == e
    }

    pub fn idempotents(&self) -> Vec<usize> {
        (0..self.order).filter(|&e| self.is_idempotent(e)).collect()
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(<[usize]>::to_vec).collect()
    }

    /// The idempotent in the cycle of the power sequence `s, s², s³, …`.
    ///
    /// The sequence is eventually periodic with index `m` and period `p`; the
    /// cycle is a cyclic group whose identity is `s^k` for the least
    /// `k ≥ m` divisible by `p`. Returns `(s^k, k)` with `k ≤ 2n`.
    pub fn idempotent_power_with_exponent(&self, s: usize) -> (usize, usize) {
        let n = self.order;
        let mut first_seen = vec![usize::MAX; n];
        let mut powers = Vec::with_capacity(n + 1);
        let mut p = s;
        let mut k = 1;
        loop {
            if first_seen[p] != usize::MAX {
                let index = first_seen[p];
                let period = k - index;
                let exp = index.div_ceil(period) * period;
                return (powers[exp - 1], exp);
            }
            first_seen[p] = k;
            powers.push(p);
            p = self.mul(p, s);
            k += 1;
        }
    }

    pub fn idempotent_power(&self, s: usize) -> usize {
        self.idempotent_power_with_exponent(s).0
    }

    /// Subsemigroup generated by `generators`, relabelled `0..k` in
    /// ascending order of the original indices. Also returns that labelling.
    pub fn subsemigroup(&self, generators: &[usize]) -> (CayleyTable, Vec<usize>) {
        let mut member = vec![false; self.order];
        let mut elems: Vec<usize> = Vec::new();
        for &g in generators {
            if !member[g] {
                member[g] = true;
                elems.push(g);
            }
        }
        let mut frontier = 0;
        while frontier < elems.len() {
            let end = elems.len();
            for i in 0..end {
                for j in 0..end {
                    if i < frontier && j < frontier {
                        continue;
                    }
                    for p in [self.mul(elems[i], elems[j]), self.mul(elems[j], elems[i])] {
                        if !member[p] {
                            member[p] = true;
                            elems.push(p);
                        }
                    }
                }
            }
            frontier = end;
        }
        elems.sort_unstable();
        let mut label = vec![usize::MAX; self.order];
        for (k, &e) in elems.iter().enumerate() {
            label[e] = k;
        }
        let k = elems.len();
        let mut table = Vec::with_capacity(k * k);
        for &a in &elems {
            for &b in &elems {
                table.push(label[self.mul(a, b)]);
            }
        }
        (CayleyTable::from_flat_unchecked(k, table), elems)
    }
}

/// `{"order": n, "table": [[...], ...]}`
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CayleyJson {
    pub order: usize,
    pub table: Vec<Vec<usize>>,
}

impl CayleyJson {
    pub fn to_table(&self) -> Result<CayleyTable> {
        if self.table.len() != self.order {
            return Err(Error::parse(
                "/table",
                format!("order is {} but table has {} rows", self.order, self.table.len()),
            ));
        }
        CayleyTable::validate(self.table.clone())
    }
}

impl From<&CayleyTable> for CayleyJson {
    fn from(t: &CayleyTable) -> Self {
        CayleyJson {
            order: t.order(),
            table: t.rows(),
        }
    }
}

/// Cyclic group `ℤ/n` under addition.
pub fn cyclic_group(n: usize) -> CayleyTable {
    let rows = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
    CayleyTable::validate(rows).expect("cyclic group is associative")
}

/// Left-zero semigroup: `x·y = x`.
pub fn left_zero(n: usize) -> CayleyTable {
    let rows = (0..n).map(|a| vec![a; n]).collect();
    CayleyTable::validate(rows).expect("left-zero semigroup is associative")
}
