//! Gaussian elimination over `F_p`.

use std::collections::BTreeMap;

use crate::field::PrimeModulus;
use crate::poly::{Monomial, SparsePoly};

/// Rank of a dense matrix given by rows, pivoting on the first nonzero entry.
pub fn rank(mut rows: Vec<Vec<u64>>, p: PrimeModulus) -> usize {
    let ncols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r].get(col).is_some_and(|&v| v != 0)) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = p.inv(rows[rank][col]).expect("nonzero pivot");
        let pivot_row: Vec<u64> = rows[rank].iter().map(|&v| p.mul(v, inv)).collect();
        for r in rank + 1..rows.len() {
            let factor = rows[r].get(col).copied().unwrap_or(0);
            if factor == 0 {
                continue;
            }
            let row = &mut rows[r];
            for (c, &pv) in pivot_row.iter().enumerate().skip(col) {
                if pv != 0 {
                    row[c] = p.sub(row[c], p.mul(factor, pv));
                }
            }
        }
        rows[rank] = pivot_row;
        rank += 1;
    }
    rank
}

/// Incrementally maintained row echelon basis of a space of polynomials,
/// keyed by leading monomial.
#[derive(Clone, Debug, Default)]
pub struct PolySpan {
    pivots: BTreeMap<Monomial, SparsePoly>,
}

impl PolySpan {
    pub fn new() -> Self {
        PolySpan::default()
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces `g` against the current basis.
    pub fn reduce(&self, g: &SparsePoly) -> SparsePoly {
        let p = g.ring().modulus();
        let mut g = g.clone();
        // Pivots are monic with distinct leading monomials, so the leading
        // monomial strictly decreases at each step.
        while let Some((lead, c)) = g.terms().first().cloned() {
            match self.pivots.get(&lead) {
                Some(pivot) => {
                    g = g.add(&pivot.scale(p.neg(c))).expect("same ring");
                }
                None => break,
            }
        }
        g
    }

    /// Adds `g` to the span; returns whether the dimension grew.
    pub fn insert(&mut self, g: &SparsePoly) -> bool {
        let g = self.reduce(g);
        let Some((lead, c)) = g.terms().first().cloned() else {
            return false;
        };
        let p = g.ring().modulus();
        self.pivots.insert(lead, g.scale(p.inv(c).expect("nonzero")));
        true
    }

    pub fn contains(&self, g: &SparsePoly) -> bool {
        self.reduce_fully(g).is_zero()
    }

    /// Reduces every term, not just the leading one.
    pub fn reduce_fully(&self, g: &SparsePoly) -> SparsePoly {
        let p = g.ring().modulus();
        let mut rest = g.clone();
        let mut kept = Vec::new();
        while let Some((lead, c)) = rest.terms().first().cloned() {
            match self.pivots.get(&lead) {
                Some(pivot) => rest = rest.add(&pivot.scale(p.neg(c))).expect("same ring"),
                None => {
                    kept.push((lead.clone(), c));
                    rest = rest.filter_terms(|m| *m != lead);
                }
            }
        }
        SparsePoly::from_terms(g.ring(), kept)
    }

    pub fn basis(&self) -> impl Iterator<Item = &SparsePoly> {
        self.pivots.values().rev()
    }

    pub fn into_basis(self) -> Vec<SparsePoly> {
        self.pivots.into_values().rev().collect()
    }
}
