//! Sparse multivariate polynomials over `F_p` in a fixed number of variables.
//!
//! Terms are kept in descending graded-lexicographic order with no zero
//! coefficients, so structural equality is mathematical equality.

use std::cmp::Ordering;
use std::fmt;

use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::field::{FpElem, PrimeModulus};

/// Ring context `F_p[x_0, ..., x_n]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ring {
    nvars: usize,
    p: PrimeModulus,
}

impl Ring {
    /// The ring in variables `x_0..x_n`, i.e. `n + 1` variables.
    pub fn new(n: usize, p: PrimeModulus) -> Self {
        Ring { nvars: n + 1, p }
    }

    #[inline]
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Index of the last variable.
    #[inline]
    pub fn n(&self) -> usize {
        self.nvars - 1
    }

    #[inline]
    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p.get()
    }
}

/// Exponent vector of a monomial; its length is the number of variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub SmallVec<[u64; 8]>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(SmallVec::from_elem(0, nvars))
    }

    pub fn from_slice(exps: &[u64]) -> Self {
        Monomial(SmallVec::from_slice(exps))
    }

    pub fn var(nvars: usize, i: usize, exp: u64) -> Self {
        let mut m = Monomial::one(nvars);
        m.0[i] = exp;
        m
    }

    #[inline]
    pub fn exps(&self) -> &[u64] {
        &self.0
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn checked_mul(&self, other: &Monomial) -> Result<Monomial> {
        let mut out = self.clone();
        for (a, b) in out.0.iter_mut().zip(other.0.iter()) {
            *a = a.checked_add(*b).ok_or(Error::ExponentOverflow)?;
        }
        Ok(out)
    }

    /// Whether `self` divides `other`.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Packs bounded exponent vectors into a `u128` so that monomial products
/// become integer additions.
#[derive(Clone, Debug)]
pub(crate) struct Packer {
    shifts: SmallVec<[u32; 8]>,
    masks: SmallVec<[u128; 8]>,
}

impl Packer {
    /// A packer able to hold exponent `bounds[i]` in slot `i`, if 128 bits suffice.
    pub(crate) fn for_bounds(bounds: &[u64]) -> Option<Packer> {
        let mut shifts = SmallVec::new();
        let mut masks = SmallVec::new();
        let mut used = 0u32;
        for &b in bounds {
            let bits = (64 - b.leading_zeros()).max(1);
            if used + bits > 128 {
                return None;
            }
            shifts.push(used);
            masks.push((1u128 << bits) - 1);
            used += bits;
        }
        Some(Packer { shifts, masks })
    }

    #[inline]
    pub(crate) fn pack(&self, m: &[u64]) -> u128 {
        let mut key = 0u128;
        for (e, s) in m.iter().zip(self.shifts.iter()) {
            key |= (*e as u128) << s;
        }
        key
    }

    #[inline]
    pub(crate) fn unpack(&self, key: u128) -> Monomial {
        Monomial(
            self.shifts
                .iter()
                .zip(self.masks.iter())
                .map(|(s, mask)| ((key >> s) & mask) as u64)
                .collect(),
        )
    }
}

/// A polynomial in `F_p[x_0..x_n]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SparsePoly {
    ring: Ring,
    terms: Vec<(Monomial, u64)>,
}

impl SparsePoly {
    pub fn zero(ring: Ring) -> Self {
        SparsePoly {
            ring,
            terms: Vec::new(),
        }
    }

    pub fn constant(ring: Ring, c: u64) -> Self {
        Self::monomial(ring, Monomial::one(ring.nvars()), c)
    }

    pub fn one(ring: Ring) -> Self {
        Self::constant(ring, 1)
    }

    pub fn monomial(ring: Ring, m: Monomial, c: u64) -> Self {
        debug_assert_eq!(m.0.len(), ring.nvars());
        let c = ring.modulus().reduce(c);
        let terms = if c == 0 { Vec::new() } else { vec![(m, c)] };
        SparsePoly { ring, terms }
    }

    /// The variable `x_i`.
    pub fn var(ring: Ring, i: usize) -> Result<Self> {
        if i >= ring.nvars() {
            return Err(Error::VariableOutOfRange {
                index: i,
                max: ring.n(),
            });
        }
        Ok(Self::monomial(ring, Monomial::var(ring.nvars(), i, 1), 1))
    }

    /// Builds the canonical form of an arbitrary list of terms.
    pub fn from_terms(ring: Ring, terms: impl IntoIterator<Item = (Monomial, u64)>) -> Self {
        let p = ring.modulus();
        let mut acc: FxHashMap<Monomial, u64> = FxHashMap::default();
        for (m, c) in terms {
            debug_assert_eq!(m.0.len(), ring.nvars());
            let e = acc.entry(m).or_insert(0);
            *e = p.add(*e, p.reduce(c));
        }
        Self::from_map(ring, acc)
    }

    fn from_map(ring: Ring, acc: FxHashMap<Monomial, u64>) -> Self {
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| *c != 0).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        SparsePoly { ring, terms }
    }

    /// Wraps terms that are already sorted, merged and nonzero.
    pub(crate) fn from_sorted_unchecked(ring: Ring, terms: Vec<(Monomial, u64)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 > w[1].0));
        debug_assert!(terms.iter().all(|(_, c)| *c != 0));
        SparsePoly { ring, terms }
    }

    #[inline]
    pub fn ring(&self) -> Ring {
        self.ring
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Terms in descending graded-lex order, coefficients as residues in `[1, p)`.
    pub fn terms(&self) -> &[(Monomial, u64)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(Monomial, u64)> {
        self.terms
    }

    pub fn coefficient(&self, m: &Monomial) -> FpElem {
        let c = self
            .terms
            .binary_search_by(|(t, _)| m.cmp(t))
            .map(|i| self.terms[i].1)
            .unwrap_or(0);
        FpElem::new(c, self.ring.modulus())
    }

    pub fn constant_term(&self) -> u64 {
        match self.terms.last() {
            Some((m, c)) if m.is_one() => *c,
            _ => 0,
        }
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u64> {
        self.terms.first().map(|(m, _)| m.degree())
    }

    pub fn min_degree(&self) -> Option<u64> {
        self.terms.last().map(|(m, _)| m.degree())
    }

    /// The common degree of all terms, if there is one.
    pub fn homogeneous_degree(&self) -> Option<u64> {
        let d = self.degree()?;
        (self.min_degree() == Some(d)).then_some(d)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.homogeneous_degree().is_some()
    }

    /// Largest exponent of each variable across all terms.
    pub fn max_exponents(&self) -> SmallVec<[u64; 8]> {
        let mut out: SmallVec<[u64; 8]> = SmallVec::from_elem(0, self.ring.nvars());
        for (m, _) in &self.terms {
            for (o, e) in out.iter_mut().zip(m.0.iter()) {
                *o = (*o).max(*e);
            }
        }
        out
    }

    fn check_ring(&self, other: &SparsePoly) -> Result<()> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }

    pub fn add(&self, other: &SparsePoly) -> Result<SparsePoly> {
        self.check_ring(other)?;
        let p = self.ring.modulus();
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (a, b) = (&self.terms[i], &other.terms[j]);
            match a.0.cmp(&b.0) {
                Ordering::Greater => {
                    out.push(a.clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push(b.clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = p.add(a.1, b.1);
                    if c != 0 {
                        out.push((a.0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&other.terms[j..]);
        Ok(SparsePoly::from_sorted_unchecked(self.ring, out))
    }

    pub fn neg(&self) -> SparsePoly {
        let p = self.ring.modulus();
        SparsePoly {
            ring: self.ring,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), p.neg(*c))).collect(),
        }
    }

    pub fn sub(&self, other: &SparsePoly) -> Result<SparsePoly> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: u64) -> SparsePoly {
        let p = self.ring.modulus();
        let c = p.reduce(c);
        if c == 0 {
            return SparsePoly::zero(self.ring);
        }
        SparsePoly {
            ring: self.ring,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), p.mul(*a, c))).collect(),
        }
    }

    /// Multiplies every term by a monomial.
    pub fn mul_monomial(&self, m: &Monomial) -> Result<SparsePoly> {
        let terms = self
            .terms
            .iter()
            .map(|(t, c)| Ok((t.checked_mul(m)?, *c)))
            .collect::<Result<Vec<_>>>()?;
        // Multiplying by a monomial preserves graded-lex order.
        Ok(SparsePoly::from_sorted_unchecked(self.ring, terms))
    }

    /// Exact product (schoolbook over the sparse supports).
    pub fn mul(&self, other: &SparsePoly) -> Result<SparsePoly> {
        self.check_ring(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(SparsePoly::zero(self.ring));
        }
        let (ma, mb) = (self.max_exponents(), other.max_exponents());
        let bounds = ma
            .iter()
            .zip(mb.iter())
            .map(|(a, b)| a.checked_add(*b).ok_or(Error::ExponentOverflow))
            .collect::<Result<SmallVec<[u64; 8]>>>()?;
        let p = self.ring.modulus();
        if let Some(packer) = Packer::for_bounds(&bounds) {
            let a: Vec<(u128, u64)> = self.terms.iter().map(|(m, c)| (packer.pack(&m.0), *c)).collect();
            let b: Vec<(u128, u64)> = other.terms.iter().map(|(m, c)| (packer.pack(&m.0), *c)).collect();
            let mut acc: FxHashMap<u128, u64> = FxHashMap::default();
            acc.reserve(a.len().max(b.len()) * 2);
            for &(ka, ca) in &a {
                for &(kb, cb) in &b {
                    let e = acc.entry(ka + kb).or_insert(0);
                    *e = p.add(*e, p.mul(ca, cb));
                }
            }
            let mut terms: Vec<(Monomial, u64)> = acc
                .into_iter()
                .filter(|(_, c)| *c != 0)
                .map(|(k, c)| (packer.unpack(k), c))
                .collect();
            terms.sort_unstable_by(|x, y| y.0.cmp(&x.0));
            return Ok(SparsePoly::from_sorted_unchecked(self.ring, terms));
        }
        let mut acc: FxHashMap<Monomial, u64> = FxHashMap::default();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let e = acc.entry(m1.checked_mul(m2)?).or_insert(0);
                *e = p.add(*e, p.mul(*c1, *c2));
            }
        }
        Ok(SparsePoly::from_map(self.ring, acc))
    }

    /// Full, untruncated power by repeated squaring.
    pub fn pow(&self, mut k: u64) -> Result<SparsePoly> {
        let mut acc = SparsePoly::one(self.ring);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// `∂/∂x_i`, with coefficients reduced mod p.
    pub fn partial_derivative(&self, i: usize) -> Result<SparsePoly> {
        if i >= self.ring.nvars() {
            return Err(Error::VariableOutOfRange {
                index: i,
                max: self.ring.n(),
            });
        }
        let p = self.ring.modulus();
        let terms = self.terms.iter().filter_map(|(m, c)| {
            let e = m.0[i];
            let k = p.reduce(e);
            if k == 0 {
                return None;
            }
            let mut m = m.clone();
            m.0[i] = e - 1;
            Some((m, p.mul(*c, k)))
        });
        Ok(SparsePoly::from_terms(self.ring, terms))
    }

    /// The map `x^a -> x^{s a}` with coefficients fixed; equals `self^s` when
    /// `s` is a power of p.
    pub fn frobenius_twist(&self, s: u64) -> Result<SparsePoly> {
        if !is_power_of(s, self.ring.p()) {
            return Err(Error::NotPowerOfP {
                q: s,
                p: self.ring.p(),
            });
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let exps = m
                    .0
                    .iter()
                    .map(|e| e.checked_mul(s).ok_or(Error::ExponentOverflow))
                    .collect::<Result<SmallVec<_>>>()?;
                Ok((Monomial(exps), *c))
            })
            .collect::<Result<Vec<_>>>()?;
        // Scaling every exponent by s > 0 preserves graded-lex order.
        Ok(SparsePoly::from_sorted_unchecked(self.ring, terms))
    }

    /// Keeps only terms satisfying `keep`.
    pub fn filter_terms(&self, mut keep: impl FnMut(&Monomial) -> bool) -> SparsePoly {
        SparsePoly {
            ring: self.ring,
            terms: self.terms.iter().filter(|(m, _)| keep(m)).cloned().collect(),
        }
    }

    /// Same terms read in a ring with the same number of variables.
    pub fn with_ring(mut self, ring: Ring) -> Result<SparsePoly> {
        if ring.nvars() != self.ring.nvars() {
            return Err(Error::RingMismatch);
        }
        let p = ring.modulus();
        self.terms.iter_mut().for_each(|t| t.1 = p.reduce(t.1));
        self.terms.retain(|t| t.1 != 0);
        self.ring = ring;
        Ok(self)
    }
}

/// Whether `s = p^i` for some `i >= 0`.
pub fn is_power_of(mut s: u64, p: u64) -> bool {
    if s == 0 {
        return false;
    }
    while s % p == 0 {
        s /= p;
    }
    s == 1
}

/// All monomials of total degree `t` in `nvars` variables, descending graded-lex.
pub fn monomials_of_degree(nvars: usize, t: u64) -> Vec<Monomial> {
    fn rec(nvars: usize, i: usize, left: u64, cur: &mut SmallVec<[u64; 8]>, out: &mut Vec<Monomial>) {
        if i + 1 == nvars {
            cur[i] = left;
            out.push(Monomial(cur.clone()));
            return;
        }
        for e in (0..=left).rev() {
            cur[i] = e;
            rec(nvars, i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    if nvars == 0 {
        return out;
    }
    let mut cur = SmallVec::from_elem(0, nvars);
    rec(nvars, 0, t, &mut cur, &mut out);
    out
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            let mut factors = Vec::new();
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(format!("x{i}")),
                    _ => factors.push(format!("x{i}^{e}")),
                }
            }
            if factors.is_empty() {
                write!(f, "{c}")?;
            } else if *c == 1 {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{c}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}
