//! Deciding `f^k ∈ m^[q]` through iterated Frobenius roots.
//!
//! Over `F_p` every polynomial splits uniquely as `g = Σ_b u_b^p x^b` with
//! `b ∈ [0, p)^{n+1}`, and `g ∈ J^[p]` iff every `u_b ∈ J`. Writing
//! `k = Σ k_i p^i`, this gives
//!
//! ```text
//! I_0 = (1),   I_{i+1} = (I_i · f^{k_i})^{[1/p]},   f^k ∈ m^[p^e]  ⇔  I_e ⊆ m,
//! ```
//!
//! where `(g)^{[1/p]} = (u_b : b)`. The ideals `I_i` stay generated in degree
//! at most about `deg f`, so the cost no longer grows with `q` the way the
//! truncated power `f^k mod m^[q]` does.

use rustc_hash::{FxHashMap, FxHashSet};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::kernel::{base_p_digits, truncate, DigitPowers, FrobeniusPower};
use crate::linalg::PolySpan;
use crate::poly::{monomials_of_degree, Monomial, Ring, SparsePoly};

/// Ideal given by generators; `unit` short-circuits the whole ring.
#[derive(Clone, Debug)]
pub struct IdealGens {
    ring: Ring,
    gens: Vec<SparsePoly>,
    unit: bool,
}

impl IdealGens {
    pub fn unit(ring: Ring) -> Self {
        IdealGens {
            ring,
            gens: vec![SparsePoly::one(ring)],
            unit: true,
        }
    }

    pub fn zero(ring: Ring) -> Self {
        IdealGens {
            ring,
            gens: Vec::new(),
            unit: false,
        }
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn is_unit(&self) -> bool {
        self.unit
    }

    pub fn is_zero(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn gens(&self) -> &[SparsePoly] {
        &self.gens
    }

    /// Whether the ideal lies in the homogeneous maximal ideal.
    pub fn in_maximal_ideal(&self) -> bool {
        !self.unit && self.gens.iter().all(|g| g.constant_term() == 0)
    }

    /// Builds a generating set from a spanning family, dropping redundancy.
    pub fn from_span(ring: Ring, span: PolySpan, homogeneous: bool) -> Self {
        let basis = span.into_basis();
        if basis.iter().any(|g| g.degree() == Some(0)) {
            return IdealGens::unit(ring);
        }
        let gens = if homogeneous {
            minimal_homogeneous(ring, basis)
        } else {
            basis
        };
        IdealGens {
            ring,
            gens,
            unit: false,
        }
    }
}

/// Keeps only generators not already in the ideal spanned by lower degrees.
fn minimal_homogeneous(ring: Ring, mut basis: Vec<SparsePoly>) -> Vec<SparsePoly> {
    basis.sort_by_key(|g| g.degree());
    let mut kept: Vec<SparsePoly> = Vec::new();
    let mut i = 0;
    while i < basis.len() {
        let t = basis[i].degree().unwrap_or(0);
        let mut j = i;
        while j < basis.len() && basis[j].degree() == Some(t) {
            j += 1;
        }
        let mut span = PolySpan::new();
        for g in &kept {
            let gap = t - g.degree().unwrap_or(0);
            for m in monomials_of_degree(ring.nvars(), gap) {
                span.insert(&g.mul_monomial(&m).expect("degrees are small"));
            }
        }
        for g in &basis[i..j] {
            if span.insert(g) {
                kept.push(g.clone());
            }
        }
        i = j;
    }
    kept
}

type Residue = SmallVec<[u64; 8]>;

/// Splits `h = Σ_b u_b^p x^b` and feeds each `u_b` into `span`.
/// Returns `true` as soon as some `u_b` is a nonzero constant.
fn push_roots(h: &SparsePoly, p: u64, span: &mut PolySpan, seen: &mut FxHashSet<SparsePoly>) -> bool {
    if h.terms().iter().any(|(m, _)| m.exps().iter().all(|&e| e < p)) {
        return true;
    }
    let ring = h.ring();
    let mut parts: FxHashMap<Residue, Vec<(Monomial, u64)>> = FxHashMap::default();
    for (m, c) in h.terms() {
        let b: Residue = m.exps().iter().map(|e| e % p).collect();
        let u = Monomial(m.exps().iter().map(|e| e / p).collect());
        parts.entry(b).or_default().push((u, *c));
    }
    let modulus = ring.modulus();
    for (_, terms) in parts {
        // Terms sharing a residue keep their relative graded-lex order.
        let u = SparsePoly::from_sorted_unchecked(ring, terms);
        let lead = u.terms()[0].1;
        let monic = u.scale(modulus.inv(lead).expect("nonzero"));
        if seen.insert(monic.clone()) {
            span.insert(&monic);
        }
    }
    false
}

/// The ideal `(h)^{[1/p]}` generated by the components `u_b` of
/// `h = Σ_b u_b^p x^b`.
pub fn frobenius_root(h: &SparsePoly) -> IdealGens {
    let ring = h.ring();
    if h.is_zero() {
        return IdealGens::zero(ring);
    }
    let mut span = PolySpan::new();
    let mut seen = FxHashSet::default();
    if push_roots(h, ring.p(), &mut span, &mut seen) {
        return IdealGens::unit(ring);
    }
    IdealGens::from_span(ring, span, h.is_homogeneous())
}

/// Repeated membership queries `f^k ∈ m^[q]` for one `f`, caching digit powers.
#[derive(Clone, Debug)]
pub struct MembershipOracle {
    f: SparsePoly,
    homogeneous: bool,
    digits: DigitPowers,
    digits_mod_p: FxHashMap<u64, SparsePoly>,
}

impl MembershipOracle {
    pub fn new(f: &SparsePoly) -> Result<Self> {
        if f.constant_term() != 0 {
            return Err(Error::NotInMaximalIdeal);
        }
        Ok(MembershipOracle {
            f: f.clone(),
            homogeneous: f.is_homogeneous(),
            digits: DigitPowers::new(f),
            digits_mod_p: FxHashMap::default(),
        })
    }

    pub fn poly(&self) -> &SparsePoly {
        &self.f
    }

    fn digit_mod_p(&mut self, j: u64, p1: FrobeniusPower) -> Result<&SparsePoly> {
        if !self.digits_mod_p.contains_key(&j) {
            let t = truncate(self.digits.get(j)?, p1).into_poly();
            self.digits_mod_p.insert(j, t);
        }
        Ok(&self.digits_mod_p[&j])
    }

    /// `(I · f^r)^{[1/p]}`.
    pub fn root_step(&mut self, ideal: &IdealGens, r: u64) -> Result<IdealGens> {
        let ring = self.f.ring();
        let p = ring.p();
        let power = self.digits.get(r)?;
        let mut span = PolySpan::new();
        let mut seen = FxHashSet::default();
        let unit = if ideal.is_unit() {
            push_roots(power, p, &mut span, &mut seen)
        } else {
            let mut unit = false;
            for g in ideal.gens() {
                let h = g.mul(power)?;
                if push_roots(&h, p, &mut span, &mut seen) {
                    unit = true;
                    break;
                }
            }
            unit
        };
        if unit {
            return Ok(IdealGens::unit(ring));
        }
        let homogeneous = self.homogeneous;
        Ok(IdealGens::from_span(ring, span, homogeneous))
    }

    /// Whether `f^k ∈ m^[q]`.
    pub fn is_member(&mut self, k: u64, q: FrobeniusPower) -> Result<bool> {
        if q.modulus() != self.f.ring().modulus() {
            return Err(Error::RingMismatch);
        }
        if self.f.is_zero() {
            return Ok(k >= 1);
        }
        if k == 0 {
            return Ok(false);
        }
        // f ∈ m, so f^q = twist(f, q) ∈ m^[q].
        if q.e() == 0 || k >= q.q() {
            return Ok(true);
        }
        let e = q.e() as usize;
        let mut digits = base_p_digits(k, q.p());
        digits.resize(e, 0);
        let ring = self.f.ring();
        let mut ideal = IdealGens::unit(ring);
        for &d in &digits[..e - 1] {
            ideal = self.root_step(&ideal, d)?;
            if ideal.is_zero() {
                return Ok(true);
            }
        }
        let p1 = FrobeniusPower::new(ring.modulus(), 1)?;
        let last = self.digit_mod_p(digits[e - 1], p1)?.clone();
        for g in ideal.gens() {
            let g = truncate(g, p1).into_poly();
            if !truncate(&g.mul(&last)?, p1).is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}
