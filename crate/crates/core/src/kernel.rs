//! Arithmetic in `R / m^[q]` where `m^[q] = (x_0^q, ..., x_n^q)`.
//!
//! Membership in `m^[q]` is a property of the monomial support, so the
//! canonical representative of a class keeps exactly the terms whose
//! exponents are all `< q`.

use crate::error::{Error, Result};
use crate::field::PrimeModulus;
use crate::poly::{is_power_of, SparsePoly};

/// `q = p^e`, the exponent of a Frobenius power of the maximal ideal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FrobeniusPower {
    p: PrimeModulus,
    e: u32,
    q: u64,
}

impl FrobeniusPower {
    pub fn new(p: PrimeModulus, e: u32) -> Result<Self> {
        let q = p.get().checked_pow(e).ok_or(Error::ExponentOverflow)?;
        Ok(FrobeniusPower { p, e, q })
    }

    pub fn from_q(p: PrimeModulus, q: u64) -> Result<Self> {
        if !is_power_of(q, p.get()) {
            return Err(Error::NotPowerOfP { q, p: p.get() });
        }
        let e = (0..).find(|&e| p.get().pow(e) == q).unwrap_or(0);
        Ok(FrobeniusPower { p, e, q })
    }

    #[inline]
    pub fn q(&self) -> u64 {
        self.q
    }

    #[inline]
    pub fn e(&self) -> u32 {
        self.e
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p.get()
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    /// `pq`, if it fits.
    pub fn next(&self) -> Result<FrobeniusPower> {
        FrobeniusPower::new(self.p, self.e + 1)
    }

    /// `q / p`; fails for `q = 1`.
    pub fn prev(&self) -> Result<FrobeniusPower> {
        if self.e == 0 {
            return Err(Error::InvalidArgument("q/p is not integral for q = 1".into()));
        }
        FrobeniusPower::new(self.p, self.e - 1)
    }
}

/// Canonical representative of a class in `R / m^[q]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedPoly {
    poly: SparsePoly,
    q: FrobeniusPower,
}

impl TruncatedPoly {
    pub fn poly(&self) -> &SparsePoly {
        &self.poly
    }

    pub fn into_poly(self) -> SparsePoly {
        self.poly
    }

    pub fn q(&self) -> FrobeniusPower {
        self.q
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn mul(&self, other: &TruncatedPoly) -> Result<TruncatedPoly> {
        if self.q != other.q {
            return Err(Error::RingMismatch);
        }
        Ok(truncate(&self.poly.mul(&other.poly)?, self.q))
    }
}

fn check_char(g: &SparsePoly, q: FrobeniusPower) -> Result<()> {
    if g.ring().modulus() != q.modulus() {
        Err(Error::RingMismatch)
    } else {
        Ok(())
    }
}

/// Drops every term with some exponent `>= q`.
pub fn truncate(g: &SparsePoly, q: FrobeniusPower) -> TruncatedPoly {
    let bound = q.q();
    TruncatedPoly {
        poly: g.filter_terms(|m| m.exps().iter().all(|&e| e < bound)),
        q,
    }
}

/// `f^k mod m^[q]` by square-and-multiply, truncating after each product.
pub fn power_mod(f: &SparsePoly, k: u64, q: FrobeniusPower) -> Result<TruncatedPoly> {
    check_char(f, q)?;
    let one = truncate(&SparsePoly::one(f.ring()), q);
    let mut acc = one;
    let mut base = truncate(f, q);
    let mut k = k;
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

/// Full expansion of `f^k`, truncated once at the end. Slow reference path.
pub fn naive_power(f: &SparsePoly, k: u64, q: FrobeniusPower) -> Result<TruncatedPoly> {
    check_char(f, q)?;
    let mut acc = SparsePoly::one(f.ring());
    for _ in 0..k {
        acc = acc.mul(f)?;
    }
    Ok(truncate(&acc, q))
}

/// Lazily computed `f^j` for `0 <= j < p`.
#[derive(Clone, Debug)]
pub struct DigitPowers {
    powers: Vec<SparsePoly>,
    p: u64,
}

impl DigitPowers {
    pub fn new(f: &SparsePoly) -> Self {
        DigitPowers {
            powers: vec![SparsePoly::one(f.ring()), f.clone()],
            p: f.ring().p(),
        }
    }

    pub fn base(&self) -> &SparsePoly {
        &self.powers[1]
    }

    /// `f^j`; `j` must be a base-p digit.
    pub fn get(&mut self, j: u64) -> Result<&SparsePoly> {
        if j >= self.p.max(2) {
            return Err(Error::InvalidArgument(format!("{j} is not a base-{} digit", self.p)));
        }
        while self.powers.len() as u64 <= j {
            let next = self.powers.last().unwrap().mul(&self.powers[1])?;
            self.powers.push(next);
        }
        Ok(&self.powers[j as usize])
    }
}

/// Base-p digits of `k`, least significant first.
pub fn base_p_digits(mut k: u64, p: u64) -> Vec<u64> {
    let mut out = Vec::new();
    while k > 0 {
        out.push(k % p);
        k /= p;
    }
    out
}

/// `f^k mod m^[q]` as the product of twisted digit powers
/// `(f^{k_i})^{p^i} = twist(f^{k_i}, p^i)`, low digit first.
pub fn power_mod_basep(f: &SparsePoly, k: u64, q: FrobeniusPower) -> Result<TruncatedPoly> {
    check_char(f, q)?;
    let mut digits = DigitPowers::new(f);
    power_mod_basep_cached(&mut digits, k, q)
}

pub fn power_mod_basep_cached(
    digits: &mut DigitPowers,
    k: u64,
    q: FrobeniusPower,
) -> Result<TruncatedPoly> {
    let p = q.p();
    let ring = digits.base().ring();
    let mut acc = truncate(&SparsePoly::one(ring), q);
    let mut scale = 1u64;
    for (i, &k_i) in base_p_digits(k, p).iter().enumerate() {
        if k_i != 0 {
            let power = digits.get(k_i)?;
            let factor = if (i as u32) < q.e() {
                // x^{a p^i} survives mod m^[q] iff every a_j < q / p^i.
                let inner = FrobeniusPower::new(q.modulus(), q.e() - i as u32)?;
                truncate(&truncate(power, inner).into_poly().frobenius_twist(scale)?, q)
            } else {
                // Only the constant term survives a twist by p^i >= q.
                truncate(&SparsePoly::constant(ring, power.constant_term()), q)
            };
            acc = acc.mul(&factor)?;
            if acc.is_zero() {
                return Ok(acc);
            }
        }
        scale = scale.saturating_mul(p);
    }
    Ok(acc)
}

/// Whether `f^k` lies in `m^[q]`.
pub fn is_member(f: &SparsePoly, k: u64, q: FrobeniusPower) -> Result<bool> {
    crate::membership::MembershipOracle::new(f)?.is_member(k, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;
    use crate::poly::{Monomial, Ring};

    fn fp(p: u64, e: u32) -> FrobeniusPower {
        FrobeniusPower::new(PrimeModulus::new(p).unwrap(), e).unwrap()
    }

    #[test]
    fn truncate_generators_and_survivors() {
        let q = fp(3, 2);
        let r = Ring::new(1, q.modulus());
        let gen = SparsePoly::monomial(r, Monomial::from_slice(&[9, 0]), 1);
        assert!(truncate(&gen, q).is_zero());
        let divisible = SparsePoly::monomial(r, Monomial::from_slice(&[8, 9]), 2);
        assert!(truncate(&divisible, q).is_zero());
        let socle = SparsePoly::monomial(r, Monomial::from_slice(&[8, 8]), 1);
        assert_eq!(truncate(&socle, q).poly(), &socle);
    }

    #[test]
    fn power_mod_small_cases() {
        let q = fp(2, 1);
        let f = parse_poly("x0 + x1", 1, 2).unwrap();
        assert!(power_mod(&f, 2, q).unwrap().is_zero());
        assert_eq!(power_mod(&f, 1, q).unwrap().poly(), &f);
        assert_eq!(power_mod(&f, 0, q).unwrap().poly().to_string(), "1");
    }

    #[test]
    fn basep_single_digit_is_a_twist() {
        let q = fp(3, 2);
        let f = parse_poly("x0^2 + 2*x0*x1 + x1", 1, 3).unwrap();
        let direct = truncate(&f.frobenius_twist(3).unwrap(), q);
        assert_eq!(power_mod_basep(&f, 3, q).unwrap(), direct);
        assert_eq!(power_mod_basep(&f, 0, q).unwrap().poly().to_string(), "1");
    }

    #[test]
    fn from_q_rejects_non_powers() {
        let p = PrimeModulus::new(3).unwrap();
        assert_eq!(FrobeniusPower::from_q(p, 27).unwrap().e(), 3);
        assert!(FrobeniusPower::from_q(p, 12).is_err());
        assert_eq!(FrobeniusPower::from_q(p, 1).unwrap().e(), 0);
    }

    #[test]
    fn digits() {
        assert_eq!(base_p_digits(0, 5), Vec::<u64>::new());
        assert_eq!(base_p_digits(124, 5), vec![4, 4, 4]);
        assert_eq!(base_p_digits(26, 3), vec![2, 2, 2]);
    }
}
