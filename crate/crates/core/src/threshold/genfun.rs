use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::threshold::{CertificateStatus, FptCertificate, MuSequence, Rational};

type QPoly<T> = Vec<Ratio<T>>;

fn trim<T: Clone + Integer>(mut a: QPoly<T>) -> QPoly<T> {
    while a.last().is_some_and(Zero::is_zero) {
        a.pop();
    }
    a
}

fn mul<T: Clone + Integer>(a: &[Ratio<T>], b: &[Ratio<T>]) -> QPoly<T> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Ratio::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    trim(out)
}

fn add<T: Clone + Integer>(a: &[Ratio<T>], b: &[Ratio<T>]) -> QPoly<T> {
    let mut out = vec![Ratio::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] = out[i].clone() + x.clone();
    }
    for (i, x) in b.iter().enumerate() {
        out[i] = out[i].clone() + x.clone();
    }
    trim(out)
}

fn divrem<T: Clone + Integer>(a: &[Ratio<T>], b: &[Ratio<T>]) -> (QPoly<T>, QPoly<T>) {
    let b = trim(b.to_vec());
    let lead = b.last().expect("nonzero divisor").clone();
    let mut rem = trim(a.to_vec());
    if rem.len() < b.len() {
        return (Vec::new(), rem);
    }
    let mut quot = vec![Ratio::zero(); rem.len() - b.len() + 1];
    while rem.len() >= b.len() {
        let shift = rem.len() - b.len();
        let c = rem.last().unwrap().clone() / lead.clone();
        for (i, y) in b.iter().enumerate() {
            rem[shift + i] = rem[shift + i].clone() - c.clone() * y.clone();
        }
        quot[shift] = c;
        rem = trim(rem);
    }
    (trim(quot), rem)
}

fn gcd<T: Clone + Integer>(a: &[Ratio<T>], b: &[Ratio<T>]) -> QPoly<T> {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let (_, r) = divrem(&a, &b);
        a = b;
        b = r;
    }
    a
}

fn eval<T: Clone + Integer>(a: &[Ratio<T>], z: &Ratio<T>) -> Ratio<T> {
    a.iter()
        .rev()
        .fold(Ratio::zero(), |acc, c| acc * z.clone() + c.clone())
}

/// `N(z)/D(z)` with integer coefficients (lowest degree first), reduced,
/// and normalized so that `D(0) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFunction<T> {
    numerator: Vec<T>,
    denominator: Vec<T>,
}

impl<T: Clone + Integer + Signed> RationalFunction<T> {
    pub fn new(numerator: Vec<T>, denominator: Vec<T>) -> Result<Self> {
        let lift = |v: Vec<T>| v.into_iter().map(Ratio::from_integer).collect::<Vec<_>>();
        Self::from_rational(lift(numerator), lift(denominator))
    }

    pub fn from_rational(numerator: Vec<Ratio<T>>, denominator: Vec<Ratio<T>>) -> Result<Self> {
        let den = trim(denominator);
        if den.is_empty() {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        let num = trim(numerator);
        let g = if num.is_empty() { den.clone() } else { gcd(&num, &den) };
        let (num, r1) = divrem(&num, &g);
        let (den, r2) = divrem(&den, &g);
        debug_assert!(r1.is_empty() && r2.is_empty());
        let c0 = den.first().cloned().unwrap_or_else(Ratio::zero);
        if c0.is_zero() {
            return Err(Error::InvalidArgument("pole at z = 0".into()));
        }
        let scale = |v: QPoly<T>| -> Result<Vec<T>> {
            v.into_iter()
                .map(|c| {
                    let c = c / c0.clone();
                    if c.is_integer() {
                        Ok(c.to_integer())
                    } else {
                        Err(Error::InvalidArgument("coefficients are not integral once D(0) = 1".into()))
                    }
                })
                .collect()
        };
        Ok(RationalFunction {
            numerator: scale(num)?,
            denominator: scale(den)?,
        })
    }

    pub fn numerator(&self) -> &[T] {
        &self.numerator
    }

    pub fn denominator(&self) -> &[T] {
        &self.denominator
    }

    /// First `terms` Taylor coefficients at `z = 0`.
    pub fn taylor(&self, terms: usize) -> Vec<T> {
        let mut out: Vec<T> = Vec::with_capacity(terms);
        for k in 0..terms {
            let mut c = self.numerator.get(k).cloned().unwrap_or_else(T::zero);
            for j in 1..=k.min(self.denominator.len().saturating_sub(1)) {
                c = c - self.denominator[j].clone() * out[k - j].clone();
            }
            out.push(c);
        }
        out
    }

    /// `lim_{z -> 1/p} (1 - p z) G(z)`; `None` for a pole of higher order.
    pub fn residue_at(&self, p: T) -> Option<Ratio<T>> {
        let lift = |v: &[T]| v.iter().cloned().map(Ratio::from_integer).collect::<Vec<_>>();
        let num = lift(&self.numerator);
        let den = lift(&self.denominator);
        let z = Ratio::new(T::one(), p.clone());
        let factor = vec![Ratio::one(), Ratio::from_integer(T::zero() - p)];
        let (rest, rem) = divrem(&den, &factor);
        if !rem.is_empty() {
            return Some(Ratio::zero());
        }
        let d = eval(&rest, &z);
        if d.is_zero() {
            return None;
        }
        Some(eval(&num, &z) / d)
    }
}

fn fmt_poly<T: Clone + Integer + Signed + fmt::Display>(f: &mut fmt::Formatter<'_>, coeffs: &[T]) -> fmt::Result {
    let mut first = true;
    for (k, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let sign = if c.is_negative() { "-" } else { "+" };
        if first {
            if c.is_negative() {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {sign} ")?;
        }
        first = false;
        let a = c.abs();
        match (k, a.is_one()) {
            (0, _) => write!(f, "{a}")?,
            (1, true) => write!(f, "z")?,
            (1, false) => write!(f, "{a}*z")?,
            (_, true) => write!(f, "z^{k}")?,
            (_, false) => write!(f, "{a}*z^{k}")?,
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

impl<T: Clone + Integer + Signed + fmt::Display> fmt::Display for RationalFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        fmt_poly(f, &self.numerator)?;
        write!(f, ")/(")?;
        fmt_poly(f, &self.denominator)?;
        write!(f, ")")
    }
}

/// Closed form of `Σ μ(p^e) z^e` from an exact certificate.
///
/// Past the witness exponent `w` the sequence is either geometric,
/// `μ(p^e) = p^{e-w} μ(p^w)`, or locked at `λ`, `μ(q) = λ q + 1 - λ`.
/// The result is checked against every record of `seq` and against the
/// certified value at the pole `z = 1/p`.
pub fn generating_function(cert: &FptCertificate, seq: &MuSequence) -> Result<RationalFunction<BigInt>> {
    let (Some(value), Some(w)) = (cert.value.clone(), cert.witness_e) else {
        return Err(Error::InexactCertificate);
    };
    let records = seq.records();
    let w = w as usize;
    if records.len() <= w {
        return Err(Error::InvalidArgument("sequence does not reach the witness exponent".into()));
    }
    let p = BigInt::from(seq.p().get());
    let q = |k: Rational| vec![k];
    let one = Rational::one();
    let int = |x: u64| Rational::from_integer(BigInt::from(x));
    let mut head: Vec<Rational> = records[..w].iter().map(|r| int(r.mu)).collect();
    let mut zw = vec![Rational::zero(); w];
    zw.push(one.clone());
    let one_minus_pz = vec![one.clone(), Rational::from_integer(-p.clone())];
    let one_minus_z = vec![one.clone(), -one.clone()];
    let (num, den) = match cert.status {
        CertificateStatus::ExactStabilized => {
            let tail = mul(&zw, &q(int(records[w].mu)));
            (add(&mul(&head, &one_minus_pz), &tail), one_minus_pz)
        }
        CertificateStatus::ExactPatternLock => {
            let lam = value.clone();
            let pw = Rational::from_integer(p.pow(w as u32));
            let den = mul(&one_minus_pz, &one_minus_z);
            head = mul(&head, &den);
            let geo = mul(&mul(&zw, &q(lam.clone() * pw)), &one_minus_z);
            let flat = mul(&mul(&zw, &q(one - lam)), &one_minus_pz);
            (add(&add(&head, &geo), &flat), den)
        }
        CertificateStatus::IntervalOnly => return Err(Error::InexactCertificate),
    };
    let g = RationalFunction::from_rational(num, den)?;
    let coeffs = g.taylor(records.len());
    for (r, c) in records.iter().zip(&coeffs) {
        if *c != BigInt::from(r.mu) {
            return Err(Error::InvariantViolation(format!(
                "closed form gives {c} at e = {} but μ = {}",
                r.e, r.mu
            )));
        }
    }
    match g.residue_at(p) {
        Some(res) if res == value => Ok(g),
        other => Err(Error::InvariantViolation(format!(
            "residue at 1/p is {other:?}, certificate says {value}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rf(n: &[i64], d: &[i64]) -> RationalFunction<BigInt> {
        RationalFunction::new(n.iter().map(|&x| BigInt::from(x)).collect(), d.iter().map(|&x| BigInt::from(x)).collect())
            .unwrap()
    }

    #[test]
    fn normalization_and_display() {
        let g = rf(&[2, -2], &[2, -10]);
        assert_eq!(g.to_string(), "(1 - z)/(1 - 5*z)");
        let h = rf(&[1, -6, 5], &[1, -6, 5]);
        assert_eq!(h.to_string(), "(1)/(1)");
        let c = rf(&[1, -5], &[1, -12, 35]);
        assert_eq!(c.to_string(), "(1)/(1 - 7*z)");
    }

    #[test]
    fn taylor_and_residue() {
        let g = rf(&[1, -1], &[1, -5]);
        let t: Vec<i64> = g.taylor(4).iter().map(|c| c.try_into().unwrap()).collect();
        assert_eq!(t, vec![1, 4, 20, 100]);
        assert_eq!(g.residue_at(BigInt::from(5)).unwrap().to_string(), "4/5");
        let small: RationalFunction<i64> = RationalFunction::new(vec![1], vec![1, -3]).unwrap();
        assert_eq!(small.residue_at(3), Some(Ratio::from_integer(1)));
        assert_eq!(small.taylor(3), vec![1, 3, 9]);
    }

    #[test]
    fn non_integral_is_rejected() {
        assert!(RationalFunction::new(vec![BigInt::from(1)], vec![BigInt::from(2), BigInt::from(1)]).is_err());
    }
}
