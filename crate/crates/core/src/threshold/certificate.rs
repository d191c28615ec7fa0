use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poly::SparsePoly;
use crate::smoothness::jacobian_report;
use crate::threshold::{emax_budget, FptInterval, MuRecord, MuSequence, MuSequenceBuilder, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CertificateStatus {
    ExactPatternLock,
    ExactStabilized,
    IntervalOnly,
}

impl fmt::Display for CertificateStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CertificateStatus::ExactPatternLock => "ExactPatternLock",
            CertificateStatus::ExactStabilized => "ExactStabilized",
            CertificateStatus::IntervalOnly => "IntervalOnly",
        })
    }
}

/// The statement that licenses an exact value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Certifier {
    /// `(μ(q)-1)/(q-1) = (n+1)/d` propagates to every larger `q`.
    PatternLock,
    /// `μ(q)/q < (n+1)/d` with `p >= nd-d-n` forces `μ(pq) = p μ(q)`.
    Stabilization,
    /// `d = n+1`, `p >= n-1`: `μ(pq) = p μ(q)` from `q = p` on.
    CalabiYau,
}

impl fmt::Display for Certifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Certifier::PatternLock => "pattern-lock",
            Certifier::Stabilization => "stabilization",
            Certifier::CalabiYau => "calabi-yau",
        })
    }
}

/// Why a certificate stayed an interval.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum HypothesisFlag {
    NotHomogeneous,
    JacobianNotPrimary,
    PrimeTooSmall { p: u64, needed: i64 },
    BudgetCapped { requested: u32, used: u32 },
}

impl fmt::Display for HypothesisFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HypothesisFlag::NotHomogeneous => write!(f, "input is not homogeneous; exact certificates disabled"),
            HypothesisFlag::JacobianNotPrimary => write!(f, "Jacobian ideal is not m-primary"),
            HypothesisFlag::PrimeTooSmall { p, needed } => write!(f, "p = {p} < nd-d-n = {needed}"),
            HypothesisFlag::BudgetCapped { requested, used } => {
                write!(f, "E = {requested} exceeds the 64-bit budget; used E = {used}")
            }
        }
    }
}

/// Shape information the certifying statements depend on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CertContext {
    pub n: usize,
    /// Total degree; `None` when `f` is not homogeneous.
    pub d: Option<u64>,
    pub p: u64,
    pub jacobian_primary: bool,
}

impl CertContext {
    pub fn of(f: &SparsePoly) -> Result<Self> {
        let d = f.homogeneous_degree();
        let jacobian_primary = match d {
            Some(_) => jacobian_report(f)?.is_m_primary,
            None => false,
        };
        Ok(CertContext {
            n: f.ring().n(),
            d,
            p: f.ring().p(),
            jacobian_primary,
        })
    }

    /// `nd - d - n`.
    pub fn prime_bound(&self) -> Option<i64> {
        self.d.map(|d| {
            let (n, d) = (self.n as i64, d as i64);
            n * d - d - n
        })
    }

    pub fn prime_bound_holds(&self) -> bool {
        self.prime_bound().is_some_and(|b| self.p as i64 >= b)
    }

    /// `(n+1)/d`, the log canonical threshold of a smooth form.
    pub fn lct(&self) -> Option<Rational> {
        self.d
            .map(|d| Rational::new(BigInt::from(self.n as u64 + 1), BigInt::from(d)))
    }

    fn flags(&self) -> Vec<HypothesisFlag> {
        let mut out = Vec::new();
        if self.d.is_none() {
            out.push(HypothesisFlag::NotHomogeneous);
            return out;
        }
        if !self.jacobian_primary {
            out.push(HypothesisFlag::JacobianNotPrimary);
        }
        if !self.prime_bound_holds() {
            out.push(HypothesisFlag::PrimeTooSmall {
                p: self.p,
                needed: self.prime_bound().unwrap_or(0),
            });
        }
        out
    }

    /// The certificate that `rec` triggers, if any.
    fn fires(&self, rec: &MuRecord) -> Option<(CertificateStatus, Certifier, Rational)> {
        let d = self.d?;
        if !self.jacobian_primary || rec.e == 0 {
            return None;
        }
        let n1 = self.n as u128 + 1;
        let (mu, q, d) = (rec.mu as u128, rec.q as u128, d as u128);
        if (mu - 1) * d == n1 * (q - 1) {
            return Some((CertificateStatus::ExactPatternLock, Certifier::PatternLock, self.lct()?));
        }
        if self.prime_bound_holds() && mu * d < n1 * q {
            return Some((CertificateStatus::ExactStabilized, Certifier::Stabilization, rec.ratio()));
        }
        None
    }
}

/// An exact threshold with the statement certifying it, or an interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FptCertificate {
    pub status: CertificateStatus,
    pub value: Option<Rational>,
    /// Tightest interval from the computed records.
    pub interval: FptInterval,
    pub witness_e: Option<u32>,
    pub certified_by: Option<Certifier>,
    /// Homogeneity, m-primarity and `p >= nd-d-n` all verified.
    pub hypothesis_checked: bool,
    pub flags: Vec<HypothesisFlag>,
}

impl FptCertificate {
    pub fn is_exact(&self) -> bool {
        self.status != CertificateStatus::IntervalOnly
    }

    /// Checks an exact value against every record: it must lie in each
    /// interval and satisfy `μ(q) = ⌈q λ⌉`.
    pub fn verify_against(&self, seq: &MuSequence, lct: Option<&Rational>) -> Result<()> {
        let Some(value) = &self.value else {
            return Ok(());
        };
        for r in seq.records() {
            let q = BigInt::from(r.q);
            let ceil = (value * Rational::from_integer(q)).ceil().to_integer();
            if ceil != BigInt::from(r.mu) || !r.bounds().contains(value) {
                return Err(Error::InvariantViolation(format!(
                    "certified value {value} is inconsistent with μ({}) = {}",
                    r.q, r.mu
                )));
            }
        }
        if let Some(lct) = lct {
            if value > lct {
                return Err(Error::InvariantViolation(format!("certified value {value} exceeds {lct}")));
            }
        }
        Ok(())
    }
}

/// Reads a certificate off a computed sequence.
pub fn certify(seq: &MuSequence, ctx: &CertContext) -> Result<FptCertificate> {
    let hit = seq
        .records()
        .iter()
        .find_map(|r| ctx.fires(r).map(|hit| (r.e, hit)));
    let flags = ctx.flags();
    let hypothesis_checked = flags.is_empty();
    let cert = match hit {
        Some((e, (status, by, value))) => FptCertificate {
            status,
            value: Some(value),
            interval: seq.tightest_interval(),
            witness_e: Some(e),
            certified_by: Some(by),
            hypothesis_checked,
            flags,
        },
        None => FptCertificate {
            status: CertificateStatus::IntervalOnly,
            value: None,
            interval: seq.tightest_interval(),
            witness_e: None,
            certified_by: None,
            hypothesis_checked,
            flags,
        },
    };
    cert.verify_against(seq, ctx.lct().as_ref())?;
    Ok(cert)
}

/// Scans `e = 1..=emax`, stopping at the first exponent that certifies an
/// exact value. Returns the certificate and the records computed.
pub fn fpt_exact_with_sequence(f: &SparsePoly, emax: u32) -> Result<(FptCertificate, MuSequence)> {
    if emax == 0 {
        return Err(Error::InvalidArgument("E must be at least 1".into()));
    }
    let ctx = CertContext::of(f)?;
    let mut builder = MuSequenceBuilder::new(f)?;
    let used = emax.min(builder.budget());
    for _ in 0..used {
        let rec = builder.step()?;
        if ctx.fires(&rec).is_some() {
            break;
        }
    }
    let seq = builder.finish()?;
    let mut cert = certify(&seq, &ctx)?;
    if used < emax && !cert.is_exact() {
        cert.flags.push(HypothesisFlag::BudgetCapped { requested: emax, used });
    }
    Ok((cert, seq))
}

pub fn fpt_exact(f: &SparsePoly, emax: u32) -> Result<FptCertificate> {
    fpt_exact_with_sequence(f, emax).map(|(c, _)| c)
}

/// Default `E`, capped by the 64-bit budget.
pub fn default_emax(p: u64, d: u64) -> u32 {
    4.min(emax_budget(p, d))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundKind {
    /// `d μ >= (n+1)(q+1) - nd` when `p ∤ μ`, `q > 1`.
    Lower,
    /// `μ <= ⌈(nq+q-n)/d⌉`.
    Upper,
    /// `d μ < (n+1) q` when `(n+1)q mod d ∈ {1..n}`.
    Strict,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundKind::Lower => "lower",
            BoundKind::Upper => "upper",
            BoundKind::Strict => "strict",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundCheck {
    pub kind: BoundKind,
    pub applicable: bool,
    pub lhs: i128,
    pub rhs: i128,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundsReport {
    pub record: MuRecord,
    pub checks: Vec<BoundCheck>,
}

impl BoundsReport {
    /// Every applicable bound holds.
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| !c.applicable || c.holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &BoundCheck> {
        self.checks.iter().filter(|c| c.applicable && !c.holds)
    }
}

/// Evaluates the degree bounds on `μ(q)` for a form of degree `d` in `n+1`
/// variables; the lower bound needs an m-primary Jacobian.
pub fn degree_bounds(n: usize, d: u64, p: u64, jacobian_primary: bool, record: &MuRecord) -> BoundsReport {
    let (n, d, q, mu) = (n as i128, d as i128, record.q as i128, record.mu as i128);
    let lower = BoundCheck {
        kind: BoundKind::Lower,
        applicable: jacobian_primary && record.e >= 1 && mu % p as i128 != 0,
        lhs: d * mu,
        rhs: (n + 1) * (q + 1) - n * d,
        holds: d * mu >= (n + 1) * (q + 1) - n * d,
    };
    let cap = (n * q + q - n + d - 1).div_euclid(d);
    let upper = BoundCheck {
        kind: BoundKind::Upper,
        applicable: true,
        lhs: mu,
        rhs: cap,
        holds: mu <= cap,
    };
    let r = ((n + 1) * q).rem_euclid(d);
    let strict = BoundCheck {
        kind: BoundKind::Strict,
        applicable: (1..=n).contains(&r),
        lhs: d * mu,
        rhs: (n + 1) * q,
        holds: d * mu < (n + 1) * q,
    };
    BoundsReport {
        record: *record,
        checks: vec![lower, upper, strict],
    }
}

pub fn check_degree_bounds(f: &SparsePoly, record: &MuRecord) -> Result<BoundsReport> {
    let ctx = CertContext::of(f)?;
    let d = ctx.d.ok_or(Error::NotHomogeneous)?;
    Ok(degree_bounds(ctx.n, d, ctx.p, ctx.jacobian_primary, record))
}

/// Which side of the dichotomy an exact threshold falls on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dichotomy {
    /// The value is `(n+1)/d`.
    LogCanonical,
    /// The denominator is `p^exponent`.
    PowerOfP { exponent: u32 },
}

impl fmt::Display for Dichotomy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dichotomy::LogCanonical => write!(f, "log-canonical"),
            Dichotomy::PowerOfP { exponent } => write!(f, "power-of-p (p^{exponent})"),
        }
    }
}

pub fn denominator_dichotomy(cert: &FptCertificate, n: usize, d: u64, p: u64) -> Result<Dichotomy> {
    let value = cert.value.as_ref().ok_or(Error::InexactCertificate)?;
    let ctx = CertContext {
        n,
        d: Some(d),
        p,
        jacobian_primary: true,
    };
    if !ctx.prime_bound_holds() {
        return Err(Error::Hypothesis(format!(
            "p = {p} < nd-d-n = {}",
            ctx.prime_bound().unwrap_or(0)
        )));
    }
    if Some(value) == ctx.lct().as_ref() {
        return Ok(Dichotomy::LogCanonical);
    }
    let mut den = value.denom().clone();
    let bp = BigInt::from(p);
    let mut exponent = 0;
    while !den.is_one() && (&den % &bp).is_zero() {
        den /= &bp;
        exponent += 1;
    }
    if den.is_one() {
        Ok(Dichotomy::PowerOfP { exponent })
    } else {
        Err(Error::InvariantViolation(format!(
            "threshold {value} is neither {} nor has a p-power denominator",
            ctx.lct().map(|l| l.to_string()).unwrap_or_default()
        )))
    }
}

/// Approximate decimal rendering for human-facing output only.
pub fn approx(value: &Rational) -> f64 {
    value.numer().to_f64().unwrap_or(f64::NAN) / value.denom().to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    #[test]
    fn fermat_cubic_certificates() {
        let f5 = parse_poly("x0^3 + x1^3 + x2^3", 2, 5).unwrap();
        let c = fpt_exact(&f5, 4).unwrap();
        assert_eq!(c.status, CertificateStatus::ExactStabilized);
        assert_eq!(c.value.unwrap().to_string(), "4/5");
        assert_eq!(c.witness_e, Some(1));
        let f7 = parse_poly("x0^3 + x1^3 + x2^3", 2, 7).unwrap();
        let c = fpt_exact(&f7, 4).unwrap();
        assert_eq!(c.status, CertificateStatus::ExactPatternLock);
        assert_eq!(c.value.unwrap().to_string(), "1");
    }

    #[test]
    fn fermat_quartic_surface() {
        let f = parse_poly("x0^4 + x1^4 + x2^4 + x3^4", 3, 7).unwrap();
        let c = fpt_exact(&f, 4).unwrap();
        assert_eq!(c.status, CertificateStatus::ExactStabilized);
        assert_eq!(c.value.unwrap().to_string(), "5/7");
    }

    #[test]
    fn singular_input_stays_interval() {
        let f = parse_poly("x0^2*x1", 1, 5).unwrap();
        let c = fpt_exact(&f, 2).unwrap();
        assert_eq!(c.status, CertificateStatus::IntervalOnly);
        assert!(c.flags.contains(&HypothesisFlag::JacobianNotPrimary));
        let g = parse_poly("x0^2 + x1^3", 1, 5).unwrap();
        let c = fpt_exact(&g, 2).unwrap();
        assert_eq!(c.flags, vec![HypothesisFlag::NotHomogeneous]);
    }

    #[test]
    fn bounds_on_fermat_cubic() {
        let rec = MuRecord { e: 1, q: 5, mu: 4 };
        let r = degree_bounds(2, 3, 5, true, &rec);
        assert!(r.all_hold());
        assert_eq!((r.checks[0].lhs, r.checks[0].rhs), (12, 12));
        let lin = degree_bounds(0, 1, 3, true, &MuRecord { e: 2, q: 9, mu: 9 });
        assert_eq!(lin.checks[1].rhs, 9);
        assert!(lin.all_hold());
    }

    #[test]
    fn dichotomy() {
        let f5 = parse_poly("x0^3 + x1^3 + x2^3", 2, 5).unwrap();
        let c = fpt_exact(&f5, 4).unwrap();
        assert_eq!(denominator_dichotomy(&c, 2, 3, 5).unwrap(), Dichotomy::PowerOfP { exponent: 1 });
        let f7 = parse_poly("x0^3 + x1^3 + x2^3", 2, 7).unwrap();
        let c = fpt_exact(&f7, 4).unwrap();
        assert_eq!(denominator_dichotomy(&c, 2, 3, 7).unwrap(), Dichotomy::LogCanonical);
    }
}
