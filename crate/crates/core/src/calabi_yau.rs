//! Hypersurfaces of degree `n+1` in `P^n`: the h-invariant, the Hasse
//! coefficient, exact thresholds, the low-degree plane-curve menus and
//! family scans.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{FpElem, PrimeModulus};
use crate::kernel::{power_mod, FrobeniusPower};
use crate::parse::{infer_n, parse_in, parse_poly};
use crate::poly::{Monomial, Ring, SparsePoly};
use crate::smoothness::jacobian_report;
use crate::threshold::{
    default_emax, fpt_bounds, fpt_exact, mu, CertificateStatus, Certifier, FptCertificate, MuRecord, Rational,
};

fn check_cy(f: &SparsePoly) -> Result<usize> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let n = f.ring().n();
    let expected = n as u64 + 1;
    match f.homogeneous_degree() {
        Some(d) if d == expected => Ok(n),
        Some(d) => Err(Error::NotCalabiYau { d, expected }),
        None => Err(Error::NotHomogeneous),
    }
}

fn require_smooth(f: &SparsePoly) -> Result<()> {
    if jacobian_report(f)?.is_m_primary {
        Ok(())
    } else {
        Err(Error::Hypothesis("the Jacobian ideal is not m-primary (singular hypersurface)".into()))
    }
}

/// Coefficient of `(x_0⋯x_n)^{p-1}` in `f^{p-1}`.
pub fn hasse_coefficient(f: &SparsePoly) -> Result<FpElem> {
    check_cy(f)?;
    let ring = f.ring();
    let p = ring.modulus();
    let q = FrobeniusPower::new(p, 1)?;
    let socle = Monomial::from_slice(&vec![p.get() - 1; ring.nvars()]);
    Ok(power_mod(f, p.get() - 1, q)?.poly().coefficient(&socle))
}

/// `h = p - μ_f(p)`, with `0 <= h <= n-1` enforced.
pub fn h_invariant(f: &SparsePoly) -> Result<u64> {
    let n = check_cy(f)?;
    require_smooth(f)?;
    let p = f.ring().p();
    if (p as i64) < n as i64 - 1 {
        return Err(Error::Hypothesis(format!("p = {p} < n-1 = {}", n - 1)));
    }
    let h = p - mu(f, FrobeniusPower::new(f.ring().modulus(), 1)?)?;
    if h + 1 > n as u64 {
        return Err(Error::InvariantViolation(format!("h = {h} exceeds n-1 = {}", n - 1)));
    }
    Ok(h)
}

fn cy_certificate(f: &SparsePoly, n: usize, mu_p: u64) -> Result<FptCertificate> {
    let p = f.ring().p();
    let h = p - mu_p;
    let value = Rational::new(BigInt::from(mu_p), BigInt::from(p));
    let rec = MuRecord { e: 1, q: p, mu: mu_p };
    let cert = FptCertificate {
        status: CertificateStatus::ExactStabilized,
        value: Some(value.clone()),
        interval: fpt_bounds(&rec),
        witness_e: Some(1),
        certified_by: Some(Certifier::CalabiYau),
        hypothesis_checked: true,
        flags: Vec::new(),
    };
    let generic = fpt_exact(f, default_emax(p, n as u64 + 1))?;
    let agrees = match &generic.value {
        Some(v) => *v == value,
        None => generic.interval.contains(&value),
    };
    if !agrees {
        return Err(Error::InvariantViolation(format!(
            "1 - h/p = 1 - {h}/{p} disagrees with the generic certificate {:?}",
            generic.value
        )));
    }
    Ok(cert)
}

/// Exact `fpt = 1 - h/p` when `d = n+1`, the hypersurface is smooth and
/// `p >= n-1`; otherwise the generic certificate.
pub fn cy_fpt(f: &SparsePoly) -> Result<FptCertificate> {
    let generic = || {
        let d = f.degree().unwrap_or(1);
        fpt_exact(f, default_emax(f.ring().p(), d))
    };
    let Ok(n) = check_cy(f) else {
        return generic();
    };
    let p = f.ring().p();
    if (p as i64) < n as i64 - 1 || require_smooth(f).is_err() {
        return generic();
    }
    let h = h_invariant(f)?;
    cy_certificate(f, n, p - h)
}

/// `h` for the diagonal hypersurface: `p ≡ h+1 (mod n+1)`, `0 <= h <= n-1`.
pub fn diagonal_h(n: usize, p: u64) -> Result<u64> {
    let m = n as u64 + 1;
    let r = p % m;
    if r == 0 {
        return Err(Error::InvalidArgument(format!("p = {p} divides n+1 = {m}")));
    }
    Ok(r - 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ordinarity {
    Ordinary,
    NonOrdinary { h: u64 },
}

impl fmt::Display for Ordinarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ordinarity::Ordinary => write!(f, "ordinary"),
            Ordinarity::NonOrdinary { h } => write!(f, "non-ordinary (h = {h})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CYReport {
    pub n: usize,
    pub p: u64,
    pub mu_p: u64,
    pub h: u64,
    /// Exact threshold when a certificate is available.
    pub fpt: Option<Rational>,
    pub certificate: FptCertificate,
    pub hasse_coeff: FpElem,
    pub classification: Ordinarity,
    /// `p >= n-1`.
    pub cy_prime_bound: bool,
    /// `p >= n^2-n-1`, where `h` is the vanishing order of the Hasse invariant.
    pub hasse_order_bound: bool,
    pub smooth: bool,
}

/// Full report for a smooth hypersurface of degree `n+1`.
pub fn cy_report(f: &SparsePoly) -> Result<CYReport> {
    let n = check_cy(f)?;
    require_smooth(f)?;
    let p = f.ring().p();
    let ni = n as i64;
    let cy_prime_bound = p as i64 >= ni - 1;
    let mu_p = mu(f, FrobeniusPower::new(f.ring().modulus(), 1)?)?;
    let h = p - mu_p;
    let hasse_coeff = hasse_coefficient(f)?;
    if hasse_coeff.is_zero() != (h > 0) {
        return Err(Error::InvariantViolation(format!(
            "Hasse coefficient {} but h = {h}",
            hasse_coeff.value()
        )));
    }
    let certificate = if cy_prime_bound {
        if h + 1 > n as u64 {
            return Err(Error::InvariantViolation(format!("h = {h} exceeds n-1 = {}", n - 1)));
        }
        cy_certificate(f, n, mu_p)?
    } else {
        fpt_exact(f, default_emax(p, n as u64 + 1))?
    };
    Ok(CYReport {
        n,
        p,
        mu_p,
        h,
        fpt: certificate.value.clone(),
        certificate,
        hasse_coeff,
        classification: if h == 0 {
            Ordinarity::Ordinary
        } else {
            Ordinarity::NonOrdinary { h }
        },
        cy_prime_bound,
        hasse_order_bound: p as i64 >= ni * ni - ni - 1,
        smooth: true,
    })
}

fn ratio(a: i64, b: i64) -> Rational {
    Rational::new(BigInt::from(a), BigInt::from(b))
}

/// Admissible thresholds of a smooth plane quartic, `p > 2`.
pub fn quartic_admissible(p: u64) -> Result<Vec<Rational>> {
    let pi = p as i64;
    match p % 4 {
        1 => Ok(vec![ratio(3 * pi - 3, 4 * pi), ratio(3, 4)]),
        3 => Ok(vec![ratio(3 * pi - 5, 4 * pi), ratio(3 * pi - 1, 4 * pi)]),
        _ => Err(Error::Hypothesis(format!("p = {p} must be odd"))),
    }
}

/// Admissible thresholds of a smooth plane quintic, `p > 5`.
pub fn quintic_admissible(p: u64) -> Result<Vec<Rational>> {
    if p <= 5 {
        return Err(Error::Hypothesis(format!("p = {p} must exceed 5")));
    }
    let pi = p as i64;
    let p2 = pi * pi;
    Ok(match p % 5 {
        1 => vec![ratio(3 * pi - 3, 5 * pi), ratio(3, 5)],
        2 => vec![ratio(3 * pi - 6, 5 * pi), ratio(3 * pi - 1, 5 * pi)],
        3 => vec![ratio(3 * pi - 4, 5 * pi), ratio(3 * p2 - 7, 5 * p2), ratio(3 * p2 - 2, 5 * p2)],
        _ => vec![ratio(3 * pi - 7, 5 * pi), ratio(3 * pi - 2, 5 * pi)],
    })
}

/// How `μ(q)` behaves for every `q` once the threshold is known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MuFormula {
    /// `μ(q) = q λ` for `q >= p^witness`.
    Geometric { lambda: Rational },
    /// `μ(q) = λ q + 1 - λ`.
    Locked { lambda: Rational },
}

impl MuFormula {
    pub fn mu_at(&self, q: u64) -> Rational {
        let q = Rational::from_integer(BigInt::from(q));
        match self {
            MuFormula::Geometric { lambda } => lambda * q,
            MuFormula::Locked { lambda } => lambda * q + Rational::from_integer(1.into()) - lambda,
        }
    }
}

impl fmt::Display for MuFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MuFormula::Geometric { lambda } => write!(f, "mu(q) = ({lambda}) q"),
            MuFormula::Locked { lambda } => write!(f, "mu(q) = ({lambda}) (q - 1) + 1"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    /// `p mod d` and `d`.
    pub residue: u64,
    pub modulus: u64,
    pub admissible: Vec<Rational>,
    pub fpt: Rational,
    /// Position of `fpt` in `admissible`.
    pub member: usize,
    pub formula: MuFormula,
    pub certificate: FptCertificate,
}

impl Classification {
    pub fn label(&self) -> String {
        format!(
            "p = {} mod {}, case {} of {}: fpt = {}",
            self.residue,
            self.modulus,
            self.member + 1,
            self.admissible.len(),
            self.fpt
        )
    }
}

fn classify(f: &SparsePoly, d: u64, admissible: Vec<Rational>) -> Result<Classification> {
    let ring = f.ring();
    if ring.n() != 2 || f.homogeneous_degree() != Some(d) {
        return Err(Error::Hypothesis(format!("expected a plane curve of degree {d}")));
    }
    require_smooth(f)?;
    let p = ring.p();
    let certificate = fpt_exact(f, default_emax(p, d))?;
    let Some(fpt) = certificate.value.clone() else {
        return Err(Error::InvariantViolation(format!(
            "no exact threshold within E = {}: {}",
            default_emax(p, d),
            certificate.interval
        )));
    };
    let member = admissible.iter().position(|a| *a == fpt).ok_or_else(|| {
        Error::InvariantViolation(format!("threshold {fpt} is not among the admissible values"))
    })?;
    let formula = match certificate.status {
        CertificateStatus::ExactPatternLock => MuFormula::Locked { lambda: fpt.clone() },
        _ => MuFormula::Geometric { lambda: fpt.clone() },
    };
    Ok(Classification {
        residue: p % d,
        modulus: d,
        admissible,
        fpt,
        member,
        formula,
        certificate,
    })
}

pub fn quartic_classify(f: &SparsePoly) -> Result<Classification> {
    let p = f.ring().p();
    if p <= 2 {
        return Err(Error::Hypothesis("p must exceed 2".into()));
    }
    classify(f, 4, quartic_admissible(p)?)
}

pub fn quintic_classify(f: &SparsePoly) -> Result<Classification> {
    let p = f.ring().p();
    classify(f, 5, quintic_admissible(p)?)
}

/// Which family to scan.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FamilyDescriptor {
    /// `x_0^{n+1} + a_1 x_1^{n+1} + ... + a_n x_n^{n+1}`, all `a_i ≠ 0`.
    Diagonal { n: usize },
    /// `y^2 z = x^3 + a x z^2 + b z^3` in `x0, x1, x2` = `x, y, z`, `p > 3`.
    Weierstrass,
    /// One polynomial per line; blank lines and `#` comments skipped.
    File(PathBuf),
}

impl FromStr for FamilyDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(FamilyDescriptor::File(PathBuf::from(path)));
        }
        if s == "weierstrass" {
            return Ok(FamilyDescriptor::Weierstrass);
        }
        let mut words = s.split_whitespace();
        if words.next() == Some("diagonal") {
            if let Some(n) = words.next().and_then(|w| w.strip_prefix("n=")).and_then(|v| v.parse().ok()) {
                if words.next().is_none() {
                    return Ok(FamilyDescriptor::Diagonal { n });
                }
            }
        }
        Err(Error::InvalidArgument(format!(
            "unknown family '{s}' (expected 'diagonal n=<N>', 'weierstrass' or 'file:<path>')"
        )))
    }
}

impl fmt::Display for FamilyDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyDescriptor::Diagonal { n } => write!(f, "diagonal n={n}"),
            FamilyDescriptor::Weierstrass => write!(f, "weierstrass"),
            FamilyDescriptor::File(path) => write!(f, "file:{}", path.display()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanOptions {
    pub max_members: u64,
    /// Variable count for file families; inferred when `None`.
    pub n: Option<usize>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            max_members: 10_000,
            n: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyMember {
    pub label: String,
    pub poly: SparsePoly,
}

fn budget(size: u64, opts: &ScanOptions) -> Result<()> {
    if size > opts.max_members {
        Err(Error::BudgetExceeded {
            size,
            budget: opts.max_members,
        })
    } else {
        Ok(())
    }
}

pub fn weierstrass(a: u64, b: u64, p: u64) -> Result<SparsePoly> {
    parse_poly(&format!("x1^2*x2 + {} x0^3 + {} x0*x2^2 + {} x2^3", p - 1, (p - a % p) % p, (p - b % p) % p), 2, p)
}

/// All members of the family over `F_p`, in a fixed order.
pub fn enumerate_family(desc: &FamilyDescriptor, p: u64, opts: &ScanOptions) -> Result<Vec<FamilyMember>> {
    let modulus = PrimeModulus::new(p)?;
    match desc {
        FamilyDescriptor::Diagonal { n } => {
            let n = *n;
            let size = (p - 1).checked_pow(n as u32).unwrap_or(u64::MAX);
            budget(size, opts)?;
            let ring = Ring::new(n, modulus);
            let mut out = Vec::with_capacity(size as usize);
            let mut coeffs = vec![1u64; n + 1];
            loop {
                let terms = (0..=n).map(|i| (Monomial::var(n + 1, i, n as u64 + 1), coeffs[i]));
                let label = coeffs.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
                out.push(FamilyMember {
                    label: format!("a=({label})"),
                    poly: SparsePoly::from_terms(ring, terms),
                });
                let Some(i) = (1..=n).rev().find(|&i| coeffs[i] < p - 1) else {
                    break;
                };
                coeffs[i] += 1;
                coeffs[i + 1..].iter_mut().for_each(|c| *c = 1);
            }
            Ok(out)
        }
        FamilyDescriptor::Weierstrass => {
            if p <= 3 {
                return Err(Error::InvalidArgument("Weierstrass scans need p > 3".into()));
            }
            budget(p * p, opts)?;
            let mut out = Vec::with_capacity((p * p) as usize);
            for a in 0..p {
                for b in 0..p {
                    out.push(FamilyMember {
                        label: format!("a={a},b={b}"),
                        poly: weierstrass(a, b, p)?,
                    });
                }
            }
            Ok(out)
        }
        FamilyDescriptor::File(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
            let lines: Vec<(usize, &str)> = text
                .lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.trim()))
                .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
                .collect();
            budget(lines.len() as u64, opts)?;
            let at = |line: usize, e: Error| Error::InvalidArgument(format!("line {line}: {e}"));
            let n = match opts.n {
                Some(n) => n,
                None => lines
                    .iter()
                    .map(|(i, l)| infer_n(l, modulus).map_err(|e| at(*i, e)))
                    .try_fold(0, |acc, n| n.map(|n| acc.max(n)))?,
            };
            let ring = Ring::new(n, modulus);
            lines
                .iter()
                .map(|(i, l)| {
                    Ok(FamilyMember {
                        label: l.to_string(),
                        poly: parse_in(l, ring).map_err(|e| at(*i, e))?,
                    })
                })
                .collect()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MemberReport {
    pub label: String,
    pub report: CYReport,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rejected {
    pub label: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyScan {
    pub descriptor: FamilyDescriptor,
    pub p: u64,
    pub members: Vec<MemberReport>,
    pub rejected: Vec<Rejected>,
    /// Count of accepted members by `h`.
    pub histogram: BTreeMap<u64, u64>,
}

fn is_weierstrass_smooth(a: u64, b: u64, p: u64) -> bool {
    let m = PrimeModulus::new(p).expect("prime");
    let disc = m.add(m.mul(4, m.pow(a, 3)), m.mul(27 % p, m.mul(b, b)));
    disc != 0
}

/// Reports on every smooth member, in enumeration order. Singular or
/// non-Calabi-Yau members are listed in `rejected`.
pub fn scan_family(desc: &FamilyDescriptor, p: u64, opts: &ScanOptions) -> Result<FamilyScan> {
    let members = enumerate_family(desc, p, opts)?;
    let outcomes: Vec<Result<std::result::Result<CYReport, String>>> = members
        .par_iter()
        .map(|m| match cy_report(&m.poly) {
            Ok(r) => Ok(Ok(r)),
            Err(e) if e.is_internal() => Err(Error::InvariantViolation(format!("{}: {e}", m.label))),
            Err(e) => Ok(Err(e.to_string())),
        })
        .collect();
    let mut scan = FamilyScan {
        descriptor: desc.clone(),
        p,
        members: Vec::new(),
        rejected: Vec::new(),
        histogram: BTreeMap::new(),
    };
    for (i, (m, outcome)) in members.into_iter().zip(outcomes).enumerate() {
        let outcome = outcome?;
        if *desc == FamilyDescriptor::Weierstrass {
            let (a, b) = (i as u64 / p, i as u64 % p);
            if outcome.is_ok() != is_weierstrass_smooth(a, b, p) {
                return Err(Error::InvariantViolation(format!(
                    "{}: rank test and discriminant disagree on smoothness",
                    m.label
                )));
            }
            if let Ok(r) = &outcome {
                if r.h > 1 {
                    return Err(Error::InvariantViolation(format!("{}: h = {} for a cubic", m.label, r.h)));
                }
            }
        }
        match outcome {
            Ok(report) => {
                *scan.histogram.entry(report.h).or_default() += 1;
                scan.members.push(MemberReport { label: m.label, report });
            }
            Err(reason) => scan.rejected.push(Rejected { label: m.label, reason }),
        }
    }
    Ok(scan)
}
