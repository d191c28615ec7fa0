//! Frobenius actions on graded pieces of top local cohomology.
//!
//! `[H^{n+1}_m(R)]_s` has the inverse monomials `x^{-a}` (all `a_i >= 1`,
//! `Σ a_i = -s`) as a basis. With `Q = q/p >= -s-n` every basis class is
//! `[x^{Q-a} / (x_0⋯x_n)^Q]`, and the map `f^{p-1} F` sends it to
//! `[f^{p-1} x^{p(Q-a)} / (x_0⋯x_n)^q]`, which vanishes iff the numerator
//! lies in `m^[q]`.
//!
//! The same rank is `dim U_{-s-n-1}` for `U = (f^{p-1})^{[1/p]}`: the column
//! of the target class `x^{-(pv - r)}` is the coefficient vector of
//! `x^v u_r`, where `f^{p-1} = Σ_r u_r^p x^r`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::{truncate, FrobeniusPower};
use crate::linalg::PolySpan;
use crate::membership::{frobenius_root, IdealGens};
use crate::poly::{monomials_of_degree, Monomial, SparsePoly};
use crate::smoothness::{binomial, ideal_rank_in_degree, jacobian_report};
use crate::threshold::mu;

/// Basis of `[H^{n+1}_m(R)]_s` by inverse monomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopLchBasis {
    pub degree: i64,
    /// Exponent vectors `a` of `x^{-a}`.
    pub basis: Vec<Monomial>,
}

impl TopLchBasis {
    pub fn new(n: usize, s: i64) -> Self {
        let nvars = n + 1;
        let t = -s - nvars as i64;
        let basis = if t < 0 {
            Vec::new()
        } else {
            monomials_of_degree(nvars, t as u64)
                .into_iter()
                .map(|m| Monomial(m.exps().iter().map(|e| e + 1).collect()))
                .collect()
        };
        TopLchBasis { degree: s, basis }
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }
}

/// `dim [H^{n+1}_m(R)]_s = C(-s-1, n)`.
pub fn top_lch_dimension(n: usize, s: i64) -> u64 {
    if s > -(n as i64) - 1 {
        0
    } else {
        binomial((-s - 1) as u64, n as u64)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InjectivityEntry {
    pub degree: i64,
    pub target_degree: i64,
    pub dimension: u64,
    pub rank: u64,
    pub injective: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InjectivityReport {
    pub entries: Vec<InjectivityEntry>,
    pub q: u64,
    /// `p >= nd - d - n`.
    pub prime_bound: bool,
    pub jacobian_primary: bool,
    /// Degrees where the rank was also computed through the kernel.
    pub cross_checked: Vec<i64>,
}

impl InjectivityReport {
    pub fn all_injective(&self) -> bool {
        self.entries.iter().all(|e| e.injective)
    }

    /// Both hypotheses hold, so injectivity is guaranteed.
    pub fn hypotheses_hold(&self) -> bool {
        self.prime_bound && self.jacobian_primary
    }

    /// A degree that fails although the hypotheses hold.
    pub fn counterexamples(&self) -> Vec<i64> {
        if !self.hypotheses_hold() {
            return Vec::new();
        }
        self.entries.iter().filter(|e| !e.injective).map(|e| e.degree).collect()
    }
}

/// Smallest `q = p^e` with `e >= 1` and `q/p >= -s_min - n`.
pub fn window_q(p: crate::field::PrimeModulus, n: usize, s_min: i64) -> Result<FrobeniusPower> {
    let need = (-s_min - n as i64).max(1) as u64;
    let mut q = FrobeniusPower::new(p, 1)?;
    while q.q() / p.get() < need {
        q = q.next()?;
    }
    Ok(q)
}

fn check_window(f: &SparsePoly, q: FrobeniusPower, s: i64) -> Result<u64> {
    if q.modulus() != f.ring().modulus() {
        return Err(Error::RingMismatch);
    }
    if q.e() == 0 {
        return Err(Error::InvalidArgument("q/p is not integral for q = 1".into()));
    }
    if s >= 0 {
        return Err(Error::InvalidArgument(format!("degree {s} is not negative")));
    }
    let big_q = q.q() / q.p();
    let n = f.ring().n() as i64;
    if (big_q as i64) < -s - n {
        return Err(Error::InvalidArgument(format!(
            "degree {s} needs q/p >= {}, got q = {}",
            -s - n,
            q.q()
        )));
    }
    Ok(big_q)
}

fn direct_rank(f_pm1: &SparsePoly, q: FrobeniusPower, big_q: u64, s: i64) -> Result<u64> {
    let p = q.p();
    let basis = TopLchBasis::new(f_pm1.ring().n(), s);
    let mut span = PolySpan::new();
    for a in &basis.basis {
        let shift: Option<Vec<u64>> = a.exps().iter().map(|&ai| (big_q - ai).checked_mul(p)).collect();
        let shift = Monomial::from_slice(&shift.ok_or(Error::ExponentOverflow)?);
        let numerator = truncate(&f_pm1.mul_monomial(&shift)?, q);
        span.insert(numerator.poly());
    }
    Ok(span.dim() as u64)
}

fn root_rank(u: &IdealGens, n: usize, s: i64) -> u64 {
    let t = -s - n as i64 - 1;
    if t < 0 {
        return 0;
    }
    if u.is_unit() {
        return binomial(t as u64 + n as u64, n as u64);
    }
    ideal_rank_in_degree(u.gens(), t as u64) as u64
}

fn entry(n: usize, d: u64, p: u64, s: i64, rank: u64) -> InjectivityEntry {
    let dimension = top_lch_dimension(n, s);
    InjectivityEntry {
        degree: s,
        target_degree: p as i64 * s + d as i64 * (p as i64 - 1),
        dimension,
        rank,
        injective: rank == dimension,
    }
}

fn degree_of(f: &SparsePoly) -> Result<u64> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    f.homogeneous_degree().ok_or(Error::NotHomogeneous)
}

/// Rank of `f^{p-1} F` on `[H^{n+1}_m(R)]_s`, computed from numerators in
/// `R/m^[q]`.
pub fn frobenius_action_rank(f: &SparsePoly, q: FrobeniusPower, s: i64) -> Result<InjectivityEntry> {
    let d = degree_of(f)?;
    let big_q = check_window(f, q, s)?;
    let f_pm1 = f.pow(q.p() - 1)?;
    let rank = direct_rank(&f_pm1, q, big_q, s)?;
    Ok(entry(f.ring().n(), d, q.p(), s, rank))
}

/// The same rank through the root ideal `(f^{p-1})^{[1/p]}`.
pub fn frobenius_action_rank_via_roots(f: &SparsePoly, s: i64) -> Result<InjectivityEntry> {
    let d = degree_of(f)?;
    let p = f.ring().p();
    let u = frobenius_root(&f.pow(p - 1)?);
    Ok(entry(f.ring().n(), d, p, s, root_rank(&u, f.ring().n(), s)))
}

/// Terms of work above which the kernel route is skipped.
pub const DIRECT_BUDGET: u64 = 4_000_000;

/// Runs the rank test in every degree `s_min..=-d-1`, through the root ideal,
/// and confirms it through the kernel whenever the work fits [`DIRECT_BUDGET`].
pub fn check_frobenius_injectivity(f: &SparsePoly, q: FrobeniusPower, s_min: i64) -> Result<InjectivityReport> {
    let d = degree_of(f)?;
    let ring = f.ring();
    let (n, p) = (ring.n(), ring.p());
    let s_max = -(d as i64) - 1;
    if s_min > s_max {
        return Err(Error::InvalidArgument(format!("s_min = {s_min} exceeds -d-1 = {s_max}")));
    }
    let big_q = check_window(f, q, s_min)?;
    let f_pm1 = f.pow(p - 1)?;
    let u = frobenius_root(&f_pm1);
    let results: Vec<Result<(InjectivityEntry, bool)>> = (s_min..=s_max)
        .into_par_iter()
        .map(|s| {
            let e = entry(n, d, p, s, root_rank(&u, n, s));
            let work = e.dimension.saturating_mul(f_pm1.len() as u64);
            let checked = work <= DIRECT_BUDGET;
            if checked {
                let direct = direct_rank(&f_pm1, q, big_q, s)?;
                if direct != e.rank {
                    return Err(Error::InvariantViolation(format!(
                        "degree {s}: kernel rank {direct} differs from root-ideal rank {}",
                        e.rank
                    )));
                }
            }
            Ok((e, checked))
        })
        .collect();
    let mut entries = Vec::new();
    let mut cross_checked = Vec::new();
    for r in results {
        let (e, checked) = r?;
        if checked {
            cross_checked.push(e.degree);
        }
        entries.push(e);
    }
    let prime_bound = (p as i64) >= n as i64 * d as i64 - d as i64 - n as i64;
    let jacobian_primary = jacobian_report(f)?.is_m_primary;
    Ok(InjectivityReport {
        entries,
        q: q.q(),
        prime_bound,
        jacobian_primary,
        cross_checked,
    })
}

/// Whether `H^n_m(R/f) -> H^n_m(R/f^t)` induced by `F^e` is injective,
/// via `μ_f(q) > q - t`.
pub fn thickening_injectivity(f: &SparsePoly, e: u32, t: u64) -> Result<bool> {
    let q = FrobeniusPower::new(f.ring().modulus(), e)?;
    if t < 1 || t > q.q() {
        return Err(Error::InvalidArgument(format!("t = {t} outside [1, {}]", q.q())));
    }
    Ok(mu(f, q)? > q.q() - t)
}
