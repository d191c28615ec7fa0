use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::field::PrimeModulus;
use crate::kernel::FrobeniusPower;
use crate::membership::MembershipOracle;
use crate::poly::SparsePoly;
use crate::threshold::{FptInterval, Rational};

/// `μ_f(q)` at `q = p^e`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MuRecord {
    pub e: u32,
    pub q: u64,
    pub mu: u64,
}

impl MuRecord {
    pub fn ratio(&self) -> Rational {
        Rational::new(BigInt::from(self.mu), BigInt::from(self.q))
    }

    pub fn bounds(&self) -> FptInterval {
        fpt_bounds(self)
    }
}

/// `((μ-1)/q, μ/q]`, the interval that contains the threshold.
pub fn fpt_bounds(record: &MuRecord) -> FptInterval {
    FptInterval::from_mu(BigInt::from(record.mu), BigInt::from(record.q))
}

/// Least `k` in `[1, q]` with `f^k ∈ m^[q]`, by binary search.
pub fn mu(f: &SparsePoly, q: FrobeniusPower) -> Result<u64> {
    check_input(f)?;
    let mut oracle = MembershipOracle::new(f)?;
    mu_with(&mut oracle, q)
}

fn check_input(f: &SparsePoly) -> Result<()> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if f.constant_term() != 0 {
        return Err(Error::NotInMaximalIdeal);
    }
    Ok(())
}

/// Least `k` in `[lo, hi]` with membership, assuming `hi` is a member.
fn least_member(oracle: &mut MembershipOracle, q: FrobeniusPower, mut lo: u64, mut hi: u64) -> Result<u64> {
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if oracle.is_member(mid, q)? {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(lo)
}

pub fn mu_with(oracle: &mut MembershipOracle, q: FrobeniusPower) -> Result<u64> {
    least_member(oracle, q, 1, q.q())
}

/// `μ_f(p^e)` for `e = 0..=E` with the consecutive-term contracts verified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MuSequence {
    p: PrimeModulus,
    records: Vec<MuRecord>,
    homogeneous: bool,
}

impl MuSequence {
    /// Validates `records` (which must start at `e = 0` and be consecutive).
    pub fn from_records(p: PrimeModulus, records: Vec<MuRecord>, homogeneous: bool) -> Result<Self> {
        let seq = MuSequence {
            p,
            records,
            homogeneous,
        };
        seq.verify()?;
        Ok(seq)
    }

    pub fn p(&self) -> PrimeModulus {
        self.p
    }

    pub fn records(&self) -> &[MuRecord] {
        &self.records
    }

    pub fn last(&self) -> &MuRecord {
        self.records.last().expect("sequence starts at e = 0")
    }

    pub fn emax(&self) -> u32 {
        self.last().e
    }

    pub fn mus(&self) -> Vec<u64> {
        self.records.iter().map(|r| r.mu).collect()
    }

    /// Whether `f` was homogeneous; otherwise results are local-graded only.
    pub fn homogeneous(&self) -> bool {
        self.homogeneous
    }

    /// Intersection of all record intervals.
    pub fn tightest_interval(&self) -> FptInterval {
        self.records
            .iter()
            .map(fpt_bounds)
            .reduce(|a, b| a.intersect(&b))
            .expect("nonempty")
    }

    fn verify(&self) -> Result<()> {
        let p = self.p.get();
        let first = self.records.first().ok_or_else(|| Error::InvalidArgument("empty sequence".into()))?;
        if *first != (MuRecord { e: 0, q: 1, mu: 1 }) {
            return Err(Error::InvariantViolation(format!("μ(1) record is {first:?}")));
        }
        for r in &self.records {
            if r.mu < 1 || r.mu > r.q {
                return Err(Error::InvariantViolation(format!("μ({}) = {} outside [1, q]", r.q, r.mu)));
            }
        }
        for w in self.records.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b.e != a.e + 1 || b.q != a.q * p {
                return Err(Error::InvalidArgument("records are not consecutive".into()));
            }
            let (lo, hi) = (p * a.mu - p + 1, p * a.mu);
            if b.mu < lo || b.mu > hi {
                return Err(Error::InvariantViolation(format!(
                    "μ({}) = {} outside [{lo}, {hi}] given μ({}) = {}",
                    b.q, b.mu, a.q, a.mu
                )));
            }
            if b.mu.div_ceil(p) != a.mu {
                return Err(Error::InvariantViolation(format!(
                    "ceil(μ({})/p) = {} differs from μ({}) = {}",
                    b.q,
                    b.mu.div_ceil(p),
                    a.q,
                    a.mu
                )));
            }
        }
        Ok(())
    }
}

/// Largest usable `E`: `p^E · max(d, 1)` must fit in 64 bits.
pub fn emax_budget(p: u64, d: u64) -> u32 {
    let mut e = 0u32;
    let mut q = 1u64;
    while let Some(next) = q.checked_mul(p) {
        if next.checked_mul(d.max(1)).is_none() {
            break;
        }
        q = next;
        e += 1;
    }
    e
}

/// Incremental construction of a [`MuSequence`], one exponent at a time.
#[derive(Clone, Debug)]
pub struct MuSequenceBuilder {
    oracle: MembershipOracle,
    records: Vec<MuRecord>,
    budget: u32,
}

impl MuSequenceBuilder {
    pub fn new(f: &SparsePoly) -> Result<Self> {
        check_input(f)?;
        let d = f.degree().unwrap_or(1);
        Ok(MuSequenceBuilder {
            oracle: MembershipOracle::new(f)?,
            records: vec![MuRecord { e: 0, q: 1, mu: 1 }],
            budget: emax_budget(f.ring().p(), d),
        })
    }

    pub fn records(&self) -> &[MuRecord] {
        &self.records
    }

    pub fn budget(&self) -> u32 {
        self.budget
    }

    /// Computes the next record, searching only the window allowed by the
    /// previous one and confirming its endpoints.
    pub fn step(&mut self) -> Result<MuRecord> {
        let prev = *self.records.last().expect("nonempty");
        if prev.e >= self.budget {
            return Err(Error::ExponentOverflow);
        }
        let p = self.oracle.poly().ring().modulus();
        let q = FrobeniusPower::new(p, prev.e + 1)?;
        let (lo, hi) = (p.get() * prev.mu - p.get() + 1, p.get() * prev.mu);
        let violation = |what: &str| {
            Error::InvariantViolation(format!("μ({}) window [{lo}, {hi}]: {what}", q.q()))
        };
        if !self.oracle.is_member(hi, q)? {
            return Err(violation("upper end is not a member"));
        }
        let mu = if !self.oracle.is_member(hi - 1, q)? {
            hi
        } else {
            let mu = least_member(&mut self.oracle, q, lo, hi - 1)?;
            if lo > 1 && self.oracle.is_member(lo - 1, q)? {
                return Err(violation("lower end minus one is a member"));
            }
            mu
        };
        let rec = MuRecord {
            e: q.e(),
            q: q.q(),
            mu,
        };
        self.records.push(rec);
        Ok(rec)
    }

    pub fn finish(self) -> Result<MuSequence> {
        let homogeneous = self.oracle.poly().is_homogeneous();
        MuSequence::from_records(self.oracle.poly().ring().modulus(), self.records, homogeneous)
    }
}

/// The sequence `μ_f(p^e)` for `e = 0..=emax`.
pub fn mu_sequence(f: &SparsePoly, emax: u32) -> Result<MuSequence> {
    if emax == 0 {
        return Err(Error::InvalidArgument("E must be at least 1".into()));
    }
    let mut builder = MuSequenceBuilder::new(f)?;
    if emax > builder.budget() {
        return Err(Error::ExponentOverflow);
    }
    for _ in 0..emax {
        builder.step()?;
    }
    builder.finish()
}
