//! Jacobian ideals and the m-primarity test by graded rank.

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::field::PrimeModulus;
use crate::linalg::PolySpan;
use crate::poly::{monomials_of_degree, Monomial, SparsePoly};

/// The partial derivatives `∂f/∂x_0, ..., ∂f/∂x_n`.
pub fn jacobian(f: &SparsePoly) -> Vec<SparsePoly> {
    (0..f.ring().nvars())
        .map(|i| f.partial_derivative(i).expect("index in range"))
        .collect()
}

/// All monomials of one degree, in graded-lex order, with a reverse index.
#[derive(Clone, Debug)]
pub struct GradedBasis {
    degree: u64,
    monomials: Vec<Monomial>,
    index: FxHashMap<Monomial, usize>,
}

impl GradedBasis {
    pub fn new(nvars: usize, degree: u64) -> Self {
        let monomials = monomials_of_degree(nvars, degree);
        let index = monomials.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        GradedBasis {
            degree,
            monomials,
            index,
        }
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }
}

/// `C(a, b)` for small arguments.
pub fn binomial(a: u64, b: u64) -> u64 {
    if b > a {
        return 0;
    }
    let b = b.min(a - b);
    (0..b).fold(1u128, |acc, i| acc * (a - i) as u128 / (i + 1) as u128) as u64
}

/// Dimension of the degree-`t` piece of the ideal generated by homogeneous `gens`.
pub fn ideal_rank_in_degree(gens: &[SparsePoly], t: u64) -> usize {
    let Some(first) = gens.first() else {
        return 0;
    };
    let nvars = first.ring().nvars();
    let mut span = PolySpan::new();
    for g in gens {
        let Some(deg) = g.degree() else { continue };
        if deg > t {
            continue;
        }
        for m in monomials_of_degree(nvars, t - deg) {
            span.insert(&g.mul_monomial(&m).expect("small degrees"));
        }
    }
    span.dim()
}

/// Outcome of the rank test for the Jacobian ideal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobianReport {
    pub partials: Vec<SparsePoly>,
    pub is_m_primary: bool,
    /// `(n+1)(d-2)+1`, clamped at 0.
    pub witness_degree: u64,
    pub rank_found: usize,
    pub rank_needed: usize,
    /// `Σ x_i ∂f/∂x_i = d f`; `None` when p divides d or `f` was not supplied.
    pub euler_ok: Option<bool>,
}

fn witness_degree(n: usize, d: u64) -> u64 {
    if d < 2 {
        0
    } else {
        (n as u64 + 1) * (d - 2) + 1
    }
}

/// Decides whether the partials generate an m-primary ideal, by checking
/// that they span the whole of degree `(n+1)(d-2)+1`.
///
/// For `d = 1` the partials are constants and the ideal is the unit ideal
/// exactly when one of them is nonzero; this is the same test in degree 0.
pub fn is_m_primary(partials: &[SparsePoly], n: usize, d: u64, p: PrimeModulus) -> Result<JacobianReport> {
    if partials.len() != n + 1 {
        return Err(Error::InvalidArgument(format!(
            "expected {} partials, got {}",
            n + 1,
            partials.len()
        )));
    }
    if d == 0 {
        return Err(Error::InvalidArgument("degree must be positive".into()));
    }
    for g in partials {
        if g.ring().modulus() != p || g.ring().nvars() != n + 1 {
            return Err(Error::RingMismatch);
        }
        if !g.is_zero() && g.homogeneous_degree() != Some(d - 1) {
            return Err(Error::NotHomogeneous);
        }
    }
    let t = witness_degree(n, d);
    let rank_needed = binomial(t + n as u64, n as u64) as usize;
    let rank_found = ideal_rank_in_degree(partials, t);
    Ok(JacobianReport {
        partials: partials.to_vec(),
        is_m_primary: rank_found == rank_needed,
        witness_degree: t,
        rank_found,
        rank_needed,
        euler_ok: None,
    })
}

/// [`is_m_primary`] on the Jacobian of a homogeneous nonconstant `f`,
/// including the Euler identity check when p does not divide the degree.
pub fn jacobian_report(f: &SparsePoly) -> Result<JacobianReport> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let d = f.homogeneous_degree().ok_or(Error::NotHomogeneous)?;
    if d == 0 {
        return Err(Error::NotInMaximalIdeal);
    }
    let ring = f.ring();
    let partials = jacobian(f);
    let mut report = is_m_primary(&partials, ring.n(), d, ring.modulus())?;
    let p = ring.modulus();
    if p.reduce(d) != 0 {
        let mut euler = SparsePoly::zero(ring);
        for (i, g) in partials.iter().enumerate() {
            euler = euler.add(&g.mul_monomial(&Monomial::var(ring.nvars(), i, 1))?)?;
        }
        report.euler_ok = Some(euler == f.scale(p.reduce(d)));
    }
    Ok(report)
}

/// `dim (R/J)_t` for `t = 0..=upto`.
pub fn quotient_dimensions(partials: &[SparsePoly], n: usize, upto: u64) -> Vec<u64> {
    (0..=upto)
        .map(|t| binomial(t + n as u64, n as u64) - ideal_rank_in_degree(partials, t) as u64)
        .collect()
}

/// Coefficients of `(1 + t + ... + t^{d-2})^{n+1}`.
pub fn expected_hilbert_coefficients(n: usize, d: u64) -> Vec<u64> {
    if d < 2 {
        return vec![0];
    }
    let base = vec![1u64; (d - 1) as usize];
    let mut acc = vec![1u64];
    for _ in 0..=n {
        let mut next = vec![0u64; acc.len() + base.len() - 1];
        for (i, a) in acc.iter().enumerate() {
            for (j, b) in base.iter().enumerate() {
                next[i + j] += a * b;
            }
        }
        acc = next;
    }
    acc
}

/// Compares the graded dimensions of `R/J` with the complete-intersection
/// Hilbert series in every degree up to `(n+1)(d-2)+1`.
pub fn hilbert_series_check(partials: &[SparsePoly], n: usize, d: u64) -> Result<bool> {
    let first = partials.first().ok_or(Error::InvalidArgument("no partials".into()))?;
    let report = is_m_primary(partials, n, d, first.ring().modulus())?;
    if !report.is_m_primary {
        return Err(Error::Hypothesis("the Jacobian ideal is not m-primary".into()));
    }
    let top = report.witness_degree;
    let dims = quotient_dimensions(partials, n, top);
    let mut expected = expected_hilbert_coefficients(n, d);
    expected.resize(top as usize + 1, 0);
    Ok(dims == expected)
}

/// Brute-force check of `m^[q] : m^k = m^[q] + m^{nq+q-n-k}` on monomials of
/// degree at most `nq+q-n`. Both sides are monomial ideals, and both contain
/// every monomial of larger degree, so this decides equality.
pub fn colon_lemma_check(n: usize, q: u64, k: u64) -> bool {
    let nvars = n + 1;
    let top = n as u64 * q + q - n as u64;
    let in_frobenius = |m: &[u64]| m.iter().any(|&e| e >= q);
    let multipliers = monomials_of_degree(nvars, k);
    let rhs_degree = top.saturating_sub(k);
    for t in 0..=top {
        for g in monomials_of_degree(nvars, t) {
            let lhs = multipliers.iter().all(|b| {
                let prod: Vec<u64> = g.exps().iter().zip(b.exps()).map(|(x, y)| x + y).collect();
                in_frobenius(&prod)
            });
            let rhs = in_frobenius(g.exps()) || t >= rhs_degree;
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    #[test]
    fn fermat_cubic_partials() {
        let f = parse_poly("x0^3 + x1^3 + x2^3", 2, 7).unwrap();
        let j: Vec<String> = jacobian(&f).iter().map(|g| g.to_string()).collect();
        assert_eq!(j, ["3*x0^2", "3*x1^2", "3*x2^2"]);
        let f3 = parse_poly("x0^3 + x1^3 + x2^3", 2, 3).unwrap();
        assert!(jacobian(&f3).iter().all(SparsePoly::is_zero));
        let g = parse_poly("x0^2*x1", 1, 7).unwrap();
        let j: Vec<String> = jacobian(&g).iter().map(|g| g.to_string()).collect();
        assert_eq!(j, ["2*x0*x1", "x0^2"]);
    }

    #[test]
    fn rank_test() {
        let f = parse_poly("x0^3 + x1^3 + x2^3", 2, 7).unwrap();
        let r = jacobian_report(&f).unwrap();
        assert!(r.is_m_primary);
        assert_eq!((r.witness_degree, r.rank_found, r.rank_needed), (4, 15, 15));
        assert_eq!(r.euler_ok, Some(true));
        let f3 = parse_poly("x0^3 + x1^3 + x2^3", 2, 3).unwrap();
        assert!(!jacobian_report(&f3).unwrap().is_m_primary);
        let g = parse_poly("x0^2*x1", 1, 7).unwrap();
        assert!(!jacobian_report(&g).unwrap().is_m_primary);
    }

    #[test]
    fn low_degrees() {
        let lin = parse_poly("x1", 2, 5).unwrap();
        assert!(jacobian_report(&lin).unwrap().is_m_primary);
        let quad = parse_poly("x0^2 + x1*x2", 2, 5).unwrap();
        assert!(jacobian_report(&quad).unwrap().is_m_primary);
        let cone = parse_poly("x0^2 + x1^2", 2, 5).unwrap();
        assert!(!jacobian_report(&cone).unwrap().is_m_primary);
        assert!(matches!(jacobian_report(&parse_poly("3", 1, 5).unwrap()), Err(Error::NotInMaximalIdeal)));
    }

    #[test]
    fn hilbert_dimensions() {
        let f = parse_poly("x0^3 + x1^3 + x2^3", 2, 7).unwrap();
        assert_eq!(quotient_dimensions(&jacobian(&f), 2, 4), vec![1, 3, 3, 1, 0]);
        assert!(hilbert_series_check(&jacobian(&f), 2, 3).unwrap());
        let g = parse_poly("x0^2", 0, 3).unwrap();
        assert_eq!(quotient_dimensions(&jacobian(&g), 0, 1), vec![1, 0]);
        assert!(hilbert_series_check(&jacobian(&g), 0, 2).unwrap());
        assert_eq!(expected_hilbert_coefficients(2, 4), vec![1, 3, 6, 7, 6, 3, 1]);
    }

    #[test]
    fn colon_small_grid() {
        assert!(colon_lemma_check(1, 2, 1));
        assert!(colon_lemma_check(1, 3, 0));
        assert!(colon_lemma_check(2, 2, 4));
        assert!(colon_lemma_check(2, 3, 7));
    }
}
