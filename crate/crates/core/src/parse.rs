//! Text syntax for polynomials.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := coeff ('*'? factor)* | factor ('*'? factor)*
//! factor := 'x' INDEX ('^' UINT)?
//! coeff  := UINT
//! ```
//!
//! Whitespace is insignificant. Integer literals are reduced mod p.

use crate::error::{Error, Result};
use crate::field::PrimeModulus;
use crate::poly::{Monomial, Ring, SparsePoly};

struct RawTerm {
    negative: bool,
    coeff: u64,
    factors: Vec<(usize, u64)>,
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    p: PrimeModulus,
    src: &'a str,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, p: PrimeModulus) -> Self {
        let chars = src
            .char_indices()
            .filter(|(_, c)| !c.is_whitespace())
            .collect();
        Parser {
            chars,
            pos: 0,
            p,
            src,
        }
    }

    fn offset(&self) -> usize {
        self.chars
            .get(self.pos)
            .map(|(i, _)| *i)
            .unwrap_or_else(|| self.src.len())
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|(_, c)| *c)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            position: self.offset(),
            message: message.into(),
        })
    }

    fn digits(&mut self) -> Option<Vec<u32>> {
        let mut out = Vec::new();
        while let Some(d) = self.peek().and_then(|c| c.to_digit(10)) {
            out.push(d);
            self.pos += 1;
        }
        (!out.is_empty()).then_some(out)
    }

    fn uint_u64(&mut self) -> Result<u64> {
        let at = self.pos;
        let Some(ds) = self.digits() else {
            return self.err("expected an unsigned integer");
        };
        ds.iter()
            .try_fold(0u64, |acc, &d| acc.checked_mul(10)?.checked_add(d as u64))
            .ok_or_else(|| Error::Syntax {
                position: self.chars[at].0,
                message: "integer too large".into(),
            })
    }

    fn factor(&mut self) -> Result<(usize, u64)> {
        if self.peek() != Some('x') {
            return self.err("expected a variable x<INDEX>");
        }
        self.pos += 1;
        let index = self.uint_u64()? as usize;
        let exp = if self.peek() == Some('^') {
            self.pos += 1;
            self.uint_u64()?
        } else {
            1
        };
        Ok((index, exp))
    }

    fn term(&mut self, negative: bool) -> Result<RawTerm> {
        let mut coeff = 1u64;
        let mut factors = Vec::new();
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let ds = self.digits().unwrap_or_default();
                let p = self.p;
                coeff = ds
                    .iter()
                    .fold(0u64, |acc, &d| p.add(p.mul(acc, 10 % p.get()), d as u64 % p.get()));
            }
            Some('x') => factors.push(self.factor()?),
            _ => return self.err("expected a coefficient or a variable"),
        }
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    factors.push(self.factor()?);
                }
                Some('x') => factors.push(self.factor()?),
                _ => break,
            }
        }
        Ok(RawTerm {
            negative,
            coeff,
            factors,
        })
    }

    fn expr(&mut self) -> Result<Vec<RawTerm>> {
        let mut terms = vec![self.term(false)?];
        while let Some(c) = self.peek() {
            let negative = match c {
                '+' => false,
                '-' => true,
                _ => return self.err(format!("unexpected character '{c}'")),
            };
            self.pos += 1;
            terms.push(self.term(negative)?);
        }
        Ok(terms)
    }
}

fn parse_raw(text: &str, p: PrimeModulus) -> Result<Vec<RawTerm>> {
    Parser::new(text, p).expr()
}

/// Largest variable index used in `text` (0 if none), for inferring `n`.
pub fn infer_n(text: &str, p: PrimeModulus) -> Result<usize> {
    let terms = parse_raw(text, p)?;
    Ok(terms
        .iter()
        .flat_map(|t| t.factors.iter().map(|(i, _)| *i))
        .max()
        .unwrap_or(0))
}

/// Parses `text` into the canonical polynomial of `F_p[x_0..x_n]`.
pub fn parse_poly(text: &str, n: usize, p: u64) -> Result<SparsePoly> {
    let p = PrimeModulus::new(p)?;
    parse_in(text, Ring::new(n, p))
}

pub fn parse_in(text: &str, ring: Ring) -> Result<SparsePoly> {
    let p = ring.modulus();
    let raw = parse_raw(text, p)?;
    let mut terms = Vec::with_capacity(raw.len());
    for t in raw {
        let mut m = Monomial::one(ring.nvars());
        for (i, e) in t.factors {
            if i >= ring.nvars() {
                return Err(Error::VariableOutOfRange {
                    index: i,
                    max: ring.n(),
                });
            }
            m.0[i] = m.0[i].checked_add(e).ok_or(Error::ExponentOverflow)?;
        }
        let c = if t.negative { p.neg(t.coeff) } else { t.coeff };
        terms.push((m, c));
    }
    Ok(SparsePoly::from_terms(ring, terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fermat_cubic() {
        let f = parse_poly("x0^3 + x1^3 + x2^3", 2, 7).unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(f.homogeneous_degree(), Some(3));
    }

    #[test]
    fn cancellation_gives_zero() {
        assert!(parse_poly("x0 - x0", 0, 5).unwrap().is_zero());
    }

    #[test]
    fn variable_out_of_range() {
        assert_eq!(
            parse_poly("x3 + 1", 2, 5),
            Err(Error::VariableOutOfRange { index: 3, max: 2 })
        );
    }

    #[test]
    fn non_prime_modulus() {
        assert_eq!(parse_poly("x0", 0, 4), Err(Error::NotPrime(4)));
    }

    #[test]
    fn syntax_errors_report_position() {
        match parse_poly("x0 + * x1", 1, 5) {
            Err(Error::Syntax { position, .. }) => assert_eq!(position, 5),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_poly("", 1, 5), Err(Error::Syntax { position: 0, .. })));
        assert!(matches!(parse_poly("-x0", 1, 5), Err(Error::Syntax { .. })));
        assert!(matches!(parse_poly("x0^", 1, 5), Err(Error::Syntax { .. })));
        assert!(matches!(parse_poly("x0 x", 1, 5), Err(Error::Syntax { .. })));
    }

    #[test]
    fn juxtaposition_and_reduction() {
        let f = parse_poly("12x0x1^2 - 3 x1 * x0^2 x1", 1, 7).unwrap();
        assert_eq!(f.to_string(), "4*x0^2*x1^2 + 5*x0*x1^2");
        let g = parse_poly("99999999999999999999999999 x0", 0, 7).unwrap();
        // 10^26 - 1 = 3^2 - 1 = 1 (mod 7)
        assert_eq!(g.to_string(), "x0");
    }

    #[test]
    fn infers_variable_count() {
        let p = PrimeModulus::new(5).unwrap();
        assert_eq!(infer_n("x1^2*x4 + 3", p).unwrap(), 4);
        assert_eq!(infer_n("7", p).unwrap(), 0);
    }
}
