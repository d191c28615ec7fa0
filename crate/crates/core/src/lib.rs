//! Exact Frobenius invariants of hypersurfaces over prime fields.

pub mod calabi_yau;
pub mod cohomology;
pub mod error;
pub mod field;
pub mod kernel;
pub mod linalg;
pub mod membership;
pub mod parse;
pub mod poly;
pub mod smoothness;
pub mod threshold;

pub use error::{Error, Result};
pub use field::{FpElem, PrimeModulus};
pub use kernel::{FrobeniusPower, TruncatedPoly};
pub use parse::{infer_n, parse_poly};
pub use poly::{Monomial, Ring, SparsePoly};
pub use threshold::{FptCertificate, FptInterval, GeneratingFunction, MuRecord, MuSequence, Rational};
