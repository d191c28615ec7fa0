//! `μ_f(q)`, threshold intervals, exact certificates and the generating function.

mod certificate;
mod genfun;
mod interval;
mod mu;

use num_bigint::BigInt;

pub use certificate::{
    approx, certify, check_degree_bounds, default_emax, denominator_dichotomy, fpt_exact,
    fpt_exact_with_sequence, degree_bounds, BoundCheck, BoundKind, BoundsReport, CertContext,
    CertificateStatus, Certifier, Dichotomy, FptCertificate, HypothesisFlag,
};
pub use genfun::{generating_function, RationalFunction};
pub use interval::OpenClosed;
pub use mu::{emax_budget, fpt_bounds, mu, mu_sequence, mu_with, MuRecord, MuSequence, MuSequenceBuilder};

pub type Rational = num_rational::BigRational;
pub type FptInterval = OpenClosed<BigInt>;
pub type GeneratingFunction = RationalFunction<BigInt>;
