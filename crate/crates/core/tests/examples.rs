use frobenius_core::calabi_yau::{cy_report, hasse_coefficient, quartic_classify, quintic_admissible, Ordinarity};
use frobenius_core::cohomology::{check_frobenius_injectivity, window_q};
use frobenius_core::smoothness::jacobian_report;
use frobenius_core::threshold::{
    fpt_exact, fpt_exact_with_sequence, generating_function, mu, CertificateStatus, Certifier, HypothesisFlag,
};
use frobenius_core::{parse_poly, FrobeniusPower, PrimeModulus, Rational};

fn fq(p: u64, e: u32) -> FrobeniusPower {
    FrobeniusPower::new(PrimeModulus::new(p).unwrap(), e).unwrap()
}

fn r(a: i64, b: i64) -> Rational {
    Rational::new(a.into(), b.into())
}

#[test]
fn fermat_cubic_is_ordinary_at_seven() {
    let f = parse_poly("x0^3 + x1^3 + x2^3", 2, 7).unwrap();
    let report = cy_report(&f).unwrap();
    assert_eq!(report.h, 0);
    assert_eq!(report.classification, Ordinarity::Ordinary);
    assert_eq!(report.fpt, Some(r(1, 1)));
    assert_eq!(report.certificate.certified_by, Some(Certifier::CalabiYau));
}

#[test]
fn fermat_cubic_at_five() {
    let f = parse_poly("x0^3 + x1^3 + x2^3", 2, 5).unwrap();
    assert_eq!(mu(&f, fq(5, 1)).unwrap(), 4);
    assert_eq!(mu(&f, fq(5, 2)).unwrap(), 20);
    let (cert, seq) = fpt_exact_with_sequence(&f, 3).unwrap();
    assert_eq!(cert.value, Some(r(4, 5)));
    let g = generating_function(&cert, &seq).unwrap();
    assert_eq!(g.to_string(), "(1 - z)/(1 - 5*z)");
}

#[test]
fn supersingular_cubic() {
    let f = parse_poly("x1^2*x2 - x0^3 - x0*x2^2", 2, 7).unwrap();
    assert!(hasse_coefficient(&f).unwrap().is_zero());
    let report = cy_report(&f).unwrap();
    assert_eq!(report.h, 1);
    assert_eq!(report.fpt, Some(r(6, 7)));
}

#[test]
fn cusp_at_five() {
    let f = parse_poly("x0^2 + x1^3", 1, 5).unwrap();
    assert_eq!(mu(&f, fq(5, 1)).unwrap(), 4);
    assert_eq!(mu(&f, fq(5, 2)).unwrap(), 20);
    let cert = fpt_exact(&f, 3).unwrap();
    assert!(cert.interval.contains(&r(4, 5)));
    if !cert.is_exact() {
        assert!(cert.flags.contains(&HypothesisFlag::NotHomogeneous));
    }
}

#[test]
fn singular_cubic_is_flagged() {
    let f = parse_poly("x0^3 + x1^3", 2, 7).unwrap();
    assert!(!jacobian_report(&f).unwrap().is_m_primary);
    let cert = fpt_exact(&f, 2).unwrap();
    if cert.status == CertificateStatus::IntervalOnly {
        assert!(cert.flags.contains(&HypothesisFlag::JacobianNotPrimary));
    }
    assert!(cy_report(&f).is_err());
}

#[test]
fn plane_quartic_at_three_mod_four() {
    let f = parse_poly("x0^4 + x1^4 + x2^4", 2, 7).unwrap();
    let c = quartic_classify(&f).unwrap();
    assert!(c.fpt < r(3, 4));
    assert!(c.admissible.contains(&c.fpt));
}

#[test]
fn quintic_menu_at_one_mod_five() {
    assert_eq!(quintic_admissible(11).unwrap(), vec![r(30, 55), r(3, 5)]);
}

#[test]
fn injectivity_for_fermat_quartic_surface() {
    let f = parse_poly("x0^4 + x1^4 + x2^4 + x3^4", 3, 5).unwrap();
    let q = window_q(PrimeModulus::new(5).unwrap(), 3, -9).unwrap();
    let report = check_frobenius_injectivity(&f, q, -9).unwrap();
    assert!(report.hypotheses_hold());
    assert!(report.all_injective());
}

#[test]
fn constant_term_is_rejected() {
    let f = parse_poly("x0 + 1", 0, 3).unwrap();
    assert!(mu(&f, fq(3, 1)).is_err());
}
