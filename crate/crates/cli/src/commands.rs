use std::fmt::Write as _;

use serde_json::{json, Value};
use thiserror::Error;

use frobenius_core::calabi_yau::{
    cy_report, quartic_classify, quintic_classify, scan_family, CYReport, Classification, FamilyDescriptor,
    ScanOptions,
};
use frobenius_core::cohomology::{check_frobenius_injectivity, window_q};
use frobenius_core::smoothness::{expected_hilbert_coefficients, jacobian_report, quotient_dimensions};
use frobenius_core::threshold::{
    approx, default_emax, denominator_dichotomy, emax_budget, fpt_exact_with_sequence, generating_function,
    mu_sequence, CertContext, FptCertificate, MuSequence,
};
use frobenius_core::{infer_n, parse_poly, PrimeModulus, Rational, SparsePoly};

use crate::args::{Command, Common};
use crate::lemmas;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] frobenius_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_internal() => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// One result in every output format.
#[derive(Debug, Clone)]
pub struct Report {
    pub json: Value,
    pub text: String,
    pub csv: Option<String>,
    /// A proven statement failed; the report is still printed.
    pub violation: Option<String>,
}

impl Report {
    fn new(json: Value, text: String) -> Self {
        Report {
            json,
            text,
            csv: None,
            violation: None,
        }
    }
}

pub fn require_p(common: &Common) -> CliResult<u64> {
    let p = common.p.ok_or_else(|| CliError::Usage("--p is required".into()))?;
    PrimeModulus::new(p)?;
    Ok(p)
}

pub fn read_poly(common: &Common, text: &str) -> CliResult<SparsePoly> {
    let p = require_p(common)?;
    let n = match common.n {
        Some(n) => n,
        None => infer_n(text, PrimeModulus::new(p)?)?,
    };
    Ok(parse_poly(text, n, p)?)
}

fn emax_for(common: &Common, f: &SparsePoly, fallback: u32) -> CliResult<u32> {
    let d = f.degree().unwrap_or(1).max(1);
    let budget = emax_budget(f.ring().p(), d);
    match common.emax {
        Some(0) => Err(CliError::Usage("--emax must be at least 1".into())),
        Some(e) if e > budget => {
            if common.strict {
                Err(CliError::Usage(format!("--emax {e} exceeds the 64-bit budget E = {budget}")))
            } else {
                Ok(e)
            }
        }
        Some(e) => Ok(e),
        None => Ok(fallback.min(budget).max(1)),
    }
}

fn q(r: &Rational) -> String {
    r.to_string()
}

fn opt_q(r: &Option<Rational>) -> Value {
    r.as_ref().map(|v| Value::String(q(v))).unwrap_or(Value::Null)
}

fn sequence_json(seq: &MuSequence) -> (Value, Value) {
    let records: Vec<Value> = seq
        .records()
        .iter()
        .map(|r| json!({"e": r.e, "q": r.q, "mu": r.mu}))
        .collect();
    let intervals: Vec<Value> = seq.records().iter().map(|r| Value::String(r.bounds().to_string())).collect();
    (Value::Array(records), Value::Array(intervals))
}

fn sequence_table(seq: &MuSequence) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:>3}  {:>12}  {:>12}  interval", "e", "q", "mu");
    for r in seq.records() {
        let _ = writeln!(out, "{:>3}  {:>12}  {:>12}  {}", r.e, r.q, r.mu, r.bounds());
    }
    out
}

fn hypotheses_json(ctx: &CertContext, cert: &FptCertificate) -> Value {
    json!({
        "homogeneous": ctx.d.is_some(),
        "jacobian_primary": ctx.jacobian_primary,
        "prime_bound": ctx.prime_bound(),
        "prime_bound_holds": ctx.prime_bound_holds(),
        "checked": cert.hypothesis_checked,
        "flags": cert.flags.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
    })
}

fn certificate_text(cert: &FptCertificate) -> String {
    let mut out = String::new();
    match &cert.value {
        Some(v) => {
            let _ = writeln!(out, "fpt = {v} (~{:.6})", approx(v));
        }
        None => {
            let _ = writeln!(out, "fpt in {}", cert.interval);
        }
    }
    let _ = write!(out, "certificate: {}", cert.status);
    if let (Some(by), Some(e)) = (cert.certified_by, cert.witness_e) {
        let _ = write!(out, " by {by} at e = {e}");
    }
    out.push('\n');
    for flag in &cert.flags {
        let _ = writeln!(out, "note: {flag}");
    }
    out
}

fn ordinarity(r: &CYReport) -> &'static str {
    if r.h == 0 {
        "ordinary"
    } else {
        "non-ordinary"
    }
}

fn is_cy(f: &SparsePoly) -> bool {
    let n = f.ring().n();
    f.homogeneous_degree() == Some(n as u64 + 1) && n >= 1
}

/// The certificate for `f`, upgraded through the Calabi-Yau statement
/// where it applies, with `h` when that is defined.
struct Threshold {
    ctx: CertContext,
    cert: FptCertificate,
    seq: MuSequence,
    cy: Option<CYReport>,
    classification: Option<Classification>,
}

fn threshold(f: &SparsePoly, emax: u32) -> CliResult<Threshold> {
    let ctx = CertContext::of(f)?;
    let (mut cert, seq) = fpt_exact_with_sequence(f, emax)?;
    let mut cy = None;
    if is_cy(f) && ctx.jacobian_primary && f.ring().p() as i64 >= f.ring().n() as i64 - 1 {
        let report = cy_report(f)?;
        cert = report.certificate.clone();
        cy = Some(report);
    }
    let classification = match (f.ring().n(), ctx.d, ctx.jacobian_primary, f.ring().p()) {
        (2, Some(4), true, p) if p > 2 => Some(quartic_classify(f)?),
        (2, Some(5), true, p) if p > 5 => Some(quintic_classify(f)?),
        _ => None,
    };
    Ok(Threshold {
        ctx,
        cert,
        seq,
        cy,
        classification,
    })
}

fn strict_check(common: &Common, cert: &FptCertificate) -> CliResult<()> {
    if common.strict && !cert.is_exact() && !cert.flags.is_empty() {
        let flags: Vec<String> = cert.flags.iter().map(|f| f.to_string()).collect();
        return Err(CliError::Usage(format!("unmet hypotheses: {}", flags.join("; "))));
    }
    Ok(())
}

pub fn run(command: &Command, common: &Common) -> CliResult<Report> {
    match command {
        Command::Mu { polynomial } => mu(common, polynomial),
        Command::Fpt { polynomial } => fpt(common, polynomial),
        Command::Genfun { polynomial } => genfun(common, polynomial),
        Command::Hasse { polynomial } => hasse(common, polynomial),
        Command::SmoothCheck { polynomial } => smooth_check(common, polynomial),
        Command::Injectivity { polynomial, s_min } => injectivity(common, polynomial, *s_min),
        Command::Scan { family, max_members } => scan(common, family, *max_members),
        Command::VerifyLemmas { seed, samples } => lemmas::verify(*seed, *samples),
    }
}

fn mu(common: &Common, text: &str) -> CliResult<Report> {
    let f = read_poly(common, text)?;
    let emax = emax_for(common, &f, 3)?;
    let seq = mu_sequence(&f, emax)?;
    let (records, intervals) = sequence_json(&seq);
    let json = json!({
        "command": "mu",
        "p": f.ring().p(),
        "n": f.ring().n(),
        "polynomial": f.to_string(),
        "mu_sequence": records,
        "intervals": intervals,
    });
    let mut csv = String::from("e,q,mu,interval\n");
    for r in seq.records() {
        let _ = writeln!(csv, "{},{},{},\"{}\"", r.e, r.q, r.mu, r.bounds());
    }
    let mut report = Report::new(json, sequence_table(&seq));
    report.csv = Some(csv);
    Ok(report)
}

fn fpt(common: &Common, text: &str) -> CliResult<Report> {
    let f = read_poly(common, text)?;
    let d = f.degree().unwrap_or(1).max(1);
    let emax = emax_for(common, &f, default_emax(f.ring().p(), d))?;
    let t = threshold(&f, emax)?;
    strict_check(common, &t.cert)?;
    let (records, intervals) = sequence_json(&t.seq);
    let dichotomy = match (t.ctx.d, t.ctx.jacobian_primary) {
        (Some(d), true) => denominator_dichotomy(&t.cert, t.ctx.n, d, t.ctx.p)
            .ok()
            .map(|x| x.to_string()),
        _ => None,
    };
    let json = json!({
        "command": "fpt",
        "p": f.ring().p(),
        "n": f.ring().n(),
        "polynomial": f.to_string(),
        "fpt": opt_q(&t.cert.value),
        "certificate": t.cert.status.to_string(),
        "certified_by": t.cert.certified_by.map(|c| c.to_string()),
        "witness_e": t.cert.witness_e,
        "interval": t.cert.interval.to_string(),
        "lct": opt_q(&t.ctx.lct()),
        "denominator": dichotomy,
        "h": t.cy.as_ref().map(|r| r.h),
        "classification": t.classification.as_ref().map(|c| c.label()),
        "mu_sequence": records,
        "intervals": intervals,
        "hypotheses": hypotheses_json(&t.ctx, &t.cert),
    });
    let mut text = certificate_text(&t.cert);
    if let Some(r) = &t.cy {
        let _ = writeln!(text, "h = {} ({})", r.h, ordinarity(r));
    }
    if let Some(c) = &t.classification {
        let _ = writeln!(text, "{}", c.label());
    }
    text.push_str(&sequence_table(&t.seq));
    Ok(Report::new(json, text))
}

fn genfun(common: &Common, text: &str) -> CliResult<Report> {
    let f = read_poly(common, text)?;
    let d = f.degree().unwrap_or(1).max(1);
    let emax = emax_for(common, &f, 3)?;
    let t = threshold(&f, default_emax(f.ring().p(), d).max(emax))?;
    strict_check(common, &t.cert)?;
    let seq = mu_sequence(&f, emax.max(t.cert.witness_e.unwrap_or(1)))?;
    let g = generating_function(&t.cert, &seq)?;
    let residue = g.residue_at(f.ring().p().into());
    let (records, _) = sequence_json(&seq);
    let ints = |v: &[_]| v.iter().map(ToString::to_string).collect::<Vec<String>>();
    let json = json!({
        "command": "genfun",
        "p": f.ring().p(),
        "n": f.ring().n(),
        "polynomial": f.to_string(),
        "generating_function": g.to_string(),
        "numerator": ints(g.numerator()),
        "denominator": ints(g.denominator()),
        "residue": opt_q(&residue),
        "fpt": opt_q(&t.cert.value),
        "certificate": t.cert.status.to_string(),
        "witness_e": t.cert.witness_e,
        "h": t.cy.as_ref().map(|r| r.h),
        "mu_sequence": records,
        "hypotheses": hypotheses_json(&t.ctx, &t.cert),
    });
    let mut text = format!("G(z) = {g}\n");
    if let Some(r) = &residue {
        let _ = writeln!(text, "residue at z = 1/p: {r}");
    }
    text.push_str(&certificate_text(&t.cert));
    Ok(Report::new(json, text))
}

fn hasse(common: &Common, text: &str) -> CliResult<Report> {
    let f = read_poly(common, text)?;
    let r = cy_report(&f)?;
    if common.strict && !r.cy_prime_bound {
        return Err(CliError::Usage(format!("unmet hypothesis: p = {} < n-1 = {}", r.p, r.n as i64 - 1)));
    }
    let json = json!({
        "command": "hasse",
        "p": r.p,
        "n": r.n,
        "polynomial": f.to_string(),
        "hasse_coeff": r.hasse_coeff.value(),
        "hasse_zero": r.hasse_coeff.is_zero(),
        "h": r.h,
        "mu_p": r.mu_p,
        "classification": r.classification.to_string(),
        "fpt": opt_q(&r.fpt),
        "certificate": r.certificate.status.to_string(),
        "witness_e": r.certificate.witness_e,
        "hypotheses": {
            "smooth": r.smooth,
            "cy_prime_bound": r.cy_prime_bound,
            "hasse_order_bound": r.hasse_order_bound,
        },
    });
    let mut text = format!(
        "hasse coefficient = {}\nh = {} ({})\nmu(p) = {}\n",
        r.hasse_coeff.value(),
        r.h,
        ordinarity(&r),
        r.mu_p
    );
    text.push_str(&certificate_text(&r.certificate));
    if !r.hasse_order_bound {
        let _ = writeln!(text, "note: p < n^2-n-1, so h is not read as a vanishing order");
    }
    Ok(Report::new(json, text))
}

fn smooth_check(common: &Common, text: &str) -> CliResult<Report> {
    let f = read_poly(common, text)?;
    let r = jacobian_report(&f)?;
    let n = f.ring().n();
    let d = f.homogeneous_degree().unwrap_or(0);
    let mut violation = None;
    let hilbert = if r.is_m_primary {
        let dims = quotient_dimensions(&r.partials, n, r.witness_degree);
        let mut expected = expected_hilbert_coefficients(n, d);
        expected.resize(r.witness_degree as usize + 1, 0);
        if dims != expected {
            violation = Some(format!("dim (R/J)_t = {dims:?} differs from the series {expected:?}"));
        }
        Some((dims, expected))
    } else {
        None
    };
    let json = json!({
        "command": "smooth-check",
        "p": f.ring().p(),
        "n": n,
        "polynomial": f.to_string(),
        "m_primary": r.is_m_primary,
        "witness_degree": r.witness_degree,
        "rank_found": r.rank_found,
        "rank_needed": r.rank_needed,
        "euler_ok": r.euler_ok,
        "partials": r.partials.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
        "hilbert": hilbert.as_ref().map(|(dims, expected)| json!({
            "dimensions": dims,
            "expected": expected,
            "matches": dims == expected,
        })),
    });
    let mut text = format!(
        "{} (rank {}/{} in degree {})\n",
        if r.is_m_primary { "smooth: J is m-primary" } else { "singular: J is not m-primary" },
        r.rank_found,
        r.rank_needed,
        r.witness_degree
    );
    if let Some((dims, _)) = &hilbert {
        let _ = writeln!(text, "dim (R/J)_t = {dims:?}");
    }
    let mut report = Report::new(json, text);
    report.violation = violation;
    Ok(report)
}

fn injectivity(common: &Common, text: &str, s_min: Option<i64>) -> CliResult<Report> {
    let f = read_poly(common, text)?;
    let d = f
        .homogeneous_degree()
        .ok_or(frobenius_core::Error::NotHomogeneous)? as i64;
    let p = f.ring().p();
    let s_min = s_min.unwrap_or(-d - p as i64);
    let qf = window_q(f.ring().modulus(), f.ring().n(), s_min)?;
    let r = check_frobenius_injectivity(&f, qf, s_min)?;
    if common.strict && !r.hypotheses_hold() {
        return Err(CliError::Usage(format!(
            "unmet hypotheses: prime bound {}, jacobian m-primary {}",
            r.prime_bound, r.jacobian_primary
        )));
    }
    let entries: Vec<Value> = r
        .entries
        .iter()
        .map(|e| {
            json!({
                "degree": e.degree,
                "target_degree": e.target_degree,
                "dimension": e.dimension,
                "rank": e.rank,
                "injective": e.injective,
            })
        })
        .collect();
    let json = json!({
        "command": "injectivity",
        "p": p,
        "n": f.ring().n(),
        "polynomial": f.to_string(),
        "q": r.q,
        "s_min": s_min,
        "entries": entries,
        "all_injective": r.all_injective(),
        "cross_checked": r.cross_checked,
        "hypotheses": {
            "prime_bound": r.prime_bound,
            "jacobian_primary": r.jacobian_primary,
        },
    });
    let mut text = format!("q = {}\n{:>6}  {:>9}  {:>6}  injective\n", r.q, "degree", "dimension", "rank");
    let mut csv = String::from("degree,dimension,rank,injective\n");
    for e in &r.entries {
        let _ = writeln!(text, "{:>6}  {:>9}  {:>6}  {}", e.degree, e.dimension, e.rank, e.injective);
        let _ = writeln!(csv, "{},{},{},{}", e.degree, e.dimension, e.rank, e.injective);
    }
    if !r.hypotheses_hold() {
        let _ = writeln!(text, "note: hypotheses unmet, injectivity is not guaranteed");
    }
    let bad = r.counterexamples();
    let mut report = Report::new(json, text);
    report.csv = Some(csv);
    if !bad.is_empty() {
        report.violation = Some(format!("Frobenius action is not injective in degrees {bad:?}"));
    }
    Ok(report)
}

pub fn family(text: &str) -> CliResult<FamilyDescriptor> {
    Ok(text.parse::<FamilyDescriptor>()?)
}

fn scan(common: &Common, text: &str, max_members: u64) -> CliResult<Report> {
    let p = require_p(common)?;
    let desc = family(text)?;
    let opts = ScanOptions {
        max_members,
        n: common.n,
    };
    let s = scan_family(&desc, p, &opts)?;
    let members: Vec<Value> = s
        .members
        .iter()
        .map(|m| {
            json!({
                "family_member": m.label,
                "h": m.report.h,
                "fpt": opt_q(&m.report.fpt),
                "hasse_zero": m.report.hasse_coeff.is_zero(),
                "hasse_coeff": m.report.hasse_coeff.value(),
                "certificate": m.report.certificate.status.to_string(),
            })
        })
        .collect();
    let rejected: Vec<Value> = s
        .rejected
        .iter()
        .map(|r| json!({"family_member": r.label, "reason": r.reason}))
        .collect();
    let histogram: serde_json::Map<String, Value> =
        s.histogram.iter().map(|(h, c)| (h.to_string(), json!(c))).collect();
    let json = json!({
        "command": "scan",
        "p": p,
        "family": desc.to_string(),
        "members": members,
        "rejected": rejected,
        "histogram": histogram,
    });
    let mut csv = String::from("family_member,h,fpt,hasse_zero\n");
    let mut text = String::new();
    for m in &s.members {
        let fpt = m.report.fpt.as_ref().map(q).unwrap_or_default();
        let _ = writeln!(csv, "\"{}\",{},{},{}", m.label, m.report.h, fpt, m.report.hasse_coeff.is_zero());
        let _ = writeln!(text, "{}  h = {}  fpt = {}  {}", m.label, m.report.h, fpt, m.report.classification);
    }
    let _ = writeln!(
        text,
        "{} members, {} rejected; by h: {}",
        s.members.len(),
        s.rejected.len(),
        s.histogram
            .iter()
            .map(|(h, c)| format!("{h}:{c}"))
            .collect::<Vec<_>>()
            .join(" ")
    );
    let mut report = Report::new(json, text);
    report.csv = Some(csv);
    Ok(report)
}
