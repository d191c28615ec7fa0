use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use frobenius_core::calabi_yau::{quartic_classify, quintic_classify};
use frobenius_core::poly::monomials_of_degree;
use frobenius_core::smoothness::{colon_lemma_check, jacobian_report};
use frobenius_core::threshold::{check_degree_bounds, mu_sequence, BoundKind};
use frobenius_core::{PrimeModulus, Ring, SparsePoly};

use crate::commands::{CliResult, Report};

struct Battery {
    name: &'static str,
    cases: usize,
    failures: Vec<String>,
}

impl Battery {
    fn new(name: &'static str) -> Self {
        Battery {
            name,
            cases: 0,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

fn random_smooth(rng: &mut ChaCha8Rng, n: usize, d: u64, p: u64) -> Option<SparsePoly> {
    let ring = Ring::new(n, PrimeModulus::new(p).ok()?);
    let pool = monomials_of_degree(n + 1, d);
    (0..500).find_map(|_| {
        let f = SparsePoly::from_terms(ring, pool.iter().map(|m| (m.clone(), rng.gen_range(0..p))));
        let smooth = !f.is_zero() && jacobian_report(&f).map(|r| r.is_m_primary).unwrap_or(false);
        smooth.then_some(f)
    })
}

fn colon(b: &mut Battery) {
    for n in 0..=2usize {
        for q in [2u64, 3, 4, 8, 9] {
            let top = n as u64 * q + q - n as u64;
            for k in 0..=top {
                b.record(colon_lemma_check(n, q, k), || format!("n={n} q={q} k={k}"));
            }
        }
    }
}

fn bounds(rng: &mut ChaCha8Rng, samples: usize, lower: &mut Battery, upper: &mut Battery, strict: &mut Battery) -> CliResult<()> {
    for p in [3u64, 5, 7] {
        for n in 1..=2usize {
            for d in 2..=4u64 {
                for _ in 0..samples.div_ceil(2) {
                    let Some(f) = random_smooth(rng, n, d, p) else {
                        continue;
                    };
                    for rec in mu_sequence(&f, 2)?.records() {
                        let report = check_degree_bounds(&f, rec)?;
                        for c in report.checks.iter().filter(|c| c.applicable) {
                            let battery = match c.kind {
                                BoundKind::Lower => &mut *lower,
                                BoundKind::Upper => &mut *upper,
                                BoundKind::Strict => &mut *strict,
                            };
                            battery.record(c.holds, || format!("{f} over F_{p}, q={}: {} vs {}", rec.q, c.lhs, c.rhs));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn menus(rng: &mut ChaCha8Rng, samples: usize, quartic: &mut Battery, quintic: &mut Battery) {
    for p in [5u64, 7, 11, 13] {
        for _ in 0..samples {
            if let Some(f) = random_smooth(rng, 2, 4, p) {
                let outcome = quartic_classify(&f);
                quartic.record(outcome.is_ok(), || format!("{f} over F_{p}: {}", outcome.unwrap_err()));
            }
        }
    }
    for p in [7u64, 11, 13] {
        for _ in 0..samples.div_ceil(2) {
            if let Some(f) = random_smooth(rng, 2, 5, p) {
                let outcome = quintic_classify(&f);
                quintic.record(outcome.is_ok(), || format!("{f} over F_{p}: {}", outcome.unwrap_err()));
            }
        }
    }
}

pub fn verify(seed: u64, samples: usize) -> CliResult<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut colon_b = Battery::new("colon formula");
    let mut lower = Battery::new("lower bound");
    let mut upper = Battery::new("pigeonhole upper bound");
    let mut strict = Battery::new("strict inequality");
    let mut quartic = Battery::new("quartic menu");
    let mut quintic = Battery::new("quintic menu");
    colon(&mut colon_b);
    bounds(&mut rng, samples, &mut lower, &mut upper, &mut strict)?;
    menus(&mut rng, samples, &mut quartic, &mut quintic);
    let batteries = [colon_b, lower, upper, strict, quartic, quintic];
    let failed: Vec<&str> = batteries.iter().filter(|b| !b.failures.is_empty()).map(|b| b.name).collect();
    let rows: Vec<Value> = batteries
        .iter()
        .map(|b| {
            json!({
                "name": b.name,
                "cases": b.cases,
                "failures": b.failures.len(),
                "passed": b.failures.is_empty(),
                "first_failure": b.failures.first(),
            })
        })
        .collect();
    let json = json!({
        "command": "verify-lemmas",
        "seed": seed,
        "samples": samples,
        "batteries": rows,
        "all_passed": failed.is_empty(),
    });
    let mut text = format!("{:<24}  {:>6}  {:>8}  status\n", "battery", "cases", "failures");
    let mut csv = String::from("battery,cases,failures,status\n");
    for b in &batteries {
        let status = if b.failures.is_empty() { "PASS" } else { "FAIL" };
        let _ = writeln!(text, "{:<24}  {:>6}  {:>8}  {status}", b.name, b.cases, b.failures.len());
        let _ = writeln!(csv, "{},{},{},{status}", b.name, b.cases, b.failures.len());
        if let Some(first) = b.failures.first() {
            let _ = writeln!(text, "  first failure: {first}");
        }
    }
    Ok(Report {
        json,
        text,
        csv: Some(csv),
        violation: (!failed.is_empty()).then(|| format!("failing batteries: {}", failed.join(", "))),
    })
}
