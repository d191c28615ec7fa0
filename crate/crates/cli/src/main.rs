mod args;
mod cache;
mod commands;
mod lemmas;

use std::collections::BTreeMap;
use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use sha2::{Digest, Sha256};

use args::{Cli, Command, Format};
use cache::{Cache, JobSpec};
use commands::{CliError, CliResult, Report};
use frobenius_core::calabi_yau::FamilyDescriptor;

fn job_spec(cli: &Cli) -> CliResult<JobSpec> {
    let common = &cli.common;
    let mut extra = BTreeMap::new();
    let (p, n, input) = match &cli.command {
        Command::Mu { polynomial }
        | Command::Fpt { polynomial }
        | Command::Genfun { polynomial }
        | Command::Hasse { polynomial }
        | Command::SmoothCheck { polynomial }
        | Command::Injectivity { polynomial, .. } => {
            let f = commands::read_poly(common, polynomial)?;
            (Some(f.ring().p()), Some(f.ring().n()), f.to_string())
        }
        Command::Scan { family, .. } => {
            let p = commands::require_p(common)?;
            let desc = commands::family(family)?;
            if let FamilyDescriptor::File(path) = &desc {
                let bytes = std::fs::read(path).map_err(|source| CliError::Io {
                    path: path.display().to_string(),
                    source,
                })?;
                extra.insert("file_sha256".into(), hex::encode(Sha256::digest(&bytes)));
            }
            (Some(p), common.n, desc.to_string())
        }
        Command::VerifyLemmas { .. } => (None, None, String::new()),
    };
    match &cli.command {
        Command::Injectivity { s_min: Some(s), .. } => {
            extra.insert("s_min".into(), s.to_string());
        }
        Command::Scan { max_members, .. } => {
            extra.insert("max_members".into(), max_members.to_string());
        }
        Command::VerifyLemmas { seed, samples } => {
            extra.insert("seed".into(), seed.to_string());
            extra.insert("samples".into(), samples.to_string());
        }
        _ => {}
    }
    Ok(JobSpec {
        command: cli.command.name().into(),
        p,
        n,
        input,
        emax: common.emax,
        format: common.format.name().into(),
        strict: common.strict,
        extra,
    })
}

fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.json).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Text => report.text.clone(),
        Format::Csv => report.csv.clone().unwrap_or_default(),
    }
}

fn execute(cli: &Cli) -> CliResult<ExitCode> {
    if cli.common.format == Format::Csv && !cli.command.supports_csv() {
        return Err(CliError::Usage(format!("csv output is not available for `{}`", cli.command.name())));
    }
    let job = job_spec(cli)?;
    let cache = if cli.common.no_cache {
        None
    } else {
        cli.common.cache_dir.clone().or_else(cache::default_dir).map(Cache::new)
    };
    let mut out = std::io::stdout().lock();
    if let Some(hit) = cache.as_ref().and_then(|c| c.lookup(&job)) {
        eprintln!("cached");
        let _ = out.write_all(hit.as_bytes());
        return Ok(ExitCode::SUCCESS);
    }
    let report = commands::run(&cli.command, &cli.common)?;
    let rendered = render(&report, cli.common.format);
    let _ = out.write_all(rendered.as_bytes());
    if let Some(v) = &report.violation {
        eprintln!("error: internal invariant violated: {v}");
        return Ok(ExitCode::from(2));
    }
    if let Some(c) = &cache {
        if let Err(e) = c.store(&job, &rendered) {
            eprintln!("warning: cache disabled for this run: {e}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
