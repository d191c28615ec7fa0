use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "frobenius", version, about = "Frobenius invariants of hypersurfaces over prime fields")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Characteristic of the base field.
    #[arg(long, global = true)]
    pub p: Option<u64>,
    /// Variables are x0..xn; inferred from the input when omitted.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Largest exponent e in q = p^e.
    #[arg(long, global = true)]
    pub emax: Option<u32>,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Defaults to $XDG_CACHE_HOME/frobenius or ~/.cache/frobenius.
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Treat unmet hypotheses as errors instead of downgrading the answer.
    #[arg(long, global = true)]
    pub strict: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Text => "text",
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// μ(p^e) for e = 0..=emax with the enclosing intervals.
    Mu { polynomial: String },
    /// Exact F-pure threshold with its certificate, or the best interval.
    Fpt { polynomial: String },
    /// Closed form of Σ μ(p^e) z^e.
    Genfun { polynomial: String },
    /// Hasse coefficient and h for a hypersurface of degree n+1.
    Hasse { polynomial: String },
    /// Whether the Jacobian ideal is m-primary, with the Hilbert function of R/J.
    SmoothCheck { polynomial: String },
    /// Rank of the Frobenius action on negative degrees of top local cohomology.
    Injectivity {
        polynomial: String,
        /// Lowest degree tested; defaults to -d-p.
        #[arg(long, allow_hyphen_values = true)]
        s_min: Option<i64>,
    },
    /// h, fpt and Hasse data for every member of a family.
    Scan {
        /// `diagonal n=<N>`, `weierstrass` or `file:<path>`.
        family: String,
        #[arg(long, default_value_t = 10_000)]
        max_members: u64,
    },
    /// Property batteries for the colon formula, the degree bounds and the plane-curve menus.
    VerifyLemmas {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random instances per prime in each battery.
        #[arg(long, default_value_t = 6)]
        samples: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Mu { .. } => "mu",
            Command::Fpt { .. } => "fpt",
            Command::Genfun { .. } => "genfun",
            Command::Hasse { .. } => "hasse",
            Command::SmoothCheck { .. } => "smooth-check",
            Command::Injectivity { .. } => "injectivity",
            Command::Scan { .. } => "scan",
            Command::VerifyLemmas { .. } => "verify-lemmas",
        }
    }

    pub fn supports_csv(&self) -> bool {
        matches!(
            self,
            Command::Mu { .. } | Command::Injectivity { .. } | Command::Scan { .. } | Command::VerifyLemmas { .. }
        )
    }
}
