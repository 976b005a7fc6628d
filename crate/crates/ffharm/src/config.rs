//! Command-line surface and the serializable run configuration.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::report::OutputFormat;

#[derive(Debug, Parser)]
#[command(name = "ffharm", version, about = "Finite-field restriction, extension and averaging experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, PartialEq, Eq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Element table of F_q: digits, trace, eta, chi.
    Field,
    /// Gauss sums G_t for every t in F_q.
    Gauss,
    /// Enumerate S and compare |S| with the closed form.
    Variety,
    /// The Fourier transform of the surface measure, (d sigma)^v.
    SigmaHat,
    /// Isotropic subspaces contained in S.
    Subspaces,
    /// Lower-bound an operator norm at one (q, d, p, r).
    Norm,
    /// Estimate a norm across a list of q and fit the growth exponent.
    Sweep,
    /// Vertices of a necessary-condition region in the (1/p, 1/r) square.
    Region,
    /// Run a named verification suite.
    Suite {
        /// One of the suite names listed in the README.
        name: String,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Field => "field",
            Command::Gauss => "gauss",
            Command::Variety => "variety",
            Command::SigmaHat => "sigma-hat",
            Command::Subspaces => "subspaces",
            Command::Norm => "norm",
            Command::Sweep => "sweep",
            Command::Region => "region",
            Command::Suite { .. } => "suite",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
pub struct Options {
    /// Field order(s), comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub q: Vec<u32>,
    /// Dimension(s), comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub d: Vec<usize>,
    /// Diagonal coefficients, comma separated integers mod p; extension
    /// field elements as ':'-separated digit tuples, lowest digit first.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub coeffs: Option<String>,
    /// all-ones, alternating or cone.
    #[arg(long, global = true)]
    pub scheme: Option<String>,
    /// extension, restriction or averaging.
    #[arg(long, global = true)]
    pub kind: Option<String>,
    /// Input exponent (>= 1, or inf).
    #[arg(long, global = true)]
    pub p: Option<String>,
    /// Output exponent (>= 1, or inf).
    #[arg(long, global = true)]
    pub r: Option<String>,
    /// Estimation method; see the README per command.
    #[arg(long, global = true)]
    pub method: Option<String>,
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    #[arg(long, global = true)]
    pub restarts: Option<usize>,
    #[arg(long, global = true)]
    pub max_iter: Option<usize>,
    /// Required by every randomized command.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Dimension of a contained subspace (region).
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Some -a_i/a_j is a square (region, odd d).
    #[arg(long, global = true)]
    pub square_ratio: bool,
    /// List the points of S (variety).
    #[arg(long, global = true)]
    pub points: bool,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: OutputFormat,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Also write the transform as an FFGF binary dump (sigma-hat).
    #[arg(long, global = true)]
    pub dump: Option<PathBuf>,
    /// Also write a log-log SVG plot (sweep).
    #[arg(long, global = true)]
    pub svg: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Cache directory (FFHARM_CACHE is used when absent).
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    #[arg(long, global = true)]
    pub no_cache: bool,
}

/// A parsed invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub options: Options,
}

impl RunConfig {
    pub fn parse_from<I, T>(argv: I) -> Result<Self, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<std::ffi::OsString> + Clone,
    {
        let cli = Cli::try_parse_from(argv)?;
        Ok(Self { command: cli.command, options: cli.options })
    }

    /// Everything that can change the computed result, with unset flags
    /// dropped. Output location, format, threads and cache settings are
    /// excluded; the seed is carried separately.
    pub fn params(&self) -> Value {
        let mut opts = serde_json::to_value(&self.options).expect("options serialize");
        let map = opts.as_object_mut().expect("object");
        for k in ["format", "out", "dump", "svg", "threads", "cache", "no_cache", "seed"] {
            map.remove(k);
        }
        map.retain(|_, v| !(v.is_null() || v == &Value::Bool(false) || v.as_array().is_some_and(|a| a.is_empty())));
        if let Command::Suite { name } = &self.command {
            map.insert("suite".into(), Value::String(name.clone()));
        }
        Value::Object(map.clone())
    }
}
