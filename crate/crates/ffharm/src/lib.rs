//! Command-line runner for `ffharm-core`: report formats (JSON, CSV, text,
//! SVG, FFGF binary dumps) and a content-addressed result cache.

pub mod cache;
pub mod commands;
pub mod config;
pub mod dump;
pub mod error;
pub mod records;
pub mod report;
pub mod svg;

use std::io::Write;

pub use config::RunConfig;
pub use error::CliError;
pub use report::{OutputFormat, Report};

/// Runs one invocation, writing the report to `out` (or `--out`) and
/// diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = match RunConfig::parse_from(argv) {
        Ok(cfg) => cfg,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = write!(out, "{e}");
                return if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand { 2 } else { 0 };
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            let _ = writeln!(err, "{first}");
            return 2;
        }
    };
    match run_config(&cfg, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn run_config(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let o = &cfg.options;
    if let Some(n) = o.threads {
        if n == 0 {
            return Err(CliError::Invalid("--threads must be positive".into()));
        }
        // Only the first configuration in a process takes effect.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    // Side artifacts are produced during computation, so they bypass the cache.
    let cache_dir = if o.dump.is_some() || o.svg.is_some() { None } else { cache::resolve_dir(o.cache.as_deref(), o.no_cache) };
    let params = cfg.params();
    let key = cache::cache_key(cfg.command.name(), &params, o.seed, ffharm_core::VERSION);
    let mut cached = None;
    if let Some(dir) = &cache_dir {
        match cache::lookup(dir, &key) {
            cache::Lookup::Hit(r) => cached = Some(*r),
            cache::Lookup::Miss => {}
            cache::Lookup::Corrupt(msg) => {
                let _ = writeln!(err, "warning: {msg}; recomputing");
            }
        }
    }
    let report = match cached {
        Some(r) => r,
        None => {
            let r = commands::execute(cfg)?;
            if let Some(dir) = &cache_dir {
                cache::store(dir, &key, &r)?;
            }
            r
        }
    };
    let text = report.render(o.format);
    match &o.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?,
        None => out.write_all(text.as_bytes()).map_err(|e| CliError::Output(e.to_string()))?,
    }
    if report.passed == Some(false) {
        let failing: Vec<String> = report
            .checks
            .iter()
            .flatten()
            .filter(|c| !c.passed)
            .map(|c| format!("{} (measured {}, threshold {})", c.name, c.measured, c.threshold))
            .collect();
        return Err(CliError::SuiteFailed(format!("suite {} failed: {}", params["suite"].as_str().unwrap_or("?"), failing.join("; "))));
    }
    Ok(0)
}
