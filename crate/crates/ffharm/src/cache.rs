//! Content-addressed report cache keyed by `(command, params, seed, version)`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::report::Report;

pub const ENV_VAR: &str = "FFHARM_CACHE";

pub fn cache_key(command: &str, params: &Value, seed: Option<u64>, version: &str) -> String {
    // serde_json maps are sorted, so this text is canonical.
    let text = json!({ "command": command, "params": params, "seed": seed, "version": version }).to_string();
    hex::encode(Sha256::digest(text.as_bytes()))
}

pub fn resolve_dir(flag: Option<&Path>, disabled: bool) -> Option<PathBuf> {
    if disabled {
        return None;
    }
    flag.map(Path::to_path_buf)
        .or_else(|| std::env::var_os(ENV_VAR).filter(|v| !v.is_empty()).map(PathBuf::from))
}

pub fn entry_path(dir: &Path, key: &str) -> PathBuf {
    dir.join(format!("{key}.json"))
}

#[derive(Debug)]
pub enum Lookup {
    Hit(Box<Report>),
    Miss,
    /// Unreadable or mismatched entry; the caller recomputes.
    Corrupt(String),
}

pub fn lookup(dir: &Path, key: &str) -> Lookup {
    let path = entry_path(dir, key);
    let Ok(text) = fs::read_to_string(&path) else {
        return Lookup::Miss;
    };
    let parsed: Result<Value, _> = serde_json::from_str(&text);
    match parsed {
        Ok(v) if v.get("key").and_then(Value::as_str) == Some(key) => {
            match v.get("report").cloned().map(serde_json::from_value::<Report>) {
                Some(Ok(r)) => Lookup::Hit(Box::new(r)),
                _ => Lookup::Corrupt(format!("CorruptCacheEntry: {} has no valid report", path.display())),
            }
        }
        _ => Lookup::Corrupt(format!("CorruptCacheEntry: {}", path.display())),
    }
}

pub fn store(dir: &Path, key: &str, report: &Report) -> Result<(), CliError> {
    let fail = |e: std::io::Error| CliError::CacheWrite(format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(fail)?;
    let body = serde_json::to_string(&json!({ "key": key, "report": report })).expect("report serializes");
    let tmp = dir.join(format!(".{key}.tmp"));
    let mut f = fs::File::create(&tmp).map_err(fail)?;
    f.write_all(body.as_bytes()).map_err(fail)?;
    f.sync_all().map_err(fail)?;
    fs::rename(&tmp, entry_path(dir, key)).map_err(fail)
}
