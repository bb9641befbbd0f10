//! `key = value` config files. Blank lines and `#` comments are skipped.

use std::collections::BTreeMap;

use super::CliError;

const KEYS: &[&str] = &[
    "p", "k", "g", "delta", "x", "nmax", "seed", "method", "format", "budget", "factor_limit", "g_deg",
    "delta_deg", "x_deg",
];

pub fn parse(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", i + 1)))?;
        let k = k.trim();
        if !KEYS.contains(&k) {
            return Err(CliError::Usage(format!("config line {}: unknown key {k:?}", i + 1)));
        }
        if out.insert(k.to_string(), v.trim().to_string()).is_some() {
            return Err(CliError::Usage(format!("config line {}: duplicate key {k:?}", i + 1)));
        }
    }
    Ok(out)
}

pub fn load(path: &str) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("config {path}: {e}")))?;
    parse(&text)
}
