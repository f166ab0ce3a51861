//! Plain-text key=value configuration files: one assignment per line,
//! `#` starts a comment, blank lines ignored. Command-line flags override
//! file values; unknown keys are rejected before any computation runs.

use std::collections::BTreeMap;
use std::path::Path;

pub fn load(path: &Path) -> Result<BTreeMap<String, String>, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!(
                "config {}:{}: expected key=value, got `{raw}`",
                path.display(),
                lineno + 1
            ));
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if key.is_empty() {
            return Err(format!(
                "config {}:{}: empty key",
                path.display(),
                lineno + 1
            ));
        }
        if map.insert(key.clone(), value).is_some() {
            return Err(format!(
                "config {}:{}: duplicate key `{key}`",
                path.display(),
                lineno + 1
            ));
        }
    }
    Ok(map)
}

/// Reject config keys outside the active subcommand's vocabulary.
pub fn validate_keys(map: &BTreeMap<String, String>, allowed: &[&str]) -> Result<(), String> {
    for key in map.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(format!(
                "unknown config key `{key}` (allowed: {})",
                allowed.join(", ")
            ));
        }
    }
    Ok(())
}
