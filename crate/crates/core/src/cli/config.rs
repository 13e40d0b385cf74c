//! Flat `key = value` configuration files layered beneath command-line flags.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::path::Path;

use super::ConfigError;

/// Parse `key = value` lines. `#` starts a comment; blank lines are skipped.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut entries = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            ConfigError::new(
                "config",
                format!("line {}: expected `key = value`, got {raw:?}", lineno + 1),
            )
        })?;
        let key = key.trim();
        if key.is_empty() {
            return Err(ConfigError::new(
                "config",
                format!("line {}: empty key", lineno + 1),
            ));
        }
        entries.push((key.to_string(), value.trim().to_string()));
    }
    Ok(entries)
}

pub fn read_config_file(path: &Path) -> Result<Vec<(String, String)>, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new("config", format!("cannot read {}: {e}", path.display())))?;
    parse_config_text(&text)
}

/// Render entries in the config grammar.
pub fn render_config(entries: &[(String, String)]) -> String {
    entries
        .iter()
        .map(|(k, v)| format!("{k} = {v}\n"))
        .collect()
}

/// Global flags that take a value.
const GLOBAL_VALUE_FLAGS: &[&str] = &["config", "format", "out", "hbar", "gap-tol", "phase-tol"];
const GLOBAL_SWITCHES: &[&str] = &["quiet"];

pub struct SplitArgs {
    pub program: OsString,
    pub leading_globals: Vec<OsString>,
    pub subcommand: Option<OsString>,
    pub rest: Vec<OsString>,
    pub config_path: Option<OsString>,
}

/// Locate the subcommand and any `--config` path without a full parse.
pub fn split_args(args: Vec<OsString>) -> SplitArgs {
    let mut it = args.into_iter();
    let program = it.next().unwrap_or_else(|| OsString::from("berryline"));
    let rest: Vec<OsString> = it.collect();
    let mut leading_globals = Vec::new();
    let mut i = 0;
    let mut subcommand = None;
    while i < rest.len() {
        let s = rest[i].to_string_lossy().into_owned();
        if let Some(name) = s.strip_prefix("--") {
            let (name, inline) = match name.split_once('=') {
                Some((n, _)) => (n, true),
                None => (name, false),
            };
            if GLOBAL_VALUE_FLAGS.contains(&name) {
                leading_globals.push(rest[i].clone());
                if !inline && i + 1 < rest.len() {
                    leading_globals.push(rest[i + 1].clone());
                    i += 1;
                }
                i += 1;
                continue;
            }
            if GLOBAL_SWITCHES.contains(&name) {
                leading_globals.push(rest[i].clone());
                i += 1;
                continue;
            }
        }
        if !s.starts_with('-') {
            subcommand = Some(rest[i].clone());
            i += 1;
        }
        break;
    }
    let tail: Vec<OsString> = rest[i..].to_vec();
    let config_path = find_config(&leading_globals).or_else(|| find_config(&tail));
    SplitArgs {
        program,
        leading_globals,
        subcommand,
        rest: tail,
        config_path,
    }
}

fn find_config(args: &[OsString]) -> Option<OsString> {
    let mut found = None;
    let mut i = 0;
    while i < args.len() {
        let s = args[i].to_string_lossy();
        if s == "--" {
            break;
        }
        if s == "--config" {
            found = args.get(i + 1).cloned();
            i += 1;
        } else if let Some(p) = s.strip_prefix("--config=") {
            found = Some(OsString::from(p));
        }
        i += 1;
    }
    found
}

/// Turn config entries into flags for `subcommand`, rejecting unknown keys.
/// `switches` lists boolean flags, which accept `true`/`false`.
pub fn entries_to_flags(
    entries: &[(String, String)],
    known: &BTreeSet<String>,
    switches: &BTreeSet<String>,
) -> Result<Vec<OsString>, ConfigError> {
    let mut flags = Vec::new();
    for (key, value) in entries {
        if key == "config" {
            return Err(ConfigError::new(
                key,
                "a config file cannot include another".into(),
            ));
        }
        if !known.contains(key) {
            return Err(ConfigError::new(key, "unknown configuration key".into()));
        }
        if switches.contains(key) {
            match value.as_str() {
                "true" => flags.push(OsString::from(format!("--{key}"))),
                "false" => {}
                other => {
                    return Err(ConfigError::new(
                        key,
                        format!("expected true or false, got {other:?}"),
                    ))
                }
            }
        } else {
            flags.push(OsString::from(format!("--{key}={value}")));
        }
    }
    Ok(flags)
}
