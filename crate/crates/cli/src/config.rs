//! Flat `key=value` configuration files expanded into command-line flags.

use std::ffi::OsString;
use std::path::Path;

use crate::error::{CliError, CliResult};

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_config(text: &str) -> CliResult<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!("config line {}: expected key=value, got '{line}'", lineno + 1)));
        };
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() {
            return Err(CliError::Usage(format!("config line {}: empty key", lineno + 1)));
        }
        out.push((key, value.trim().to_string()));
    }
    Ok(out)
}

fn config_path(argv: &[OsString]) -> CliResult<Option<(usize, usize, OsString)>> {
    for (i, a) in argv.iter().enumerate().skip(1) {
        let s = a.to_string_lossy();
        if s == "--config" {
            let v = argv.get(i + 1).ok_or_else(|| CliError::Usage("--config needs a file path".into()))?;
            return Ok(Some((i, 2, v.clone())));
        }
        if let Some(v) = s.strip_prefix("--config=") {
            return Ok(Some((i, 1, OsString::from(v))));
        }
    }
    Ok(None)
}

/// Removes `--config FILE` from `argv` and inserts the file's pairs as flags
/// right after the subcommand name, so explicit flags given later win.
pub fn expand_config(argv: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let Some((at, width, path)) = config_path(&argv)? else {
        return Ok(argv);
    };
    let path = Path::new(&path);
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let pairs = parse_config(&text)?;
    let mut rest: Vec<OsString> = argv;
    rest.drain(at..at + width);
    let Some(sub) = rest.iter().skip(1).position(|a| !a.to_string_lossy().starts_with('-')) else {
        return Ok(rest);
    };
    let insert_at = sub + 2;
    let mut flags = Vec::new();
    for (key, value) in pairs {
        match value.as_str() {
            "true" => flags.push(OsString::from(format!("--{key}"))),
            "false" => {}
            _ => flags.push(OsString::from(format!("--{key}={value}"))),
        }
    }
    rest.splice(insert_at..insert_at, flags);
    Ok(rest)
}
