//! JSON arguments given inline or as a path.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde_json::Value;

use crate::exit::{code, CliError, CliResult};

pub fn require_file(path: &Path) -> CliResult<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::new(
            code::MISSING_FILE,
            format!("{}: no such file", path.display()),
        ))
    }
}

fn looks_inline(arg: &str) -> bool {
    matches!(arg.trim_start().chars().next(), Some('{') | Some('['))
}

/// Raw JSON from an inline literal or a file.
pub fn json_value(arg: &str, what: &str) -> CliResult<Value> {
    let text = if looks_inline(arg) {
        arg.to_string()
    } else {
        let path = Path::new(arg);
        require_file(path)?;
        fs::read_to_string(path)
            .map_err(|e| CliError::new(code::IO, format!("{what} {}: {e}", path.display())))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::bad_spec(format!("{what}: {e}")))
}

pub fn json_arg<T: DeserializeOwned>(arg: &str, what: &str) -> CliResult<T> {
    serde_json::from_value(json_value(arg, what)?)
        .map_err(|e| CliError::bad_spec(format!("{what}: {e}")))
}
