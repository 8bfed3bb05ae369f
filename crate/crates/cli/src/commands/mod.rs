pub mod backtest;
pub mod estimate;
pub mod evaluate;
pub mod forecast;
pub mod report;
pub mod simulate;

use crate::error::CliError;
use std::path::Path;

pub(crate) fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::data(format!("cannot create {}: {e}", dir.display())))
}

/// Splits a repeatable `name=value` flag.
pub(crate) fn split_tagged(spec: &str, flag: &str) -> Result<(String, String), CliError> {
    match spec.split_once('=') {
        Some((name, rest)) if !name.is_empty() && !rest.is_empty() => {
            Ok((name.to_string(), rest.to_string()))
        }
        _ => Err(CliError::usage(format!(
            "--{flag} expects NAME=..., got {spec:?}"
        ))),
    }
}
