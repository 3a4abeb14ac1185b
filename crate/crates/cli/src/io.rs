use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::CliError;

/// Parses `arg` as inline JSON when it starts with `{` or `[`, otherwise
/// reads it as a file path.
pub fn load<T: DeserializeOwned>(arg: &str, what: &str) -> Result<T, CliError> {
    let trimmed = arg.trim_start();
    let (text, origin) = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        (arg.to_string(), "inline JSON".to_string())
    } else {
        let text = fs::read_to_string(arg).map_err(|e| CliError::Io(arg.to_string(), e))?;
        (text, arg.to_string())
    };
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{what} ({origin}): {e}")))
}

/// Pretty JSON to `out`, or to stdout.
pub fn emit<T: Serialize>(report: &T, out: Option<&Path>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(report)
        .map_err(|e| CliError::Usage(format!("serializing report: {e}")))?;
    text.push('\n');
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| CliError::Io(path.display().to_string(), e))
        }
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io("stdout".into(), e)),
    }
}

/// `report.json` -> `report.csv`.
pub fn csv_path(out: &Path) -> PathBuf {
    out.with_extension("csv")
}

/// Writes rows beside the JSON report; nothing is written without `--out`.
pub fn emit_csv<R: Serialize>(rows: &[R], out: Option<&Path>) -> Result<(), CliError> {
    let Some(out) = out else {
        return Ok(());
    };
    let mut w = csv::Writer::from_path(csv_path(out))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()
        .map_err(|e| CliError::Io(csv_path(out).display().to_string(), e))
}
