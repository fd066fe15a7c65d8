use serde::de::DeserializeOwned;
use serde::Serialize;
use toml::{Table, Value};

use crate::{CliError, Result};

/// Sections a config file may contain.
pub const SECTIONS: [&str; 8] = ["gen-task", "translate", "search", "gd2", "gd-soft", "sq", "gradacc", "tfcheck"];
const SQ_SECTIONS: [&str; 3] = ["census", "decay", "uniformity"];

pub fn parse_file(text: &str) -> Result<Table> {
    let table: Table = text.parse().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
    for (key, value) in &table {
        if !SECTIONS.contains(&key.as_str()) {
            return Err(CliError::Config(format!("unknown section [{key}]")));
        }
        if key == "sq" {
            let sub = value.as_table().ok_or_else(|| CliError::Config("[sq] must be a table".into()))?;
            if let Some(bad) = sub.keys().find(|k| !SQ_SECTIONS.contains(&k.as_str())) {
                return Err(CliError::Config(format!("unknown section [sq.{bad}]")));
            }
        }
    }
    Ok(table)
}

/// File values for `path`, overridden by every flag that was given, then
/// filled from the config type's defaults. Unknown keys are rejected by the
/// config types themselves.
pub fn resolve<C: DeserializeOwned>(file: Option<&Table>, path: &[&str], flags: &impl Serialize) -> Result<C> {
    let mut merged = Table::new();
    if let Some(file) = file {
        let mut node = Some(file);
        for key in path {
            node = match node.and_then(|t| t.get(*key)) {
                Some(Value::Table(sub)) => Some(sub),
                Some(_) => return Err(CliError::Config(format!("{key} must be a table"))),
                None => None,
            };
        }
        if let Some(t) = node {
            merged = t.clone();
        }
    }
    let given = Value::try_from(flags).map_err(|e| CliError::Config(e.to_string()))?;
    if let Value::Table(given) = given {
        merged.extend(given);
    }
    Value::Table(merged).try_into().map_err(|e: toml::de::Error| CliError::Config(format!("[{}] {e}", path.join("."))))
}

/// `# key = value` lines for the CSV header.
pub fn header(command: &str, config: &impl Serialize) -> String {
    let mut out = format!("# mlt {} {command}\n", env!("CARGO_PKG_VERSION"));
    let body = toml::to_string(config).expect("configs serialize");
    for line in body.lines().filter(|l| !l.is_empty()) {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out
}
