//! Flat `key = value` config files merged underneath the command line.
//!
//! Keys are long flag names without the dashes (`r-max = 60`). The special key
//! `command` names the subcommand when the command line does not. Flags given
//! on the command line win over the file.

use std::collections::BTreeMap;
use std::path::Path;

pub const SUBCOMMANDS: [&str; 10] = [
    "vortex",
    "zero-modes",
    "eigenfn",
    "measure",
    "transform",
    "evolve",
    "decay-report",
    "lt-bound",
    "eigenvalues",
    "reproduce-paper",
];

/// Parses `key = value` lines; `#` starts a comment, blank lines are ignored.
pub fn parse(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key = value, got '{raw}'", i + 1))?;
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(format!("line {}: bad key '{}'", i + 1, k.trim()));
        }
        if out.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(format!("line {}: duplicate key '{key}'", i + 1));
        }
    }
    Ok(out)
}

/// Finds `--config PATH` or `--config=PATH` in the raw arguments.
fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

fn given_on_command_line(args: &[String], key: &str) -> bool {
    let flag = format!("--{key}");
    let eq = format!("--{key}=");
    args.iter().any(|a| *a == flag || a.starts_with(&eq))
}

/// Returns the argument vector with the config file's settings appended for
/// every flag the command line leaves unset.
pub fn merge(args: Vec<String>) -> Result<Vec<String>, String> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(Path::new(&path)).map_err(|e| format!("cannot read config file '{path}': {e}"))?;
    let mut map = parse(&text)?;
    let mut out = args.clone();
    let command = map.remove("command");
    let has_command = args.iter().skip(1).any(|a| SUBCOMMANDS.contains(&a.as_str()));
    if !has_command {
        match command {
            Some(c) if SUBCOMMANDS.contains(&c.as_str()) => out.insert(1, c),
            Some(c) => return Err(format!("config file names unknown command '{c}'")),
            None => {}
        }
    }
    for (key, value) in map {
        if key == "config" || given_on_command_line(&args, &key) {
            continue;
        }
        match value.as_str() {
            "true" => out.push(format!("--{key}")),
            "false" => {}
            _ => {
                out.push(format!("--{key}"));
                out.push(value);
            }
        }
    }
    Ok(out)
}
