//! Flat `key = value` configuration files, one entry per line, `#` comments.

use std::collections::BTreeMap;
use std::path::Path;

use crate::{Error, Result};

pub const KEYS: &[&str] = &[
    "case",
    "kernel",
    "rhs",
    "eps_q",
    "eps_c",
    "levels",
    "start_level",
    "surface_quad_order",
    "volume_quad_order",
    "deterministic",
    "allow_support_leak",
    "out",
];

pub fn parse(text: &str, file: &Path) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let syntax = |message: String| Error::ConfigSyntax {
            file: file.to_path_buf(),
            line: i + 1,
            message,
        };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| syntax(format!("expected 'key = value', got '{line}'")))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(syntax(format!("unknown key '{key}'")));
        }
        out.insert(key.to_string(), value.trim().to_string());
    }
    Ok(out)
}

pub fn read(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse(&text, path)
}
