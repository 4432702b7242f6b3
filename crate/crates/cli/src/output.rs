//! Output sinks. Every CSV starts with `#`-prefixed metadata lines; JSON
//! documents carry the same metadata under `meta`.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub subcommand: String,
    pub config: Value,
    pub truncation: Option<usize>,
    pub convergent: Option<String>,
    pub seed: Option<u64>,
}

impl Meta {
    pub fn new(subcommand: &str, config: Value) -> Self {
        Self { subcommand: subcommand.into(), config, truncation: None, convergent: None, seed: None }
    }

    pub fn truncation(mut self, n: usize) -> Self {
        self.truncation = Some(n);
        self
    }

    pub fn convergent(mut self, c: Option<String>) -> Self {
        self.convergent = c;
        self
    }

    fn header(&self) -> String {
        let opt = |v: &Option<String>| v.clone().unwrap_or_else(|| "none".into());
        format!(
            "# revlab {}\n# config: {}\n# truncation N: {}\n# convergent: {}\n# seed: {}\n",
            self.subcommand,
            self.config,
            opt(&self.truncation.map(|n| n.to_string())),
            opt(&self.convergent),
            opt(&self.seed.map(|s| s.to_string())),
        )
    }
}

/// Accumulates a CSV body behind its metadata header.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(meta: &Meta, columns: &[&str]) -> Self {
        let mut text = meta.header();
        text.push_str(&columns.join(","));
        text.push('\n');
        Self { text }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn write(&self, out: Option<&Path>) -> io::Result<()> {
        emit(out, &self.text)
    }
}

/// Shortest decimal that reads back to the same `f64`.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

pub fn write_json(out: Option<&Path>, meta: &Meta, body: Value) -> io::Result<()> {
    let mut doc = body;
    if let Value::Object(map) = &mut doc {
        map.insert("meta".into(), json!(meta));
    }
    let mut text = serde_json::to_string_pretty(&doc).map_err(io::Error::other)?;
    text.push('\n');
    emit(out, &text)
}

fn emit(out: Option<&Path>, text: &str) -> io::Result<()> {
    match out {
        Some(p) => fs::write(p, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

pub fn path(p: &Option<PathBuf>) -> Option<&Path> {
    p.as_deref()
}
