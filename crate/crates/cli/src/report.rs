use std::collections::BTreeSet;
use std::io::Write;

use pomlab_core::{ElementId, Permutation};
use serde_json::{json, Map, Value};

pub const SCHEMA: &str = "pom-lab/1";

/// Output of one command: readable lines plus the same facts as JSON.
pub struct Report {
    command: &'static str,
    inputs: Map<String, Value>,
    result: Map<String, Value>,
    certificates: Map<String, Value>,
    stats: Map<String, Value>,
    lines: Vec<String>,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Report {
            command,
            inputs: Map::new(),
            result: Map::new(),
            certificates: Map::new(),
            stats: Map::new(),
            lines: Vec::new(),
        }
    }

    pub fn input(&mut self, key: &str, value: impl Into<Value>) {
        self.inputs.insert(key.into(), value.into());
    }

    pub fn result(&mut self, key: &str, value: impl Into<Value>) {
        self.result.insert(key.into(), value.into());
    }

    pub fn certificate(&mut self, key: &str, value: impl Into<Value>) {
        self.certificates.insert(key.into(), value.into());
    }

    pub fn stat(&mut self, key: &str, value: impl Into<Value>) {
        self.stats.insert(key.into(), value.into());
    }

    pub fn line(&mut self, text: impl Into<String>) {
        self.lines.push(text.into());
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "command": self.command,
            "inputs": self.inputs,
            "result": self.result,
            "certificates": self.certificates,
            "stats": self.stats,
        })
    }

    /// A closed stdout (e.g. piping into `head`) is not an error.
    pub fn print(&self, as_json: bool) {
        let mut out = std::io::stdout().lock();
        let _ = if as_json {
            writeln!(out, "{}", serde_json::to_string_pretty(&self.to_json()).unwrap())
        } else {
            self.lines.iter().try_for_each(|l| writeln!(out, "{l}"))
        };
    }
}

pub fn set_text(set: &BTreeSet<ElementId>) -> String {
    let items: Vec<&str> = set.iter().map(|e| e.as_str()).collect();
    format!("{{{}}}", items.join(", "))
}

pub fn set_json(set: &BTreeSet<ElementId>) -> Value {
    set.iter().map(|e| e.as_str()).collect::<Vec<_>>().into()
}

pub fn rows_one_based(rows: &[usize]) -> Vec<usize> {
    rows.iter().map(|r| r + 1).collect()
}

pub fn perm_text(pi: &Permutation) -> String {
    let rows: Vec<String> = pi.order().iter().map(|r| format!("r{}", r + 1)).collect();
    format!("({})", rows.join(", "))
}

pub fn perm_json(pi: &Permutation) -> Value {
    rows_one_based(pi.order()).into()
}

/// Per-row 1-based columns, `null` for unassigned rows.
pub fn cols_json(cols: &[Option<usize>]) -> Value {
    cols.iter().map(|c| c.map(|c| c + 1)).collect::<Vec<_>>().into()
}
