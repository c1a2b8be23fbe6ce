//! The JSON report every subcommand writes.

use std::path::Path;

use serde::Serialize;

use crate::systems::Expected;

pub const SCHEMA_VERSION: u32 = 1;

/// One named pass/fail check with a human-readable detail line.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub command: String,
    pub config: serde_json::Value,
    pub pass: bool,
    pub checks: Vec<Check>,
    pub results: serde_json::Value,
    /// Expected values the checks compare against, with where they come from.
    pub provenance: Vec<Expected>,
}

impl Report {
    pub fn new(command: &str, config: serde_json::Value) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            config,
            pass: true,
            checks: Vec::new(),
            results: serde_json::Value::Null,
            provenance: Vec::new(),
        }
    }

    pub fn check(&mut self, c: Check) {
        self.pass &= c.pass;
        self.checks.push(c);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is serialisable");
        s.push('\n');
        s
    }

    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), self.to_json())
    }

    /// One line per check, for the terminal.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = if c.pass { "PASS" } else { "FAIL" };
            out.push_str(&format!("[{tag}] {}: {}\n", c.name, c.detail));
        }
        let verdict = if self.pass { "all checks pass" } else { "some checks failed" };
        out.push_str(&format!("{}: {verdict}\n", self.command));
        out
    }
}
