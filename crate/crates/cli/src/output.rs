use std::fs;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};

pub const TOOL: &str = "distlaw";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Artifacts of one command: every file carries the tool version and the
/// full configuration.
pub struct Output {
    dir: Option<PathBuf>,
    stem: &'static str,
    config: Value,
}

impl Output {
    pub fn new(command: &'static str, dir: Option<PathBuf>, args: &impl Serialize) -> Self {
        let mut config = serde_json::to_value(args).expect("arguments serialise");
        if let Value::Object(map) = &mut config {
            map.insert("command".into(), Value::String(command.into()));
        }
        Output { dir, stem: command, config }
    }

    /// Tool, version and configuration, for formats without comment lines.
    pub fn meta(&self) -> Value {
        json!({ "tool": TOOL, "version": VERSION, "config": self.config })
    }

    pub fn has_dir(&self) -> bool {
        self.dir.is_some()
    }

    pub fn csv(&self, header: &[&str], rows: &[Vec<String>]) -> String {
        let mut out = format!("# {TOOL} {VERSION}\n# config {}\n", self.config);
        out.push_str(&header.join(","));
        out.push('\n');
        for row in rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn envelope(&self, results: &impl Serialize) -> String {
        let v = json!({
            "tool": TOOL,
            "version": VERSION,
            "config": self.config,
            "results": results,
        });
        let mut s = serde_json::to_string_pretty(&v).expect("results serialise");
        s.push('\n');
        s
    }

    /// Write `<dir>/<stem><suffix>`; a no-op without an output directory.
    pub fn write(&self, suffix: &str, content: &str) -> CliResult<()> {
        let Some(dir) = &self.dir else { return Ok(()) };
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        let path = dir.join(format!("{}{suffix}", self.stem));
        fs::write(&path, content).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }
}

/// Shortest round-trip rendering, so reruns print identical text.
pub fn num(x: f64) -> String {
    format!("{x}")
}
