//! Machine-readable run reports: JSON schema, CSV rendering, atomic output.

use serde::Serialize;
use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub name: String,
    /// Stable identifier of the identity this check exercises.
    pub anchor: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRecord {
    pub fn new(name: &str, anchor: &str, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            anchor: anchor.to_string(),
            residual,
            tolerance,
            pass: residual <= tolerance,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Environment {
    pub seed: u64,
    pub max_index: usize,
    pub tail_tolerance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
    pub environment: Environment,
}

impl Report {
    pub fn assemble(checks: Vec<CheckRecord>, environment: Environment) -> Self {
        let passed = checks.iter().filter(|c| c.pass).count();
        let summary = Summary {
            total: checks.len(),
            passed,
            failed: checks.len() - passed,
        };
        Self {
            checks,
            summary,
            environment,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,anchor,residual,tolerance,pass\n");
        for c in &self.checks {
            out.push_str(&format!(
                "{},{},{:e},{:e},{}\n",
                c.name, c.anchor, c.residual, c.tolerance, c.pass
            ));
        }
        out
    }

    pub fn render(&self, format: &str) -> Result<String, String> {
        match format {
            "json" => Ok(self.to_json()),
            "csv" => Ok(self.to_csv()),
            other => Err(format!("config error: unknown format {other:?}")),
        }
    }
}

/// Write via a temporary sibling then rename, so readers never observe a
/// half-written report.
pub fn write_atomically(path: &Path, contents: &str) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)
}
