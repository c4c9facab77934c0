use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::{Format, RunConfig};
use crate::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// A measured value with no assertion attached.
    Info,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Self::Pass
        } else {
            Self::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
            Self::Info => "info",
        }
    }
}

/// One named number with its tolerance or error bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
}

impl ResultRow {
    pub fn new(name: impl Into<String>, value: f64, tolerance: f64, verdict: Verdict) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            verdict,
        }
    }

    pub fn info(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self::new(name, value, tolerance, Verdict::Info)
    }

    /// `value` must lie within `tolerance` of `expected`.
    pub fn close(name: impl Into<String>, value: f64, expected: f64, tolerance: f64) -> Self {
        Self::new(
            name,
            value,
            tolerance,
            Verdict::from_bool((value - expected).abs() <= tolerance),
        )
    }

    pub fn check(name: impl Into<String>, value: f64, tolerance: f64, ok: bool) -> Self {
        Self::new(name, value, tolerance, Verdict::from_bool(ok))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub config: RunConfig,
    pub results: Vec<ResultRow>,
    pub duration_ms: u64,
    pub version: String,
}

impl Report {
    pub fn new(
        command: &str,
        config: &RunConfig,
        results: Vec<ResultRow>,
        duration_ms: u64,
    ) -> Self {
        Self {
            command: command.to_string(),
            config: config.clone(),
            results,
            duration_ms,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.verdict != Verdict::Fail)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Config(format!("serializing report: {e}")))?;
        s.push('\n');
        Ok(s)
    }

    /// Rows `name,value,tolerance,verdict`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| CliError::Config(format!("writing CSV: {e}"));
        w.write_record(["name", "value", "tolerance", "verdict"])
            .map_err(csv_err)?;
        for r in &self.results {
            w.write_record([
                r.name.clone(),
                r.value.to_string(),
                r.tolerance.to_string(),
                r.verdict.as_str().to_string(),
            ])
            .map_err(csv_err)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| CliError::Config(format!("writing CSV: {e}")))?;
        Ok(String::from_utf8(bytes).expect("CSV of UTF-8 fields"))
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}

/// Writes `contents` to a temporary file beside `path`, then renames it.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let wrap = |source: std::io::Error| CliError::Output {
        path: path.display().to_string(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(wrap)?;
    tmp.write_all(contents).map_err(wrap)?;
    tmp.as_file().sync_all().map_err(wrap)?;
    tmp.persist(path).map_err(|e| wrap(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        Report::new(
            "verify-chain",
            &RunConfig::default(),
            vec![
                ResultRow::close(
                    "(1) vol(B(Σ,r)) <= 2π²",
                    19.739208802178716,
                    19.739208802178716,
                    1e-6,
                ),
                ResultRow::info("tiny", 1.2345678901234567e-300, 0.0),
            ],
            12,
        )
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let r = sample();
        let back: Report = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn csv_quotes_commas() {
        let csv = sample().to_csv().unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("name,value,tolerance,verdict"));
        assert!(lines
            .next()
            .unwrap()
            .starts_with("\"(1) vol(B(Σ,r)) <= 2π²\",19.739208802178716,"));
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.json");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert!(write_atomic(&dir.path().join("missing/r.json"), b"x").is_err());
    }
}
