//! Flat key-value run configuration.
//!
//! A config file is TOML with top-level keys only:
//!
//! ```toml
//! surface = "rotation_torus:0.5"   # family[:p1,p2,...] or grid:PATH
//! pair = "hopf"                    # hopf | perturbed_hopf:amp,seed[,order] | knot_axis:p,q,a | unlinked_circles:rho
//! set = "point"                    # point | small_circle[:rho,m] | hopf_circle[:m] | fourier_loop[:m]
//! family = "perturbed_hopf:0.05,3" # perturbed_hopf[:amp,order] | knot_axis:p,q,a | hopf
//! radius = 0.7
//! level = 0.3
//! resolution = 64
//! grid = 256
//! n_t = 32
//! n_pairs = 1000
//! seed = 42
//! format = "json"
//! out = "report.json"
//! trajectory = "search.csv"
//! degrees = false
//! ```
//!
//! Command-line flags override file values. Angles are radians unless
//! `degrees` is set, in which case `radius` and `level` are converted.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{CliError, Result};

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(format!("unknown format `{other}`, expected json or csv")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Json => "json",
            Self::Csv => "csv",
        })
    }
}

/// Keys accepted in a config file or on the command line; all optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigInput {
    pub surface: Option<String>,
    pub pair: Option<String>,
    pub set: Option<String>,
    pub family: Option<String>,
    pub radius: Option<f64>,
    pub level: Option<f64>,
    pub resolution: Option<usize>,
    pub grid: Option<usize>,
    pub n_t: Option<usize>,
    pub n_pairs: Option<usize>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub trajectory: Option<PathBuf>,
    pub degrees: Option<bool>,
}

impl ConfigInput {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Values set in `over` replace those in `self`.
    pub fn merge(self, over: ConfigInput) -> Self {
        Self {
            surface: over.surface.or(self.surface),
            pair: over.pair.or(self.pair),
            set: over.set.or(self.set),
            family: over.family.or(self.family),
            radius: over.radius.or(self.radius),
            level: over.level.or(self.level),
            resolution: over.resolution.or(self.resolution),
            grid: over.grid.or(self.grid),
            n_t: over.n_t.or(self.n_t),
            n_pairs: over.n_pairs.or(self.n_pairs),
            seed: over.seed.or(self.seed),
            format: over.format.or(self.format),
            out: over.out.or(self.out),
            trajectory: over.trajectory.or(self.trajectory),
            degrees: over.degrees.or(self.degrees),
        }
    }
}

/// Fully resolved configuration, echoed in every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub surface: String,
    pub pair: String,
    pub set: String,
    pub family: String,
    /// Radians.
    pub radius: Option<f64>,
    /// Radians.
    pub level: Option<f64>,
    pub resolution: Option<usize>,
    pub grid: Option<usize>,
    pub n_t: usize,
    pub n_pairs: usize,
    pub seed: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub trajectory: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        ConfigInput::default()
            .resolve()
            .expect("defaults are valid")
    }
}

fn positive_angle(name: &str, x: f64) -> Result<f64> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(CliError::Config(format!(
            "{name} must be a positive finite angle, got {x}"
        )))
    }
}

impl ConfigInput {
    /// Fills defaults, converts degrees and checks ranges that do not depend
    /// on the command.
    pub fn resolve(self) -> Result<RunConfig> {
        let scale = if self.degrees.unwrap_or(false) {
            std::f64::consts::PI / 180.0
        } else {
            1.0
        };
        let radius = self
            .radius
            .map(|r| positive_angle("radius", r * scale))
            .transpose()?;
        let level = self
            .level
            .map(|l| positive_angle("level", l * scale))
            .transpose()?;
        for (name, v, min) in [("resolution", self.resolution, 8), ("grid", self.grid, 8)] {
            if let Some(v) = v {
                if v < min {
                    return Err(CliError::Config(format!(
                        "{name} must be at least {min}, got {v}"
                    )));
                }
            }
        }
        let n_t = self.n_t.unwrap_or(spherelab::tubes::DEFAULT_NT);
        if n_t < 4 {
            return Err(CliError::Config(format!(
                "n_t must be at least 4, got {n_t}"
            )));
        }
        let n_pairs = self.n_pairs.unwrap_or(1000);
        if n_pairs == 0 {
            return Err(CliError::Config("n_pairs must be positive".into()));
        }
        Ok(RunConfig {
            surface: self.surface.unwrap_or_else(|| "clifford".into()),
            pair: self.pair.unwrap_or_else(|| "hopf".into()),
            set: self.set.unwrap_or_else(|| "point".into()),
            family: self.family.unwrap_or_else(|| "perturbed_hopf".into()),
            radius,
            level,
            resolution: self.resolution,
            grid: self.grid,
            n_t,
            n_pairs,
            seed: self.seed.unwrap_or(DEFAULT_SEED),
            format: self.format.unwrap_or_default(),
            out: self.out,
            trajectory: self.trajectory,
        })
    }
}

/// `name[:p1,p2,...]` split into the name and numeric parameters.
pub fn parse_spec(spec: &str) -> Result<(String, Vec<f64>)> {
    let (name, rest) = match spec.split_once(':') {
        Some((n, r)) => (n.trim(), r.trim()),
        None => (spec.trim(), ""),
    };
    if name.is_empty() {
        return Err(CliError::Config(format!("empty family name in `{spec}`")));
    }
    let params = if rest.is_empty() {
        Vec::new()
    } else {
        rest.split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|e| CliError::Config(format!("parameter `{p}` in `{spec}`: {e}")))
            })
            .collect::<Result<_>>()?
    };
    Ok((name.to_string(), params))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file =
            ConfigInput::from_toml("radius = 0.5\nseed = 7\nsurface = \"clifford\"").unwrap();
        let flags = ConfigInput {
            radius: Some(0.6),
            ..Default::default()
        };
        let c = file.merge(flags).resolve().unwrap();
        assert_eq!(c.radius, Some(0.6));
        assert_eq!(c.seed, 7);
    }

    #[test]
    fn unknown_keys_and_degrees() {
        assert!(ConfigInput::from_toml("radiuss = 1").is_err());
        let c = ConfigInput::from_toml("radius = 45\ndegrees = true")
            .unwrap()
            .resolve()
            .unwrap();
        assert!((c.radius.unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn specs() {
        assert_eq!(
            parse_spec("rotation_torus:0.5").unwrap(),
            ("rotation_torus".into(), vec![0.5])
        );
        assert_eq!(parse_spec("hopf").unwrap(), ("hopf".into(), vec![]));
        assert!(parse_spec("x:1,a").is_err());
    }
}
