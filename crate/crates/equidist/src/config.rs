//! Validated run configuration shared by every command.

use std::path::PathBuf;

use equidist_core::Settings;
use serde::Serialize;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Svg,
    Csv,
    Json,
}

impl Format {
    pub const ALL: [Format; 3] = [Format::Svg, Format::Csv, Format::Json];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Compute,
    Branches,
    Verify,
    Css,
    Fixtures,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub input: Option<PathBuf>,
    pub lambdas: Vec<f64>,
    pub samples: usize,
    pub out: PathBuf,
    pub formats: Vec<Format>,
    pub seed: u64,
    /// Tolerance overrides in the order given.
    pub tol: Vec<(String, f64)>,
}

pub const MIN_SAMPLES: usize = 256;
pub const MAX_SAMPLES: usize = 65536;

pub fn parse_lambdas(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .ok()
                .filter(|l| l.is_finite())
                .ok_or_else(|| CliError::Invalid(format!("λ `{s}` is not a number")))
        })
        .collect()
}

pub fn parse_formats(text: &str) -> Result<Vec<Format>, CliError> {
    let mut out = Vec::new();
    for s in text.split(',').map(|s| s.trim().to_ascii_lowercase()).filter(|s| !s.is_empty()) {
        let f = match s.as_str() {
            "svg" => Format::Svg,
            "csv" => Format::Csv,
            "json" => Format::Json,
            _ => return Err(CliError::Invalid(format!("unknown format `{s}`"))),
        };
        if !out.contains(&f) {
            out.push(f);
        }
    }
    out.sort();
    Ok(out)
}

/// `key=val` pairs separated by commas.
pub fn parse_tolerances(text: &str) -> Result<Vec<(String, f64)>, CliError> {
    text.split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| {
            let (k, v) = s.split_once('=').ok_or_else(|| CliError::Invalid(format!("tolerance `{s}` is not key=val")))?;
            let v: f64 = v
                .trim()
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite() && *v > 0.0)
                .ok_or_else(|| CliError::Invalid(format!("tolerance `{s}` needs a positive number")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let n = self.samples;
        if !n.is_power_of_two() || !(MIN_SAMPLES..=MAX_SAMPLES).contains(&n) {
            return Err(CliError::Invalid(format!(
                "samples must be a power of two in [{MIN_SAMPLES}, {MAX_SAMPLES}], got {n}"
            )));
        }
        if matches!(self.command, Command::Compute | Command::Branches) {
            if self.command == Command::Compute && self.lambdas.is_empty() {
                return Err(CliError::Invalid("no λ given".into()));
            }
            if let Some(l) = self.lambdas.iter().find(|&&l| l == 0.0 || l == 1.0) {
                return Err(CliError::Invalid(format!("λ = {l} is the curve itself")));
            }
        }
        self.settings().map(|_| ())
    }

    pub fn settings(&self) -> Result<Settings, CliError> {
        let mut s = Settings::with_samples(self.samples);
        for (k, v) in &self.tol {
            s.tol.set(k, *v).map_err(|_| {
                CliError::Invalid(format!("unknown tolerance `{k}`; known: {}", equidist_core::Tolerances::KEYS.join(", ")))
            })?;
        }
        Ok(s)
    }

    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> RunConfig {
        RunConfig {
            command: Command::Compute,
            input: None,
            lambdas: vec![0.3],
            samples: 4096,
            out: PathBuf::from("out"),
            formats: Format::ALL.to_vec(),
            seed: 7,
            tol: Vec::new(),
        }
    }

    #[test]
    fn lists() {
        assert_eq!(parse_lambdas("0.3, 0.5,").unwrap(), [0.3, 0.5]);
        assert!(parse_lambdas("0.3,x").is_err());
        assert_eq!(parse_formats("json,SVG,json").unwrap(), [Format::Svg, Format::Json]);
        assert!(parse_formats("png").is_err());
        assert_eq!(parse_tolerances("pole=1e-6").unwrap(), [("pole".to_string(), 1e-6)]);
        assert!(parse_tolerances("pole").is_err());
        assert!(parse_tolerances("pole=-1").is_err());
    }

    #[test]
    fn samples_and_lambda_bounds() {
        assert!(config().validate().is_ok());
        assert!(RunConfig { samples: 1000, ..config() }.validate().is_err());
        assert!(RunConfig { samples: 128, ..config() }.validate().is_err());
        assert!(RunConfig { samples: 131072, ..config() }.validate().is_err());
        assert!(RunConfig { lambdas: vec![1.0], ..config() }.validate().is_err());
        assert!(RunConfig { tol: vec![("nope".into(), 1.0)], ..config() }.validate().is_err());
    }
}
