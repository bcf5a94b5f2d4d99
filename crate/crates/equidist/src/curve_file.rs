//! Curve files: UTF-8 JSON objects with the coefficient arrays `xc`, `xs`,
//! `yc`, `ys` and an optional `label`.

use std::fs;
use std::path::Path;

use equidist_core::FourierCurve;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveFile {
    pub xc: Vec<f64>,
    pub xs: Vec<f64>,
    pub yc: Vec<f64>,
    pub ys: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl CurveFile {
    pub fn into_curve(self) -> Result<FourierCurve, CliError> {
        let c = FourierCurve::new(self.xc, self.xs, self.yc, self.ys).map_err(|e| CliError::Invalid(e.to_string()))?;
        Ok(match self.label {
            Some(l) => c.with_label(l),
            None => c,
        })
    }
}

impl From<&FourierCurve> for CurveFile {
    fn from(c: &FourierCurve) -> Self {
        CurveFile { xc: c.xc.clone(), xs: c.xs.clone(), yc: c.yc.clone(), ys: c.ys.clone(), label: c.label.clone() }
    }
}

pub fn parse_curve(text: &str) -> Result<FourierCurve, CliError> {
    let file: CurveFile = serde_json::from_str(text).map_err(|e| CliError::Invalid(format!("curve file: {e}")))?;
    file.into_curve()
}

pub fn to_json(curve: &FourierCurve) -> String {
    let mut s = serde_json::to_string_pretty(&CurveFile::from(curve)).expect("curve serializes");
    s.push('\n');
    s
}

/// Reads a curve; a file without a label is labelled by its stem.
pub fn read_curve(path: &Path) -> Result<FourierCurve, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let curve = parse_curve(&text)?;
    Ok(match (&curve.label, path.file_stem()) {
        (None, Some(stem)) => curve.with_label(stem.to_string_lossy()),
        _ => curve,
    })
}

pub fn write_curve(path: &Path, curve: &FourierCurve) -> Result<(), CliError> {
    fs::write(path, to_json(curve)).map_err(|e| CliError::io(path, e))
}
