//! Numerical knobs shared by every stage of the pipeline.

use core::f64::consts::PI;

/// Genericity and numerical tolerances.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct Tolerances {
    /// Smallest admissible `|f'|`.
    pub regularity: f64,
    /// Smallest admissible `|φ''|` at an extremum of the angle function.
    pub extremum: f64,
    /// Smallest admissible angular separation (radians) between the tangents
    /// of two extrema.
    pub parallel: f64,
    /// Two points of the parallel set closer than this (in parameter) are a
    /// non-generic tangency.
    pub coincidence: f64,
    /// Bisection width for inflexion and cusp roots.
    pub root_width: f64,
    /// A `|κ_a + κ̃_b|` below this marks a pole of the CSS.
    pub pole: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            regularity: 1e-8,
            extremum: 1e-6,
            parallel: 1e-6,
            coincidence: 1e-9,
            root_width: 1e-10,
            pole: 1e-8,
        }
    }
}

impl Tolerances {
    /// Overrides one tolerance by name.
    pub fn set(&mut self, key: &str, value: f64) -> Result<(), UnknownTolerance> {
        let slot = match key {
            "regularity" => &mut self.regularity,
            "extremum" => &mut self.extremum,
            "parallel" => &mut self.parallel,
            "coincidence" => &mut self.coincidence,
            "root_width" => &mut self.root_width,
            "pole" => &mut self.pole,
            _ => return Err(UnknownTolerance),
        };
        *slot = value;
        Ok(())
    }

    pub const KEYS: [&'static str; 6] = [
        "regularity",
        "extremum",
        "parallel",
        "coincidence",
        "root_width",
        "pole",
    ];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unknown tolerance key")]
pub struct UnknownTolerance;

/// Sampling resolution and step control.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct Settings {
    /// Base number of samples along `[0, 2π)`. Continuation steps in the
    /// curve parameter never exceed `2π / samples`.
    pub samples: usize,
    /// Largest step in the angle parameter of a pairing.
    pub max_angle_step: f64,
    pub tol: Tolerances,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            samples: 4096,
            max_angle_step: PI / 256.0,
            tol: Tolerances::default(),
        }
    }
}

impl Settings {
    pub fn with_samples(samples: usize) -> Self {
        Settings {
            samples,
            ..Settings::default()
        }
    }

    pub fn param_step(&self) -> f64 {
        core::f64::consts::TAU / self.samples as f64
    }
}
