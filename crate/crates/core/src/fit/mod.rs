//! Parameter estimation: peak extraction, material and cavity-length fits,
//! and the single-parameter Rabi fit of polariton dispersions.

pub mod dispersion;
pub mod length;
pub mod material;
pub mod minimize;
pub mod peaks;

use std::fmt::Write as _;

use crate::hopfield::Model;

pub use dispersion::{chi2, fit_rabi, residuals, DispersionDataset, Observation};
pub use length::{fit_cavity_length, LengthFit};
pub use material::{fit_material, MaterialFit, MaterialFitSetup};
pub use peaks::{detect_peaks, Peak};

#[derive(Debug, Clone, PartialEq)]
pub struct FitParameter {
    pub name: String,
    pub value: f64,
    pub unit: String,
}

impl FitParameter {
    pub fn new(name: impl Into<String>, value: f64, unit: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            value,
            unit: unit.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub parameters: Vec<FitParameter>,
    pub chi2: f64,
    pub model: Option<Model>,
    pub converged: bool,
    pub evaluations: usize,
    pub diagnostics: Vec<String>,
}

impl FitResult {
    pub fn parameter(&self, name: &str) -> Option<f64> {
        self.parameters.iter().find(|p| p.name == name).map(|p| p.value)
    }

    /// Plain `key = value` report.
    pub fn report(&self) -> String {
        let mut s = String::new();
        if let Some(m) = self.model {
            let _ = writeln!(s, "model = {}", m.name());
        }
        for p in &self.parameters {
            let _ = writeln!(s, "{} = {:.10} {}", p.name, p.value, p.unit);
        }
        let _ = writeln!(s, "chi2 = {:.10e}", self.chi2);
        let _ = writeln!(s, "evaluations = {}", self.evaluations);
        let _ = writeln!(s, "converged = {}", self.converged);
        for d in &self.diagnostics {
            let _ = writeln!(s, "note = {d}");
        }
        s
    }
}
