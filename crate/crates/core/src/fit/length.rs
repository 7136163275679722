//! One-parameter cavity-length fit against a measured transmission spectrum.

use crate::cavity::fabry_perot;
use crate::error::{Error, Result};
use crate::fit::minimize::{brent, grid_then_brent};
use crate::fit::{FitParameter, FitResult};
use crate::materials::{DispersiveMaterial, MetalMirror};
use crate::modes::{alpha_from_fsr, measure_fsr};
use crate::spectrum::{uniform_grid, Spectrum};
use crate::tmm::{transmission_spectrum, Polarization, WindowCorrection};

pub const LENGTH_TOL: f64 = 1e-8;
/// Half-width of the initial three-point probe, relative to the start length.
const PROBE: f64 = 1e-7;
/// Relative half-range and absolute step (µm) of the fallback scan.
const SCAN_SPAN: f64 = 0.25;
const SCAN_STEP_UM: f64 = 0.02;
/// Window used to report the free spectral range, cm⁻¹.
pub const FSR_WINDOW: (f64, f64) = (5000.0, 7000.0);

#[derive(Debug, Clone, PartialEq)]
pub struct LengthFit {
    pub length_um: f64,
    pub fsr: f64,
    pub alpha: f64,
    pub result: FitResult,
}

pub fn simulate_cavity(
    fill: &DispersiveMaterial,
    mirror: &MetalMirror,
    window: &DispersiveMaterial,
    correction: &WindowCorrection,
    length_um: f64,
    grid: &[f64],
) -> Result<Spectrum> {
    let stack = fabry_perot(fill, length_um, mirror, window)?.with_window(correction.clone())?;
    transmission_spectrum(&stack, grid, 0.0, Polarization::Unpolarized)
}

/// Least-squares cavity length. A start already at the optimum (within
/// the probe width) returns after three evaluations; otherwise the length is
/// scanned over ±25% and refined by Brent's method. The result reports the
/// simulated FSR in 5000–7000 cm⁻¹ and `α = (1/(2 n_b FSR)) / L`.
pub fn fit_cavity_length(
    measured: &Spectrum,
    fill: &DispersiveMaterial,
    mirror: &MetalMirror,
    window: &DispersiveMaterial,
    correction: &WindowCorrection,
    init_length_um: f64,
) -> Result<LengthFit> {
    if !(init_length_um > 0.0) || !init_length_um.is_finite() {
        return Err(Error::Domain(format!("initial length must be > 0, got {init_length_um}")));
    }
    if measured.len() < 5 {
        return Err(Error::InsufficientData("measured spectrum needs at least 5 samples".into()));
    }
    let n_b = fill
        .background_index()
        .ok_or_else(|| Error::Domain("fill material has no background index".into()))?;
    let grid = measured.wavenumbers();
    let target = measured.values();
    let objective = |l: f64| -> f64 {
        if !(l > 0.0) {
            return f64::INFINITY;
        }
        match simulate_cavity(fill, mirror, window, correction, l, grid) {
            Ok(s) => s.values().iter().zip(target).map(|(a, b)| (a - b).powi(2)).sum(),
            Err(_) => f64::INFINITY,
        }
    };
    // Probe errors eagerly so configuration problems are reported.
    simulate_cavity(fill, mirror, window, correction, init_length_um, grid)?;

    let h = PROBE * init_length_um;
    let (f_lo, f_0, f_hi) = (objective(init_length_um - h), objective(init_length_um), objective(init_length_um + h));
    let mut diagnostics = Vec::new();
    let m = if f_0 <= f_lo && f_0 <= f_hi {
        diagnostics.push("start length is a local optimum within the probe width".to_string());
        super::minimize::Min1d {
            x: init_length_um,
            fx: f_0,
            evaluations: 3,
            converged: true,
        }
    } else {
        let lo = init_length_um * (1.0 - SCAN_SPAN);
        let hi = init_length_um * (1.0 + SCAN_SPAN);
        let points = ((hi - lo) / SCAN_STEP_UM).ceil() as usize + 1;
        let mut m = grid_then_brent(objective, lo, hi, points, LENGTH_TOL)?;
        m.evaluations += 3;
        if !m.converged {
            // One more Brent pass from the current best.
            let d = SCAN_STEP_UM;
            let again = brent(objective, m.x - d, m.x, m.x + d, LENGTH_TOL, 500);
            if again.fx <= m.fx {
                m = super::minimize::Min1d {
                    evaluations: m.evaluations + again.evaluations,
                    ..again
                };
            }
        }
        m
    };

    let fsr_grid = uniform_grid(FSR_WINDOW.0, FSR_WINDOW.1, 0.5)?;
    let fsr_spec = simulate_cavity(fill, mirror, window, correction, m.x, &fsr_grid)?;
    let fsr = measure_fsr(&fsr_spec, FSR_WINDOW.0, FSR_WINDOW.1)?;
    let alpha = alpha_from_fsr(fsr.fsr, n_b, m.x)?;
    Ok(LengthFit {
        length_um: m.x,
        fsr: fsr.fsr,
        alpha,
        result: FitResult {
            parameters: vec![
                FitParameter::new("length", m.x, "um"),
                FitParameter::new("fsr", fsr.fsr, "cm-1"),
                FitParameter::new("alpha", alpha, "1"),
            ],
            chi2: m.fx,
            model: None,
            converged: m.converged && m.fx.is_finite(),
            evaluations: m.evaluations,
            diagnostics,
        },
    })
}
