//! Multi-Lorentzian fit of a measured flow-cell transmission spectrum.

use crate::cavity::flow_cell;
use crate::error::{Error, Result};
use crate::fit::minimize::{nelder_mead_bounded, NelderMeadOptions};
use crate::fit::{FitParameter, FitResult};
use crate::materials::{DispersiveMaterial, LorentzOscillator, LorentzSet};
use crate::spectrum::Spectrum;
use crate::tmm::{transmission_spectrum, Polarization, WindowCorrection};

#[derive(Debug, Clone, PartialEq)]
pub struct MaterialFitSetup {
    pub window: DispersiveMaterial,
    pub window_correction: WindowCorrection,
    pub init: LorentzSet,
    pub init_cell_length_um: f64,
    /// `[n_b, l_cell, f₁, k0₁, γ₁, f₂, …]`.
    pub bounds: Vec<(f64, f64)>,
    pub options: NelderMeadOptions,
}

impl MaterialFitSetup {
    /// Bounds around the initial guess: `n_b ∈ [1, 2 n_b]`, `l_cell` ±50%,
    /// `f ∈ [0, 4f]`, `k0 ± 5γ` (at least ±10 cm⁻¹), `γ ∈ [γ/10, 10γ]`.
    pub fn default_bounds(init: &LorentzSet, l_cell: f64) -> Vec<(f64, f64)> {
        let mut b = vec![(1.0, 2.0 * init.n_b.max(1.0)), (0.5 * l_cell, 1.5 * l_cell)];
        for o in &init.oscillators {
            let dk = (5.0 * o.gamma).max(10.0).min(0.5 * o.k0);
            b.push((0.0, 4.0 * o.f.max(1.0)));
            b.push((o.k0 - dk, o.k0 + dk));
            b.push((0.1 * o.gamma, 10.0 * o.gamma));
        }
        b
    }

    pub fn new(window: DispersiveMaterial, init: LorentzSet, init_cell_length_um: f64) -> Self {
        let bounds = Self::default_bounds(&init, init_cell_length_um);
        Self {
            window,
            window_correction: WindowCorrection::default(),
            init,
            init_cell_length_um,
            bounds,
            options: NelderMeadOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaterialFit {
    pub material: LorentzSet,
    pub cell_length_um: f64,
    pub result: FitResult,
}

fn unpack(x: &[f64]) -> (LorentzSet, f64) {
    let oscillators = x[2..]
        .chunks(3)
        .map(|c| LorentzOscillator {
            f: c[0],
            k0: c[1],
            gamma: c[2],
        })
        .collect();
    (
        LorentzSet {
            n_b: x[0],
            oscillators,
        },
        x[1],
    )
}

/// Simulated transmittance of the cell on the measured grid.
pub fn simulate_cell(
    set: &LorentzSet,
    l_cell: f64,
    window: &DispersiveMaterial,
    correction: &WindowCorrection,
    grid: &[f64],
) -> Result<Spectrum> {
    let stack = flow_cell(&DispersiveMaterial::Lorentz(set.clone()), l_cell, window)?.with_window(correction.clone())?;
    transmission_spectrum(&stack, grid, 0.0, Polarization::Unpolarized)
}

/// Least-squares fit of `n_b`, the cell length and every oscillator to the
/// measured transmittance. A fit that misses its tolerances is returned with
/// `converged = false` and the best parameters found.
pub fn fit_material(measured: &Spectrum, setup: &MaterialFitSetup) -> Result<MaterialFit> {
    let n_osc = setup.init.oscillators.len();
    if n_osc == 0 {
        return Err(Error::Domain("material fit needs at least one oscillator".into()));
    }
    setup.init.validate()?;
    if setup.bounds.len() != 2 + 3 * n_osc {
        return Err(Error::invariant(
            "bounds",
            format!("expected {} entries, got {}", 2 + 3 * n_osc, setup.bounds.len()),
        ));
    }
    for (i, &(lo, _)) in setup.bounds.iter().enumerate() {
        let positive = i == 1 || (i >= 2 && (i - 2) % 3 != 0);
        if positive && !(lo > 0.0) {
            return Err(Error::invariant(format!("bounds[{i}]"), "lower bound must be > 0"));
        }
    }
    if setup.bounds[0].0 < 1.0 {
        return Err(Error::invariant("bounds[0]", "n_b lower bound must be >= 1"));
    }
    if measured.len() < 5 {
        return Err(Error::InsufficientData("measured spectrum needs at least 5 samples".into()));
    }
    let grid = measured.wavenumbers();
    let target = measured.values();
    let mut init = vec![setup.init.n_b, setup.init_cell_length_um];
    for o in &setup.init.oscillators {
        init.extend([o.f, o.k0, o.gamma]);
    }
    let objective = |x: &[f64]| -> f64 {
        let (set, l) = unpack(x);
        match simulate_cell(&set, l, &setup.window, &setup.window_correction, grid) {
            Ok(s) => s.values().iter().zip(target).map(|(a, b)| (a - b).powi(2)).sum(),
            Err(_) => f64::INFINITY,
        }
    };
    let m = nelder_mead_bounded(objective, &init, &setup.bounds, &setup.options)?;
    let (set, l_cell) = unpack(&m.x);
    let mut parameters = vec![
        FitParameter::new("n_b", set.n_b, "1"),
        FitParameter::new("l_cell", l_cell, "um"),
    ];
    for (j, o) in set.oscillators.iter().enumerate() {
        parameters.push(FitParameter::new(format!("f{}", j + 1), o.f, "cm-2"));
        parameters.push(FitParameter::new(format!("k0_{}", j + 1), o.k0, "cm-1"));
        parameters.push(FitParameter::new(format!("gamma{}", j + 1), o.gamma, "cm-1"));
    }
    let mut diagnostics = Vec::new();
    if !m.converged {
        diagnostics.push(format!(
            "simplex tolerances not met after {} evaluations; best-so-far parameters reported",
            m.evaluations
        ));
    }
    Ok(MaterialFit {
        material: set,
        cell_length_um: l_cell,
        result: FitResult {
            parameters,
            chi2: m.fx,
            model: None,
            converged: m.converged && m.fx.is_finite(),
            evaluations: m.evaluations,
            diagnostics,
        },
    })
}
