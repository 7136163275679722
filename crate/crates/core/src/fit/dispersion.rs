//! χ² of polariton dispersion data against the Hopfield models and the
//! one-parameter fit over Ω_R.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fit::minimize::grid_then_brent;
use crate::fit::{FitParameter, FitResult};
use crate::hopfield::{polariton_at, ControlKind, HopfieldParams, Model, Sign};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub control: f64,
    pub kind: ControlKind,
    pub order: u32,
    pub sign: Sign,
    /// Measured polariton energy, cm⁻¹.
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DispersionDataset {
    pub observations: Vec<Observation>,
}

pub const DATASET_HEADER: &str = "control,control_kind,order,sign,energy_cm-1";

impl DispersionDataset {
    pub fn new(observations: Vec<Observation>) -> Result<Self> {
        for (i, o) in observations.iter().enumerate() {
            validate(o).map_err(|e| e.context(format!("observation {i}")))?;
        }
        Ok(Self { observations })
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    /// Parses `control,control_kind,order,sign,energy_cm-1` rows. Lines
    /// starting with `#` are ignored; errors name the offending line.
    pub fn parse_csv(text: &str, source_name: &str) -> Result<Self> {
        let mut obs = Vec::new();
        let mut header_seen = false;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let lineno = i + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !header_seen {
                header_seen = true;
                let cols: Vec<&str> = line.split(',').map(str::trim).collect();
                if cols != DATASET_HEADER.split(',').collect::<Vec<_>>() {
                    return Err(Error::Parse {
                        source_name: source_name.to_string(),
                        message: format!("line {lineno}: expected header `{DATASET_HEADER}`"),
                    });
                }
                continue;
            }
            let bad = |msg: String| Error::Parse {
                source_name: source_name.to_string(),
                message: format!("line {lineno}: {msg}"),
            };
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() != 5 {
                return Err(bad(format!("expected 5 columns, found {}", cols.len())));
            }
            let num = |s: &str, what: &str| s.parse::<f64>().map_err(|_| bad(format!("invalid {what} `{s}`")));
            let o = Observation {
                control: num(cols[0], "control")?,
                kind: cols[1].parse().map_err(|_| bad(format!("invalid control_kind `{}`", cols[1])))?,
                order: cols[2].parse().map_err(|_| bad(format!("invalid order `{}`", cols[2])))?,
                sign: cols[3].parse().map_err(|_| bad(format!("invalid sign `{}`", cols[3])))?,
                energy: num(cols[4], "energy")?,
            };
            validate(&o).map_err(|e| bad(e.to_string()))?;
            obs.push(o);
        }
        Ok(Self { observations: obs })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_csv(&text, &path.display().to_string())
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(DATASET_HEADER);
        s.push('\n');
        for o in &self.observations {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                o.control,
                o.kind.name(),
                o.order,
                o.sign.symbol(),
                o.energy
            ));
        }
        s
    }

    /// Noise-free dataset sampled from a model.
    pub fn synthesize(
        model: Model,
        params: &HopfieldParams,
        kind: ControlKind,
        controls: &[f64],
        orders: &[u32],
    ) -> Result<Self> {
        let mut obs = Vec::new();
        for &m in orders {
            for sign in [Sign::Lower, Sign::Upper] {
                for &x in controls {
                    let (_, st) = polariton_at(model, params, m, kind, x, sign)?;
                    obs.push(Observation {
                        control: x,
                        kind,
                        order: m,
                        sign,
                        energy: st.energy,
                    });
                }
            }
        }
        Self::new(obs)
    }
}

fn validate(o: &Observation) -> Result<()> {
    if !(o.control > 0.0) && !(o.kind == ControlKind::Angle && o.control == 0.0) {
        return Err(Error::Data(format!("control must be positive, got {}", o.control)));
    }
    if o.order == 0 {
        return Err(Error::Data("order must be >= 1".into()));
    }
    if !o.energy.is_finite() {
        return Err(Error::Data(format!("energy {} is not finite", o.energy)));
    }
    Ok(())
}

/// Model energies `Ê` for each observation, in dataset order.
pub fn predictions(dataset: &DispersionDataset, params: &HopfieldParams, model: Model) -> Result<Vec<f64>> {
    // Evaluate each distinct (kind, control, order, sign) once.
    let mut keys: BTreeMap<(u8, u64, u32, Sign), usize> = BTreeMap::new();
    let key = |o: &Observation| (o.kind as u8, o.control.to_bits(), o.order, o.sign);
    let mut uniq = Vec::new();
    for (i, o) in dataset.observations.iter().enumerate() {
        keys.entry(key(o)).or_insert_with(|| {
            uniq.push(i);
            uniq.len() - 1
        });
    }
    let values = uniq
        .par_iter()
        .map(|&i| {
            let o = &dataset.observations[i];
            polariton_at(model, params, o.order, o.kind, o.control, o.sign)
                .map(|(_, st)| st.energy)
                .map_err(|e| {
                    Error::Data(format!(
                        "observation {} (order {}, sign {}, {} = {}): {e}",
                        i + 1,
                        o.order,
                        o.sign.symbol(),
                        o.kind.name(),
                        o.control
                    ))
                })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(dataset
        .observations
        .iter()
        .map(|o| values[keys[&key(o)]])
        .collect())
}

/// `E − Ê` per observation.
pub fn residuals(dataset: &DispersionDataset, params: &HopfieldParams, model: Model) -> Result<Vec<f64>> {
    let pred = predictions(dataset, params, model)?;
    Ok(dataset.observations.iter().zip(pred).map(|(o, e)| o.energy - e).collect())
}

/// `Σ (E − Ê)²`, unweighted.
pub fn chi2(dataset: &DispersionDataset, params: &HopfieldParams, model: Model) -> Result<f64> {
    Ok(residuals(dataset, params, model)?.iter().map(|r| r * r).sum())
}

pub const RABI_TOL: f64 = 1e-8;
const RABI_GRID: usize = 41;

/// Minimises χ² over Ω_R inside `bracket`; the other parameters are taken
/// from `params`. The coarse-grid minimum must be interior, and the result
/// is checked against that grid.
pub fn fit_rabi(
    dataset: &DispersionDataset,
    params: &HopfieldParams,
    model: Model,
    bracket: (f64, f64),
) -> Result<FitResult> {
    if dataset.is_empty() {
        return Err(Error::InsufficientData("empty dispersion dataset".into()));
    }
    let (lo, hi) = bracket;
    if !(lo >= 0.0) {
        return Err(Error::Bracket(format!("bracket lower end {lo} must be >= 0")));
    }
    // Surface data errors up front instead of as infinite objective values.
    chi2(dataset, &params.with_omega_r(0.5 * (lo + hi)), model)?;
    let objective = |w: f64| chi2(dataset, &params.with_omega_r(w), model).unwrap_or(f64::INFINITY);
    let m = grid_then_brent(objective, lo, hi, RABI_GRID, RABI_TOL)?;
    let mut diagnostics = Vec::new();
    if !m.fx.is_finite() {
        diagnostics.push("objective not finite at optimum".into());
    }
    Ok(FitResult {
        parameters: vec![FitParameter::new("omega_R", m.x, "cm-1")],
        chi2: m.fx,
        model: Some(model),
        converged: m.converged && m.fx.is_finite(),
        evaluations: m.evaluations,
        diagnostics,
    })
}
