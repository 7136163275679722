//! Cavity resonances from the round-trip phase condition `δφ = 2πm`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::materials::{absorption_band, AbsorptionBand, DispersiveMaterial, MetalMirror};
use crate::spectrum::{uniform_grid, Spectrum};
use crate::tmm::{solve_amplitudes, Layer, PlaneWaveCtx, Stack};
use crate::units::um_to_cm;

/// Grid step of the sign-change scan, cm⁻¹.
pub const SCAN_STEP: f64 = 0.25;
/// Root tolerance on `δφ − 2πm`, radians.
pub const PHASE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct CavityGeometry {
    pub length_um: f64,
    pub fill: DispersiveMaterial,
    pub mirror: MetalMirror,
    /// Medium behind each mirror (the window substrate).
    pub backing: DispersiveMaterial,
    pub alpha: f64,
}

impl CavityGeometry {
    pub fn new(
        length_um: f64,
        fill: DispersiveMaterial,
        mirror: MetalMirror,
        backing: DispersiveMaterial,
        alpha: f64,
    ) -> Result<Self> {
        if !(length_um > 0.0) || !length_um.is_finite() {
            return Err(Error::invariant("length_um", format!("must be > 0, got {length_um}")));
        }
        if !(alpha >= 1.0) || !alpha.is_finite() {
            return Err(Error::invariant("alpha", format!("must be >= 1, got {alpha}")));
        }
        Ok(Self {
            length_um,
            fill,
            mirror,
            backing,
            alpha,
        })
    }

    fn mirror_stack(&self) -> Result<Stack> {
        Ok(Stack::new(
            self.fill.clone(),
            vec![Layer::new(self.mirror.effective_material(), self.mirror.thickness_um())?],
            self.backing.clone(),
        ))
    }

    /// Argument of the amplitude reflected from the mirror back into the
    /// fill, in `[0, 2π)`. An ideal mirror gives π.
    pub fn reflection_phase(&self, k: f64) -> Result<f64> {
        let (r, _) = solve_amplitudes(&self.mirror_stack()?, &PlaneWaveCtx::normal(k))?;
        Ok(r.arg().rem_euclid(2.0 * PI))
    }

    /// `δφ = 4πk Re(ñ) L + 2φ_r − 2π`.
    ///
    /// The constant `−2π` references φ_r to the ideal-mirror phase π, so the
    /// integer `m` solving `δφ = 2πm` is the longitudinal mode order
    /// (number of field antinodes) and matches the Hopfield mode index.
    pub fn round_trip_phase(&self, k: f64) -> Result<f64> {
        let n = self.fill.index(k)?;
        let phi_r = self.reflection_phase(k)?;
        Ok(4.0 * PI * k * n.re * um_to_cm(self.length_um) + 2.0 * phi_r - 2.0 * PI)
    }

    /// `round_trip_phase` sampled on a grid.
    pub fn phase_curve(&self, grid: &[f64]) -> Result<Spectrum> {
        let values = grid
            .par_iter()
            .map(|&k| self.round_trip_phase(k))
            .collect::<Result<Vec<_>>>()?;
        Spectrum::new(grid.to_vec(), values)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    Lower,
    Upper,
    Bare,
}

impl Branch {
    pub fn symbol(self) -> &'static str {
        match self {
            Branch::Lower => "-",
            Branch::Upper => "+",
            Branch::Bare => "bare",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSolution {
    pub order: u32,
    pub k: f64,
    pub branch: Branch,
    pub overdamped: bool,
}

/// All roots of `δφ(k) = 2πm` on `[k_lo, k_hi]` for each order, sorted by
/// `(m, k)`. Roots are classified against the strongest extinction band of
/// the fill found on the same interval.
pub fn find_resonances(
    geom: &CavityGeometry,
    k_lo: f64,
    k_hi: f64,
    orders: &[u32],
) -> Result<Vec<ModeSolution>> {
    let grid = uniform_grid(k_lo, k_hi, SCAN_STEP)?;
    let phase = geom.phase_curve(&grid)?;
    let band = if geom.fill.is_dispersive() {
        Some(absorption_band(&geom.fill, k_lo, k_hi, SCAN_STEP)?)
    } else {
        None
    };
    let mut orders: Vec<u32> = orders.to_vec();
    orders.sort_unstable();
    orders.dedup();
    let per_order = orders
        .par_iter()
        .map(|&m| roots_for_order(geom, &phase, m, band.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    Ok(per_order.concat())
}

fn roots_for_order(
    geom: &CavityGeometry,
    phase: &Spectrum,
    m: u32,
    band: Option<&AbsorptionBand>,
) -> Result<Vec<ModeSolution>> {
    if m == 0 {
        return Err(Error::Domain("mode order must be >= 1".into()));
    }
    let target = 2.0 * PI * m as f64;
    let ks = phase.wavenumbers();
    let g: Vec<f64> = phase.values().iter().map(|v| v - target).collect();
    let mut out = Vec::new();
    for i in 0..ks.len() {
        let root = if g[i] == 0.0 {
            Some(ks[i])
        } else if i + 1 < ks.len() && g[i].signum() * g[i + 1].signum() < 0.0 {
            Some(bisect(|k| geom.round_trip_phase(k).map(|p| p - target), ks[i], ks[i + 1], g[i])?)
        } else {
            None
        };
        if let Some(k) = root {
            out.push(classify(m, k, band));
        }
    }
    Ok(out)
}

fn classify(order: u32, k: f64, band: Option<&AbsorptionBand>) -> ModeSolution {
    match band {
        None => ModeSolution {
            order,
            k,
            branch: Branch::Bare,
            overdamped: false,
        },
        Some(b) => ModeSolution {
            order,
            k,
            branch: if k < b.center { Branch::Lower } else { Branch::Upper },
            overdamped: (k - b.center).abs() < b.fwhm,
        },
    }
}

fn bisect(f: impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, mut fa: f64) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        let fm = f(mid)?;
        if fm.abs() < PHASE_TOL {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
        if b - a <= f64::EPSILON * b.abs() {
            break;
        }
    }
    Err(Error::Numeric(format!(
        "phase root bisection did not reach {PHASE_TOL} rad in bracket [{a}, {b}]"
    )))
}

/// Mean peak spacing in a window, with its standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct FsrMeasurement {
    pub fsr: f64,
    pub std_dev: f64,
    pub peaks: Vec<f64>,
}

/// Free spectral range from transmission peaks inside `[lo, hi]`, detected
/// at the default prominence (5% of the window's dynamic range).
pub fn measure_fsr(spectrum: &Spectrum, lo: f64, hi: f64) -> Result<FsrMeasurement> {
    let win = spectrum.window(lo, hi);
    if win.len() < 5 {
        return Err(Error::InsufficientData(format!(
            "window [{lo}, {hi}] holds {} samples",
            win.len()
        )));
    }
    let prom = crate::fit::peaks::default_prominence(&win);
    let peaks: Vec<f64> = crate::fit::peaks::detect_peaks(&win, prom)
        .iter()
        .map(|p| p.center)
        .collect();
    if peaks.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} peaks in [{lo}, {hi}], need at least 3",
            peaks.len()
        )));
    }
    let gaps: Vec<f64> = peaks.windows(2).map(|w| w[1] - w[0]).collect();
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    let var = gaps.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / gaps.len() as f64;
    Ok(FsrMeasurement {
        fsr: mean,
        std_dev: var.sqrt(),
        peaks,
    })
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::Domain(format!("{name} must be > 0, got {v}")));
    }
    Ok(())
}

/// `1 / (2 α n_b FSR)` in µm.
pub fn thickness_from_fsr(fsr: f64, n_b: f64, alpha: f64) -> Result<f64> {
    positive("fsr", fsr)?;
    positive("n_b", n_b)?;
    positive("alpha", alpha)?;
    Ok(crate::units::UM_PER_CM / (2.0 * alpha * n_b * fsr))
}

/// Ratio of the naive FSR thickness to the true length.
pub fn alpha_from_fsr(fsr: f64, n_b: f64, length_um: f64) -> Result<f64> {
    positive("length_um", length_um)?;
    Ok(thickness_from_fsr(fsr, n_b, 1.0)? / length_um)
}
