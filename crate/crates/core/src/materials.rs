//! Complex, dispersive refractive-index models.
//!
//! All models use the passive convention `ñ = n + iκ` with `κ ≥ 0`.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::check_grid;
use crate::units::{nm_to_um, wavenumber_to_ev};

/// Single Lorentz term `f / (k² − k0² + i k Γ)` subtracted from `n_b²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzOscillator {
    /// Oscillator strength, cm⁻².
    pub f: f64,
    /// Resonance wavenumber, cm⁻¹.
    pub k0: f64,
    /// Damping, cm⁻¹.
    pub gamma: f64,
}

impl LorentzOscillator {
    pub fn new(f: f64, k0: f64, gamma: f64) -> Result<Self> {
        let osc = Self { f, k0, gamma };
        osc.validate("oscillator")?;
        Ok(osc)
    }

    fn validate(&self, at: &str) -> Result<()> {
        if !(self.f >= 0.0) || !self.f.is_finite() {
            return Err(Error::invariant(format!("{at}.f"), format!("must be >= 0, got {}", self.f)));
        }
        if !(self.k0 > 0.0) || !self.k0.is_finite() {
            return Err(Error::invariant(format!("{at}.k0"), format!("must be > 0, got {}", self.k0)));
        }
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(Error::invariant(
                format!("{at}.gamma"),
                format!("must be > 0, got {}", self.gamma),
            ));
        }
        Ok(())
    }

    /// Contribution to the dielectric function at `k`.
    #[inline]
    pub fn susceptibility(&self, k: f64) -> Complex64 {
        let den = Complex64::new(k * k - self.k0 * self.k0, k * self.gamma);
        -self.f / den
    }
}

/// Background index plus a sum of Lorentz oscillators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LorentzSet {
    pub n_b: f64,
    pub oscillators: Vec<LorentzOscillator>,
}

impl LorentzSet {
    pub fn new(n_b: f64, oscillators: Vec<LorentzOscillator>) -> Result<Self> {
        let set = Self { n_b, oscillators };
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n_b >= 1.0) || !self.n_b.is_finite() {
            return Err(Error::invariant("n_b", format!("must be >= 1, got {}", self.n_b)));
        }
        for (i, osc) in self.oscillators.iter().enumerate() {
            osc.validate(&format!("oscillators[{i}]"))?;
        }
        Ok(())
    }

    pub fn permittivity(&self, k: f64) -> Complex64 {
        let eps_b = Complex64::new(self.n_b * self.n_b, 0.0);
        self.oscillators
            .iter()
            .fold(eps_b, |acc, osc| acc + osc.susceptibility(k))
    }

    /// Copy with every oscillator strength multiplied by `factor`.
    pub fn scale_strengths(&self, factor: f64) -> LorentzSet {
        LorentzSet {
            n_b: self.n_b,
            oscillators: self
                .oscillators
                .iter()
                .map(|o| LorentzOscillator { f: o.f * factor, ..*o })
                .collect(),
        }
    }
}

/// Lorentz term of a Drude–Lorentz metal, parametrised in eV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DrudeLorentzTerm {
    pub strength: f64,
    pub resonance_ev: f64,
    pub damping_ev: f64,
}

/// Drude–Lorentz permittivity
/// `ε = ε∞ − f₀ωp²/(ω(ω + iΓ₀)) + Σ fⱼωp²/(ωⱼ² − ω² − iωΓⱼ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrudeLorentz {
    pub eps_inf: f64,
    pub plasma_ev: f64,
    pub drude_strength: f64,
    pub drude_damping_ev: f64,
    pub terms: Vec<DrudeLorentzTerm>,
}

impl DrudeLorentz {
    pub fn validate(&self) -> Result<()> {
        let pos = |name: &str, v: f64| -> Result<()> {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invariant(name.to_string(), format!("must be > 0, got {v}")));
            }
            Ok(())
        };
        pos("eps_inf", self.eps_inf)?;
        pos("plasma_ev", self.plasma_ev)?;
        if !(self.drude_strength >= 0.0) {
            return Err(Error::invariant("drude.strength", "must be >= 0"));
        }
        pos("drude.damping_ev", self.drude_damping_ev)?;
        for (i, t) in self.terms.iter().enumerate() {
            if !(t.strength >= 0.0) {
                return Err(Error::invariant(format!("terms[{i}].strength"), "must be >= 0"));
            }
            pos(&format!("terms[{i}].resonance_ev"), t.resonance_ev)?;
            pos(&format!("terms[{i}].damping_ev"), t.damping_ev)?;
        }
        Ok(())
    }

    pub fn permittivity(&self, k: f64) -> Complex64 {
        let w = wavenumber_to_ev(k);
        let wp2 = self.plasma_ev * self.plasma_ev;
        let drude = -self.drude_strength * wp2 / Complex64::new(w * w, w * self.drude_damping_ev);
        self.terms.iter().fold(
            Complex64::new(self.eps_inf, 0.0) + drude,
            |acc, t| {
                acc + t.strength * wp2
                    / Complex64::new(t.resonance_ev * t.resonance_ev - w * w, -w * t.damping_ev)
            },
        )
    }
}

/// Index table with linear interpolation between samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    wavenumbers: Vec<f64>,
    n: Vec<f64>,
    kappa: Vec<f64>,
}

impl Tabulated {
    pub fn new(wavenumbers: Vec<f64>, n: Vec<f64>, kappa: Vec<f64>) -> Result<Self> {
        if wavenumbers.len() != n.len() || n.len() != kappa.len() {
            return Err(Error::invariant("table", "column lengths differ"));
        }
        check_grid(&wavenumbers)?;
        if let Some(i) = kappa.iter().position(|&v| !(v >= 0.0)) {
            return Err(Error::invariant(
                format!("table row {}", i + 1),
                format!("kappa must be >= 0, got {}", kappa[i]),
            ));
        }
        Ok(Self {
            wavenumbers,
            n,
            kappa,
        })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.wavenumbers[0], *self.wavenumbers.last().unwrap())
    }

    pub fn index(&self, k: f64) -> Result<Complex64> {
        let n = crate::spectrum::interpolate(&self.wavenumbers, &self.n, k)?;
        let kappa = crate::spectrum::interpolate(&self.wavenumbers, &self.kappa, k)?;
        Ok(Complex64::new(n, kappa))
    }
}

/// Refractive-index model of a layer or bounding medium.
#[derive(Debug, Clone, PartialEq)]
pub enum DispersiveMaterial {
    Constant(Complex64),
    Lorentz(LorentzSet),
    DrudeLorentz(DrudeLorentz),
    Tabulated(Tabulated),
    /// Another model with its index multiplied by a complex factor.
    Scaled {
        base: Box<DispersiveMaterial>,
        factor: Complex64,
    },
}

impl DispersiveMaterial {
    pub fn constant(n: f64) -> Self {
        DispersiveMaterial::Constant(Complex64::new(n, 0.0))
    }

    /// Complex refractive index at wavenumber `k` (cm⁻¹).
    pub fn index(&self, k: f64) -> Result<Complex64> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::Domain(format!("wavenumber must be > 0, got {k}")));
        }
        Ok(match self {
            DispersiveMaterial::Constant(n) => *n,
            DispersiveMaterial::Lorentz(set) => passive_sqrt(set.permittivity(k)),
            DispersiveMaterial::DrudeLorentz(dl) => passive_sqrt(dl.permittivity(k)),
            DispersiveMaterial::Tabulated(t) => t.index(k)?,
            DispersiveMaterial::Scaled { base, factor } => base.index(k)? * factor,
        })
    }

    /// False for models whose index cannot vary with wavenumber.
    pub fn is_dispersive(&self) -> bool {
        match self {
            DispersiveMaterial::Constant(_) => false,
            DispersiveMaterial::Lorentz(set) => !set.oscillators.is_empty(),
            DispersiveMaterial::Scaled { base, .. } => base.is_dispersive(),
            _ => true,
        }
    }

    /// Background (off-resonance) index used by cavity-mode formulas.
    pub fn background_index(&self) -> Option<f64> {
        match self {
            DispersiveMaterial::Constant(n) => Some(n.re),
            DispersiveMaterial::Lorentz(set) => Some(set.n_b),
            DispersiveMaterial::Scaled { base, factor } => base.background_index().map(|n| n * factor.re),
            _ => None,
        }
    }

    /// Index multiplied by `factor`, which must keep the model passive
    /// (`Re > 0`, `Im ≥ 0`).
    pub fn scaled(self, factor: Complex64) -> Result<DispersiveMaterial> {
        if !(factor.re > 0.0) || factor.im < 0.0 || !factor.is_finite() {
            return Err(Error::invariant(
                "index_scale",
                format!("needs Re > 0 and Im >= 0, got {factor}"),
            ));
        }
        Ok(DispersiveMaterial::Scaled {
            base: Box::new(self),
            factor,
        })
    }

    pub fn as_lorentz(&self) -> Option<&LorentzSet> {
        match self {
            DispersiveMaterial::Lorentz(set) => Some(set),
            _ => None,
        }
    }
}

impl From<LorentzSet> for DispersiveMaterial {
    fn from(set: LorentzSet) -> Self {
        DispersiveMaterial::Lorentz(set)
    }
}

/// Principal square root, negated when needed so that `Im ≥ 0`.
#[inline]
pub fn passive_sqrt(z: Complex64) -> Complex64 {
    let s = z.sqrt();
    if s.im < 0.0 {
        -s
    } else {
        s
    }
}

/// Thin metal film used as a cavity mirror.
#[derive(Debug, Clone, PartialEq)]
pub struct MetalMirror {
    pub material: DispersiveMaterial,
    pub thickness_nm: f64,
    /// Complex factor applied to the metal index; `1` leaves it unchanged.
    pub index_scale: Complex64,
}

impl MetalMirror {
    pub fn new(material: DispersiveMaterial, thickness_nm: f64) -> Result<Self> {
        let m = Self {
            material,
            thickness_nm,
            index_scale: Complex64::new(1.0, 0.0),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn with_index_scale(mut self, scale: Complex64) -> Result<Self> {
        self.index_scale = scale;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.thickness_nm > 0.0) || !self.thickness_nm.is_finite() {
            return Err(Error::invariant(
                "mirror.thickness_nm",
                format!("must be > 0, got {}", self.thickness_nm),
            ));
        }
        // Re > 0 and Im ≥ 0 keep a passive index passive.
        if !(self.index_scale.re > 0.0) || self.index_scale.im < 0.0 {
            return Err(Error::invariant(
                "mirror.index_scale",
                format!("needs Re > 0 and Im >= 0, got {}", self.index_scale),
            ));
        }
        Ok(())
    }

    pub fn thickness_um(&self) -> f64 {
        nm_to_um(self.thickness_nm)
    }

    /// Material with the index scaling folded in.
    pub fn effective_material(&self) -> DispersiveMaterial {
        if self.index_scale == Complex64::new(1.0, 0.0) {
            self.material.clone()
        } else {
            DispersiveMaterial::Scaled {
                base: Box::new(self.material.clone()),
                factor: self.index_scale,
            }
        }
    }
}

/// Location and width of the strongest extinction band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbsorptionBand {
    /// Wavenumber of maximal extinction coefficient κ, cm⁻¹.
    pub center: f64,
    pub peak_kappa: f64,
    /// Full width at half maximum of κ, cm⁻¹.
    pub fwhm: f64,
}

/// Scans `Im ñ` on `[lo, hi]` with the given step and refines the maximum.
pub fn absorption_band(material: &DispersiveMaterial, lo: f64, hi: f64, step: f64) -> Result<AbsorptionBand> {
    let grid = crate::spectrum::uniform_grid(lo, hi, step)?;
    let kappa = grid
        .iter()
        .map(|&k| material.index(k).map(|n| n.im))
        .collect::<Result<Vec<_>>>()?;
    let (imax, &kmax) = kappa
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::InsufficientData("empty scan".into()))?;

    let mut center = grid[imax];
    let mut peak = kmax;
    if imax > 0 && imax + 1 < grid.len() {
        let f = |k: f64| material.index(k).map(|n| -n.im).unwrap_or(f64::INFINITY);
        let m = crate::fit::minimize::brent(f, grid[imax - 1], grid[imax], grid[imax + 1], 1e-10, 200);
        if -m.fx >= peak {
            center = m.x;
            peak = -m.fx;
        }
    }

    let half = 0.5 * peak;
    let cross = |range: &mut dyn Iterator<Item = usize>| -> Option<f64> {
        let mut prev = imax;
        for i in range {
            if kappa[i] < half {
                let (k0, k1, v0, v1) = (grid[prev], grid[i], kappa[prev], kappa[i]);
                return Some(k0 + (half - v0) * (k1 - k0) / (v1 - v0));
            }
            prev = i;
        }
        None
    };
    let left = cross(&mut (0..imax).rev()).unwrap_or(grid[0]);
    let right = cross(&mut (imax + 1..grid.len())).unwrap_or(*grid.last().unwrap());
    Ok(AbsorptionBand {
        center,
        peak_kappa: peak,
        fwhm: right - left,
    })
}

// ---------------------------------------------------------------------------
// Material definition documents

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MaterialDoc {
    #[allow(dead_code)]
    name: Option<String>,
    kind: Option<String>,
    n_b: Option<f64>,
    oscillators: Option<Vec<OscillatorDoc>>,
    n: Option<f64>,
    kappa: Option<f64>,
    table: Option<String>,
    eps_inf: Option<f64>,
    plasma_ev: Option<f64>,
    drude: Option<DrudeDoc>,
    terms: Option<Vec<DrudeLorentzTerm>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OscillatorDoc {
    id: Option<String>,
    f: f64,
    k0: f64,
    gamma: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DrudeDoc {
    strength: f64,
    damping_ev: f64,
}

/// Reads a material definition document from disk. Table paths inside the
/// document resolve relative to its directory.
pub fn load_material(path: impl AsRef<Path>) -> Result<DispersiveMaterial> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_material(&text, &path.display().to_string(), &base)
}

/// Parses a material document.
///
/// `kind` is one of `lorentz`, `constant`, `tabulated` or `drude-lorentz`;
/// when absent it is inferred from the fields present.
pub fn parse_material(text: &str, source_name: &str, base_dir: &Path) -> Result<DispersiveMaterial> {
    let doc: MaterialDoc = toml::from_str(text).map_err(|e| Error::Parse {
        source_name: source_name.to_string(),
        message: e.to_string(),
    })?;
    let kind = match doc.kind.as_deref() {
        Some(k) => k.to_ascii_lowercase(),
        None if doc.n_b.is_some() || doc.oscillators.is_some() => "lorentz".into(),
        None if doc.table.is_some() => "tabulated".into(),
        None if doc.plasma_ev.is_some() => "drude-lorentz".into(),
        None if doc.n.is_some() => "constant".into(),
        None => {
            return Err(Error::Parse {
                source_name: source_name.to_string(),
                message: "cannot infer material kind; set `kind`".into(),
            })
        }
    };
    let wrap = |e: Error| e.context(source_name);
    match kind.as_str() {
        "lorentz" => {
            let n_b = doc
                .n_b
                .ok_or_else(|| Error::invariant("n_b", "missing"))
                .map_err(wrap)?;
            let oscs = doc.oscillators.unwrap_or_default();
            let mut seen = HashSet::new();
            for (i, o) in oscs.iter().enumerate() {
                if let Some(id) = &o.id {
                    if !seen.insert(id.clone()) {
                        return Err(wrap(Error::invariant(
                            format!("oscillators[{i}].id"),
                            format!("duplicate id `{id}`"),
                        )));
                    }
                }
            }
            let set = LorentzSet {
                n_b,
                oscillators: oscs
                    .iter()
                    .map(|o| LorentzOscillator {
                        f: o.f,
                        k0: o.k0,
                        gamma: o.gamma,
                    })
                    .collect(),
            };
            set.validate().map_err(wrap)?;
            Ok(DispersiveMaterial::Lorentz(set))
        }
        "constant" => {
            let n = doc.n.ok_or_else(|| Error::invariant("n", "missing")).map_err(wrap)?;
            let kappa = doc.kappa.unwrap_or(0.0);
            if !(n > 0.0) {
                return Err(wrap(Error::invariant("n", format!("must be > 0, got {n}"))));
            }
            if !(kappa >= 0.0) {
                return Err(wrap(Error::invariant("kappa", format!("must be >= 0, got {kappa}"))));
            }
            Ok(DispersiveMaterial::Constant(Complex64::new(n, kappa)))
        }
        "tabulated" => {
            let table = doc
                .table
                .ok_or_else(|| Error::invariant("table", "missing"))
                .map_err(wrap)?;
            let path = resolve(base_dir, &table);
            Ok(DispersiveMaterial::Tabulated(load_index_table(&path)?))
        }
        "drude-lorentz" => {
            let drude = doc
                .drude
                .ok_or_else(|| Error::invariant("drude", "missing"))
                .map_err(wrap)?;
            let dl = DrudeLorentz {
                eps_inf: doc.eps_inf.unwrap_or(1.0),
                plasma_ev: doc
                    .plasma_ev
                    .ok_or_else(|| Error::invariant("plasma_ev", "missing"))
                    .map_err(wrap)?,
                drude_strength: drude.strength,
                drude_damping_ev: drude.damping_ev,
                terms: doc.terms.unwrap_or_default(),
            };
            dl.validate().map_err(wrap)?;
            Ok(DispersiveMaterial::DrudeLorentz(dl))
        }
        other => Err(Error::Parse {
            source_name: source_name.to_string(),
            message: format!("unknown material kind `{other}`"),
        }),
    }
}

pub(crate) fn resolve(base: &Path, p: &str) -> PathBuf {
    let p = Path::new(p);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Reads a `wavenumber_cm-1,n[,kappa]` CSV. A non-numeric first row is
/// treated as the header; `#` lines are comments.
pub fn load_index_table(path: &Path) -> Result<Tabulated> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_index_table(&text, &path.display().to_string())
}

pub fn parse_index_table(text: &str, source_name: &str) -> Result<Tabulated> {
    let mut ks = Vec::new();
    let mut ns = Vec::new();
    let mut kappas = Vec::new();
    let mut seen_data = false;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: std::result::Result<Vec<f64>, _> = cols.iter().map(|c| c.parse::<f64>()).collect();
        match parsed {
            Ok(vals) if vals.len() == 2 || vals.len() == 3 => {
                ks.push(vals[0]);
                ns.push(vals[1]);
                kappas.push(vals.get(2).copied().unwrap_or(0.0));
                seen_data = true;
            }
            Err(_) if !seen_data && ks.is_empty() => continue,
            _ => {
                return Err(Error::Parse {
                    source_name: source_name.to_string(),
                    message: format!(
                        "line {}: expected `wavenumber_cm-1,n[,kappa]`, got `{line}`",
                        lineno + 1
                    ),
                })
            }
        }
    }
    Tabulated::new(ks, ns, kappas).map_err(|e| e.context(source_name))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn single(f: f64, k0: f64, gamma: f64) -> LorentzSet {
        LorentzSet::new(1.46, vec![LorentzOscillator::new(f, k0, gamma).unwrap()]).unwrap()
    }

    #[test]
    fn empty_set_is_background() {
        let m = DispersiveMaterial::Lorentz(LorentzSet::new(1.46, vec![]).unwrap());
        for k in [100.0, 1980.0, 1.0e5] {
            assert_eq!(m.index(k).unwrap(), Complex64::new(1.46, 0.0));
        }
        assert!(!m.is_dispersive());
    }

    #[test]
    fn on_resonance_denominator() {
        let set = single(3.02e5, 1980.0, 5.31);
        let n = DispersiveMaterial::Lorentz(set).index(1980.0).unwrap();
        let expect = Complex64::new(1.46 * 1.46, 3.02e5 / (1980.0 * 5.31));
        let n2 = n * n;
        assert_relative_eq!(n2.re, expect.re, epsilon = 1e-9);
        assert_relative_eq!(n2.im, expect.im, epsilon = 1e-9);
        assert!(n.im > 0.0);
    }

    #[test]
    fn rejects_bad_oscillators() {
        assert!(LorentzOscillator::new(1.0, 2000.0, 0.0).is_err());
        assert!(LorentzOscillator::new(-1.0, 2000.0, 1.0).is_err());
        assert!(LorentzOscillator::new(1.0, 0.0, 1.0).is_err());
        assert!(LorentzSet::new(0.9, vec![]).is_err());
    }

    #[test]
    fn gamma_zero_document_rejected() {
        let doc = "n_b = 1.46\n[[oscillators]]\nf = 1.0e5\nk0 = 2000.0\ngamma = 0.0\n";
        let err = parse_material(doc, "doc", Path::new(".")).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("oscillators[0].gamma"), "{msg}");
    }

    #[test]
    fn duplicate_ids_rejected() {
        let doc = "n_b = 1.46\n[[oscillators]]\nid='a'\nf = 1.0\nk0 = 2000.0\ngamma = 1.0\n\
                   [[oscillators]]\nid='a'\nf = 1.0\nk0 = 2010.0\ngamma = 1.0\n";
        let err = parse_material(doc, "doc", Path::new(".")).unwrap_err();
        assert!(err.to_string().contains("duplicate"), "{err}");
    }

    #[test]
    fn parse_error_reports_line() {
        let doc = "n_b = 1.46\n[[oscillators]]\nf = \nk0 = 1\n";
        let err = parse_material(doc, "doc.toml", Path::new(".")).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn empty_oscillator_list_behaves_as_constant() {
        let m = parse_material("n_b = 1.46\noscillators = []\n", "doc", Path::new(".")).unwrap();
        assert_eq!(m.index(2000.0).unwrap(), Complex64::new(1.46, 0.0));
    }

    #[test]
    fn tabulated_interpolates_and_rejects_out_of_range() {
        let t = parse_index_table("wavenumber_cm-1,n,kappa\n1000,1.0,0.0\n2000,2.0,1.0\n", "t").unwrap();
        let m = DispersiveMaterial::Tabulated(t);
        let n = m.index(1500.0).unwrap();
        assert_relative_eq!(n.re, 1.5);
        assert_relative_eq!(n.im, 0.5);
        assert!(matches!(m.index(2500.0), Err(Error::Domain(_))));
    }

    #[test]
    fn tabulated_rejects_unsorted() {
        assert!(parse_index_table("1000,1.0\n900,1.0\n", "t").is_err());
    }

    #[test]
    fn mirror_scale_must_stay_passive() {
        let au = DispersiveMaterial::Constant(Complex64::new(3.0, 30.0));
        let m = MetalMirror::new(au.clone(), 13.0).unwrap();
        assert!(m.clone().with_index_scale(Complex64::new(1.0, -0.1)).is_err());
        assert!(MetalMirror::new(au, 0.0).is_err());
    }

    #[test]
    fn drude_metal_is_passive_and_reflective() {
        let dl = DrudeLorentz {
            eps_inf: 1.0,
            plasma_ev: 9.03,
            drude_strength: 0.76,
            drude_damping_ev: 0.053,
            terms: vec![],
        };
        let n = DispersiveMaterial::DrudeLorentz(dl).index(2000.0).unwrap();
        assert!(n.im > 20.0 && n.re > 0.0, "{n}");
    }
}
