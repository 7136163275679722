//! Transfer-matrix solver for coherent layered stacks.
//!
//! Time dependence is `exp(−iωt)`; indices are `n + iκ` with `κ ≥ 0`. The
//! forward and backward amplitudes of each layer are referenced to its
//! entry-side interface.

use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::materials::{passive_sqrt, DispersiveMaterial};
use crate::spectrum::{check_grid, Spectrum};
use crate::units::um_to_cm;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
const LOSSLESS_TOL: f64 = 1e-12;
const MAX_ATTENUATION: f64 = 35.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub material: DispersiveMaterial,
    pub thickness_um: f64,
}

impl Layer {
    pub fn new(material: DispersiveMaterial, thickness_um: f64) -> Result<Self> {
        if !(thickness_um >= 0.0) || !thickness_um.is_finite() {
            return Err(Error::invariant(
                "layer.thickness_um",
                format!("must be >= 0, got {thickness_um}"),
            ));
        }
        Ok(Self {
            material,
            thickness_um,
        })
    }
}

/// Real amplitude factor applied to transmitted light as `C²` on power.
#[derive(Debug, Clone, PartialEq)]
pub enum WindowCorrection {
    Constant(f64),
    /// `C(k)` interpolated linearly from samples.
    Curve(Spectrum),
}

impl Default for WindowCorrection {
    fn default() -> Self {
        WindowCorrection::Constant(1.0)
    }
}

impl WindowCorrection {
    pub fn validate(&self) -> Result<()> {
        let check = |c: f64| {
            if !(0.0..=1.0).contains(&c) {
                Err(Error::invariant(
                    "window_correction",
                    format!("amplitude factor must lie in [0, 1], got {c}"),
                ))
            } else {
                Ok(())
            }
        };
        match self {
            WindowCorrection::Constant(c) => check(*c),
            WindowCorrection::Curve(s) => s.values().iter().try_for_each(|&c| check(c)),
        }
    }

    pub fn at(&self, k: f64) -> Result<f64> {
        match self {
            WindowCorrection::Constant(c) => Ok(*c),
            WindowCorrection::Curve(s) => s.interpolate(k).map_err(|e| e.context("window correction")),
        }
    }

    /// Reads a `wavenumber_cm-1,C` CSV with a header line.
    pub fn load_curve(path: &Path) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| csv_error(path, e))?;
        let mut ks = Vec::new();
        let mut cs = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| csv_error(path, e))?;
            let parse = |j: usize| -> Result<f64> {
                rec.get(j)
                    .and_then(|s| s.parse::<f64>().ok())
                    .ok_or_else(|| Error::Parse {
                        source_name: path.display().to_string(),
                        message: format!("row {}: expected two numeric columns", i + 2),
                    })
            };
            ks.push(parse(0)?);
            cs.push(parse(1)?);
        }
        let w = WindowCorrection::Curve(Spectrum::new(ks, cs).map_err(|e| e.context(path.display()))?);
        w.validate()?;
        Ok(w)
    }
}

pub(crate) fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Parse {
            source_name: path.display().to_string(),
            message: format!("{other:?}"),
        },
    }
}

/// Layers between two semi-infinite bounding media.
#[derive(Debug, Clone, PartialEq)]
pub struct Stack {
    pub entry: DispersiveMaterial,
    pub layers: Vec<Layer>,
    pub exit: DispersiveMaterial,
    pub window: WindowCorrection,
}

impl Stack {
    pub fn new(entry: DispersiveMaterial, layers: Vec<Layer>, exit: DispersiveMaterial) -> Self {
        Self {
            entry,
            layers,
            exit,
            window: WindowCorrection::default(),
        }
    }

    pub fn with_window(mut self, window: WindowCorrection) -> Result<Self> {
        window.validate()?;
        self.window = window;
        Ok(self)
    }

    /// The stack seen from the exit side: media swapped, layers reversed.
    pub fn reversed(&self) -> Stack {
        Stack {
            entry: self.exit.clone(),
            layers: self.layers.iter().rev().cloned().collect(),
            exit: self.entry.clone(),
            window: self.window.clone(),
        }
    }

    pub fn total_thickness_um(&self) -> f64 {
        self.layers.iter().map(|l| l.thickness_um).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    S,
    P,
    Unpolarized,
}

impl std::str::FromStr for Polarization {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "s" | "te" => Ok(Polarization::S),
            "p" | "tm" => Ok(Polarization::P),
            "u" | "unpolarized" | "unpolarised" => Ok(Polarization::Unpolarized),
            other => Err(Error::Config(format!("unknown polarization `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWaveCtx {
    /// Wavenumber, cm⁻¹.
    pub k: f64,
    /// Incidence angle in the entry medium, degrees.
    pub angle_deg: f64,
    pub polarization: Polarization,
}

impl PlaneWaveCtx {
    pub fn new(k: f64, angle_deg: f64, polarization: Polarization) -> Result<Self> {
        let ctx = Self {
            k,
            angle_deg,
            polarization,
        };
        ctx.validate()?;
        Ok(ctx)
    }

    pub fn normal(k: f64) -> Self {
        Self {
            k,
            angle_deg: 0.0,
            polarization: Polarization::S,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.k > 0.0) || !self.k.is_finite() {
            return Err(Error::Domain(format!("wavenumber must be > 0, got {}", self.k)));
        }
        if !(0.0..90.0).contains(&self.angle_deg) {
            return Err(Error::Domain(format!(
                "incidence angle must lie in [0, 90) degrees, got {}",
                self.angle_deg
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TmmResult {
    /// Reflection amplitude (s amplitude for unpolarized light).
    pub r: Complex64,
    /// Transmission amplitude (s amplitude for unpolarized light).
    pub t: Complex64,
    /// p amplitudes `(r, t)` when the light is unpolarized.
    pub p_amplitudes: Option<(Complex64, Complex64)>,
    pub transmittance: f64,
    pub reflectance: f64,
    pub absorptance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pol {
    S,
    P,
}

/// Evaluated indices and geometry at one wavenumber.
struct Profile {
    k: f64,
    /// Entry, layers, exit.
    n: Vec<Complex64>,
    /// Layer thicknesses, µm (entries for the bounding media are 0).
    d: Vec<f64>,
    /// Longitudinal index `ñ cos θ`, Im ≥ 0.
    q: Vec<Complex64>,
    /// `n₀ sin θ₀`.
    beta: f64,
}

impl Profile {
    fn new(stack: &Stack, ctx: &PlaneWaveCtx) -> Result<Self> {
        ctx.validate()?;
        let k = ctx.k;
        let eval = |m: &DispersiveMaterial, what: &str| m.index(k).map_err(|e| e.context(format!("{what} at {k} cm-1")));
        let mut n = Vec::with_capacity(stack.layers.len() + 2);
        let mut d = Vec::with_capacity(stack.layers.len() + 2);
        n.push(eval(&stack.entry, "entry medium")?);
        d.push(0.0);
        for (i, l) in stack.layers.iter().enumerate() {
            n.push(eval(&l.material, &format!("layer {i}"))?);
            d.push(l.thickness_um);
        }
        n.push(eval(&stack.exit, "exit medium")?);
        d.push(0.0);
        Ok(Self::from_indices(k, n, d, ctx.angle_deg))
    }

    fn from_indices(k: f64, n: Vec<Complex64>, d: Vec<f64>, angle_deg: f64) -> Self {
        let beta = n[0].re * angle_deg.to_radians().sin();
        let b2 = Complex64::new(beta * beta, 0.0);
        let q = n.iter().map(|&nj| passive_sqrt(nj * nj - b2)).collect();
        Self { k, n, d, q, beta }
    }

    fn check_lossless(&self) -> Result<()> {
        for (name, idx) in [("entry", self.n[0]), ("exit", *self.n.last().unwrap())] {
            if idx.im.abs() > LOSSLESS_TOL * idx.norm().max(1.0) {
                return Err(Error::Contract(format!(
                    "{name} medium must be lossless at {} cm-1 (index {idx})",
                    self.k
                )));
            }
        }
        Ok(())
    }

    fn cos(&self, j: usize) -> Complex64 {
        self.q[j] / self.n[j]
    }

    fn sin(&self, j: usize) -> Complex64 {
        Complex64::new(self.beta, 0.0) / self.n[j]
    }

    fn interface(&self, i: usize, pol: Pol) -> (Complex64, Complex64) {
        let f = i + 1;
        let (qi, qf) = (self.q[i], self.q[f]);
        match pol {
            Pol::S => {
                let den = qi + qf;
                ((qi - qf) / den, 2.0 * qi / den)
            }
            Pol::P => {
                let (ni2, nf2) = (self.n[i] * self.n[i], self.n[f] * self.n[f]);
                let den = nf2 * qi + ni2 * qf;
                ((nf2 * qi - ni2 * qf) / den, 2.0 * self.n[i] * self.n[f] * qi / den)
            }
        }
    }

    fn phase(&self, j: usize) -> Complex64 {
        TWO_PI * self.k * um_to_cm(self.d[j]) * self.q[j]
    }

    /// Power flux normalisation for the entry medium.
    fn flux_norm(&self, pol: Pol) -> f64 {
        match pol {
            Pol::S => self.q[0].re,
            Pol::P => (self.n[0] * self.cos(0).conj()).re,
        }
    }

    /// Normalised Poynting flux along z for amplitudes `(v, w)` in layer `j`.
    fn flux(&self, j: usize, v: Complex64, w: Complex64, pol: Pol) -> f64 {
        let norm = self.flux_norm(pol);
        match pol {
            Pol::S => (self.q[j] * (v + w).conj() * (v - w)).re / norm,
            Pol::P => (self.n[j] * self.cos(j).conj() * (v + w) * (v - w).conj()).re / norm,
        }
    }

    fn transmittance_raw(&self, t: Complex64, pol: Pol) -> f64 {
        let last = self.n.len() - 1;
        let num = match pol {
            Pol::S => self.q[last].re,
            Pol::P => (self.n[last] * self.cos(last).conj()).re,
        };
        num / self.flux_norm(pol) * t.norm_sqr()
    }
}

type M2 = [[Complex64; 2]; 2];

fn mul(a: &M2, b: &M2) -> M2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

/// Propagation through layer `j` followed by the interface into `j + 1`.
fn layer_matrix(p: &Profile, j: usize, pol: Pol) -> M2 {
    let mut delta = p.phase(j);
    // Past e^35 attenuation a layer is opaque; capping keeps the matrix finite.
    if delta.im > MAX_ATTENUATION {
        delta.im = MAX_ATTENUATION;
    }
    let e_m = (-Complex64::i() * delta).exp();
    let e_p = (Complex64::i() * delta).exp();
    let (r, t) = p.interface(j, pol);
    let inv_t = 1.0 / t;
    [
        [e_m * inv_t, e_m * r * inv_t],
        [e_p * r * inv_t, e_p * inv_t],
    ]
}

fn amplitudes(p: &Profile, pol: Pol) -> (Complex64, Complex64) {
    let (r01, t01) = p.interface(0, pol);
    let inv = 1.0 / t01;
    let mut m: M2 = [[inv, r01 * inv], [r01 * inv, inv]];
    for j in 1..p.n.len() - 1 {
        m = mul(&m, &layer_matrix(p, j, pol));
    }
    (m[1][0] / m[0][0], 1.0 / m[0][0])
}

/// Forward/backward amplitudes at the entry side of every medium.
fn layer_amplitudes(p: &Profile, t: Complex64, pol: Pol) -> Vec<(Complex64, Complex64)> {
    let count = p.n.len();
    let mut vw = vec![(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); count];
    vw[count - 1] = (t, Complex64::new(0.0, 0.0));
    for j in (1..count - 1).rev() {
        let m = layer_matrix(p, j, pol);
        let (v, w) = vw[j + 1];
        vw[j] = (m[0][0] * v + m[0][1] * w, m[1][0] * v + m[1][1] * w);
    }
    vw
}

struct PolPower {
    r: Complex64,
    t: Complex64,
    t_raw: f64,
    reflectance: f64,
    absorbed: f64,
}

fn solve_pol(p: &Profile, pol: Pol) -> PolPower {
    let (r, t) = amplitudes(p, pol);
    let t_raw = p.transmittance_raw(t, pol);
    let vw = layer_amplitudes(p, t, pol);
    let count = p.n.len();
    let mut absorbed = 0.0;
    for j in 1..count - 1 {
        let (v, w) = vw[j];
        let start = p.flux(j, v, w, pol);
        let end = if j + 1 == count - 1 {
            t_raw
        } else {
            let (v1, w1) = vw[j + 1];
            p.flux(j + 1, v1, w1, pol)
        };
        absorbed += start - end;
    }
    PolPower {
        r,
        t,
        t_raw,
        reflectance: r.norm_sqr(),
        absorbed,
    }
}

/// Amplitudes and power coefficients of a plane wave on `stack`.
///
/// The window correction scales transmitted power by `C²`; the removed
/// fraction is booked as absorptance so `T + R + A = 1` still holds.
pub fn solve_stack(stack: &Stack, ctx: &PlaneWaveCtx) -> Result<TmmResult> {
    let p = Profile::new(stack, ctx)?;
    p.check_lossless()?;
    let c = stack.window.at(ctx.k)?;
    let c2 = c * c;
    let combine = |a: &PolPower| (c2 * a.t_raw, a.reflectance, a.absorbed + (1.0 - c2) * a.t_raw);
    match ctx.polarization {
        Polarization::S | Polarization::P => {
            let pol = if ctx.polarization == Polarization::S { Pol::S } else { Pol::P };
            let a = solve_pol(&p, pol);
            let (t, r, ab) = combine(&a);
            Ok(TmmResult {
                r: a.r,
                t: a.t,
                p_amplitudes: None,
                transmittance: t,
                reflectance: r,
                absorptance: ab,
            })
        }
        Polarization::Unpolarized => {
            let s = solve_pol(&p, Pol::S);
            let pp = solve_pol(&p, Pol::P);
            let (ts, rs, as_) = combine(&s);
            let (tp, rp, ap) = combine(&pp);
            Ok(TmmResult {
                r: s.r,
                t: s.t,
                p_amplitudes: Some((pp.r, pp.t)),
                transmittance: 0.5 * (ts + tp),
                reflectance: 0.5 * (rs + rp),
                absorptance: 0.5 * (as_ + ap),
            })
        }
    }
}

/// Reflection and transmission amplitudes only. The bounding media may be
/// lossy here since no power normalisation is involved. Unpolarized
/// requests return the s amplitudes.
pub fn solve_amplitudes(stack: &Stack, ctx: &PlaneWaveCtx) -> Result<(Complex64, Complex64)> {
    let p = Profile::new(stack, ctx)?;
    let pol = if ctx.polarization == Polarization::P { Pol::P } else { Pol::S };
    Ok(amplitudes(&p, pol))
}

/// Transmittance sampled on `grid`, evaluated in parallel.
pub fn transmission_spectrum(
    stack: &Stack,
    grid: &[f64],
    angle_deg: f64,
    polarization: Polarization,
) -> Result<Spectrum> {
    check_grid(grid)?;
    let values = grid
        .par_iter()
        .map(|&k| {
            let ctx = PlaneWaveCtx::new(k, angle_deg, polarization)?;
            solve_stack(stack, &ctx).map(|r| r.transmittance)
        })
        .collect::<Result<Vec<_>>>()?;
    Spectrum::new(grid.to_vec(), values)
}

/// Solved field inside a stack for one plane wave.
pub struct StackField {
    profile: Profile,
    /// Per polarization: amplitudes at the entry side of each medium.
    solutions: Vec<(Pol, Vec<(Complex64, Complex64)>)>,
    /// Entry-side positions of the layers, µm (the stack starts at z = 0).
    starts: Vec<f64>,
}

impl StackField {
    pub fn new(stack: &Stack, ctx: &PlaneWaveCtx) -> Result<Self> {
        let profile = Profile::new(stack, ctx)?;
        profile.check_lossless()?;
        let pols: &[Pol] = match ctx.polarization {
            Polarization::S => &[Pol::S],
            Polarization::P => &[Pol::P],
            Polarization::Unpolarized => &[Pol::S, Pol::P],
        };
        let solutions = pols
            .iter()
            .map(|&pol| {
                let (r, t) = amplitudes(&profile, pol);
                let mut vw = layer_amplitudes(&profile, t, pol);
                vw[0] = (Complex64::new(1.0, 0.0), r);
                (pol, vw)
            })
            .collect();
        let mut starts = Vec::with_capacity(profile.n.len());
        let mut z = 0.0;
        starts.push(0.0);
        for &d in &profile.d[1..profile.d.len() - 1] {
            starts.push(z);
            z += d;
        }
        starts.push(z);
        Ok(Self {
            profile,
            solutions,
            starts,
        })
    }

    pub fn thickness_um(&self) -> f64 {
        *self.starts.last().unwrap()
    }

    /// Medium index (0 = entry, last = exit) and local coordinate for `z`.
    fn locate(&self, z: f64) -> (usize, f64) {
        let last = self.starts.len() - 1;
        if z < 0.0 {
            return (0, z);
        }
        if z >= self.starts[last] {
            if z == self.starts[last] && last > 1 {
                let j = (1..last).rev().find(|&j| self.profile.d[j] > 0.0);
                if let Some(j) = j {
                    return (j, z - self.starts[j]);
                }
            }
            return (last, z - self.starts[last]);
        }
        let j = (1..last)
            .rev()
            .find(|&j| self.profile.d[j] > 0.0 && z >= self.starts[j])
            .unwrap_or(last);
        (j, z - self.starts[j])
    }

    fn waves(&self, vw: &[(Complex64, Complex64)], z: f64) -> (usize, Complex64, Complex64) {
        let (j, local) = self.locate(z);
        let (v, w) = vw[j];
        let kz = TWO_PI * self.profile.k * um_to_cm(local) * self.profile.q[j];
        let ef = v * (Complex64::i() * kz).exp();
        let eb = w * (-Complex64::i() * kz).exp();
        (j, ef, eb)
    }

    /// `|E|²` at position `z` (µm) for unit incident amplitude; averaged over
    /// polarizations for unpolarized light.
    pub fn intensity(&self, z: f64) -> f64 {
        let total: f64 = self
            .solutions
            .iter()
            .map(|(pol, vw)| {
                let (j, ef, eb) = self.waves(vw, z);
                match pol {
                    Pol::S => (ef + eb).norm_sqr(),
                    Pol::P => {
                        let ex = (ef - eb) * self.profile.cos(j);
                        let ez = -(ef + eb) * self.profile.sin(j);
                        ex.norm_sqr() + ez.norm_sqr()
                    }
                }
            })
            .sum();
        total / self.solutions.len() as f64
    }

    /// z-component of the Poynting flux at `z`, normalised to the incident flux.
    pub fn poynting(&self, z: f64) -> f64 {
        let total: f64 = self
            .solutions
            .iter()
            .map(|(pol, vw)| {
                let (j, ef, eb) = self.waves(vw, z);
                self.profile.flux(j, ef, eb, *pol)
            })
            .sum();
        total / self.solutions.len() as f64
    }
}

/// `|E(z, k)|²` sampled on a rectangular grid through the layers.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldMap {
    pub z_grid: Vec<f64>,
    pub k_grid: Vec<f64>,
    /// Row-major by wavenumber: `values[ik * z_grid.len() + iz]`.
    pub values: Vec<f64>,
}

impl FieldMap {
    pub fn at(&self, ik: usize, iz: usize) -> f64 {
        self.values[ik * self.z_grid.len() + iz]
    }

    pub fn row(&self, ik: usize) -> &[f64] {
        let nz = self.z_grid.len();
        &self.values[ik * nz..(ik + 1) * nz]
    }
}

/// Field intensity from the entry face to the exit face of the layers,
/// sampled every `z_resolution_um`.
pub fn field_map(
    stack: &Stack,
    k_grid: &[f64],
    z_resolution_um: f64,
    angle_deg: f64,
    polarization: Polarization,
) -> Result<FieldMap> {
    if !(z_resolution_um > 0.0) || !z_resolution_um.is_finite() {
        return Err(Error::invariant(
            "z_resolution_um",
            format!("must be > 0, got {z_resolution_um}"),
        ));
    }
    check_grid(k_grid)?;
    let total = stack.total_thickness_um();
    let nz = (total / z_resolution_um).ceil().max(1.0) as usize;
    let z_grid: Vec<f64> = (0..=nz).map(|i| total * i as f64 / nz as f64).collect();
    let rows = k_grid
        .par_iter()
        .map(|&k| {
            let ctx = PlaneWaveCtx::new(k, angle_deg, polarization)?;
            let field = StackField::new(stack, &ctx)?;
            Ok(z_grid.iter().map(|&z| field.intensity(z)).collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FieldMap {
        z_grid,
        k_grid: k_grid.to_vec(),
        values: rows.concat(),
    })
}

/// Number of interior intensity maxima of a sampled profile.
pub fn count_antinodes(profile: &[f64]) -> usize {
    profile
        .windows(3)
        .filter(|w| w[1] > w[0] && w[1] >= w[2])
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(n: f64) -> DispersiveMaterial {
        DispersiveMaterial::constant(n)
    }

    #[test]
    fn single_interface_fresnel() {
        let stack = Stack::new(c(1.0), vec![], c(1.46));
        let r = solve_stack(&stack, &PlaneWaveCtx::normal(2000.0)).unwrap();
        assert_relative_eq!(r.transmittance, 4.0 * 1.46 / (2.46f64 * 2.46), epsilon = 1e-14);
        assert_relative_eq!(r.transmittance + r.reflectance, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn zero_thickness_layer_is_identity() {
        let a = Stack::new(c(1.0), vec![Layer::new(c(2.0), 1.3).unwrap()], c(1.5));
        let mut b = a.clone();
        b.layers.insert(1, Layer::new(c(3.3), 0.0).unwrap());
        b.layers.insert(0, Layer::new(c(1.7), 0.0).unwrap());
        let ctx = PlaneWaveCtx::new(1500.0, 20.0, Polarization::P).unwrap();
        let (ra, rb) = (solve_stack(&a, &ctx).unwrap(), solve_stack(&b, &ctx).unwrap());
        assert!((ra.r - rb.r).norm() < 1e-14 && (ra.t - rb.t).norm() < 1e-14);
    }

    #[test]
    fn lossy_bounding_medium_is_contract_error() {
        let lossy = DispersiveMaterial::Constant(Complex64::new(1.5, 0.1));
        let stack = Stack::new(lossy, vec![], c(1.0));
        assert!(matches!(
            solve_stack(&stack, &PlaneWaveCtx::normal(2000.0)),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn bad_angle_is_domain_error() {
        assert!(matches!(
            PlaneWaveCtx::new(2000.0, 90.0, Polarization::S),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn window_correction_scales_power() {
        let stack = Stack::new(c(1.0), vec![Layer::new(c(2.0), 1.0).unwrap()], c(1.0));
        let ctx = PlaneWaveCtx::normal(1800.0);
        let t0 = solve_stack(&stack, &ctx).unwrap();
        let t1 = solve_stack(&stack.clone().with_window(WindowCorrection::Constant(0.9)).unwrap(), &ctx).unwrap();
        assert_relative_eq!(t1.transmittance, 0.81 * t0.transmittance, epsilon = 1e-14);
        assert_relative_eq!(t1.transmittance + t1.reflectance + t1.absorptance, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn field_map_rejects_zero_resolution() {
        let stack = Stack::new(c(1.0), vec![Layer::new(c(2.0), 1.0).unwrap()], c(1.0));
        assert!(field_map(&stack, &[2000.0], 0.0, 0.0, Polarization::S).is_err());
    }

    #[test]
    fn s_intensity_continuous_across_interfaces() {
        let stack = Stack::new(
            c(1.0),
            vec![Layer::new(c(2.0), 0.7).unwrap(), Layer::new(c(1.4), 0.5).unwrap()],
            c(1.5),
        );
        let ctx = PlaneWaveCtx::new(3000.0, 25.0, Polarization::S).unwrap();
        let f = StackField::new(&stack, &ctx).unwrap();
        for z in [0.0, 0.7, 1.2] {
            let a = f.intensity(z - 1e-9);
            let b = f.intensity(z + 1e-9);
            assert!((a - b).abs() < 1e-6, "jump at {z}: {a} vs {b}");
        }
    }
}
