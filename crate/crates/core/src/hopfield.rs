//! Hopfield–Bogoliubov polariton model for one cavity mode coupled to a
//! collective vibrational mode, with and without the rotating-wave
//! approximation.
//!
//! State vectors are `(w, x, y, z)` for `χ = w a + x B + y a† + z B†`. The
//! Bogoliubov metric is `diag(1, 1, −1, −1)`.

use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::units::um_to_cm;

pub type Mat4 = [[Complex64; 4]; 4];

const METRIC: [f64; 4] = [1.0, 1.0, -1.0, -1.0];
/// Allowed imaginary part of an eigenvalue, relative to the spectral scale.
pub const REALITY_TOL: f64 = 1e-8;
/// Allowed deviation of normalised states from unit metric norm.
pub const NORM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    /// Anti-resonant coupling and dipolar self-energy retained.
    Full,
    /// Rotating-wave approximation without self-energy.
    Rwa,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Full => "full",
            Model::Rwa => "rwa",
        }
    }
}

impl FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Ok(Model::Full),
            "rwa" => Ok(Model::Rwa),
            other => Err(Error::Config(format!("unknown model `{other}` (expected full or rwa)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HopfieldParams {
    /// Vibrational energy ω_ν, cm⁻¹.
    pub omega_nu: f64,
    /// Collective Rabi frequency Ω_R (half the resonant splitting), cm⁻¹.
    pub omega_r: f64,
    pub length_um: f64,
    pub n_b: f64,
    pub orders: Vec<u32>,
    pub alpha: f64,
}

impl HopfieldParams {
    pub fn validate(&self) -> Result<()> {
        let pos = |name: &str, v: f64| -> Result<()> {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invariant(name.to_string(), format!("must be > 0, got {v}")));
            }
            Ok(())
        };
        pos("omega_nu", self.omega_nu)?;
        if !(self.omega_r >= 0.0) || !self.omega_r.is_finite() {
            return Err(Error::invariant("omega_r", format!("must be >= 0, got {}", self.omega_r)));
        }
        pos("length_um", self.length_um)?;
        pos("n_b", self.n_b)?;
        pos("alpha", self.alpha)?;
        if self.orders.contains(&0) {
            return Err(Error::invariant("orders", "mode orders must be >= 1"));
        }
        Ok(())
    }

    /// Self-energy `D = Ω_R² / ω_ν`.
    pub fn d(&self) -> f64 {
        self.omega_r * self.omega_r / self.omega_nu
    }

    pub fn with_omega_r(&self, omega_r: f64) -> Self {
        Self {
            omega_r,
            ..self.clone()
        }
    }

    pub fn with_length(&self, length_um: f64) -> Self {
        Self {
            length_um,
            ..self.clone()
        }
    }
}

/// `ω_c^m = (1/n_b) √((m / 2αL)² + k_∥²)`, all in cm⁻¹.
pub fn cavity_mode_energy(m: u32, length_um: f64, n_b: f64, alpha: f64, k_par: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain("mode order must be >= 1".into()));
    }
    if !(length_um > 0.0) || !(n_b > 0.0) || !(alpha > 0.0) {
        return Err(Error::Domain(format!(
            "need L, n_b, alpha > 0 (got {length_um}, {n_b}, {alpha})"
        )));
    }
    let kz = m as f64 / (2.0 * alpha * um_to_cm(length_um));
    Ok((kz * kz + k_par * k_par).sqrt() / n_b)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Full Hopfield matrix for cavity energy `omega_c`.
///
/// The light–matter coupling of a cavity mode scales as `√ω_c`, so the
/// off-diagonal entries carry `Ω = Ω_R √(ω_c/ω_ν)`, which equals Ω_R at
/// resonance. The self-energy `D = Ω_R²/ω_ν` is a property of the medium
/// alone and stays fixed.
pub fn build_full_matrix(params: &HopfieldParams, omega_c: f64) -> Result<Mat4> {
    if !(omega_c > 0.0) || !omega_c.is_finite() {
        return Err(Error::Domain(format!("omega_c must be > 0, got {omega_c}")));
    }
    let wn = params.omega_nu;
    let g = params.omega_r * (omega_c / wn).sqrt();
    let d2 = 2.0 * params.d();
    let ig = c(0.0, g);
    let z = c(0.0, 0.0);
    Ok([
        [c(omega_c, 0.0), ig, z, ig],
        [-ig, c(wn + d2, 0.0), ig, c(d2, 0.0)],
        [z, ig, c(-omega_c, 0.0), ig],
        [ig, c(-d2, 0.0), -ig, c(-wn - d2, 0.0)],
    ])
}

/// Block-diagonal RWA matrix; accepts any real `omega_c`.
pub fn build_rwa_matrix(params: &HopfieldParams, omega_c: f64) -> Result<Mat4> {
    if !omega_c.is_finite() {
        return Err(Error::Domain(format!("omega_c must be finite, got {omega_c}")));
    }
    let ig = c(0.0, params.omega_r);
    let z = c(0.0, 0.0);
    Ok([
        [c(omega_c, 0.0), ig, z, z],
        [-ig, c(params.omega_nu, 0.0), z, z],
        [z, z, c(-omega_c, 0.0), ig],
        [z, z, -ig, c(-params.omega_nu, 0.0)],
    ])
}

pub fn build_matrix(model: Model, params: &HopfieldParams, omega_c: f64) -> Result<Mat4> {
    match model {
        Model::Full => build_full_matrix(params, omega_c),
        Model::Rwa => build_rwa_matrix(params, omega_c),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolaritonState {
    pub energy: f64,
    /// `[w, x, y, z]`.
    pub coefficients: [Complex64; 4],
    pub photon_fraction: f64,
    pub matter_fraction: f64,
}

impl PolaritonState {
    pub fn norm(&self) -> f64 {
        metric_norm(&self.coefficients)
    }
}

/// Photon and matter weights `|w|² − |y|²` and `|x|² − |z|²`.
pub fn hopfield_fractions(coefficients: &[Complex64; 4]) -> Result<(f64, f64)> {
    let photon = coefficients[0].norm_sqr() - coefficients[2].norm_sqr();
    let matter = coefficients[1].norm_sqr() - coefficients[3].norm_sqr();
    if ((photon + matter) - 1.0).abs() > NORM_TOL {
        return Err(Error::Contract(format!(
            "state is not Bogoliubov-normalised (norm {})",
            photon + matter
        )));
    }
    Ok((photon.clamp(0.0, 1.0), matter.clamp(0.0, 1.0)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigensystem {
    /// Positive-norm states, (lower, upper).
    pub lower: PolaritonState,
    pub upper: PolaritonState,
    /// All four eigenvalues, ascending.
    pub eigenvalues: [f64; 4],
    /// Coefficients of the negative-norm partners, in the order of
    /// `eigenvalues` entries they belong to (lower partner first).
    pub partners: [(f64, [Complex64; 4]); 2],
}

fn metric_norm(v: &[Complex64; 4]) -> f64 {
    v.iter().zip(METRIC).map(|(a, s)| s * a.norm_sqr()).sum()
}

fn mat_vec(m: &Mat4, v: &[Complex64; 4]) -> [Complex64; 4] {
    let mut out = [c(0.0, 0.0); 4];
    for (i, row) in m.iter().enumerate() {
        out[i] = row.iter().zip(v).map(|(a, b)| a * b).sum();
    }
    out
}

/// Characteristic polynomial `λ⁴ + c₃λ³ + c₂λ² + c₁λ + c₀` via
/// Faddeev–LeVerrier; returns `[c₀, c₁, c₂, c₃]`.
pub fn characteristic_polynomial(m: &Mat4) -> [Complex64; 4] {
    let mut coeffs = [c(0.0, 0.0); 4];
    let mut mk = [[c(0.0, 0.0); 4]; 4];
    let mut ck = c(1.0, 0.0);
    for k in 1..=4 {
        // M_k = A M_{k−1} + c_{n−k+1} I, with M_0 = 0.
        let mut next = [[c(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let mut s = c(0.0, 0.0);
                for l in 0..4 {
                    s += m[i][l] * mk[l][j];
                }
                next[i][j] = s;
            }
            next[i][i] += ck;
        }
        mk = next;
        let mut tr = c(0.0, 0.0);
        for i in 0..4 {
            for l in 0..4 {
                tr += m[i][l] * mk[l][i];
            }
        }
        ck = -tr / k as f64;
        coeffs[4 - k] = ck;
    }
    coeffs
}

fn poly_eval(coeffs: &[Complex64; 4], x: Complex64) -> (Complex64, Complex64) {
    let p = (((x + coeffs[3]) * x + coeffs[2]) * x + coeffs[1]) * x + coeffs[0];
    let dp = ((4.0 * x + 3.0 * coeffs[3]) * x + 2.0 * coeffs[2]) * x + coeffs[1];
    (p, dp)
}

fn polish(coeffs: &[Complex64; 4], mut x: Complex64) -> Complex64 {
    for _ in 0..8 {
        let (p, dp) = poly_eval(coeffs, x);
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        x -= step;
        if step.norm() <= 1e-15 * x.norm().max(1.0) {
            break;
        }
    }
    x
}

fn cbrt(z: Complex64) -> Complex64 {
    if z.norm() == 0.0 {
        z
    } else {
        z.powf(1.0 / 3.0)
    }
}

/// One root of the monic cubic `x³ + a x² + b x + c`, the largest in modulus.
fn cubic_root(a: Complex64, b: Complex64, cc: Complex64) -> Complex64 {
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + cc;
    let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    let u = {
        let u1 = cbrt(-q / 2.0 + disc);
        let u2 = cbrt(-q / 2.0 - disc);
        if u1.norm() >= u2.norm() {
            u1
        } else {
            u2
        }
    };
    let omega = c(-0.5, 3f64.sqrt() / 2.0);
    let roots: Vec<Complex64> = if u.norm() == 0.0 {
        vec![c(0.0, 0.0)]
    } else {
        (0..3)
            .map(|k| {
                let uk = u * omega.powu(k);
                uk - p / (3.0 * uk)
            })
            .collect()
    };
    let mut best = roots
        .into_iter()
        .map(|y| y - a / 3.0)
        .max_by(|x, y| x.norm().total_cmp(&y.norm()))
        .unwrap();
    for _ in 0..6 {
        let f = ((best + a) * best + b) * best + cc;
        let df = (3.0 * best + 2.0 * a) * best + b;
        if df.norm() == 0.0 {
            break;
        }
        best -= f / df;
    }
    best
}

/// Roots of the monic quartic with coefficients `[c₀, c₁, c₂, c₃]` by
/// Ferrari's method, each refined by Newton iteration.
pub fn quartic_roots(coeffs: &[Complex64; 4]) -> [Complex64; 4] {
    let a = coeffs[3];
    let shift = a / 4.0;
    // Depressed quartic y⁴ + p y² + q y + r with x = y − a/4.
    let p = coeffs[2] - 3.0 * a * a / 8.0;
    let q = coeffs[1] - a * coeffs[2] / 2.0 + a * a * a / 8.0;
    let r = coeffs[0] - a * coeffs[1] / 4.0 + a * a * coeffs[2] / 16.0 - 3.0 * a.powu(4) / 256.0;
    let scale = p.norm().max(r.norm().sqrt()).max(1e-300);
    let ys: [Complex64; 4] = if q.norm() <= 1e-14 * scale.powf(1.5) {
        let disc = (p * p - 4.0 * r).sqrt();
        let z1 = (-p + disc) / 2.0;
        let z2 = (-p - disc) / 2.0;
        let (s1, s2) = (z1.sqrt(), z2.sqrt());
        [s1, -s1, s2, -s2]
    } else {
        // 8m³ + 8pm² + (2p² − 8r)m − q² = 0
        let m = cubic_root(p, p * p / 4.0 - r, -q * q / 8.0);
        let s = (2.0 * m).sqrt();
        let half = p / 2.0 + m;
        let corr = q / (2.0 * s);
        let quad = |b: Complex64, c0: Complex64| -> [Complex64; 2] {
            let d = (b * b - 4.0 * c0).sqrt();
            [(-b + d) / 2.0, (-b - d) / 2.0]
        };
        let [y1, y2] = quad(-s, half + corr);
        let [y3, y4] = quad(s, half - corr);
        [y1, y2, y3, y4]
    };
    ys.map(|y| polish(coeffs, y - shift))
}

/// Null vector of `m − λ I` by Gaussian elimination with complete pivoting.
fn null_vector(m: &Mat4, lambda: f64) -> [Complex64; 4] {
    let mut a = *m;
    for (i, row) in a.iter_mut().enumerate() {
        row[i] -= lambda;
    }
    let mut cols = [0usize, 1, 2, 3];
    for step in 0..3 {
        let (mut pr, mut pc, mut best) = (step, step, -1.0);
        for (i, row) in a.iter().enumerate().skip(step) {
            for (j, v) in row.iter().enumerate().skip(step) {
                if v.norm() > best {
                    best = v.norm();
                    pr = i;
                    pc = j;
                }
            }
        }
        a.swap(step, pr);
        for row in a.iter_mut() {
            row.swap(step, pc);
        }
        cols.swap(step, pc);
        let piv = a[step][step];
        if piv.norm() == 0.0 {
            break;
        }
        for i in step + 1..4 {
            let f = a[i][step] / piv;
            for j in step..4 {
                let v = a[step][j];
                a[i][j] -= f * v;
            }
        }
    }
    // Back-substitute with the last (permuted) component fixed to 1.
    let mut y = [c(0.0, 0.0); 4];
    y[3] = c(1.0, 0.0);
    for i in (0..3).rev() {
        let s: Complex64 = (i + 1..4).map(|j| a[i][j] * y[j]).sum();
        y[i] = if a[i][i].norm() == 0.0 { c(0.0, 0.0) } else { -s / a[i][i] };
    }
    let mut v = [c(0.0, 0.0); 4];
    for (k, &col) in cols.iter().enumerate() {
        v[col] = y[k];
    }
    v
}

/// Scales to unit metric norm (sign given by the norm) and fixes the phase
/// so the largest component is real and positive.
fn normalise(v: [Complex64; 4]) -> Option<(f64, [Complex64; 4])> {
    let n = metric_norm(&v);
    if n == 0.0 || !n.is_finite() {
        return None;
    }
    let big = v.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap();
    let phase = big.conj() / big.norm();
    let s = 1.0 / n.abs().sqrt();
    Some((n.signum(), v.map(|x| x * phase * s)))
}

fn is_diagonal(m: &Mat4) -> bool {
    (0..4).all(|i| (0..4).all(|j| i == j || m[i][j] == c(0.0, 0.0)))
}

fn state(energy: f64, coefficients: [Complex64; 4]) -> Result<PolaritonState> {
    let (photon_fraction, matter_fraction) = hopfield_fractions(&coefficients)?;
    Ok(PolaritonState {
        energy,
        coefficients,
        photon_fraction,
        matter_fraction,
    })
}

/// Eigen-decomposition of a Hopfield matrix.
///
/// Eigenvalues come from the characteristic quartic; each is refined with
/// its eigenvector through the Hermitian form `v†ηMv / v†ηv`.
pub fn diagonalize(m: &Mat4) -> Result<Eigensystem> {
    let mut pairs: Vec<(f64, f64, [Complex64; 4])> = Vec::with_capacity(4);
    if is_diagonal(m) {
        for i in 0..4 {
            let mut v = [c(0.0, 0.0); 4];
            v[i] = c(1.0, 0.0);
            pairs.push((m[i][i].re, METRIC[i], v));
        }
    } else {
        let roots = quartic_roots(&characteristic_polynomial(m));
        let scale = roots.iter().map(|r| r.norm()).fold(1.0, f64::max);
        if let Some(bad) = roots.iter().find(|r| r.im.abs() > REALITY_TOL * scale) {
            return Err(Error::ModelInstability(format!("complex eigenvalue {bad}")));
        }
        let mut lams: Vec<f64> = roots.iter().map(|r| r.re).collect();
        lams.sort_by(f64::total_cmp);
        for lam in lams {
            let v = null_vector(m, lam);
            let (sign, v) = normalise(v)
                .ok_or_else(|| Error::ModelInstability(format!("null-norm eigenvector at {lam}")))?;
            let mv = mat_vec(m, &v);
            let num: f64 = v.iter().zip(mv.iter()).zip(METRIC).map(|((a, b), s)| s * (a.conj() * b).re).sum();
            pairs.push((num / metric_norm(&v), sign, v));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let eigenvalues = [pairs[0].0, pairs[1].0, pairs[2].0, pairs[3].0];
    let positive: Vec<_> = pairs.iter().filter(|p| p.1 > 0.0).collect();
    let negative: Vec<_> = pairs.iter().filter(|p| p.1 < 0.0).collect();
    if positive.len() != 2 || negative.len() != 2 {
        return Err(Error::ModelInstability(format!(
            "expected two positive-norm states, found {}",
            positive.len()
        )));
    }
    Ok(Eigensystem {
        lower: state(positive[0].0, positive[0].2)?,
        upper: state(positive[1].0, positive[1].2)?,
        eigenvalues,
        partners: [(negative[0].0, negative[0].2), (negative[1].0, negative[1].2)],
    })
}

/// Lower and upper polariton at cavity energy `omega_c`.
pub fn polaritons(model: Model, params: &HopfieldParams, omega_c: f64) -> Result<Eigensystem> {
    diagonalize(&build_matrix(model, params, omega_c)?)
        .map_err(|e| e.context(format!("{} model at omega_c = {omega_c}", model.name())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ControlKind {
    /// Cavity length, µm.
    Thickness,
    /// External incidence angle, degrees.
    Angle,
}

impl ControlKind {
    pub fn name(self) -> &'static str {
        match self {
            ControlKind::Thickness => "thickness",
            ControlKind::Angle => "angle",
        }
    }
}

impl FromStr for ControlKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "thickness" | "length" => Ok(ControlKind::Thickness),
            "angle" => Ok(ControlKind::Angle),
            other => Err(Error::Config(format!("unknown control kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Lower,
    Upper,
}

impl Sign {
    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Lower => "-",
            Sign::Upper => "+",
        }
    }
}

impl FromStr for Sign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "-" | "lower" | "LP" | "P-" => Ok(Sign::Lower),
            "+" | "upper" | "UP" | "P+" => Ok(Sign::Upper),
            other => Err(Error::Data(format!("invalid branch sign `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchSample {
    pub control: f64,
    /// Bare cavity energy at this point, cm⁻¹.
    pub omega_c: f64,
    pub state: PolaritonState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolaritonBranch {
    pub order: u32,
    pub sign: Sign,
    pub kind: ControlKind,
    pub samples: Vec<BranchSample>,
}

/// Thickness or angle sweep of the cavity.
#[derive(Debug, Clone, PartialEq)]
pub enum Sweep {
    Thickness(Vec<f64>),
    Angle(Vec<f64>),
}

impl Sweep {
    pub fn kind(&self) -> ControlKind {
        match self {
            Sweep::Thickness(_) => ControlKind::Thickness,
            Sweep::Angle(_) => ControlKind::Angle,
        }
    }

    pub fn values(&self) -> &[f64] {
        match self {
            Sweep::Thickness(v) | Sweep::Angle(v) => v,
        }
    }
}

/// Polariton of order `m` on one side at an external angle. The in-plane
/// wavenumber `E sin θ` depends on the polariton energy itself, so `E` is
/// found by fixed-point iteration.
pub fn polariton_at_angle(
    model: Model,
    params: &HopfieldParams,
    m: u32,
    angle_deg: f64,
    sign: Sign,
) -> Result<(f64, PolaritonState)> {
    if !(0.0..90.0).contains(&angle_deg) {
        return Err(Error::Domain(format!("angle must lie in [0, 90), got {angle_deg}")));
    }
    let s = angle_deg.to_radians().sin();
    let pick = |es: &Eigensystem| match sign {
        Sign::Lower => es.lower,
        Sign::Upper => es.upper,
    };
    let solve = |k_par: f64| -> Result<(f64, PolaritonState)> {
        let wc = cavity_mode_energy(m, params.length_um, params.n_b, params.alpha, k_par)?;
        Ok((wc, pick(&polaritons(model, params, wc)?)))
    };
    let (mut wc, mut st) = solve(0.0)?;
    if s == 0.0 {
        return Ok((wc, st));
    }
    for _ in 0..500 {
        let (wc1, st1) = solve(st.energy * s)?;
        let done = (st1.energy - st.energy).abs() <= 1e-11 * st.energy.abs().max(1.0);
        wc = wc1;
        st = st1;
        if done {
            return Ok((wc, st));
        }
    }
    Err(Error::Numeric(format!(
        "angle self-consistency did not converge for order {m} at {angle_deg} deg"
    )))
}

/// Polariton of order `m` on one side for a control value.
pub fn polariton_at(
    model: Model,
    params: &HopfieldParams,
    m: u32,
    kind: ControlKind,
    control: f64,
    sign: Sign,
) -> Result<(f64, PolaritonState)> {
    match kind {
        ControlKind::Thickness => {
            let wc = cavity_mode_energy(m, control, params.n_b, params.alpha, 0.0)?;
            let es = polaritons(model, params, wc)?;
            Ok((wc, if sign == Sign::Lower { es.lower } else { es.upper }))
        }
        ControlKind::Angle => polariton_at_angle(model, params, m, control, sign),
    }
}

/// Branches `P_m±` for every order in `params.orders` along the sweep.
/// Orders are treated independently. Output is sorted by (order, sign)
/// with samples sorted by control value.
pub fn polariton_branches(model: Model, params: &HopfieldParams, sweep: &Sweep) -> Result<Vec<PolaritonBranch>> {
    params.validate()?;
    let kind = sweep.kind();
    let mut controls = sweep.values().to_vec();
    if controls.is_empty() {
        return Err(Error::InsufficientData("empty sweep".into()));
    }
    if let Some(bad) = controls.iter().find(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("sweep value {bad} is not finite")));
    }
    controls.sort_by(f64::total_cmp);
    let mut orders = params.orders.clone();
    orders.sort_unstable();
    orders.dedup();
    if orders.is_empty() {
        return Err(Error::InsufficientData("no mode orders requested".into()));
    }
    let mut jobs = Vec::new();
    for &m in &orders {
        for sign in [Sign::Lower, Sign::Upper] {
            jobs.push((m, sign));
        }
    }
    jobs.par_iter()
        .map(|&(m, sign)| {
            let samples = controls
                .iter()
                .map(|&x| {
                    polariton_at(model, params, m, kind, x, sign)
                        .map(|(omega_c, state)| BranchSample {
                            control: x,
                            omega_c,
                            state,
                        })
                        .map_err(|e| e.context(format!("{} = {x}", kind.name())))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(PolaritonBranch {
                order: m,
                sign,
                kind,
                samples,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bandgap {
    /// `inf UP − sup LP`, cm⁻¹.
    pub gap: f64,
    pub lower_sup: f64,
    pub upper_inf: f64,
    /// Number of cavity energies evaluated.
    pub samples: usize,
}

/// Polaritonic gap over cavity detunings `ω_c − ω_ν ∈ [lo, hi]`.
///
/// The range must cover at least ±5 Ω_R. The full model is only defined
/// for `ω_c > 0`, so non-positive cavity energies are skipped there; the
/// RWA model accepts any real `ω_c`.
pub fn bandgap(model: Model, params: &HopfieldParams, detuning: (f64, f64), samples: usize) -> Result<Bandgap> {
    params.validate()?;
    let (lo, hi) = detuning;
    let need = 5.0 * params.omega_r;
    if !(lo <= -need && hi >= need) || !(lo < hi) {
        return Err(Error::InsufficientData(format!(
            "detuning range [{lo}, {hi}] must span at least ±5 Ω_R = ±{need}"
        )));
    }
    let n = samples.max(3);
    let grid: Vec<f64> = (0..n)
        .map(|i| params.omega_nu + lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .filter(|&wc| model == Model::Rwa || wc > 0.0)
        .collect();
    if grid.is_empty() {
        return Err(Error::InsufficientData("no positive cavity energy in range".into()));
    }
    let energies = grid
        .par_iter()
        .map(|&wc| polaritons(model, params, wc).map(|es| (es.lower.energy, es.upper.energy)))
        .collect::<Result<Vec<_>>>()?;
    let lower_sup = energies.iter().map(|e| e.0).fold(f64::NEG_INFINITY, f64::max);
    let upper_inf = energies.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
    Ok(Bandgap {
        gap: upper_inf - lower_sup,
        lower_sup,
        upper_inf,
        samples: grid.len(),
    })
}
