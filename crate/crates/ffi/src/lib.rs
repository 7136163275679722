//! C ABI over the vibcav core library.
//!
//! Objects are opaque heap handles created by `*_new`/`*_preset` functions
//! and released with the matching `*_free`. Every fallible call returns a
//! [`VibcavStatus`]; on failure the message is available from
//! [`vibcav_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use libc::{c_char, c_int, size_t};
use num_complex::Complex64;
use vibcav::fit::dispersion::{DispersionDataset, Observation};
use vibcav::hopfield::{self, ControlKind, HopfieldParams, Model, PolaritonState, Sign};
use vibcav::materials::{parse_material, DispersiveMaterial};
use vibcav::tmm::{self, Layer, PlaneWaveCtx, Polarization, Stack, WindowCorrection};
use vibcav::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VibcavStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    Parse = 4,
    Numeric = 5,
    Data = 6,
    Io = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VibcavPolarization {
    S = 0,
    P = 1,
    Unpolarized = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VibcavModel {
    Full = 0,
    Rwa = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct VibcavPower {
    pub transmittance: f64,
    pub reflectance: f64,
    pub absorptance: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct VibcavPolariton {
    pub energy: f64,
    pub photon_fraction: f64,
    pub matter_fraction: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct VibcavHopfield {
    /// Vibrational energy, cm⁻¹.
    pub omega_nu: f64,
    /// Rabi frequency, cm⁻¹ (ignored by the Rabi fit).
    pub omega_r: f64,
    /// Background index of the cavity fill.
    pub n_b: f64,
    /// Effective-length factor (>= 1).
    pub alpha: f64,
}

/// One dispersion point: `kind` 0 = thickness (µm), 1 = angle (deg);
/// `sign` -1 = lower, +1 = upper branch.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct VibcavObservation {
    pub control: f64,
    pub kind: c_int,
    pub order: u32,
    pub sign: c_int,
    pub energy: f64,
}

/// Opaque optical material.
pub struct VibcavMaterial(DispersiveMaterial);

/// Opaque multilayer stack under construction.
pub struct VibcavStack {
    entry: DispersiveMaterial,
    layers: Vec<Layer>,
    exit: DispersiveMaterial,
    window: f64,
}

impl VibcavStack {
    fn build(&self) -> vibcav::Result<Stack> {
        Stack::new(self.entry.clone(), self.layers.clone(), self.exit.clone())
            .with_window(WindowCorrection::Constant(self.window))
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> VibcavStatus {
    match e {
        Error::Domain(_) | Error::Contract(_) | Error::Invariant { .. } | Error::Bracket(_) => VibcavStatus::Domain,
        Error::Parse { .. } | Error::Config(_) => VibcavStatus::Parse,
        Error::Numeric(_) | Error::ModelInstability(_) => VibcavStatus::Numeric,
        Error::InsufficientData(_) | Error::Data(_) => VibcavStatus::Data,
        Error::Io { .. } => VibcavStatus::Io,
    }
}

struct Fail(VibcavStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(VibcavStatus::NullPointer, format!("`{what}` is null"))
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(VibcavStatus::InvalidArgument, msg.into())
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> VibcavStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => VibcavStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            VibcavStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(format!("`{what}` is not valid UTF-8")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn slice_arg<'a, T>(p: *const T, n: size_t, what: &str) -> Result<&'a [T], Fail> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

fn polarization(p: VibcavPolarization) -> Polarization {
    match p {
        VibcavPolarization::S => Polarization::S,
        VibcavPolarization::P => Polarization::P,
        VibcavPolarization::Unpolarized => Polarization::Unpolarized,
    }
}

fn model(m: VibcavModel) -> Model {
    match m {
        VibcavModel::Full => Model::Full,
        VibcavModel::Rwa => Model::Rwa,
    }
}

fn params(h: &VibcavHopfield) -> HopfieldParams {
    HopfieldParams {
        omega_nu: h.omega_nu,
        omega_r: h.omega_r,
        length_um: 1.0,
        n_b: h.n_b,
        orders: Vec::new(),
        alpha: h.alpha,
    }
}

fn polariton(s: &PolaritonState) -> VibcavPolariton {
    VibcavPolariton {
        energy: s.energy,
        photon_fraction: s.photon_fraction,
        matter_fraction: s.matter_fraction,
    }
}

/// Message of the most recent failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn vibcav_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn vibcav_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Bundled material by name (`fe_co5`, `au_film`, `au_bulk`, `znse`, `baf2`).
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vibcav_material_preset(name: *const c_char, out: *mut *mut VibcavMaterial) -> VibcavStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let m = vibcav::presets::preset(str_arg(name, "name")?)?;
        *out = Box::into_raw(Box::new(VibcavMaterial(m)));
        Ok(())
    })
}

/// Material from a TOML material document.
///
/// # Safety
/// `toml` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vibcav_material_from_toml(toml: *const c_char, out: *mut *mut VibcavMaterial) -> VibcavStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let m = parse_material(str_arg(toml, "toml")?, "<ffi>", Path::new("."))?;
        *out = Box::into_raw(Box::new(VibcavMaterial(m)));
        Ok(())
    })
}

/// Non-dispersive material with index `n_re + i n_im`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vibcav_material_constant(n_re: f64, n_im: f64, out: *mut *mut VibcavMaterial) -> VibcavStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        if !(n_re > 0.0 && n_im >= 0.0 && n_re.is_finite() && n_im.is_finite()) {
            return Err(invalid("index must have Re > 0 and Im >= 0"));
        }
        let m = DispersiveMaterial::Constant(Complex64::new(n_re, n_im));
        *out = Box::into_raw(Box::new(VibcavMaterial(m)));
        Ok(())
    })
}

/// Complex refractive index at wavenumber `k` (cm⁻¹).
///
/// # Safety
/// `material` must be a live handle; `n_re` and `n_im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vibcav_material_index(
    material: *const VibcavMaterial,
    k: f64,
    n_re: *mut f64,
    n_im: *mut f64,
) -> VibcavStatus {
    guard(|| {
        let m = material.as_ref().ok_or_else(|| null("material"))?;
        let (re, im) = (out_arg(n_re, "n_re")?, out_arg(n_im, "n_im")?);
        let n = m.0.index(k)?;
        *re = n.re;
        *im = n.im;
        Ok(())
    })
}

/// # Safety
/// `material` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vibcav_material_free(material: *mut VibcavMaterial) {
    if !material.is_null() {
        drop(Box::from_raw(material));
    }
}

/// Empty stack between two semi-infinite media. The materials are copied.
///
/// # Safety
/// `entry` and `exit` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vibcav_stack_new(
    entry: *const VibcavMaterial,
    exit: *const VibcavMaterial,
    out: *mut *mut VibcavStack,
) -> VibcavStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let entry = entry.as_ref().ok_or_else(|| null("entry"))?;
        let exit = exit.as_ref().ok_or_else(|| null("exit"))?;
        *out = Box::into_raw(Box::new(VibcavStack {
            entry: entry.0.clone(),
            layers: Vec::new(),
            exit: exit.0.clone(),
            window: 1.0,
        }));
        Ok(())
    })
}

/// Appends a layer on the exit side. The material is copied.
///
/// # Safety
/// `stack` and `material` must be live handles.
#[no_mangle]
pub unsafe extern "C" fn vibcav_stack_push_layer(
    stack: *mut VibcavStack,
    material: *const VibcavMaterial,
    thickness_um: f64,
) -> VibcavStatus {
    guard(|| {
        let s = stack.as_mut().ok_or_else(|| null("stack"))?;
        let m = material.as_ref().ok_or_else(|| null("material"))?;
        s.layers.push(Layer::new(m.0.clone(), thickness_um)?);
        Ok(())
    })
}

/// Sets the constant window amplitude factor C (0 <= C <= 1).
///
/// # Safety
/// `stack` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn vibcav_stack_set_window(stack: *mut VibcavStack, c: f64) -> VibcavStatus {
    guard(|| {
        let s = stack.as_mut().ok_or_else(|| null("stack"))?;
        WindowCorrection::Constant(c).validate()?;
        s.window = c;
        Ok(())
    })
}

/// Number of layers currently in the stack.
///
/// # Safety
/// `stack` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vibcav_stack_layer_count(stack: *const VibcavStack) -> size_t {
    stack.as_ref().map_or(0, |s| s.layers.len())
}

/// Power coefficients at one wavenumber and external angle.
///
/// # Safety
/// `stack` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vibcav_stack_solve(
    stack: *const VibcavStack,
    k: f64,
    angle_deg: f64,
    pol: VibcavPolarization,
    out: *mut VibcavPower,
) -> VibcavStatus {
    guard(|| {
        let s = stack.as_ref().ok_or_else(|| null("stack"))?;
        let out = out_arg(out, "out")?;
        let ctx = PlaneWaveCtx::new(k, angle_deg, polarization(pol))?;
        let r = tmm::solve_stack(&s.build()?, &ctx)?;
        *out = VibcavPower {
            transmittance: r.transmittance,
            reflectance: r.reflectance,
            absorptance: r.absorptance,
        };
        Ok(())
    })
}

/// Transmittance over `n` strictly increasing wavenumbers into `out[n]`.
///
/// # Safety
/// `ks` and `out` must point to `n` elements; `stack` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn vibcav_stack_spectrum(
    stack: *const VibcavStack,
    ks: *const f64,
    n: size_t,
    angle_deg: f64,
    pol: VibcavPolarization,
    out: *mut f64,
) -> VibcavStatus {
    guard(|| {
        let s = stack.as_ref().ok_or_else(|| null("stack"))?;
        let ks = slice_arg(ks, n, "ks")?;
        if n > 0 && out.is_null() {
            return Err(null("out"));
        }
        let spec = tmm::transmission_spectrum(&s.build()?, ks, angle_deg, polarization(pol))?;
        if n > 0 {
            std::slice::from_raw_parts_mut(out, n).copy_from_slice(spec.values());
        }
        Ok(())
    })
}

/// # Safety
/// `stack` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vibcav_stack_free(stack: *mut VibcavStack) {
    if !stack.is_null() {
        drop(Box::from_raw(stack));
    }
}

/// Lower and upper polariton at bare cavity energy `omega_c` (cm⁻¹).
///
/// # Safety
/// `params`, `lower` and `upper` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn vibcav_polaritons(
    m: VibcavModel,
    params_in: *const VibcavHopfield,
    omega_c: f64,
    lower: *mut VibcavPolariton,
    upper: *mut VibcavPolariton,
) -> VibcavStatus {
    guard(|| {
        let p = params(params_in.as_ref().ok_or_else(|| null("params"))?);
        let (lo, up) = (out_arg(lower, "lower")?, out_arg(upper, "upper")?);
        p.validate()?;
        let sys = hopfield::polaritons(model(m), &p, omega_c)?;
        *lo = polariton(&sys.lower);
        *up = polariton(&sys.upper);
        Ok(())
    })
}

/// Polaritonic gap (cm⁻¹) over detunings `omega_c - omega_nu` in `[lo, hi]`.
///
/// # Safety
/// `params` and `gap` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn vibcav_bandgap(
    m: VibcavModel,
    params_in: *const VibcavHopfield,
    detuning_lo: f64,
    detuning_hi: f64,
    samples: size_t,
    gap: *mut f64,
) -> VibcavStatus {
    guard(|| {
        let p = params(params_in.as_ref().ok_or_else(|| null("params"))?);
        let gap = out_arg(gap, "gap")?;
        p.validate()?;
        *gap = hopfield::bandgap(model(m), &p, (detuning_lo, detuning_hi), samples)?.gap;
        Ok(())
    })
}

/// Fits the Rabi frequency to `n` dispersion points inside `[lo, hi]`.
/// Writes the fitted value and χ²; `converged` receives 1 or 0.
///
/// # Safety
/// `obs` must point to `n` elements; the output pointers must be writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn vibcav_fit_rabi(
    m: VibcavModel,
    params_in: *const VibcavHopfield,
    obs: *const VibcavObservation,
    n: size_t,
    lo: f64,
    hi: f64,
    omega_r: *mut f64,
    chi2: *mut f64,
    converged: *mut c_int,
) -> VibcavStatus {
    guard(|| {
        let p = params(params_in.as_ref().ok_or_else(|| null("params"))?);
        let (w, c2, conv) = (out_arg(omega_r, "omega_r")?, out_arg(chi2, "chi2")?, out_arg(converged, "converged")?);
        let obs = slice_arg(obs, n, "obs")?;
        let mut data = Vec::with_capacity(obs.len());
        for (i, o) in obs.iter().enumerate() {
            let kind = match o.kind {
                0 => ControlKind::Thickness,
                1 => ControlKind::Angle,
                k => return Err(invalid(format!("obs[{i}].kind = {k}: expected 0 or 1"))),
            };
            let sign = match o.sign {
                -1 => Sign::Lower,
                1 => Sign::Upper,
                s => return Err(invalid(format!("obs[{i}].sign = {s}: expected -1 or 1"))),
            };
            data.push(Observation {
                control: o.control,
                kind,
                order: o.order,
                sign,
                energy: o.energy,
            });
        }
        let data = DispersionDataset::new(data)?;
        let r = vibcav::fit::fit_rabi(&data, &p, model(m), (lo, hi))?;
        *w = r.parameter("omega_R").unwrap_or(f64::NAN);
        *c2 = r.chi2;
        *conv = c_int::from(r.converged);
        Ok(())
    })
}
