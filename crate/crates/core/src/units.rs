//! Unit conventions.
//!
//! Spectral quantities are spectroscopic wavenumbers in cm⁻¹ and lengths are
//! micrometres. Conversions happen only at API boundaries.

use std::f64::consts::PI;

/// Micrometres per centimetre.
pub const UM_PER_CM: f64 = 1.0e4;

/// Wavenumbers (cm⁻¹) per electron-volt.
pub const CM1_PER_EV: f64 = 8065.543937;

#[inline]
pub fn um_to_cm(len_um: f64) -> f64 {
    len_um / UM_PER_CM
}

#[inline]
pub fn nm_to_um(len_nm: f64) -> f64 {
    len_nm * 1.0e-3
}

#[inline]
pub fn ev_to_wavenumber(ev: f64) -> f64 {
    ev * CM1_PER_EV
}

#[inline]
pub fn wavenumber_to_ev(k: f64) -> f64 {
    k / CM1_PER_EV
}

/// Angular wavenumber 2πk in rad/µm for a spectroscopic wavenumber in cm⁻¹.
#[inline]
pub fn angular_per_um(k: f64) -> f64 {
    2.0 * PI * k / UM_PER_CM
}
