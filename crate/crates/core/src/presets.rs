//! Bundled material definitions.

use std::path::Path;

use crate::error::{Error, Result};
use crate::materials::{parse_material, DispersiveMaterial};

const FE_CO5: &str = include_str!("../data/fe_co5.toml");
const AU_FILM: &str = include_str!("../data/au_film.toml");
const AU_BULK: &str = include_str!("../data/au.toml");
const ZNSE: &str = include_str!("../data/znse.toml");
const BAF2: &str = include_str!("../data/baf2.toml");

/// Names accepted by [`preset`].
pub const NAMES: &[&str] = &["fe_co5", "au_film", "au_bulk", "znse", "baf2"];

pub fn preset(name: &str) -> Result<DispersiveMaterial> {
    let text = match name {
        "fe_co5" => FE_CO5,
        "au_film" | "au" => AU_FILM,
        "au_bulk" => AU_BULK,
        "znse" => ZNSE,
        "baf2" => BAF2,
        other => {
            return Err(Error::Config(format!(
                "unknown preset `{other}` (available: {})",
                NAMES.join(", ")
            )))
        }
    };
    parse_material(text, &format!("preset:{name}"), Path::new("."))
}

/// Seven-oscillator Fe(CO)₅ liquid model.
pub fn fe_co5() -> DispersiveMaterial {
    preset("fe_co5").expect("bundled preset parses")
}

/// Drude–Lorentz gold with film-level damping, used for 13 nm mirrors.
pub fn au_film() -> DispersiveMaterial {
    preset("au_film").expect("bundled preset parses")
}

pub fn au_bulk() -> DispersiveMaterial {
    preset("au_bulk").expect("bundled preset parses")
}

pub fn znse() -> DispersiveMaterial {
    preset("znse").expect("bundled preset parses")
}

pub fn baf2() -> DispersiveMaterial {
    preset("baf2").expect("bundled preset parses")
}

/// Resolves `preset:<name>` or a path relative to `base_dir`.
pub fn resolve_material(reference: &str, base_dir: &Path) -> Result<DispersiveMaterial> {
    match reference.strip_prefix("preset:") {
        Some(name) => preset(name),
        None => crate::materials::load_material(crate::materials::resolve(base_dir, reference)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_parse() {
        for name in NAMES {
            preset(name).unwrap();
        }
        assert_eq!(fe_co5().as_lorentz().unwrap().oscillators.len(), 7);
    }
}
