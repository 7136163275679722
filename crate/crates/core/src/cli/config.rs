//! Run configuration documents: loading, environment overrides and typed
//! access with key-path diagnostics.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use toml::{Table, Value};

use crate::error::{Error, Result};
use crate::materials::{DispersiveMaterial, MetalMirror};
use crate::presets;
use crate::spectrum::uniform_grid;
use crate::tmm::{Layer, Stack, WindowCorrection};

pub const ENV_PREFIX: &str = "VIBCAV_";

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub table: Table,
    /// Directory against which relative paths resolve.
    pub base_dir: PathBuf,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let table: Table = toml::from_str(&text).map_err(|e| Error::Parse {
            source_name: path.display().to_string(),
            message: e.to_string(),
        })?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(Self { table, base_dir })
    }

    pub fn from_str(text: &str, base_dir: &Path) -> Result<Self> {
        let table: Table = toml::from_str(text).map_err(|e| Error::Parse {
            source_name: "config".into(),
            message: e.to_string(),
        })?;
        Ok(Self {
            table,
            base_dir: base_dir.to_path_buf(),
        })
    }

    /// Applies `VIBCAV_A__B=value` as `a.b = value`. Values parse as TOML
    /// scalars or arrays when possible and fall back to strings.
    pub fn apply_env<I: IntoIterator<Item = (String, String)>>(&mut self, vars: I) -> Result<Vec<String>> {
        let mut applied = Vec::new();
        let mut vars: Vec<(String, String)> = vars
            .into_iter()
            .filter(|(k, _)| k.starts_with(ENV_PREFIX) && k.len() > ENV_PREFIX.len())
            .collect();
        vars.sort();
        for (k, v) in vars {
            let path: Vec<String> = k[ENV_PREFIX.len()..]
                .split("__")
                .map(|s| s.to_ascii_lowercase())
                .collect();
            if path.iter().any(String::is_empty) {
                return Err(Error::Config(format!("malformed override variable `{k}`")));
            }
            let value = parse_scalar(&v);
            set_path(&mut self.table, &path, value).map_err(|e| e.context(&k))?;
            applied.push(path.join("."));
        }
        Ok(applied)
    }

    pub fn set(&mut self, path: &[&str], value: Value) -> Result<()> {
        let p: Vec<String> = path.iter().map(|s| s.to_string()).collect();
        set_path(&mut self.table, &p, value)
    }

    /// Effective configuration as TOML text with sorted keys.
    pub fn to_toml(&self) -> String {
        toml::to_string(&self.table).unwrap_or_default()
    }

    pub fn section(&self, name: &str) -> Result<Section<'_>> {
        match self.table.get(name) {
            Some(Value::Table(t)) => Ok(Section {
                path: name.to_string(),
                table: t,
                base_dir: &self.base_dir,
            }),
            Some(_) => Err(Error::Config(format!("`{name}` must be a table"))),
            None => Err(Error::Config(format!("missing section `[{name}]`"))),
        }
    }

    pub fn root(&self) -> Section<'_> {
        Section {
            path: String::new(),
            table: &self.table,
            base_dir: &self.base_dir,
        }
    }

    pub fn resolve_path(&self, p: &str) -> PathBuf {
        crate::materials::resolve(&self.base_dir, p)
    }

    /// Material by name from `[materials]`, `preset:<name>`, or a bare
    /// number (lossless constant index).
    pub fn material(&self, reference: &Value, at: &str) -> Result<DispersiveMaterial> {
        match reference {
            Value::Float(n) => Ok(DispersiveMaterial::constant(*n)),
            Value::Integer(n) => Ok(DispersiveMaterial::constant(*n as f64)),
            Value::String(s) => {
                if let Some(Value::Table(mats)) = self.table.get("materials") {
                    if let Some(def) = mats.get(s) {
                        return match def {
                            Value::String(r) => presets::resolve_material(r, &self.base_dir),
                            Value::Float(n) => Ok(DispersiveMaterial::constant(*n)),
                            Value::Integer(n) => Ok(DispersiveMaterial::constant(*n as f64)),
                            _ => Err(Error::Config(format!("materials.{s}: expected a reference string or number"))),
                        }
                        .map_err(|e| e.context(format!("materials.{s}")));
                    }
                }
                if s.starts_with("preset:") {
                    return presets::resolve_material(s, &self.base_dir);
                }
                Err(Error::Config(format!(
                    "{at}: unknown material `{s}` (declare it under [materials] or use preset:<name>)"
                )))
            }
            _ => Err(Error::Config(format!("{at}: expected material name or number"))),
        }
    }
}

fn parse_scalar(v: &str) -> Value {
    let doc = format!("x = {v}");
    match toml::from_str::<Table>(&doc) {
        Ok(mut t) => t.remove("x").unwrap_or_else(|| Value::String(v.to_string())),
        Err(_) => Value::String(v.to_string()),
    }
}

fn set_path(table: &mut Table, path: &[String], value: Value) -> Result<()> {
    let (last, parents) = path.split_last().expect("non-empty path");
    let mut cur = table;
    for p in parents {
        let entry = cur.entry(p.clone()).or_insert_with(|| Value::Table(Table::new()));
        cur = match entry {
            Value::Table(t) => t,
            _ => return Err(Error::Config(format!("`{p}` is not a table"))),
        };
    }
    cur.insert(last.clone(), value);
    Ok(())
}

/// Borrowed view of a config table with its key path for messages.
#[derive(Debug, Clone)]
pub struct Section<'a> {
    path: String,
    table: &'a Table,
    base_dir: &'a Path,
}

impl<'a> Section<'a> {
    fn key(&self, k: &str) -> String {
        if self.path.is_empty() {
            k.to_string()
        } else {
            format!("{}.{k}", self.path)
        }
    }

    pub fn get(&self, k: &str) -> Option<&'a Value> {
        self.table.get(k)
    }

    pub fn has(&self, k: &str) -> bool {
        self.table.contains_key(k)
    }

    pub fn value(&self, k: &str) -> Result<&'a Value> {
        self.get(k).ok_or_else(|| Error::Config(format!("missing key `{}`", self.key(k))))
    }

    pub fn sub(&self, k: &str) -> Result<Section<'a>> {
        match self.value(k)? {
            Value::Table(t) => Ok(Section {
                path: self.key(k),
                table: t,
                base_dir: self.base_dir,
            }),
            _ => Err(Error::Config(format!("`{}` must be a table", self.key(k)))),
        }
    }

    fn as_f64(&self, k: &str, v: &Value) -> Result<f64> {
        match v {
            Value::Float(x) => Ok(*x),
            Value::Integer(x) => Ok(*x as f64),
            _ => Err(Error::Config(format!("`{}` must be a number", self.key(k)))),
        }
    }

    pub fn f64(&self, k: &str) -> Result<f64> {
        self.as_f64(k, self.value(k)?)
    }

    pub fn f64_or(&self, k: &str, default: f64) -> Result<f64> {
        match self.get(k) {
            Some(v) => self.as_f64(k, v),
            None => Ok(default),
        }
    }

    pub fn opt_f64(&self, k: &str) -> Result<Option<f64>> {
        self.get(k).map(|v| self.as_f64(k, v)).transpose()
    }

    pub fn u64_or(&self, k: &str, default: u64) -> Result<u64> {
        match self.get(k) {
            Some(Value::Integer(x)) if *x >= 0 => Ok(*x as u64),
            Some(_) => Err(Error::Config(format!("`{}` must be a non-negative integer", self.key(k)))),
            None => Ok(default),
        }
    }

    pub fn bool_or(&self, k: &str, default: bool) -> Result<bool> {
        match self.get(k) {
            Some(Value::Boolean(b)) => Ok(*b),
            Some(_) => Err(Error::Config(format!("`{}` must be true or false", self.key(k)))),
            None => Ok(default),
        }
    }

    pub fn str(&self, k: &str) -> Result<&'a str> {
        match self.value(k)? {
            Value::String(s) => Ok(s),
            _ => Err(Error::Config(format!("`{}` must be a string", self.key(k)))),
        }
    }

    pub fn str_or(&self, k: &str, default: &'a str) -> Result<&'a str> {
        if self.has(k) {
            self.str(k)
        } else {
            Ok(default)
        }
    }

    pub fn f64_list(&self, k: &str) -> Result<Vec<f64>> {
        match self.value(k)? {
            Value::Array(a) => a.iter().map(|v| self.as_f64(k, v)).collect(),
            _ => Err(Error::Config(format!("`{}` must be an array of numbers", self.key(k)))),
        }
    }

    pub fn u32_list(&self, k: &str) -> Result<Vec<u32>> {
        match self.value(k)? {
            Value::Array(a) => a
                .iter()
                .map(|v| match v {
                    Value::Integer(x) if *x >= 1 && *x <= u32::MAX as i64 => Ok(*x as u32),
                    _ => Err(Error::Config(format!("`{}` entries must be integers >= 1", self.key(k)))),
                })
                .collect(),
            _ => Err(Error::Config(format!("`{}` must be an array of integers", self.key(k)))),
        }
    }

    /// Either `values = [...]` or `start`, `stop`, `step`.
    pub fn grid(&self) -> Result<Vec<f64>> {
        let g = if self.has("values") {
            self.f64_list("values")?
        } else {
            uniform_grid(self.f64("start")?, self.f64("stop")?, self.f64("step")?)
                .map_err(|e| Error::Config(format!("`{}`: {e}", self.path)))?
        };
        if g.is_empty() {
            return Err(Error::Config(format!("`{}` grid is empty", self.path)));
        }
        Ok(g)
    }

    pub fn path(&self, k: &str) -> Result<PathBuf> {
        let p = crate::materials::resolve(self.base_dir, self.str(k)?);
        if !p.exists() {
            return Err(Error::Config(format!("`{}`: file {} does not exist", self.key(k), p.display())));
        }
        Ok(p)
    }

    /// `[re, im]` pair or a real number.
    pub fn complex_or(&self, k: &str, default: Complex64) -> Result<Complex64> {
        match self.get(k) {
            None => Ok(default),
            Some(Value::Array(a)) if a.len() == 2 => Ok(Complex64::new(self.as_f64(k, &a[0])?, self.as_f64(k, &a[1])?)),
            Some(v) => Ok(Complex64::new(self.as_f64(k, v)?, 0.0)),
        }
    }
}

impl RunConfig {
    /// Stack from `[stack]`: `entry`, `exit`, `[[stack.layers]]` with
    /// `material` and `thickness_um` or `thickness_nm` (plus optional
    /// `index_scale`), and an optional `window_correction` number or CSV path.
    pub fn stack(&self) -> Result<Stack> {
        let sec = self.section("stack")?;
        let entry = self.material(sec.value("entry")?, "stack.entry")?;
        let exit = self.material(sec.value("exit")?, "stack.exit")?;
        let mut layers = Vec::new();
        if let Some(v) = sec.get("layers") {
            let arr = match v {
                Value::Array(a) => a,
                _ => return Err(Error::Config("`stack.layers` must be an array of tables".into())),
            };
            for (i, l) in arr.iter().enumerate() {
                let t = match l {
                    Value::Table(t) => t,
                    _ => return Err(Error::Config(format!("`stack.layers[{i}]` must be a table"))),
                };
                let ls = Section {
                    path: format!("stack.layers[{i}]"),
                    table: t,
                    base_dir: &self.base_dir,
                };
                let mut material = self.material(ls.value("material")?, &ls.path)?;
                let scale = ls.complex_or("index_scale", Complex64::new(1.0, 0.0))?;
                let thickness = match (ls.opt_f64("thickness_um")?, ls.opt_f64("thickness_nm")?) {
                    (Some(um), None) => um,
                    (None, Some(nm)) => crate::units::nm_to_um(nm),
                    _ => {
                        return Err(Error::Config(format!(
                            "`{}` needs exactly one of thickness_um, thickness_nm",
                            ls.path
                        )))
                    }
                };
                if scale != Complex64::new(1.0, 0.0) {
                    material = material.scaled(scale).map_err(|e| e.context(&ls.path))?;
                }
                layers.push(Layer::new(material, thickness).map_err(|e| e.context(&ls.path))?);
            }
        }
        let window = match sec.get("window_correction") {
            None => WindowCorrection::default(),
            Some(Value::String(_)) => WindowCorrection::load_curve(&sec.path("window_correction")?)?,
            Some(v) => WindowCorrection::Constant(sec.as_f64("window_correction", v)?),
        };
        Stack::new(entry, layers, exit).with_window(window)
    }

    /// Mirror from a section with `mirror`, `mirror_thickness_nm` and
    /// optional `mirror_index_scale`.
    pub fn mirror(&self, sec: &Section<'_>) -> Result<MetalMirror> {
        let material = self.material(sec.value("mirror")?, &sec.key("mirror"))?;
        let scale = sec.complex_or("mirror_index_scale", Complex64::new(1.0, 0.0))?;
        MetalMirror::new(material, sec.f64_or("mirror_thickness_nm", 13.0)?)?.with_index_scale(scale)
    }

    pub fn window_correction(&self, sec: &Section<'_>) -> Result<WindowCorrection> {
        match sec.get("window_correction") {
            None => Ok(WindowCorrection::default()),
            Some(Value::String(_)) => WindowCorrection::load_curve(&sec.path("window_correction")?),
            Some(v) => {
                let w = WindowCorrection::Constant(sec.as_f64("window_correction", v)?);
                w.validate()?;
                Ok(w)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn env_overrides_nested_keys() {
        let mut c = RunConfig::from_str("[grid]\nstep = 0.5\n", Path::new(".")).unwrap();
        let applied = c
            .apply_env(vec![
                ("VIBCAV_GRID__STEP".to_string(), "2".to_string()),
                ("VIBCAV_STACK__ENTRY".to_string(), "znse".to_string()),
                ("OTHER".to_string(), "1".to_string()),
            ])
            .unwrap();
        assert_eq!(applied, vec!["grid.step", "stack.entry"]);
        assert_eq!(c.section("grid").unwrap().f64("step").unwrap(), 2.0);
        assert_eq!(c.section("stack").unwrap().str("entry").unwrap(), "znse");
    }

    #[test]
    fn missing_key_is_named() {
        let c = RunConfig::from_str("[grid]\nstart = 1\n", Path::new(".")).unwrap();
        let err = c.section("grid").unwrap().grid().unwrap_err();
        assert!(err.to_string().contains("grid.stop"), "{err}");
    }
}
