//! Config-driven batch front end. Every command reads one TOML run document,
//! computes everything in memory and only then writes its CSV outputs, each
//! prefixed with comment lines holding the tool version, seed and effective
//! configuration.

pub mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use toml::Value;

use crate::error::{Error, Result};
use crate::fit::dispersion::{predictions, DispersionDataset};
use crate::fit::material::{simulate_cell, MaterialFitSetup};
use crate::fit::minimize::NelderMeadOptions;
use crate::fit::peaks::{default_prominence, find_peaks};
use crate::fit::{fit_cavity_length, fit_material, fit_rabi, FitResult};
use crate::hopfield::{polariton_branches, ControlKind, HopfieldParams, Model, Sweep};
use crate::materials::{absorption_band, DispersiveMaterial};
use crate::modes::{find_resonances, CavityGeometry};
use crate::spectrum::{uniform_grid, Spectrum};
use crate::tmm::{field_map, transmission_spectrum, Polarization};

pub use config::RunConfig;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "vibcav", version, about = "Infrared microcavity transfer-matrix and polariton toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct CommonArgs {
    /// Run configuration (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; created if missing.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Seed for randomised fit restarts; overrides the config `seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Transmission spectrum of a stack.
    Simulate(CommonArgs),
    /// Intensity map |E(z, k)|² through a stack.
    FieldMap(CommonArgs),
    /// Phase-condition resonances of a cavity.
    Modes(CommonArgs),
    /// Polariton branches over thickness or angle.
    Sweep(CommonArgs),
    /// Multi-Lorentzian fit of a flow-cell spectrum.
    FitMaterial(CommonArgs),
    /// Cavity-length fit of a cavity spectrum.
    FitLength(CommonArgs),
    /// Rabi-frequency fit of dispersion data.
    FitRabi(CommonArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::FieldMap(_) => "field-map",
            Command::Modes(_) => "modes",
            Command::Sweep(_) => "sweep",
            Command::FitMaterial(_) => "fit-material",
            Command::FitLength(_) => "fit-length",
            Command::FitRabi(_) => "fit-rabi",
        }
    }

    pub fn args(&self) -> &CommonArgs {
        match self {
            Command::Simulate(a)
            | Command::FieldMap(a)
            | Command::Modes(a)
            | Command::Sweep(a)
            | Command::FitMaterial(a)
            | Command::FitLength(a)
            | Command::FitRabi(a) => a,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    /// False when any fit missed its convergence criteria.
    pub converged: bool,
}

struct Outputs {
    header: String,
    files: Vec<(String, String)>,
    converged: bool,
}

impl Outputs {
    fn add(&mut self, name: &str, body: String) {
        self.files.push((name.to_string(), format!("{}{}", self.header, body)));
    }
}

/// Runs a parsed command line with the given environment overrides.
pub fn run(cli: &Cli, env: impl IntoIterator<Item = (String, String)>) -> Result<RunOutcome> {
    let args = cli.command.args();
    let name = cli.command.name();
    let mut cfg = RunConfig::load(&args.config)?;
    cfg.apply_env(env)?;
    if let Some(Value::String(c)) = cfg.table.get("command") {
        if c != name {
            return Err(Error::Config(format!(
                "config is for command `{c}` but `{name}` was invoked"
            )));
        }
    }
    let seed = match args.seed {
        Some(s) => s,
        None => cfg.root().u64_or("seed", 0)?,
    };
    cfg.set(&["command"], Value::String(name.into()))?;
    cfg.set(&["seed"], Value::Integer(seed as i64))?;
    let header = header(&cfg, name, seed);
    let mut out = Outputs {
        header,
        files: Vec::new(),
        converged: true,
    };

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(Error::Config("--threads must be >= 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| Error::Config(format!("cannot start thread pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Simulate(_) => cmd_simulate(&cfg, &mut out),
        Command::FieldMap(_) => cmd_field_map(&cfg, &mut out),
        Command::Modes(_) => cmd_modes(&cfg, &mut out),
        Command::Sweep(_) => cmd_sweep(&cfg, &mut out),
        Command::FitMaterial(_) => cmd_fit_material(&cfg, seed, &mut out),
        Command::FitLength(_) => cmd_fit_length(&cfg, &mut out),
        Command::FitRabi(_) => cmd_fit_rabi(&cfg, &mut out),
    })?;
    let files = write_all(&args.out, &out.files)?;
    Ok(RunOutcome {
        files,
        converged: out.converged,
    })
}

fn header(cfg: &RunConfig, command: &str, seed: u64) -> String {
    let mut h = String::new();
    let _ = writeln!(h, "# vibcav {VERSION}");
    let _ = writeln!(h, "# command = {command}");
    let _ = writeln!(h, "# seed = {seed}");
    let _ = writeln!(h, "# config begin");
    for line in cfg.to_toml().lines() {
        let _ = writeln!(h, "# {line}");
    }
    let _ = writeln!(h, "# config end");
    h
}

/// Recovers the configuration text embedded in an output file.
pub fn embedded_config(output: &str) -> Option<String> {
    let mut inside = false;
    let mut text = String::new();
    for line in output.lines() {
        match line {
            "# config begin" => inside = true,
            "# config end" => return Some(text),
            _ if inside => {
                let body = line.strip_prefix("# ").or_else(|| line.strip_prefix('#'))?;
                text.push_str(body);
                text.push('\n');
            }
            _ => {}
        }
    }
    None
}

/// Writes every file to a temporary name first and renames once all
/// writes succeeded, so a failed run leaves no outputs behind.
fn write_all(dir: &Path, files: &[(String, String)]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut temps = Vec::new();
    for (name, body) in files {
        let tmp = dir.join(format!(".{name}.partial"));
        if let Err(e) = std::fs::write(&tmp, body) {
            for t in &temps {
                let _ = std::fs::remove_file(t);
            }
            let _ = std::fs::remove_file(&tmp);
            return Err(Error::io(tmp, e));
        }
        temps.push(tmp);
    }
    let mut done = Vec::new();
    for ((name, _), tmp) in files.iter().zip(&temps) {
        let dest = dir.join(name);
        std::fs::rename(tmp, &dest).map_err(|e| Error::io(&dest, e))?;
        done.push(dest);
    }
    Ok(done)
}

fn beam(cfg: &RunConfig) -> Result<(f64, Polarization)> {
    let g = cfg.section("grid")?;
    let angle = g.f64_or("angle_deg", 0.0)?;
    let pol = g.str_or("polarization", "unpolarized")?.parse()?;
    Ok((angle, pol))
}

fn csv_spectrum(header: &str, s: &Spectrum) -> String {
    let mut out = format!("{header}\n");
    for (k, v) in s.iter() {
        let _ = writeln!(out, "{k},{v}");
    }
    out
}

/// Reads a two-column spectrum CSV with a header line.
pub fn read_spectrum(path: &Path) -> Result<Spectrum> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut ks = Vec::new();
    let mut vs = Vec::new();
    let mut header = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !header {
            header = true;
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed = (cols.len() == 2)
            .then(|| Some((cols[0].parse::<f64>().ok()?, cols[1].parse::<f64>().ok()?)))
            .flatten();
        let (k, v) = parsed.ok_or_else(|| Error::Parse {
            source_name: path.display().to_string(),
            message: format!("line {}: expected `wavenumber,value`, got `{line}`", i + 1),
        })?;
        ks.push(k);
        vs.push(v);
    }
    Spectrum::new(ks, vs).map_err(|e| e.context(path.display()))
}

fn cmd_simulate(cfg: &RunConfig, out: &mut Outputs) -> Result<()> {
    let stack = cfg.stack()?;
    let grid = cfg.section("grid")?.grid()?;
    let (angle, pol) = beam(cfg)?;
    let spec = transmission_spectrum(&stack, &grid, angle, pol)?;
    out.add("spectrum.csv", csv_spectrum("wavenumber_cm-1,transmittance", &spec));
    if let Ok(p) = cfg.section("peaks") {
        let prom = match p.opt_f64("prominence")? {
            Some(v) => v,
            None => default_prominence(&spec),
        };
        let search = find_peaks(&spec, prom);
        let mut body = String::from("center_cm-1,height,fwhm_cm-1,prominence\n");
        for pk in &search.peaks {
            let _ = writeln!(body, "{},{},{},{}", pk.center, pk.height, pk.fwhm, pk.prominence);
        }
        out.add("peaks.csv", body);
    }
    Ok(())
}

fn cmd_field_map(cfg: &RunConfig, out: &mut Outputs) -> Result<()> {
    let stack = cfg.stack()?;
    let grid = cfg.section("grid")?.grid()?;
    let (angle, pol) = beam(cfg)?;
    let res = cfg.section("field")?.f64("z_resolution_um")?;
    let map = field_map(&stack, &grid, res, angle, pol)?;
    let mut body = String::from("z_um,wavenumber_cm-1,intensity\n");
    for (ik, k) in map.k_grid.iter().enumerate() {
        for (iz, z) in map.z_grid.iter().enumerate() {
            let _ = writeln!(body, "{z},{k},{}", map.at(ik, iz));
        }
    }
    out.add("field_map.csv", body);
    Ok(())
}

fn geometry(cfg: &RunConfig) -> Result<CavityGeometry> {
    let sec = cfg.section("cavity")?;
    let fill = cfg.material(sec.value("fill")?, "cavity.fill")?;
    let mirror = cfg.mirror(&sec)?;
    let backing = cfg.material(sec.value("window")?, "cavity.window")?;
    CavityGeometry::new(sec.f64("length_um")?, fill, mirror, backing, sec.f64_or("alpha", 1.0)?)
}

fn cmd_modes(cfg: &RunConfig, out: &mut Outputs) -> Result<()> {
    let geom = geometry(cfg)?;
    let scan = cfg.section("scan")?;
    let (lo, hi) = (scan.f64("start")?, scan.f64("stop")?);
    let orders = scan.u32_list("orders")?;
    let roots = find_resonances(&geom, lo, hi, &orders)?;
    let mut body = String::from("order,branch,wavenumber_cm-1,overdamped\n");
    for r in &roots {
        let _ = writeln!(body, "{},{},{},{}", r.order, r.branch.symbol(), r.k, r.overdamped);
    }
    out.add("modes.csv", body);
    let grid = uniform_grid(lo, hi, scan.f64_or("phase_step", 1.0)?)?;
    let phase = geom.phase_curve(&grid)?;
    out.add("phase.csv", csv_spectrum("wavenumber_cm-1,phase_rad", &phase));
    Ok(())
}

fn omega_nu(cfg: &RunConfig, sec: &config::Section<'_>) -> Result<f64> {
    match sec.value("omega_nu")? {
        Value::Float(x) => Ok(*x),
        Value::Integer(x) => Ok(*x as f64),
        v @ Value::String(_) => {
            let m: DispersiveMaterial = cfg.material(v, "hopfield.omega_nu")?;
            let w = sec.f64_list("band_window").unwrap_or_else(|_| vec![1000.0, 3000.0]);
            if w.len() != 2 {
                return Err(Error::Config("`hopfield.band_window` must be [lo, hi]".into()));
            }
            Ok(absorption_band(&m, w[0], w[1], 0.25)?.center)
        }
        _ => Err(Error::Config("`hopfield.omega_nu` must be a number or material name".into())),
    }
}

fn hopfield_params(cfg: &RunConfig, need_omega_r: bool) -> Result<(HopfieldParams, Model)> {
    let sec = cfg.section("hopfield")?;
    let p = HopfieldParams {
        omega_nu: omega_nu(cfg, &sec)?,
        omega_r: if need_omega_r { sec.f64("omega_r")? } else { sec.f64_or("omega_r", 0.0)? },
        length_um: sec.f64_or("length_um", 1.0)?,
        n_b: sec.f64("n_b")?,
        orders: if sec.has("orders") { sec.u32_list("orders")? } else { Vec::new() },
        alpha: sec.f64_or("alpha", 1.0)?,
    };
    p.validate()?;
    Ok((p, sec.str_or("model", "full")?.parse()?))
}

fn cmd_sweep(cfg: &RunConfig, out: &mut Outputs) -> Result<()> {
    let (params, model) = hopfield_params(cfg, true)?;
    let sec = cfg.section("sweep")?;
    let kind: ControlKind = sec.str("kind")?.parse()?;
    let values = sec.grid()?;
    let sweep = match kind {
        ControlKind::Thickness => Sweep::Thickness(values),
        ControlKind::Angle => Sweep::Angle(values),
    };
    let branches = polariton_branches(model, &params, &sweep)?;
    let mut body = String::from("control,order,branch,energy_cm-1,photon_fraction,matter_fraction\n");
    for b in &branches {
        for s in &b.samples {
            let _ = writeln!(
                body,
                "{},{},{},{},{},{}",
                s.control,
                b.order,
                b.sign.symbol(),
                s.state.energy,
                s.state.photon_fraction,
                s.state.matter_fraction
            );
        }
    }
    out.add("branches.csv", body);
    Ok(())
}

fn report(results: &[&FitResult]) -> String {
    let mut s = String::new();
    for r in results {
        if let Some(m) = r.model {
            let _ = writeln!(s, "[{}]", m.name());
        }
        s.push_str(&r.report());
    }
    s
}

fn residual_csv(measured: &Spectrum, model: &Spectrum) -> String {
    let mut body = String::from("wavenumber_cm-1,measured,model,residual\n");
    for ((k, m), s) in measured.iter().zip(model.values()) {
        let _ = writeln!(body, "{k},{m},{s},{}", m - s);
    }
    body
}

fn cmd_fit_material(cfg: &RunConfig, seed: u64, out: &mut Outputs) -> Result<()> {
    let sec = cfg.section("fit")?;
    let measured = read_spectrum(&sec.path("measured")?)?;
    let window = cfg.material(sec.value("window")?, "fit.window")?;
    let init = cfg.material(sec.value("init")?, "fit.init")?;
    let init = init
        .as_lorentz()
        .cloned()
        .ok_or_else(|| Error::Config("`fit.init` must be a Lorentz material".into()))?;
    let l_cell = sec.f64("cell_length_um")?;
    let mut setup = MaterialFitSetup::new(window, init, l_cell);
    setup.window_correction = cfg.window_correction(&sec)?;
    setup.options = NelderMeadOptions {
        restarts: sec.u64_or("restarts", 3)? as usize,
        max_evals: sec.u64_or("max_evals", 20_000)? as usize,
        seed,
        ..NelderMeadOptions::default()
    };
    let fit = fit_material(&measured, &setup)?;
    out.converged &= fit.result.converged;
    let model = simulate_cell(
        &fit.material,
        fit.cell_length_um,
        &setup.window,
        &setup.window_correction,
        measured.wavenumbers(),
    )?;
    out.add("fit_report.txt", report(&[&fit.result]));
    out.add("fit_residuals.csv", residual_csv(&measured, &model));
    let mut doc = format!("kind = \"lorentz\"\nn_b = {}\n", fit.material.n_b);
    for (i, o) in fit.material.oscillators.iter().enumerate() {
        let _ = write!(doc, "\n[[oscillators]]\nid = \"osc{}\"\nf = {}\nk0 = {}\ngamma = {}\n", i + 1, o.f, o.k0, o.gamma);
    }
    out.add("fitted_material.toml", doc);
    Ok(())
}

fn cmd_fit_length(cfg: &RunConfig, out: &mut Outputs) -> Result<()> {
    let geom = geometry(cfg)?;
    let cav = cfg.section("cavity")?;
    let correction = cfg.window_correction(&cav)?;
    let sec = cfg.section("fit")?;
    let measured = read_spectrum(&sec.path("measured")?)?;
    let init = sec.f64("init_length_um")?;
    let fit = fit_cavity_length(&measured, &geom.fill, &geom.mirror, &geom.backing, &correction, init)?;
    out.converged &= fit.result.converged;
    let model = crate::fit::length::simulate_cavity(
        &geom.fill,
        &geom.mirror,
        &geom.backing,
        &correction,
        fit.length_um,
        measured.wavenumbers(),
    )?;
    out.add("fit_report.txt", report(&[&fit.result]));
    out.add("fit_residuals.csv", residual_csv(&measured, &model));
    Ok(())
}

fn cmd_fit_rabi(cfg: &RunConfig, out: &mut Outputs) -> Result<()> {
    let (params, _) = hopfield_params(cfg, false)?;
    let sec = cfg.section("fit")?;
    let data = DispersionDataset::load(&sec.path("dataset")?)?;
    let models: Vec<Model> = match sec.get("models") {
        Some(Value::Array(a)) => a
            .iter()
            .map(|v| match v {
                Value::String(s) => s.parse(),
                _ => Err(Error::Config("`fit.models` entries must be strings".into())),
            })
            .collect::<Result<_>>()?,
        Some(_) => return Err(Error::Config("`fit.models` must be an array".into())),
        None => vec![Model::Full, Model::Rwa],
    };
    let bracket = sec.f64_list("bracket")?;
    if bracket.len() != 2 {
        return Err(Error::Config("`fit.bracket` must be [lo, hi]".into()));
    }
    let mut results = Vec::new();
    let mut body = String::from("control,control_kind,order,sign,energy_cm-1,model,model_cm-1,residual_cm-1\n");
    for &m in &models {
        let r = fit_rabi(&data, &params, m, (bracket[0], bracket[1]))?;
        let fitted = params.with_omega_r(r.parameter("omega_R").unwrap_or(0.0));
        let pred = predictions(&data, &fitted, m)?;
        for (o, e) in data.observations.iter().zip(&pred) {
            let _ = writeln!(
                body,
                "{},{},{},{},{},{},{},{}",
                o.control,
                o.kind.name(),
                o.order,
                o.sign.symbol(),
                o.energy,
                m.name(),
                e,
                o.energy - e
            );
        }
        out.converged &= r.converged;
        results.push(r);
    }
    out.add("fit_report.txt", report(&results.iter().collect::<Vec<_>>()));
    out.add("fit_residuals.csv", body);
    Ok(())
}
