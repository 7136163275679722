use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use vibcav::fit::dispersion::*;
use vibcav::fit::material::simulate_cell;
use vibcav::fit::minimize::NelderMeadOptions;
use vibcav::fit::{fit_cavity_length, fit_material, fit_rabi, length::simulate_cavity, MaterialFitSetup};
use vibcav::hopfield::{ControlKind, HopfieldParams, Model, Sign};
use vibcav::materials::{absorption_band, DispersiveMaterial, LorentzOscillator, LorentzSet, MetalMirror};
use vibcav::presets;
use vibcav::spectrum::{uniform_grid, Spectrum};
use vibcav::tmm::WindowCorrection;

fn params(omega_r: f64) -> HopfieldParams {
    HopfieldParams {
        omega_nu: 1981.4,
        omega_r,
        length_um: 6.85,
        n_b: 1.46,
        orders: vec![3, 4, 5],
        alpha: 1.0,
    }
}

fn thickness_data(omega_r: f64, orders: &[u32]) -> DispersionDataset {
    let ls: Vec<f64> = (0..41).map(|i| 4.0 + 0.15 * i as f64).collect();
    DispersionDataset::synthesize(Model::Full, &params(omega_r), ControlKind::Thickness, &ls, orders).unwrap()
}

#[test]
fn chi2_vanishes_at_generating_value_and_is_quadratic() {
    let data = thickness_data(240.0, &[3, 4, 5]);
    let scale: f64 = data.observations.iter().map(|o| o.energy * o.energy).sum();
    let c0 = chi2(&data, &params(240.0), Model::Full).unwrap();
    assert!(c0 <= 1e-16 * scale, "{c0}");
    let delta = 3.25;
    let mut bumped = data.clone();
    bumped.observations[17].energy += delta;
    let c1 = chi2(&bumped, &params(240.0), Model::Full).unwrap();
    assert!((c1 - c0 - delta * delta).abs() < 1e-9, "{c1}");
}

#[test]
fn rabi_round_trip_and_rwa_mismatch() {
    let data = thickness_data(240.0, &[3, 4, 5]);
    let full = fit_rabi(&data, &params(0.0), Model::Full, (1.0, 600.0)).unwrap();
    let w = full.parameter("omega_R").unwrap();
    assert!(full.converged);
    assert!((w / 240.0 - 1.0).abs() < 1e-6, "{w}");
    let rwa = fit_rabi(&data, &params(0.0), Model::Rwa, (1.0, 600.0)).unwrap();
    assert!(rwa.chi2 > full.chi2);
}

/// Ten branches (orders 2-6) over a thickness sweep, keeping only energies
/// inside a 1500-2500 cm⁻¹ measurement window.
fn windowed_data(omega_r: f64) -> DispersionDataset {
    let ls: Vec<f64> = (0..=100).map(|i| 4.0 + 0.06 * i as f64).collect();
    let all = DispersionDataset::synthesize(Model::Full, &params(omega_r), ControlKind::Thickness, &ls, &[2, 3, 4, 5, 6]).unwrap();
    DispersionDataset::new(all.observations.into_iter().filter(|o| o.energy > 1500.0 && o.energy < 2500.0).collect()).unwrap()
}

#[test]
fn rwa_residuals_peak_near_vibration() {
    let data = windowed_data(240.0);
    let rwa = fit_rabi(&data, &params(0.0), Model::Rwa, (1.0, 600.0)).unwrap();
    let w = rwa.parameter("omega_R").unwrap();
    let res = residuals(&data, &params(w), Model::Rwa).unwrap();
    let (worst, _) = data
        .observations
        .iter()
        .zip(&res)
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .unwrap();
    let spread = data.observations.iter().map(|o| (o.energy - 1981.4).abs()).fold(0.0, f64::max);
    assert!((worst.energy - 1981.4).abs() < 0.5 * w, "worst at {} (spread {spread})", worst.energy);
}

#[test]
fn single_observation_on_curve() {
    let full = DispersionDataset::synthesize(Model::Full, &params(180.0), ControlKind::Thickness, &[6.5], &[4]).unwrap();
    let one = DispersionDataset::new(vec![full.observations[0]]).unwrap();
    let r = fit_rabi(&one, &params(0.0), Model::Full, (1.0, 600.0)).unwrap();
    assert!((r.parameter("omega_R").unwrap() - 180.0).abs() < 1e-5);
    assert!(r.chi2 < 1e-12);
}

#[test]
fn dataset_file_round_trip() {
    let data = thickness_data(200.0, &[4]);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    std::fs::write(&path, data.to_csv()).unwrap();
    assert_eq!(DispersionDataset::load(&path).unwrap(), data);
    assert!(data.observations.iter().any(|o| o.sign == Sign::Upper));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn rabi_recovered_from_random_draws(
        wr in 50.0..400.0f64,
        orders in prop::sample::subsequence(vec![2u32, 3, 4, 5, 6], 1..4),
        angle_data in any::<bool>(),
    ) {
        let p = params(wr);
        let data = if angle_data {
            let angles: Vec<f64> = (0..=28).map(f64::from).collect();
            DispersionDataset::synthesize(Model::Full, &p, ControlKind::Angle, &angles, &orders).unwrap()
        } else {
            thickness_data(wr, &orders)
        };
        let r = fit_rabi(&data, &params(0.0), Model::Full, (1.0, 600.0)).unwrap();
        let got = r.parameter("omega_R").unwrap();
        prop_assert!(r.converged);
        prop_assert!((got / wr - 1.0).abs() < 1e-6, "{} vs {}", got, wr);
    }
}

fn single_line() -> LorentzSet {
    LorentzSet::new(1.4, vec![LorentzOscillator::new(4.0e4, 2000.0, 12.0).unwrap()]).unwrap()
}

#[test]
fn material_fit_recovers_single_line() {
    let truth = single_line();
    let grid = uniform_grid(1900.0, 2100.0, 0.5).unwrap();
    let window = presets::baf2();
    let measured = simulate_cell(&truth, 2.0, &window, &WindowCorrection::default(), &grid).unwrap();
    let init = LorentzSet::new(1.45, vec![LorentzOscillator::new(3.5e4, 1996.0, 15.0).unwrap()]).unwrap();
    let mut setup = MaterialFitSetup::new(window, init, 2.1);
    setup.options = NelderMeadOptions { seed: 7, ..NelderMeadOptions::default() };
    let fit = fit_material(&measured, &setup).unwrap();
    let o = fit.material.oscillators[0];
    let rel = |a: f64, b: f64| (a / b - 1.0).abs();
    assert!(rel(o.f, 4.0e4) < 1e-4 && rel(o.k0, 2000.0) < 1e-4 && rel(o.gamma, 12.0) < 1e-4, "{o:?}");
    assert!(rel(fit.material.n_b, 1.4) < 1e-4 && rel(fit.cell_length_um, 2.0) < 1e-4, "{fit:?}");
}

#[test]
fn material_fit_on_noisy_carbonyl_spectrum() {
    let truth = presets::fe_co5().as_lorentz().unwrap().clone();
    let grid = uniform_grid(1850.0, 2150.0, 0.5).unwrap();
    let window = presets::baf2();
    let clean = simulate_cell(&truth, 2.0, &window, &WindowCorrection::default(), &grid).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let noise = Normal::new(0.0, 0.005).unwrap();
    let noisy: Vec<f64> = clean.values().iter().map(|v| v * (1.0 + noise.sample(&mut rng))).collect();
    let measured = Spectrum::new(grid.clone(), noisy).unwrap();
    let mut init = truth.clone();
    for (i, o) in init.oscillators.iter_mut().enumerate() {
        o.f *= 1.15;
        o.gamma *= 1.2;
        if i < 6 {
            o.k0 += 3.0;
        }
    }
    let mut setup = MaterialFitSetup::new(window, init, 2.1);
    setup.options = NelderMeadOptions { seed: 3, restarts: 1, max_evals: 6000, ..NelderMeadOptions::default() };
    let fit = fit_material(&measured, &setup).unwrap();
    let band = absorption_band(&DispersiveMaterial::Lorentz(fit.material.clone()), 1800.0, 2200.0, 0.25).unwrap();
    let truth_band = absorption_band(&presets::fe_co5(), 1800.0, 2200.0, 0.25).unwrap();
    assert!((band.center - truth_band.center).abs() <= 5.0, "{} vs {}", band.center, truth_band.center);
    assert!((fit.cell_length_um / 2.0 - 1.0).abs() <= 0.03, "{}", fit.cell_length_um);
}

#[test]
fn material_fit_needs_an_oscillator() {
    let grid = uniform_grid(1900.0, 2100.0, 1.0).unwrap();
    let measured = Spectrum::new(grid.clone(), vec![0.9; grid.len()]).unwrap();
    let setup = MaterialFitSetup::new(presets::baf2(), LorentzSet::new(1.4, vec![]).unwrap(), 2.0);
    assert!(fit_material(&measured, &setup).is_err());
}

fn au_mirror() -> MetalMirror {
    MetalMirror::new(presets::au_film(), 13.0).unwrap()
}

#[test]
fn length_fit_recovers_cavity() {
    let grid = uniform_grid(1500.0, 2500.0, 0.5).unwrap();
    let fe = presets::fe_co5();
    let (mirror, window) = (au_mirror(), presets::znse());
    let w = WindowCorrection::default();
    let measured = simulate_cavity(&fe, &mirror, &window, &w, 6.85, &grid).unwrap();
    let fit = fit_cavity_length(&measured, &fe, &mirror, &window, &w, 6.0).unwrap();
    assert!((fit.length_um / 6.85 - 1.0).abs() < 0.002, "{}", fit.length_um);
    assert!((fit.alpha - 1.012).abs() <= 0.005, "{}", fit.alpha);
    assert!((fit.fsr - 492.0).abs() <= 5.0, "{}", fit.fsr);

    let again = fit_cavity_length(&measured, &fe, &mirror, &window, &w, 6.85).unwrap();
    assert!(again.result.evaluations <= 3);
    assert!(again.result.converged);
}
