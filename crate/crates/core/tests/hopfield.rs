use nalgebra::{Matrix4, Schur};
use num_complex::Complex64;
use proptest::prelude::*;
use vibcav::hopfield::*;
use vibcav::modes::thickness_from_fsr;

fn params(omega_nu: f64, omega_r: f64) -> HopfieldParams {
    HopfieldParams {
        omega_nu,
        omega_r,
        length_um: 6.85,
        n_b: 1.46,
        orders: vec![4],
        alpha: 1.0,
    }
}

fn metric_norm(v: &[Complex64; 4]) -> f64 {
    v[0].norm_sqr() + v[1].norm_sqr() - v[2].norm_sqr() - v[3].norm_sqr()
}

fn oracle_eigenvalues(m: &Mat4) -> Vec<f64> {
    let nm = Matrix4::from_fn(|i, j| m[i][j]);
    let ev = Schur::new(nm).eigenvalues().expect("complex Schur");
    let mut v: Vec<f64> = ev.iter().map(|z| z.re).collect();
    v.sort_by(f64::total_cmp);
    v
}

fn model_strategy() -> impl Strategy<Value = Model> {
    prop_oneof![Just(Model::Full), Just(Model::Rwa)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn eigenvalues_come_in_opposite_pairs(
        model in model_strategy(),
        wn in 500.0..4000.0f64,
        ratio in 0.0..0.5f64,
        wc in 100.0..6000.0f64,
    ) {
        let es = polaritons(model, &params(wn, ratio * wn), wc).unwrap();
        let e = es.eigenvalues;
        prop_assert!((e[0] + e[3]).abs() < 1e-10 * wn.max(wc));
        prop_assert!((e[1] + e[2]).abs() < 1e-10 * wn.max(wc));
        prop_assert!((es.upper.energy - e[3]).abs() < 1e-10 * wn.max(wc));
    }

    #[test]
    fn eigenvalues_match_dense_oracle(
        model in model_strategy(),
        wn in 500.0..4000.0f64,
        ratio in 0.0..0.5f64,
        wc in 100.0..6000.0f64,
    ) {
        let p = params(wn, ratio * wn);
        let m = build_matrix(model, &p, wc).unwrap();
        let ours = diagonalize(&m).unwrap().eigenvalues;
        let oracle = oracle_eigenvalues(&m);
        for (a, b) in ours.iter().zip(&oracle) {
            prop_assert!((a - b).abs() < 1e-9 * wn.max(wc), "{:?} vs {:?}", ours, oracle);
        }
    }

    #[test]
    fn characteristic_polynomial_roots_match_oracle(
        wn in 500.0..4000.0f64,
        ratio in 0.0..0.5f64,
        wc in 100.0..6000.0f64,
    ) {
        let m = build_full_matrix(&params(wn, ratio * wn), wc).unwrap();
        let mut roots: Vec<f64> = quartic_roots(&characteristic_polynomial(&m)).iter().map(|z| z.re).collect();
        roots.sort_by(f64::total_cmp);
        let oracle = oracle_eigenvalues(&m);
        for (a, b) in roots.iter().zip(&oracle) {
            prop_assert!((a - b).abs() < 1e-9 * wn.max(wc), "{:?} vs {:?}", roots, oracle);
        }
    }

    #[test]
    fn bogoliubov_norms_are_unit(
        model in model_strategy(),
        wn in 500.0..4000.0f64,
        ratio in 0.0..0.5f64,
        wc in 100.0..6000.0f64,
    ) {
        let es = polaritons(model, &params(wn, ratio * wn), wc).unwrap();
        prop_assert!((metric_norm(&es.lower.coefficients) - 1.0).abs() < 1e-9);
        prop_assert!((metric_norm(&es.upper.coefficients) - 1.0).abs() < 1e-9);
        for (_, v) in &es.partners {
            prop_assert!((metric_norm(v) + 1.0).abs() < 1e-9);
        }
        for s in [es.lower, es.upper] {
            prop_assert!((s.photon_fraction + s.matter_fraction - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn rwa_resonant_splitting_is_twice_rabi(wn in 500.0..4000.0f64, ratio in 0.0..0.5f64) {
        let wr = ratio * wn;
        let es = polaritons(Model::Rwa, &params(wn, wr), wn).unwrap();
        prop_assert!((es.upper.energy - es.lower.energy - 2.0 * wr).abs() < 1e-10 * wn);
    }

    #[test]
    fn matrix_is_traceless(model in model_strategy(), wn in 500.0..4000.0f64, ratio in 0.0..0.5f64, wc in 100.0..6000.0f64) {
        let m = build_matrix(model, &params(wn, ratio * wn), wc).unwrap();
        let tr: Complex64 = (0..4).map(|i| m[i][i]).sum();
        prop_assert!(tr.norm() < 1e-12 * wn.max(wc));
    }

    #[test]
    fn angle_energy_increases(m in 1u32..10, l in 2.0..12.0f64, a in 0.0..27.0f64) {
        let k = |deg: f64| {
            let e0 = cavity_mode_energy(m, l, 1.46, 1.0, 0.0).unwrap();
            cavity_mode_energy(m, l, 1.46, 1.0, e0 * deg.to_radians().sin()).unwrap()
        };
        prop_assert!(k(a + 1.0) > k(a));
    }
}

#[test]
fn mode_energy_from_fsr() {
    let l = thickness_from_fsr(492.0, 1.46, 1.0).unwrap();
    let e4 = cavity_mode_energy(4, l, 1.46, 1.0, 0.0).unwrap();
    assert!((e4 - 1968.0).abs() < 1e-9, "{e4}");
    let e1 = cavity_mode_energy(1, l, 1.46, 1.0, 0.0).unwrap();
    for m in 1..10 {
        let em = cavity_mode_energy(m, l, 1.46, 1.0, 0.0).unwrap();
        assert!((em - m as f64 * e1).abs() < 1e-9);
    }
}

#[test]
fn self_energy_entry() {
    let p = params(1990.0, 240.0);
    let m = build_full_matrix(&p, 1800.0).unwrap();
    assert!((m[1][3].re - 2.0 * 240.0f64.powi(2) / 1990.0).abs() < 1e-12);
    let r = build_rwa_matrix(&p, 1800.0).unwrap();
    for i in 0..2 {
        for j in 2..4 {
            assert_eq!(r[i][j], Complex64::new(0.0, 0.0));
            assert_eq!(r[j][i], Complex64::new(0.0, 0.0));
        }
    }
    let zero = params(1990.0, 0.0);
    assert_eq!(build_full_matrix(&zero, 1800.0).unwrap(), build_rwa_matrix(&zero, 1800.0).unwrap());
}

#[test]
fn full_and_rwa_differ_quadratically_in_coupling() {
    let gap = |wr: f64| {
        let p = params(1990.0, wr);
        let f = polaritons(Model::Full, &p, 1990.0).unwrap();
        let r = polaritons(Model::Rwa, &p, 1990.0).unwrap();
        (f.upper.energy - r.upper.energy).abs()
    };
    for wr in [40.0, 20.0, 10.0] {
        let ratio = gap(wr) / gap(wr / 2.0);
        assert!((ratio - 4.0).abs() < 0.8, "Omega {wr}: ratio {ratio}");
    }
}

#[test]
fn hopfield_fraction_limits() {
    let es = polaritons(Model::Full, &params(1990.0, 0.0), 1500.0).unwrap();
    assert_eq!((es.lower.photon_fraction, es.lower.matter_fraction), (1.0, 0.0));
    let es = polaritons(Model::Rwa, &params(1990.0, 120.0), 1990.0).unwrap();
    for s in [es.lower, es.upper] {
        assert!((s.photon_fraction - 0.5).abs() < 1e-10 && (s.matter_fraction - 0.5).abs() < 1e-10);
    }
    let es = polaritons(Model::Full, &params(1990.0, 120.0), 50.0).unwrap();
    assert!(es.lower.photon_fraction > 0.99, "{}", es.lower.photon_fraction);
}

#[test]
fn bandgap_values() {
    let full = bandgap(Model::Full, &params(1990.0, 240.0), (-1900.0, 12000.0), 20001).unwrap();
    assert!((full.gap - 60.0).abs() <= 10.0, "{full:?}");
    let rwa = bandgap(Model::Rwa, &params(1990.0, 240.0), (-50.0 * 240.0, 50.0 * 240.0), 20001).unwrap();
    assert!(rwa.gap < full.gap);
    let none = bandgap(Model::Full, &params(1990.0, 0.0), (-1900.0, 1900.0), 2001).unwrap();
    assert_eq!(none.gap, 0.0);
}

#[test]
fn zero_coupling_sweep_follows_bare_lines() {
    let mut p = params(1990.0, 0.0);
    p.orders = vec![3, 4, 5];
    let ls: Vec<f64> = (0..=50).map(|i| 4.0 + 0.1 * i as f64).collect();
    for b in polariton_branches(Model::Full, &p, &Sweep::Thickness(ls)).unwrap() {
        for s in &b.samples {
            let want = match b.sign {
                Sign::Lower => s.omega_c.min(1990.0),
                Sign::Upper => s.omega_c.max(1990.0),
            };
            assert!((s.state.energy - want).abs() < 1e-9, "{} {} {}", b.order, s.control, s.state.energy);
        }
    }
}

#[test]
fn angle_sweep_blue_shifts() {
    let mut p = params(1981.4, 243.0);
    p.orders = vec![3, 4, 5];
    let angles: Vec<f64> = (0..=28).map(f64::from).collect();
    for b in polariton_branches(Model::Full, &p, &Sweep::Angle(angles)).unwrap() {
        for w in b.samples.windows(2) {
            assert!(w[1].state.energy > w[0].state.energy, "order {} {:?}", b.order, b.sign);
        }
    }
    let es = polaritons(Model::Full, &p, p.omega_nu).unwrap();
    assert!(es.lower.photon_fraction > es.lower.matter_fraction);
}

#[test]
fn empty_sweep_rejected() {
    let p = params(1990.0, 100.0);
    assert!(polariton_branches(Model::Full, &p, &Sweep::Thickness(vec![])).is_err());
}
