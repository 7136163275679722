use num_complex::Complex64;
use proptest::prelude::*;
use vibcav::cavity::{fabry_perot, flow_cell};
use vibcav::fit::peaks::detect_peaks;
use vibcav::materials::{DispersiveMaterial, LorentzOscillator, LorentzSet, MetalMirror};
use vibcav::presets;
use vibcav::spectrum::uniform_grid;
use vibcav::tmm::*;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

fn lossy(re: f64, im: f64) -> DispersiveMaterial {
    DispersiveMaterial::Constant(Complex64::new(re, im))
}

fn layer_strategy() -> impl Strategy<Value = Layer> {
    let constant = (1.0..4.0f64, 0.0..2.0f64).prop_map(|(re, im)| lossy(re, im));
    let lorentz = (1.0..2.5f64, 1e3..5e5f64, 800.0..6000.0f64, 1.0..200.0f64).prop_map(|(nb, f, k0, g)| {
        let osc = LorentzOscillator::new(f, k0, g).unwrap();
        DispersiveMaterial::Lorentz(LorentzSet::new(nb, vec![osc]).unwrap())
    });
    (prop_oneof![constant, lorentz], 0.0..8.0f64).prop_map(|(m, d)| Layer::new(m, d).unwrap())
}

fn pol_strategy() -> impl Strategy<Value = Polarization> {
    prop_oneof![
        Just(Polarization::S),
        Just(Polarization::P),
        Just(Polarization::Unpolarized)
    ]
}

/// Closed-form single-slab amplitudes from the geometric multiple-reflection series.
fn airy(n1: f64, n2: Complex64, n3: f64, d_um: f64, k: f64, angle_deg: f64, p: bool) -> (f64, f64) {
    let s1 = angle_deg.to_radians().sin();
    let cos = |n: Complex64| {
        let c = (Complex64::new(1.0, 0.0) - (n1 * s1 / n).powi(2)).sqrt();
        if (n * c).im < 0.0 {
            -c
        } else {
            c
        }
    };
    let one = Complex64::new(1.0, 0.0);
    let (c1, c2, c3) = (cos(one * n1), cos(n2), cos(one * n3));
    let (n1c, n3c) = (one * n1, one * n3);
    let (r_ij, t_ij): (Box<dyn Fn(Complex64, Complex64, Complex64, Complex64) -> Complex64>, Box<dyn Fn(Complex64, Complex64, Complex64, Complex64) -> Complex64>) = if p {
        (
            Box::new(|ni, ci, nj, cj| (nj * ci - ni * cj) / (nj * ci + ni * cj)),
            Box::new(|ni, ci, nj, cj| 2.0 * ni * ci / (nj * ci + ni * cj)),
        )
    } else {
        (
            Box::new(|ni, ci, nj, cj| (ni * ci - nj * cj) / (ni * ci + nj * cj)),
            Box::new(|ni, ci, nj, cj| 2.0 * ni * ci / (ni * ci + nj * cj)),
        )
    };
    let r12 = r_ij(n1c, c1, n2, c2);
    let r23 = r_ij(n2, c2, n3c, c3);
    let t12 = t_ij(n1c, c1, n2, c2);
    let t23 = t_ij(n2, c2, n3c, c3);
    let beta = TWO_PI * k * d_um * 1e-4 * n2 * c2;
    let ph = (Complex64::i() * beta).exp();
    let den = one + r12 * r23 * ph * ph;
    let r = (r12 + r23 * ph * ph) / den;
    let t = t12 * t23 * ph / den;
    let t_pow = (n3 * c3.re) / (n1 * c1.re) * t.norm_sqr();
    (t_pow, r.norm_sqr())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn energy_is_conserved(
        layers in prop::collection::vec(layer_strategy(), 0..5),
        n_in in 1.0..3.0f64,
        n_out in 1.0..3.0f64,
        k in 500.0..8000.0f64,
        angle in 0.0..85.0f64,
        pol in pol_strategy(),
    ) {
        let stack = Stack::new(DispersiveMaterial::constant(n_in), layers, DispersiveMaterial::constant(n_out));
        let r = solve_stack(&stack, &PlaneWaveCtx::new(k, angle, pol).unwrap()).unwrap();
        prop_assert!((r.transmittance + r.reflectance + r.absorptance - 1.0).abs() < 1e-8);
        for v in [r.transmittance, r.reflectance, r.absorptance] {
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&v), "{:?}", r);
        }
    }

    #[test]
    fn reversed_stack_transmits_equally(
        layers in prop::collection::vec(layer_strategy(), 0..5),
        n_in in 1.0..3.0f64,
        n_out in 1.0..3.0f64,
        k in 500.0..8000.0f64,
        pol in pol_strategy(),
    ) {
        let stack = Stack::new(DispersiveMaterial::constant(n_in), layers, DispersiveMaterial::constant(n_out));
        let fwd = solve_stack(&stack, &PlaneWaveCtx::new(k, 0.0, pol).unwrap()).unwrap();
        let back = solve_stack(&stack.reversed(), &PlaneWaveCtx::new(k, 0.0, pol).unwrap()).unwrap();
        prop_assert!((fwd.transmittance - back.transmittance).abs() < 1e-10);
    }

    #[test]
    fn reversed_stack_transmits_equally_oblique(
        layers in prop::collection::vec(layer_strategy(), 0..5),
        n_out in 1.0..3.0f64,
        k in 500.0..8000.0f64,
        angle in 0.0..80.0f64,
        pol in pol_strategy(),
    ) {
        // Entry index 1 keeps the mirrored angle real in any exit medium.
        let stack = Stack::new(DispersiveMaterial::constant(1.0), layers, DispersiveMaterial::constant(n_out));
        let back_angle = (angle.to_radians().sin() / n_out).asin().to_degrees();
        let fwd = solve_stack(&stack, &PlaneWaveCtx::new(k, angle, pol).unwrap()).unwrap();
        let back = solve_stack(&stack.reversed(), &PlaneWaveCtx::new(k, back_angle, pol).unwrap()).unwrap();
        prop_assert!((fwd.transmittance - back.transmittance).abs() < 1e-10);
    }

    #[test]
    fn slab_matches_airy_series(
        n1 in 1.0..2.5f64,
        n2_re in 1.0..4.0f64,
        n2_im in 0.0..1.0f64,
        n3 in 1.0..2.5f64,
        d in 0.0..20.0f64,
        k in 500.0..8000.0f64,
        angle in 0.0..80.0f64,
        p in any::<bool>(),
    ) {
        let n2 = Complex64::new(n2_re, n2_im);
        let stack = Stack::new(
            DispersiveMaterial::constant(n1),
            vec![Layer::new(DispersiveMaterial::Constant(n2), d).unwrap()],
            DispersiveMaterial::constant(n3),
        );
        prop_assume!(n1 * angle.to_radians().sin() < n3 * 0.999);
        let pol = if p { Polarization::P } else { Polarization::S };
        let r = solve_stack(&stack, &PlaneWaveCtx::new(k, angle, pol).unwrap()).unwrap();
        let (t, rr) = airy(n1, n2, n3, d, k, angle, p);
        prop_assert!((r.transmittance - t).abs() < 1e-10, "T {} vs {}", r.transmittance, t);
        prop_assert!((r.reflectance - rr).abs() < 1e-10, "R {} vs {}", r.reflectance, rr);
    }

    #[test]
    fn lossless_slab_absorbs_nothing(
        n in 1.0..4.0f64,
        d in 0.0..20.0f64,
        k in 500.0..8000.0f64,
        angle in 0.0..85.0f64,
        pol in pol_strategy(),
    ) {
        let stack = Stack::new(
            DispersiveMaterial::constant(1.0),
            vec![Layer::new(DispersiveMaterial::constant(n), d).unwrap()],
            DispersiveMaterial::constant(1.5),
        );
        let r = solve_stack(&stack, &PlaneWaveCtx::new(k, angle, pol).unwrap()).unwrap();
        prop_assert!(r.absorptance.abs() < 1e-10);
        prop_assert!((r.transmittance + r.reflectance - 1.0).abs() < 1e-10);
    }

    #[test]
    fn lossless_flux_is_constant_through_stack(
        ns in prop::collection::vec((1.0..4.0f64, 0.1..3.0f64), 1..5),
        k in 500.0..6000.0f64,
        angle in 0.0..70.0f64,
        pol in pol_strategy(),
    ) {
        let layers = ns.iter().map(|&(n, d)| Layer::new(DispersiveMaterial::constant(n), d).unwrap()).collect();
        let stack = Stack::new(DispersiveMaterial::constant(1.0), layers, DispersiveMaterial::constant(1.4));
        let ctx = PlaneWaveCtx::new(k, angle, pol).unwrap();
        let field = StackField::new(&stack, &ctx).unwrap();
        let t = solve_stack(&stack, &ctx).unwrap().transmittance;
        let total = field.thickness_um();
        for i in 0..=50 {
            let s = field.poynting(total * i as f64 / 50.0);
            prop_assert!((s - t).abs() < 1e-8, "S(z) = {} vs T = {}", s, t);
        }
    }
}

#[test]
fn flow_cell_dip_near_band_center() {
    let cell = flow_cell(&presets::fe_co5(), 2.0, &presets::baf2()).unwrap();
    let grid = uniform_grid(1800.0, 2200.0, 0.1).unwrap();
    let s = transmission_spectrum(&cell, &grid, 0.0, Polarization::Unpolarized).unwrap();
    let k_min = grid[s.argmin().unwrap()];
    assert!((k_min - 1980.0).abs() <= 15.0, "{k_min}");
}

#[test]
fn filled_cavity_has_peak_ladder() {
    let mirror = MetalMirror::new(presets::au_film(), 13.0).unwrap();
    let cav = fabry_perot(&presets::fe_co5(), 6.85, &mirror, &presets::znse()).unwrap();
    let grid = uniform_grid(1700.0, 2300.0, 0.25).unwrap();
    let s = transmission_spectrum(&cav, &grid, 0.0, Polarization::Unpolarized).unwrap();
    let peaks = detect_peaks(&s, 1e-5);
    assert!(peaks.len() >= 6, "{peaks:?}");
}

fn resonant_k(m: u32, n: f64, l_um: f64) -> f64 {
    m as f64 / (2.0 * n * l_um * 1e-4)
}

fn antinodes_between_mirrors(stack: &Stack, k: f64, mirror_um: f64, length_um: f64) -> usize {
    let ctx = PlaneWaveCtx::normal(k);
    let f = StackField::new(stack, &ctx).unwrap();
    let n = 4000;
    let profile: Vec<f64> = (0..=n)
        .map(|i| f.intensity(mirror_um + length_um * i as f64 / n as f64))
        .collect();
    count_antinodes(&profile)
}

#[test]
fn empty_cavity_antinodes_equal_order() {
    let mirror = MetalMirror::new(presets::au_film(), 13.0).unwrap();
    let l = 6.85;
    let cav = fabry_perot(&DispersiveMaterial::constant(1.46), l, &mirror, &presets::znse()).unwrap();
    let grid = uniform_grid(1000.0, 4000.0, 0.25).unwrap();
    let s = transmission_spectrum(&cav, &grid, 0.0, Polarization::S).unwrap();
    for p in detect_peaks(&s, 1e-3) {
        let m = (p.center / resonant_k(1, 1.46, l)).round() as usize;
        assert_eq!(antinodes_between_mirrors(&cav, p.center, 0.013, l), m, "peak {}", p.center);
    }
}

#[test]
fn coupled_cavity_field_is_asymmetric_about_band() {
    let mirror = MetalMirror::new(presets::au_film(), 13.0).unwrap();
    let l = 6.85;
    let cav = fabry_perot(&presets::fe_co5(), l, &mirror, &presets::znse()).unwrap();
    let grid = uniform_grid(1700.0, 2300.0, 0.25).unwrap();
    let s = transmission_spectrum(&cav, &grid, 0.0, Polarization::S).unwrap();
    let counts: Vec<(f64, usize)> = detect_peaks(&s, 1e-5)
        .iter()
        .map(|p| (p.center, antinodes_between_mirrors(&cav, p.center, 0.013, l)))
        .collect();
    let max_in = |lo: f64, hi: f64| counts.iter().filter(|c| c.0 > lo && c.0 < hi).map(|c| c.1).max().unwrap();
    // An empty cavity's antinode count grows with k; folding inverts that
    // across the band.
    let below = max_in(1700.0, 1975.0);
    let above = max_in(1990.0, 2300.0);
    assert!(below > above, "{counts:?}");
}

#[test]
fn field_map_shape_and_rejects_bad_resolution() {
    let stack = Stack::new(
        DispersiveMaterial::constant(1.0),
        vec![Layer::new(DispersiveMaterial::constant(2.0), 1.0).unwrap()],
        DispersiveMaterial::constant(1.0),
    );
    let map = field_map(&stack, &[1000.0, 2000.0], 0.1, 0.0, Polarization::S).unwrap();
    assert_eq!(map.z_grid.len(), 11);
    assert_eq!(map.values.len(), 22);
    assert!(field_map(&stack, &[1000.0], 0.0, 0.0, Polarization::S).is_err());
}
