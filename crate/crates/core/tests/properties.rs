use num_complex::Complex64;
use proptest::prelude::*;

use rankone::oscillator::{osc_f_series, oscillator_model};
use rankone::perturbation::zeros_of_weyl;
use rankone::sampling::{lagrange_basis, reconstruct, reconstruct_grid, sample, transform};
use rankone::verify::{gen, rel_err, TEST_POINT_CLEARANCE};
use rankone::{
    node_weights, perturbed_model, perturbed_spectrum, weyl, weyl_h, xi, xi_norm_sq, Coupling,
    Exec, SpectralModel,
};

fn seeded_model(seed: u64) -> SpectralModel {
    gen::model(&mut gen::rng(seed), 12, 100.0)
}

fn off_axis(re: f64, im: f64) -> Complex64 {
    Complex64::new(
        re,
        if im.abs() < 0.05 {
            0.05_f64.copysign(im)
        } else {
            im
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weyl_is_herglotz_and_real_symmetric(seed in any::<u64>(), re in -80.0..80.0f64, im in -20.0..20.0f64) {
        let m = seeded_model(seed);
        let z = off_axis(re, im);
        let f = weyl(&m, z).unwrap().f;
        prop_assert!(f.im * z.im > 0.0);
        let g = weyl(&m, z.conj()).unwrap().f;
        prop_assert!((g - f.conj()).norm() <= 1e-14 * f.norm());
    }

    #[test]
    fn aronszajn_krein_matches_perturbed_model(seed in any::<u64>(), re in -80.0..80.0f64, im in -20.0..20.0f64) {
        let m = seeded_model(seed);
        let mut rng = gen::rng(seed ^ 1);
        let h = gen::coupling(&mut rng, &m);
        let z = off_axis(re, im);
        let via_formula = weyl_h(&m, h, z).unwrap().f_h;
        let via_model = weyl(&perturbed_model(&m, h).unwrap(), z).unwrap().f;
        prop_assert!(rel_err(via_formula, via_model) <= 1e-9);
    }

    #[test]
    fn spectra_increase_with_coupling(seed in any::<u64>()) {
        let m = seeded_model(seed);
        let mut rng = gen::rng(seed ^ 2);
        let a = gen::coupling(&mut rng, &m);
        let b = gen::coupling(&mut rng, &m);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let x = perturbed_spectrum(&m, Coupling::Finite(lo)).unwrap();
        let y = perturbed_spectrum(&m, Coupling::Finite(hi)).unwrap();
        prop_assert!(x.iter().zip(&y).all(|(p, q)| p <= q));
    }

    #[test]
    fn node_weights_conserve_mass(seed in any::<u64>()) {
        let m = seeded_model(seed);
        let h = gen::coupling(&mut gen::rng(seed ^ 3), &m);
        let nodes = perturbed_spectrum(&m, Coupling::Finite(h)).unwrap();
        let w = node_weights(&m, h, &nodes).unwrap();
        let total: f64 = w.iter().sum();
        prop_assert!((total - m.mu_norm_sq()).abs() <= 1e-9 * m.mu_norm_sq());
        for (x, mj) in nodes.iter().zip(&w) {
            prop_assert!((mj * xi_norm_sq(&m, *x).unwrap() - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn reconstruction_is_independent_of_coupling(seed in any::<u64>()) {
        let m = seeded_model(seed);
        let mut rng = gen::rng(seed ^ 4);
        let phi = gen::state(&mut rng, m.dim());
        let (h1, h2) = (gen::coupling(&mut rng, &m), gen::coupling(&mut rng, &m));
        let mut avoid = m.eigenvalues().to_vec();
        avoid.extend(zeros_of_weyl(&m).unwrap());
        for h in [h1, h2] {
            avoid.extend(perturbed_spectrum(&m, Coupling::Finite(h)).unwrap());
        }
        let s1 = sample(&m, &phi, Coupling::Finite(h1)).unwrap();
        let s2 = sample(&m, &phi, Coupling::Finite(h2)).unwrap();
        for z in gen::test_points(&mut rng, &avoid, 10, TEST_POINT_CLEARANCE) {
            let a = reconstruct(&s1, z).unwrap();
            let b = reconstruct(&s2, z).unwrap();
            prop_assert!(rel_err(a, b) <= 1e-9);
        }
    }

    #[test]
    fn lagrange_basis_is_a_partition_of_unity(seed in any::<u64>(), re in -80.0..80.0f64, im in -20.0..20.0f64) {
        let m = seeded_model(seed);
        let phi = gen::state(&mut gen::rng(seed ^ 5), m.dim());
        let s = sample(&m, &phi, Coupling::Finite(0.0)).unwrap();
        let total: Complex64 = lagrange_basis(&s, off_axis(re, im)).unwrap().iter().sum();
        prop_assert!((total - 1.0).norm() <= 1e-10);
    }

    #[test]
    fn xi_evaluates_the_transform(seed in any::<u64>(), re in -80.0..80.0f64, im in -20.0..20.0f64) {
        let m = seeded_model(seed);
        let phi = gen::state(&mut gen::rng(seed ^ 6), m.dim());
        let z = off_axis(re, im);
        let via_xi = xi(&m, z).unwrap().as_state().inner(&phi);
        prop_assert!(rel_err(via_xi, transform(&m, &phi, z).unwrap()) <= 1e-10);
    }

    #[test]
    fn oscillator_truncation_is_the_partial_series(levels in 2usize..30, re in 0.0..40.0f64, im in 0.3..5.0f64) {
        let z = Complex64::new(re, im);
        let m = oscillator_model(levels, false).unwrap();
        let a = weyl(&m, z).unwrap().f;
        let b = osc_f_series(z, levels).unwrap().value;
        prop_assert!(rel_err(a, b) <= 1e-12);
    }
}

#[test]
fn grid_order_and_values_do_not_depend_on_strategy() {
    let m = seeded_model(77);
    let mut rng = gen::rng(78);
    let phi = gen::state(&mut rng, m.dim());
    let s = sample(&m, &phi, Coupling::Finite(1.3)).unwrap();
    let mut avoid = s.nodes().to_vec();
    avoid.extend(zeros_of_weyl(&m).unwrap());
    let points = gen::test_points(&mut rng, &avoid, 500, TEST_POINT_CLEARANCE);
    let seq: Vec<_> = reconstruct_grid(&s, &points, Exec::Sequential)
        .into_iter()
        .map(Result::unwrap)
        .collect();
    let par: Vec<_> = reconstruct_grid(&s, &points, Exec::Parallel)
        .into_iter()
        .map(Result::unwrap)
        .collect();
    assert_eq!(seq, par);
    for (z, v) in points.iter().zip(&seq) {
        assert_eq!(*v, reconstruct(&s, *z).unwrap());
    }
}
