use std::f64::consts::PI;

use proptest::prelude::*;

use super::*;
use crate::field::random::random_velocity;
use crate::quadrature::gauss_legendre_on;

#[test]
fn kernel_has_unit_mass() {
    for dim in [2, 3] {
        for alpha in [0.02, 0.1, 0.5, 0.9] {
            let k = MollifierKernel::new(alpha, dim).unwrap();
            assert!((k.mass() - 1.0).abs() < 1e-10, "d={dim} α={alpha}: {}", k.mass());
        }
    }
    assert!(MollifierKernel::new(1.0, 3).is_err());
    assert!(MollifierKernel::new(0.0, 3).is_err());
}

fn brute_transform_3d(rho: f64) -> f64 {
    let rule = gauss_legendre_on(4000, 0.0, 1.0);
    let c = normalization(3);
    rule.iter().map(|(r, w)| w * 4.0 * PI * r * r * c * bump(*r) * (rho * r).sin() / (rho * r)).sum()
}

fn brute_transform_2d(rho: f64) -> f64 {
    // 2π ∫ r ψ(r) J₀(ρr) dr with J₀(z) = (1/π)∫₀^π cos(z sin θ) dθ
    let rule = gauss_legendre_on(600, 0.0, 1.0);
    let c = normalization(2);
    let m = 400;
    rule.iter()
        .map(|(r, w)| {
            let j0: f64 = (0..m).map(|i| (rho * r * (PI * (i as f64 + 0.5) / m as f64).sin()).cos()).sum::<f64>() / m as f64;
            w * 2.0 * PI * r * c * bump(*r) * j0
        })
        .sum()
}

#[test]
fn bump_transform_matches_brute_force() {
    let t3 = BumpTransform::new(3, 200.0);
    let t2 = BumpTransform::new(2, 200.0);
    assert!((t3.eval(0.0) - 1.0).abs() < 1e-12);
    assert!((t2.eval(0.0) - 1.0).abs() < 1e-12);
    for rho in [0.5, 3.0, 17.0, 60.0, 150.0] {
        assert!((t3.eval(rho) - brute_transform_3d(rho)).abs() < 1e-12, "d=3 ρ={rho}");
        assert!((t2.eval(rho) - brute_transform_2d(rho)).abs() < 1e-11, "d=2 ρ={rho}");
    }
    assert!(brute_transform_3d(RHO_CUTOFF).abs() < 1e-16);
}

#[test]
fn constants_are_preserved() {
    let grid = Grid::new(3, 16).unwrap();
    let f = ScalarField::constant(grid, 2.5);
    let out = mollify(&f, 0.3).unwrap();
    assert!(out.field.sub(&f).unwrap().max_abs() < 1e-13);
}

#[test]
fn sine_modes_match_direct_convolution() {
    let grid = Grid::new(2, 32).unwrap();
    let alpha = 0.6;
    let (k0, k1) = (3.0, -2.0);
    let f = ScalarField::from_fn(grid, |x| (k0 * x[0] + k1 * x[1]).sin());
    let out = mollify(&f, alpha).unwrap();
    assert!(!out.under_resolved);
    let kernel = MollifierKernel::new(alpha, 2).unwrap();
    // tensor trapezoid over the support square
    let m = 400;
    let h = 2.0 * alpha / m as f64;
    for idx in (0..grid.len()).step_by(37) {
        let x = grid.coords(idx);
        let mut acc = 0.0;
        for i in 0..=m {
            for j in 0..=m {
                let y = [-alpha + i as f64 * h, -alpha + j as f64 * h];
                let r = (y[0] * y[0] + y[1] * y[1]).sqrt();
                acc += kernel.value(r) * (k0 * (x[0] - y[0]) + k1 * (x[1] - y[1])).sin();
            }
        }
        acc *= h * h;
        assert!((out.field.values()[idx] - acc).abs() < 1e-10, "{} vs {acc}", out.field.values()[idx]);
    }
}

#[test]
fn sine_modes_match_direct_convolution_3d() {
    let grid = Grid::new(3, 32).unwrap();
    let alpha = 0.5;
    let f = ScalarField::from_fn(grid, |x| (2.0 * x[0] + x[1] - 3.0 * x[2]).sin());
    let out = mollify(&f, alpha).unwrap();
    let kernel = MollifierKernel::new(alpha, 3).unwrap();
    let m = 120;
    let h = 2.0 * alpha / m as f64;
    for idx in [0usize, 1234, 20000] {
        let x = grid.coords(idx);
        let mut acc = 0.0;
        for i in 0..=m {
            for j in 0..=m {
                for l in 0..=m {
                    let y = [-alpha + i as f64 * h, -alpha + j as f64 * h, -alpha + l as f64 * h];
                    let r = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
                    if r < alpha {
                        acc += kernel.value(r) * (2.0 * (x[0] - y[0]) + (x[1] - y[1]) - 3.0 * (x[2] - y[2])).sin();
                    }
                }
            }
        }
        acc *= h * h * h;
        assert!((out.field.values()[idx] - acc).abs() < 1e-9, "{} vs {acc}", out.field.values()[idx]);
    }
}

#[test]
fn remainder_shrinks_monotonically_as_alpha_decreases() {
    let grid = Grid::new(2, 32).unwrap();
    let f = random_velocity(grid, 4, 6.0, 1.0, false).component(0).clone();
    let mut last = f64::INFINITY;
    for alpha in [0.9, 0.6, 0.4, 0.2, 0.1, 0.05] {
        let smooth = mollify(&f, alpha).unwrap().field;
        let rem = f.sub(&smooth).unwrap();
        let norm = rem.inner(&rem).unwrap().sqrt();
        assert!(norm < last, "α={alpha}: {norm} ≥ {last}");
        last = norm;
    }
}

#[test]
fn narrow_kernels_are_flagged() {
    let grid = Grid::new(2, 32).unwrap();
    let f = ScalarField::zeros(grid);
    assert!(mollify(&f, 0.3).unwrap().under_resolved);
    assert!(!mollify(&f, 0.5).unwrap().under_resolved);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn mass_preserved_and_contractive(seed in 0u64..500, alpha in 0.05f64..0.95) {
        let grid = Grid::new(2, 32).unwrap();
        let f = random_velocity(grid, seed, 8.0, 0.0, false).component(1).clone();
        let f = ScalarField::from_values(grid, f.values().iter().map(|v| v + 0.7).collect()).unwrap();
        let g = mollify(&f, alpha).unwrap().field;
        prop_assert!((g.mean() - f.mean()).abs() < 1e-12);
        prop_assert!(g.inner(&g).unwrap() <= f.inner(&f).unwrap() * (1.0 + 1e-14));
    }
}

#[test]
fn exponent_arithmetic() {
    assert!((approx_exponent(3, 4.0) - 0.25).abs() < 1e-15);
    assert!((approx_exponent(3, 2.0) - 1.0).abs() < 1e-15);
    assert!(approx_exponent(3, 6.0).abs() < 1e-15);
    assert!((young_exponent_stated(3, 3.0, 4.0, 4.0) - 3.0).abs() < 1e-15);
    assert!((young_exponent_stated(3, 0.0, 2.0, f64::INFINITY) + 1.5).abs() < 1e-15);
    assert!((young_exponent(3, 0.0, 2.0, f64::INFINITY) + 1.5).abs() < 1e-15);
    assert!(young_exponent_stated(3, 0.0, 4.0, 4.0).abs() < 1e-15);
}

#[test]
fn inequality_checks_reject_bad_parameters() {
    let cfg = VerifyConfig::new(3, 1);
    assert!(verify_approx_inequality(&cfg, 7.0).is_err());
    assert!(verify_approx_inequality(&cfg, 1.5).is_err());
    assert!(verify_young_inequality(&cfg, 1.0, 4.0, 2.0).is_err());
    assert!(verify_young_inequality(&cfg, -1.0, 2.0, 2.0).is_err());
}

#[test]
fn small_radial_ensemble_recovers_l2_rate() {
    let cfg = VerifyConfig {
        samples: 12,
        backend: Backend::Radial { nr: 16384, r_max: 4.0 },
        ..VerifyConfig::new(3, 3)
    };
    let rep = verify_approx_inequality(&cfg, 2.0).unwrap();
    assert!((rep.rate.fitted_slope - 1.0).abs() < 0.2, "{}", rep.rate.fitted_slope);
    assert_eq!(rep.rows.len(), 12 * cfg.alphas.len());
}

