use proptest::prelude::*;

use super::*;
use crate::acsolver::{make_initial_data, trajectory, DtPolicy, PressureInit};
use crate::field::random::random_velocity;
use crate::field::Grid;
use crate::quadrature::gauss_legendre_on;

fn ac_run(n: usize, eps: f64, nonlinear_on: bool, dtau: f64, snapshots: usize) -> (Vec<RescaledState>, WaveModel) {
    let grid = Grid::new(2, n).unwrap();
    let u0 = random_velocity(grid, 7, 4.0, 2.0, false).scaled(0.5);
    let init = make_initial_data(u0, PressureInit::Scaled { beta: 1.0 }, eps, 0.05).unwrap();
    let options = AcOptions {
        nonlinear_on,
        ..AcOptions::default()
    };
    let snap = dtau * eps.sqrt();
    let traj = trajectory(&init.state, options.clone(), &DtPolicy::default(), snap * (snapshots - 1) as f64, snap).unwrap();
    (rescale_trajectory(&traj.states), WaveModel::from(&options))
}

#[test]
fn rescaling_arithmetic() {
    let grid = Grid::new(2, 8).unwrap();
    let u = random_velocity(grid, 1, 2.0, 2.0, false);
    let p = ScalarField::from_fn(grid, |x| x[0].cos());
    let s = ACState::new(u.clone(), p.clone(), 1.0, 0.1, 0.3).unwrap();
    let r = rescale(&s);
    assert_eq!(r.tau, 0.3);
    assert_eq!(r.u_tilde, u);

    let s = ACState::new(u, p, 1e-4, 0.1, 0.01).unwrap();
    assert!((rescale(&s).tau - 1.0).abs() < 1e-14);
}

proptest! {
    #[test]
    fn rescale_round_trips(seed in 0u64..500, t in 0.0f64..3.0, log_eps in -6.0f64..0.0) {
        let grid = Grid::new(2, 8).unwrap();
        let u = random_velocity(grid, seed, 3.0, 1.0, false);
        let p = ScalarField::from_fn(grid, |x| (x[0] + 2.0 * x[1]).sin());
        let s = ACState::new(u, p, 10f64.powf(log_eps), 0.2, t).unwrap();
        let back = unrescale(&rescale(&s)).unwrap();
        prop_assert_eq!(back.t.to_bits(), s.t.to_bits());
        prop_assert!(back.u.sub(&s.u).unwrap().max_magnitude() < 1e-15);
        prop_assert!(back.p.sub(&s.p).unwrap().max_abs() < 1e-15);
    }
}

fn zero_trajectory(len: usize) -> Vec<RescaledState> {
    let grid = Grid::new(2, 16).unwrap();
    (0..len)
        .map(|i| {
            let s = ACState::zero(grid, 1e-2, 0.1).unwrap();
            RescaledState {
                tau: 0.1 * i as f64,
                t: 0.01 * i as f64,
                ..rescale(&s)
            }
        })
        .collect()
}

#[test]
fn zero_trajectory_has_zero_residual_and_split() {
    let traj = zero_trajectory(5);
    let res = pressure_wave_residual(&traj, WaveModel::default()).unwrap();
    assert_eq!(res.relative.len(), 3);
    assert_eq!(res.max_absolute(), 0.0);
    let split = split_pressure(&traj, WaveModel::default(), 0.4).unwrap();
    assert!(split.p1.iter().chain(&split.p2).all(|p| p.max_abs() == 0.0));
    assert_eq!(split.reconstruction_error, 0.0);
}

#[test]
fn residual_requires_uniform_spacing() {
    let mut traj = zero_trajectory(4);
    traj[2].tau += 1e-3;
    assert!(matches!(
        pressure_wave_residual(&traj, WaveModel::default()),
        Err(AcnsError::NonuniformSpacing(_))
    ));
    assert!(matches!(
        pressure_wave_residual(&traj[..2], WaveModel::default()),
        Err(AcnsError::InsufficientSamples { .. })
    ));
}

#[test]
fn split_rejects_long_horizon() {
    let traj = zero_trajectory(4);
    assert!(split_pressure(&traj, WaveModel::default(), 0.5).is_err());
    assert!(split_pressure(&traj, WaveModel::default(), 0.3).is_ok());
}

#[test]
fn linear_run_satisfies_wave_equation() {
    let (traj, model) = ac_run(32, 1e-4, false, 2e-4, 9);
    let res = pressure_wave_residual(&traj, model).unwrap();
    assert!(res.max_relative() < 1e-6, "{:?}", res.relative);
}

#[test]
fn nonlinear_residual_is_second_order_in_spacing() {
    let mut maxima = Vec::new();
    for k in 0..3 {
        let dtau = 8e-3 / 2f64.powi(k);
        let count = 2usize.pow(k as u32) * 4 + 1;
        let (traj, model) = ac_run(32, 1e-4, true, dtau, count);
        maxima.push(pressure_wave_residual(&traj, model).unwrap().max_absolute());
    }
    for w in maxima.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.0..5.0).contains(&ratio), "{maxima:?}");
    }
}

#[test]
fn linear_split_reconstructs_and_p2_is_free_wave() {
    let (traj, model) = ac_run(32, 1e-4, false, 1e-3, 51);
    let split = split_pressure(&traj, model, 0.05).unwrap();
    assert!(split.reconstruction_error < 1e-5, "{}", split.reconstruction_error);

    // with no advective forcing p̃₂ is the free wave from the data of p̃
    let grid = traj[0].u_tilde.grid();
    let p0 = traj[0].p_tilde.transform();
    let v0 = divergence(&traj[0].u_tilde.transform()).scaled(-1.0 / traj[0].eps.sqrt());
    let tau = split.tau[50] - split.tau[0];
    let mut free = Spectrum::zeros(grid);
    for idx in 0..grid.len() {
        let k = grid.derivative_mode(idx);
        let w = (k[0] * k[0] + k[1] * k[1]).sqrt();
        free.coeffs_mut()[idx] = if w > 0.0 {
            p0.coeffs()[idx] * (w * tau).cos() + v0.coeffs()[idx] * ((w * tau).sin() / w)
        } else {
            p0.coeffs()[idx] + v0.coeffs()[idx] * tau
        };
    }
    assert!(split.p2[50].sub(&free.inverse()).unwrap().max_abs() < 1e-12);
}

#[test]
fn nonlinear_split_reconstructs() {
    let mut errors = Vec::new();
    for (dtau, count) in [(2e-3, 26), (1e-3, 51)] {
        let (traj, model) = ac_run(32, 1e-4, true, dtau, count);
        errors.push(split_pressure(&traj, model, 0.05).unwrap().reconstruction_error);
    }
    assert!(errors[1] < 1e-4, "{errors:?}");
    assert!(errors[1] < 0.6 * errors[0], "{errors:?}");
}

#[test]
fn viscous_response_is_linear_in_velocity() {
    let (traj, model) = ac_run(16, 1e-2, true, 1e-2, 6);
    let doubled: Vec<RescaledState> = traj
        .iter()
        .map(|s| RescaledState {
            u_tilde: s.u_tilde.scaled(2.0),
            ..s.clone()
        })
        .collect();
    let a = split_pressure(&traj, model, 0.05).unwrap();
    let b = split_pressure(&doubled, model, 0.05).unwrap();
    for (x, y) in a.p1.iter().zip(&b.p1) {
        assert!(y.sub(&x.scaled(2.0)).unwrap().max_abs() < 1e-12 * (1.0 + x.max_abs()));
    }
}

fn bump_at(center: f64, width: f64, amplitude: f64) -> RadialProfile {
    RadialProfile::Bump {
        center,
        width,
        amplitude,
    }
}

#[test]
fn radial_zero_data_gives_zero() {
    let p = RadialWaveProblem::for_horizon(RadialProfile::Zero, RadialProfile::Zero, RadialForcing::none(), 2.0, 256).unwrap();
    let sol = solve_radial_wave(&p).unwrap();
    assert!(sol.w.iter().chain(&sol.w_t).flatten().all(|&x| x == 0.0));
    assert_eq!(strichartz_ratio(&p, StrichartzVariant::S3).unwrap(), 0.0);
}

#[test]
fn displacement_data_matches_dalembert() {
    let f = bump_at(1.0, 0.5, 1.3);
    let p = RadialWaveProblem::for_horizon(f, RadialProfile::Zero, RadialForcing::none(), 2.0, 1024).unwrap();
    let sol = solve_radial_wave(&p).unwrap();
    let odd = |x: f64| x * f.value(x.abs());
    for (n, w) in sol.w.iter().enumerate().step_by(37) {
        let t = n as f64 * sol.dt;
        for (i, &val) in w.iter().enumerate().skip(1) {
            let r = sol.grid.r(i);
            let exact = (odd(r + t) + odd(r - t)) / (2.0 * r);
            assert!((val - exact).abs() < 1e-10, "t={t} r={r}: {val} vs {exact}");
        }
    }
}

#[test]
fn velocity_data_matches_kirchhoff_quadrature() {
    let g = bump_at(0.0, 0.8, -0.7);
    let p = RadialWaveProblem::for_horizon(RadialProfile::Zero, g, RadialForcing::none(), 1.5, 1024).unwrap();
    let sol = solve_radial_wave(&p).unwrap();
    let n = sol.w.len() - 1;
    let t = n as f64 * sol.dt;
    for i in (1..sol.grid.nr()).step_by(13) {
        let r = sol.grid.r(i);
        // w = (1/2r) ∫_{r−t}^{r+t} s g(|s|) ds, split at the kinks of the bump
        let mut breaks = vec![r - t, r + t, -0.8, 0.0, 0.8];
        breaks.retain(|&b| b >= r - t && b <= r + t);
        breaks.sort_by(f64::total_cmp);
        let integral: f64 = breaks
            .windows(2)
            .map(|ab| {
                gauss_legendre_on(30, ab[0], ab[1])
                    .iter()
                    .map(|&(s, w)| w * s * g.value(s.abs()))
                    .sum::<f64>()
            })
            .sum();
        let exact = integral / (2.0 * r);
        assert!((sol.w[n][i] - exact).abs() < 1e-8, "r={r}: {} vs {exact}", sol.w[n][i]);
    }
}

#[test]
fn radial_energy_is_conserved() {
    let p = RadialWaveProblem::for_horizon(bump_at(0.0, 0.7, 1.0), bump_at(1.0, 0.6, 0.4), RadialForcing::none(), 3.0, 2048)
        .unwrap();
    let sol = solve_radial_wave(&p).unwrap();
    let e0 = sol.energy[0];
    assert!(e0 > 0.0);
    assert!(sol.energy.iter().all(|e| ((e - e0) / e0).abs() < 1e-8));
}

#[test]
fn radial_forcing_converges_at_second_order() {
    let forcing = RadialForcing {
        profile: bump_at(0.0, 0.6, 2.0),
        duration: 0.8,
    };
    let base = RadialWaveProblem::for_horizon(RadialProfile::Zero, RadialProfile::Zero, forcing, 1.0, 256).unwrap();
    let solve = |factor: usize| {
        let p = RadialWaveProblem {
            nr: base.nr * factor,
            ..base
        };
        let sol = solve_radial_wave(&p).unwrap();
        let last = sol.w.last().unwrap().clone();
        (0..base.nr).map(|i| last[i * factor]).collect::<Vec<_>>()
    };
    let (a, b, c) = (solve(1), solve(2), solve(4));
    let diff = |x: &[f64], y: &[f64]| x.iter().zip(y).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
    let ratio = diff(&a, &b) / diff(&b, &c);
    assert!((3.5..4.5).contains(&ratio), "{ratio}");
}

#[test]
fn support_violation_is_reported() {
    let mut p = RadialWaveProblem::for_horizon(bump_at(0.0, 1.0, 1.0), RadialProfile::Zero, RadialForcing::none(), 2.0, 512).unwrap();
    p.r_max *= 0.5;
    p.horizon *= 0.5;
    assert!(matches!(solve_radial_wave(&p), Err(AcnsError::SupportViolation(_))));
    assert!(RadialWaveProblem::for_horizon(bump_at(0.5, 1.0, 1.0), RadialProfile::Zero, RadialForcing::none(), 1.0, 512)
        .and_then(|p| solve_radial_wave(&p))
        .is_err());
}

#[test]
fn strichartz_ratio_is_amplitude_invariant() {
    let p = random_radial_problem(3, 2.0, 512).unwrap();
    for variant in StrichartzVariant::ALL {
        let a = strichartz_ratio(&p, variant).unwrap();
        let b = strichartz_ratio(&p.scaled(3.7), variant).unwrap();
        assert!(a > 0.0);
        assert!(((a - b) / a).abs() < 1e-12, "{a} vs {b}");
    }
}

#[test]
fn strichartz_ratio_plateaus_in_time() {
    let f = bump_at(0.0, 1.0, 1.0);
    let ratios: Vec<f64> = [1.0, 2.0, 4.0, 8.0]
        .iter()
        .map(|&t| {
            let p = RadialWaveProblem::for_horizon(f, RadialProfile::Zero, RadialForcing::none(), t, 2048).unwrap();
            strichartz_ratio(&p, StrichartzVariant::S3).unwrap()
        })
        .collect();
    assert!(ratios.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-6)), "{ratios:?}");
    assert!(ratios[3] / ratios[2] < 1.05, "{ratios:?}");
}

#[test]
fn variants_differ_only_in_data_and_forcing_norms() {
    let p = random_radial_problem(11, 1.0, 512).unwrap();
    let sol = solve_radial_wave(&p).unwrap();
    let m = strichartz_measure(&p, &sol, &StrichartzVariant::ALL).unwrap();
    assert_eq!(m[0].lhs, m[1].lhs);
    assert_eq!(m[0].f_norm, m[1].f_norm);
    assert!(m[0].g_norm != m[1].g_norm);
    assert!(m[0].forcing_norm > 0.0 && m[1].forcing_norm > 0.0);
    assert!(m[0].ratio_no_derivative < m[0].ratio);
}
