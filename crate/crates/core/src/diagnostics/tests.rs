use super::*;
use crate::acsolver::{make_initial_data, trajectory, ACState, AcOptions, DtPolicy, PressureInit};
use crate::field::ops::project_gradient;
use crate::field::random::{random_velocity, taylor_green};
use crate::field::{Grid, ScalarField, VectorField};
use crate::nsoracle::{self, NSState};

fn linear() -> AcOptions {
    AcOptions {
        nonlinear_on: false,
        ..AcOptions::default()
    }
}

fn fixed_policy(dt: f64) -> DtPolicy {
    DtPolicy {
        dt_cap: dt,
        recompute_every: 10,
    }
}

#[test]
fn spacing_is_validated() {
    assert!(check_spacing([0.0, 0.1, 0.2].into_iter(), 0.1).is_ok());
    assert!(matches!(
        check_spacing([0.0, 0.1, 0.25].into_iter(), 0.1),
        Err(AcnsError::NonuniformSpacing(_))
    ));
    assert!(check_spacing([0.0].into_iter(), 0.0).is_err());
}

#[test]
fn zero_trajectory_diagnostics() {
    let grid = Grid::new(2, 8).unwrap();
    let states: Vec<ACState> = (0..4)
        .map(|i| ACState {
            t: 0.1 * i as f64,
            ..ACState::zero(grid, 1e-2, 1.0).unwrap()
        })
        .collect();
    assert!(energy_identity_residual(&states, 0.1).unwrap().iter().all(|&r| r == 0.0));
    let rec = records(&states, 0.1, &[4.0]).unwrap();
    assert!(rec.iter().all(|r| r.energy == 0.0 && r.q_lp[0].1 == 0.0 && r.div_h_minus1 == 0.0));
    let report = corollary_bounds_monitor(&states, 0.1).unwrap();
    assert!(report.passed());
    assert_eq!(report.advection_l1_l3_2, 0.0);
    assert!(report.records.iter().all(|r| r.u_l6 == 0.0 && r.eps_p_sq == 0.0));

    let mut bad = states.clone();
    bad[2].u = taylor_green(grid);
    assert!(energy_identity_residual(&bad, 0.1).is_err());
}

#[test]
fn inviscid_linear_run_conserves_energy() {
    let grid = Grid::new(3, 8).unwrap();
    let u0 = VectorField::from_fn(grid, |x| [x[0].cos(), 0.0, 0.0]);
    let init = make_initial_data(u0, PressureInit::Zero, 1e-3, 0.0).unwrap();
    let traj = trajectory(&init.state, linear(), &fixed_policy(1e-2), 1.0, 0.1).unwrap();
    let res = energy_identity_residual(&traj.states, 0.1).unwrap();
    assert!(res.iter().all(|&r| r < 1e-10), "{res:?}");
    // the wave has moved energy into the pressure and back
    assert!(traj.states.iter().any(|s| s.eps * s.p.inner(&s.p).unwrap() > 1e-3));
}

fn tg_residual(n: usize, dt: f64, horizon: f64) -> f64 {
    let grid = Grid::new(2, n).unwrap();
    let init = make_initial_data(taylor_green(grid), PressureInit::NsCompatible, 1e-3, 0.1).unwrap();
    let traj = trajectory(&init.state, AcOptions::default(), &fixed_policy(dt), horizon, dt).unwrap();
    energy_identity_residual(&traj.states, dt)
        .unwrap()
        .into_iter()
        .fold(0.0, f64::max)
}

#[test]
fn taylor_green_energy_identity_converges_at_second_order() {
    let coarse = tg_residual(16, 4e-3, 0.2);
    let fine = tg_residual(16, 2e-3, 0.2);
    assert!(fine < 1e-6, "{fine}");
    let ratio = coarse / fine;
    assert!((3.5..4.5).contains(&ratio), "{coarse} {fine} {ratio}");
}

#[test]
fn energy_residual_is_translation_invariant() {
    let grid = Grid::new(2, 16).unwrap();
    let u0 = random_velocity(grid, 4, 4.0, 2.0, false);
    let shift = |u: &VectorField, s: usize| {
        let comps = u
            .components()
            .iter()
            .map(|c| {
                let v: Vec<f64> = (0..grid.len()).map(|i| c.values()[(i + s * 16) % grid.len()]).collect();
                ScalarField::from_values(grid, v).unwrap()
            })
            .collect();
        VectorField::from_components(comps).unwrap()
    };
    let run = |u: VectorField| {
        let init = make_initial_data(u, PressureInit::Zero, 1e-2, 0.1).unwrap();
        let traj = trajectory(&init.state, AcOptions::default(), &fixed_policy(1e-2), 0.2, 0.05).unwrap();
        energy_identity_residual(&traj.states, 0.05).unwrap()
    };
    let a = run(u0.clone());
    let b = run(shift(&u0, 5));
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-12, "{a:?} {b:?}");
    }
}

#[test]
fn exponential_quadrature_is_exact_for_viscous_decay() {
    let grid = Grid::new(2, 16).unwrap();
    let s = NSState::new(taylor_green(grid), 0.5, 0.0).unwrap();
    let traj = nsoracle::trajectory(&s, true, None, &fixed_policy(1e-2), 1.0, 0.1).unwrap();
    let exp = energy_inequality(&traj.states, 0.1, Quadrature::ExponentialFit).unwrap();
    assert!(exp.max_excess.abs() < 1e-12, "{}", exp.max_excess);
    let trap = energy_inequality(&traj.states, 0.1, Quadrature::Trapezoid).unwrap();
    // the trapezoid overestimates the integral of a convex decaying integrand
    assert!(trap.max_excess > 1e-4);
}

#[test]
fn corollary_bounds_hold_on_a_run() {
    let grid = Grid::new(2, 16).unwrap();
    let u0 = random_velocity(grid, 12, 4.0, 2.0, false);
    let init = make_initial_data(u0, PressureInit::Scaled { beta: 0.5 }, 1e-2, 0.1).unwrap();
    let traj = trajectory(&init.state, AcOptions::default(), &DtPolicy::default(), 0.5, 0.05).unwrap();
    let report = corollary_bounds_monitor(&traj.states, 0.05).unwrap();
    assert!(report.passed(), "{:?}", report.violations);
    let e0 = report.initial_energy;
    for r in &report.records {
        assert!(r.eps_p_sq <= 2.0 * e0 && r.u_sq <= 2.0 * e0);
    }
    assert!(report.advection_l2_l1 > 0.0 && report.div_u_l1_l3_2 > 0.0);
}

#[test]
fn test_bank_pairings_match_direct_sums() {
    let grid = Grid::new(2, 16).unwrap();
    let f = ScalarField::from_fn(grid, |x| (x[0] + 2.0 * x[1]).sin() + 0.3 * (3.0 * x[0]).cos() + (x[1] - x[0]).cos());
    let bank = TestBank::new(grid, 1.0).unwrap();
    assert!(!bank.is_empty());
    let series = vec![f.transform(); 11];
    let pairings = bank.scalar_pairings(&series, 0.1).unwrap();
    // ∫₀¹ sin⁴(πt) dt = 3/8, by the trapezoid on 10 intervals exactly
    let time = 3.0 / 8.0;
    let dv = grid.cell_volume();
    for (m, got) in bank.members().iter().zip(&pairings) {
        let direct: f64 = (0..grid.len())
            .map(|i| {
                let x = grid.coords(i);
                let arg = m.k[0] as f64 * x[0] + m.k[1] as f64 * x[1];
                let phi = match m.phase {
                    bank::Phase::Cos => arg.cos(),
                    bank::Phase::Sin => arg.sin(),
                };
                f.values()[i] * phi * dv
            })
            .sum();
        assert!((got - time * direct).abs() < 1e-10, "{m:?}: {got} vs {}", time * direct);
    }
    assert!(bank.scalar_pairings(&series[..5], 0.1).is_err());
    assert!(TestBank::new(Grid::new(2, 8).unwrap(), 1.0).is_err());
}

#[test]
fn q_decay_exponents() {
    assert!((q_decay_exponent(4.0) - 1.0 / 72.0).abs() < 1e-15);
    assert_eq!(q_decay_exponent(6.0), 0.0);
    assert!((balancing_alpha(1e-18) - 0.1).abs() < 1e-15);
}

#[test]
fn divergence_free_linear_run_has_no_gradient_part() {
    let grid = Grid::new(2, 16).unwrap();
    let u0 = random_velocity(grid, 2, 4.0, 2.0, true);
    let cfg = QDecayConfig {
        u0,
        p0: PressureInit::Zero,
        mu: 0.1,
        eps_list: vec![1e-1, 1e-2, 1e-3, 1e-4],
        p: 4.0,
        horizon: 0.2,
        snapshot_dt: 0.05,
        policy: DtPolicy::default(),
        options: linear(),
    };
    let study = q_decay_study(&cfg).unwrap();
    assert_eq!(study.measurements.len(), 4);
    assert!(study.measurements.iter().all(|m| m.strong < 1e-12 && m.weak < 1e-12));
    assert!((study.paper_exponent - 1.0 / 72.0).abs() < 1e-15);

    let short = QDecayConfig {
        eps_list: vec![1e-1, 1e-2, 1e-3],
        ..cfg.clone()
    };
    assert!(q_decay_study(&short).is_err());
    let narrow = QDecayConfig {
        eps_list: vec![1e-1, 5e-2, 2e-2, 1.5e-2],
        ..cfg
    };
    assert!(q_decay_study(&narrow).is_err());
}

#[test]
fn gradient_data_oscillates_in_the_energy_metric() {
    let grid = Grid::new(2, 16).unwrap();
    let u0 = project_gradient(&random_velocity(grid, 3, 4.0, 2.0, false).transform()).inverse();
    let eps = 1e-3;
    let init = make_initial_data(u0, PressureInit::Zero, eps, 0.0).unwrap();
    let traj = trajectory(&init.state, linear(), &DtPolicy::default(), 0.5, 0.05).unwrap();
    let q_energy: Vec<f64> = traj
        .states
        .iter()
        .map(|s| {
            let q = project_gradient(&s.u.transform());
            q.l2_norm().powi(2) + eps * s.p.inner(&s.p).unwrap()
        })
        .collect();
    for e in &q_energy {
        assert!((e - q_energy[0]).abs() < 1e-10 * q_energy[0]);
    }
    let m = q_measure(&traj.states, 0.05, 4.0).unwrap();
    assert!(m.strong > 0.0 && m.remainder > 0.0 && m.smooth > 0.0);
}

#[test]
fn steady_trajectory_has_zero_shift() {
    let grid = Grid::new(2, 8).unwrap();
    let u = taylor_green(grid);
    let times: Vec<f64> = (0..21).map(|i| i as f64 * 0.01).collect();
    let vel: Vec<&VectorField> = times.iter().map(|_| &u).collect();
    let m = time_shift_modulus(&times, &vel, 0.01, &[0.02, 0.05, 0.1, 0.15]).unwrap();
    assert!(m.norms.iter().all(|&n| n == 0.0));
    assert!(m.fit.is_none());
    assert!(time_shift_modulus(&times, &vel, 0.01, &[0.01, 0.05]).is_err());
    assert!(time_shift_modulus(&times, &vel, 0.01, &[0.2]).is_err());
    assert!(time_shift_modulus(&times, &vel, 0.01, &[0.025]).is_err());
}

#[test]
fn oscillating_trajectory_matches_closed_form_shift() {
    let grid = Grid::new(2, 8).unwrap();
    let v0 = taylor_green(grid);
    let v2 = v0.inner(&v0).unwrap();
    let dt = 1e-3;
    let big_t = 2.0;
    let times: Vec<f64> = (0..=2000).map(|i| i as f64 * dt).collect();
    let fields: Vec<VectorField> = times.iter().map(|t| v0.scaled(t.sin())).collect();
    let vel: Vec<&VectorField> = fields.iter().collect();
    let shifts = [0.01, 0.03, 0.1, 0.3];
    let m = time_shift_modulus(&times, &vel, dt, &shifts).unwrap();
    for (h, got) in shifts.iter().zip(&m.norms) {
        // ∫₀^{T−h} (sin(t+h) − sin t)² dt = 4 sin²(h/2)[(T−h)/2 + (sin(2T−h) − sin h)/4]
        let exact = (4.0 * (h / 2.0).sin().powi(2) * ((big_t - h) / 2.0 + ((2.0 * big_t - h).sin() - h.sin()) / 4.0) * v2).sqrt();
        assert!((got - exact).abs() < 1e-6 * exact, "h={h}: {got} vs {exact}");
    }
    let slope = m.fit.unwrap().fitted_slope;
    assert!((slope - 1.0).abs() < 0.05, "{slope}");
    assert!(m.bound_holds);
}

#[test]
fn oracle_comparison_of_zero_data_is_zero() {
    let grid = Grid::new(2, 16).unwrap();
    let init = make_initial_data(VectorField::zeros(grid), PressureInit::Zero, 1e-2, 0.1).unwrap();
    let ac = trajectory(&init.state, AcOptions::default(), &DtPolicy::default(), 0.2, 0.05).unwrap();
    let ns0 = NSState::new(VectorField::zeros(grid), 0.1, 0.0).unwrap();
    let ns = nsoracle::trajectory(&ns0, true, None, &DtPolicy::default(), 0.2, 0.05).unwrap();
    let cmp = compare_with_oracle(&ac.states, &ns.states, 0.05).unwrap();
    assert_eq!(cmp.pu_error, 0.0);
    assert_eq!(cmp.pressure_pairing_max, 0.0);
    assert!(compare_with_oracle(&ac.states, &ns.states[..3], 0.05).is_err());
}

#[test]
fn oracle_comparison_detects_compressible_error() {
    let grid = Grid::new(2, 16).unwrap();
    let u0 = random_velocity(grid, 5, 4.0, 2.0, true);
    let ns0 = NSState::new(u0.clone(), 0.1, 0.0).unwrap();
    let ns = nsoracle::trajectory(&ns0, true, None, &DtPolicy::default(), 0.2, 0.02).unwrap();
    let errs: Vec<f64> = [1e-1, 1e-3]
        .iter()
        .map(|&eps| {
            let init = make_initial_data(ns0.u.clone(), PressureInit::NsCompatible, eps, 0.1).unwrap();
            let ac = trajectory(&init.state, AcOptions::default(), &DtPolicy::default(), 0.2, 0.02).unwrap();
            compare_with_oracle(&ac.states, &ns.states, 0.02).unwrap().pu_error
        })
        .collect();
    assert!(errs[0] > errs[1] && errs[1] > 0.0, "{errs:?}");
}
