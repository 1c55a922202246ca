use proptest::prelude::*;

use acns::acsolver::{make_initial_data, trajectory, AcOptions, DtPolicy, PressureInit};
use acns::diagnostics::{energy_identity_residual, fit_rate, log_space, TestBank};
use acns::field::random::random_velocity;
use acns::field::{Grid, ScalarField};
use acns::harness::{SweepConfig, U0Spec};
use acns::nsoracle::{self, limit_pressure, NSState};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rate_fit_recovers_power_laws(c in 1e-3f64..1e3, s in -3.0f64..3.0) {
        let xs = log_space(1e-5, 1e-2, 6);
        let ys: Vec<f64> = xs.iter().map(|x| c * x.powf(s)).collect();
        let fit = fit_rate(&xs, &ys).unwrap();
        prop_assert!((fit.fitted_slope - s).abs() < 1e-9);
        prop_assert!(fit.r_squared > 1.0 - 1e-12);
    }

    #[test]
    fn bank_pairings_are_linear(seed in 0u64..1000, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let grid = Grid::new(2, 16).unwrap();
        let bank = TestBank::new(grid, 1.0).unwrap();
        let f = random_velocity(grid, seed, 6.0, 1.0, false);
        let g = random_velocity(grid, seed + 1, 6.0, 1.0, false);
        let series = |c: &ScalarField| vec![c.transform(); 5];
        let (fs, gs) = (series(f.component(0)), series(g.component(1)));
        let combo = f.component(0).scaled(a).axpy(b, g.component(1)).unwrap();
        let lhs = bank.scalar_pairings(&series(&combo), 0.25).unwrap();
        let pf = bank.scalar_pairings(&fs, 0.25).unwrap();
        let pg = bank.scalar_pairings(&gs, 0.25).unwrap();
        for ((l, x), y) in lhs.iter().zip(&pf).zip(&pg) {
            prop_assert!((l - (a * x + b * y)).abs() < 1e-9 * (1.0 + l.abs()));
        }
    }

    #[test]
    fn limit_pressure_is_quadratic(seed in 0u64..1000, lambda in -4.0f64..4.0) {
        let grid = Grid::new(2, 16).unwrap();
        let u = random_velocity(grid, seed, 4.0, 2.0, true);
        let scaled = limit_pressure(&u.scaled(lambda));
        let expected = limit_pressure(&u).scaled(lambda * lambda);
        prop_assert!(scaled.sub(&expected).unwrap().max_abs() < 1e-10 * (1.0 + expected.max_abs()));
    }

    #[test]
    fn config_json_round_trips(
        seed in 0u64..u64::MAX,
        slope in 0.0f64..4.0,
        first in -1i32..1,
        count in 1usize..6,
    ) {
        let eps_list: Vec<f64> = (0..count).map(|i| 10f64.powi(first - i as i32)).collect();
        let cfg = SweepConfig {
            dim: 3,
            n: 16,
            mu: 0.01,
            horizon: 1.0,
            eps_list,
            u0_spec: U0Spec::RandomDivfree { seed, spectrum_slope: slope },
            p0_policy: PressureInit::Scaled { beta: 0.25 },
            dt_cap: 1e-2,
            snapshot_dt: 0.1,
            output_dir: "runs".into(),
            dealias: true,
            q_exponent: 5.0,
        };
        let back = SweepConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
        prop_assert_eq!(back.oracle_key(), cfg.oracle_key());
        prop_assert_eq!(back, cfg);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn incompressible_energy_never_increases(seed in 0u64..1000) {
        let grid = Grid::new(2, 16).unwrap();
        let s = NSState::new(random_velocity(grid, seed, 4.0, 2.0, true), 0.02, 0.0).unwrap();
        let traj = nsoracle::trajectory(&s, true, None, &DtPolicy::default(), 0.2, 0.02).unwrap();
        for w in traj.states.windows(2) {
            prop_assert!(w[1].energy() <= w[0].energy() * (1.0 + 1e-13));
        }
    }

    #[test]
    fn inviscid_linear_energy_is_exact(seed in 0u64..1000, log_eps in -6.0f64..-1.0) {
        let grid = Grid::new(2, 16).unwrap();
        let eps = 10f64.powf(log_eps);
        let init = make_initial_data(random_velocity(grid, seed, 4.0, 1.0, false), PressureInit::Zero, eps, 0.0).unwrap();
        let options = AcOptions { nonlinear_on: false, ..AcOptions::default() };
        let traj = trajectory(&init.state, options, &DtPolicy::default(), 0.1, 0.05).unwrap();
        let residual = energy_identity_residual(&traj.states, 0.05).unwrap();
        prop_assert!(residual.iter().all(|r| *r < 1e-10), "{:?}", residual);
    }
}
