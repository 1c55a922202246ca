use super::*;
use crate::acsolver::{make_initial_data, AcIntegrator, AcOptions, PressureInit};
use crate::field::random::random_velocity;

fn taylor_green(grid: Grid, amp: f64) -> VectorField {
    VectorField::from_fn(grid, |x| [amp * x[0].cos() * x[1].sin(), -amp * x[0].sin() * x[1].cos(), 0.0])
}

fn momentum_residual(u: &VectorField, dudt: &VectorField, p: &ScalarField, mu: f64) -> f64 {
    // ∂t u + (u·∇)u + ∇p − μΔu
    let u_hat = u.transform();
    let adv = advection(u, &u_hat).unwrap();
    let grad_p = gradient(&p.transform()).inverse();
    let lap = vector_laplacian(&u_hat).inverse();
    dudt.add(&adv).unwrap().add(&grad_p).unwrap().axpy(-mu, &lap).unwrap().max_magnitude()
}

#[test]
fn zero_flow_stays_zero() {
    let grid = Grid::new(3, 8).unwrap();
    let s = NSState::new(VectorField::zeros(grid), 1.0, 0.0).unwrap();
    let out = ns_step(&s, 1e-2).unwrap();
    assert_eq!(out.u.max_magnitude(), 0.0);
    assert_eq!(limit_pressure(&s.u).max_abs(), 0.0);
}

#[test]
fn taylor_green_is_an_exact_decaying_solution() {
    let grid = Grid::new(2, 32).unwrap();
    let mu = 0.7;
    let u0 = taylor_green(grid, 1.0);
    let p = limit_pressure(&u0);
    assert!(momentum_residual(&u0, &u0.scaled(-2.0 * mu), &p, mu) < 1e-10);

    let t_end = 0.5;
    let traj = trajectory(&NSState::new(u0.clone(), mu, 0.0).unwrap(), true, None, &DtPolicy::default(), t_end, 0.25).unwrap();
    let last = traj.states.last().unwrap();
    let exact = u0.scaled((-2.0 * mu * t_end).exp());
    assert!(last.u.sub(&exact).unwrap().max_magnitude() < 1e-12);
}

#[test]
fn steps_remain_divergence_free() {
    let grid = Grid::new(3, 16).unwrap();
    let u = random_velocity(grid, 3, 4.0, 1.0, true);
    let mut s = NSState::new(u, 1.0, 0.0).unwrap();
    for _ in 0..5 {
        s = ns_step(&s, 1e-2).unwrap();
        assert!(divergence(&s.u.transform()).l2_norm() < 1e-10);
    }
}

#[test]
fn oversized_step_is_rejected() {
    let grid = Grid::new(2, 16).unwrap();
    let s = NSState::new(taylor_green(grid, 1.0), 1.0, 0.0).unwrap();
    assert!(matches!(ns_step(&s, 1.0), Err(AcnsError::CflViolation { .. })));
}

#[test]
fn pressure_formulas_agree_on_solenoidal_fields() {
    for (dim, seed) in [(2, 1u64), (3, 2), (3, 3)] {
        let grid = Grid::new(dim, 16).unwrap();
        let u = random_velocity(grid, seed, 5.0, 0.5, true);
        let lp = limit_pressure_checked(&u);
        assert!(lp.formula_gap < 1e-8, "gap {}", lp.formula_gap);
        assert!(lp.divergence_l2 < 1e-10);
        assert!(lp.p.mean().abs() < 1e-14);
    }
    // the cross-check is sensitive to compressible input
    let grid = Grid::new(2, 16).unwrap();
    let u = random_velocity(grid, 4, 5.0, 0.5, false);
    assert!(limit_pressure_checked(&u).formula_gap > 1e-3);
}

fn ac_snapshot(eps: f64) -> ACState {
    let grid = Grid::new(2, 16).unwrap();
    let u = random_velocity(grid, 8, 4.0, 1.0, false);
    let init = make_initial_data(u, PressureInit::Zero, eps, 1.0).unwrap().state;
    let mut integ = AcIntegrator::new(&init, AcOptions::default()).unwrap();
    for _ in 0..20 {
        integ.advance(5e-3).unwrap();
    }
    integ.state()
}

#[test]
fn gradient_identity_vanishes_on_zero_state() {
    let grid = Grid::new(3, 8).unwrap();
    let s = ACState::zero(grid, 1e-3, 1.0).unwrap();
    let r = limit_gradient_identity(&s, 1.5);
    assert_eq!(r.absolute, 0.0);
    assert_eq!(r.relative, 0.0);
}

#[test]
fn gradient_identity_responds_to_coefficient() {
    let s = ac_snapshot(1e-2);
    let stated = limit_gradient_identity(&s, 1.5);
    let corrupted = limit_gradient_identity(&s, 1.0);
    assert!(corrupted.absolute != stated.absolute);
    assert!(corrupted.relative > 1e-2);
}

#[test]
fn gradient_balance_closes_with_time_derivative() {
    let s = ac_snapshot(1e-2);
    let rate = gradient_rate(&s, true, None).unwrap();
    let r = gradient_balance(&s, &rate, None).unwrap();
    assert!(r.relative < 1e-12, "{}", r.relative);

    // finite difference of Qu along the trajectory converges at second order
    let mut errs = Vec::new();
    for h in [4e-3, 2e-3, 1e-3] {
        let forward = |dt: f64| {
            let mut i = AcIntegrator::new(&s, AcOptions::default()).unwrap();
            for _ in 0..8 {
                i.advance(dt / 8.0).unwrap();
            }
            i.state()
        };
        let ahead = forward(h);
        // one-sided second-order stencil
        let ahead2 = forward(2.0 * h);
        let q = |st: &ACState| project_gradient(&st.u.transform()).inverse();
        let d = q(&ahead).scaled(2.0).axpy(-0.5, &q(&ahead2)).unwrap().axpy(-1.5, &q(&s)).unwrap().scaled(1.0 / h);
        errs.push(gradient_balance(&s, &d, None).unwrap().relative);
    }
    assert!(errs[0] / errs[1] > 3.0 && errs[1] / errs[2] > 3.0, "{errs:?}");
}
