//! Measured constants of the `(4,4)` Strichartz estimates on `ℝ³`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::radial_wave::{solve_radial_wave, RadialForcing, RadialProfile, RadialWaveProblem, RadialWaveSolution};
use crate::error::{AcnsError, Result};
use crate::field::time_norm;
use crate::radial::{apply_multiplier, homogeneous_norm, lp_norm, RadialGrid};

/// Zero padding applied before radial Fourier multipliers.
const PAD: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrichartzVariant {
    /// Data in `Ḣ^{1/2} × Ḣ^{−1/2}`, forcing in `L¹_t L^{3/2}_x`.
    S3,
    /// Data in `Ḣ^{1/2} × Ḣ^{1/2}`, forcing in `L¹_t L²_x`.
    S1,
}

impl StrichartzVariant {
    pub const ALL: [StrichartzVariant; 2] = [StrichartzVariant::S3, StrichartzVariant::S1];

    pub fn name(&self) -> &'static str {
        match self {
            StrichartzVariant::S3 => "s3",
            StrichartzVariant::S1 => "s1",
        }
    }

    fn g_order(&self) -> f64 {
        match self {
            StrichartzVariant::S3 => -0.5,
            StrichartzVariant::S1 => 0.5,
        }
    }

    fn forcing_exponent(&self) -> f64 {
        match self {
            StrichartzVariant::S3 => 1.5,
            StrichartzVariant::S1 => 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrichartzMeasurement {
    pub variant: StrichartzVariant,
    /// `‖w‖_{L⁴_{t,x}}`
    pub solution_norm: f64,
    /// `‖∂t w‖_{L⁴_t W^{−1,4}_x}`
    pub derivative_norm: f64,
    pub f_norm: f64,
    pub g_norm: f64,
    pub forcing_norm: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// Ratio with the `∂t w` term dropped from the left side.
    pub ratio_no_derivative: f64,
}

fn padded(grid: &RadialGrid, f: &[f64]) -> (RadialGrid, Vec<f64>) {
    let big = RadialGrid::new(grid.nr() * PAD, grid.r_max() * PAD as f64).expect("valid grid");
    let mut out = f.to_vec();
    out.resize(big.nr(), 0.0);
    (big, out)
}

fn ratio_or_zero(lhs: f64, rhs: f64) -> Result<f64> {
    if rhs > 0.0 {
        Ok(lhs / rhs)
    } else if lhs == 0.0 {
        Ok(0.0)
    } else {
        Err(AcnsError::param(format!(
            "right-hand side vanishes while the left-hand side is {lhs}"
        )))
    }
}

/// Norms of the pair of quantities shared by both variants.
struct SolutionNorms {
    solution: f64,
    derivative: f64,
}

fn solution_norms(sol: &RadialWaveSolution) -> Result<SolutionNorms> {
    let grid = sol.grid;
    let l4: Vec<f64> = sol.w.iter().map(|w| lp_norm(&grid, w, 4.0)).collect();
    let weak: Vec<f64> = sol
        .w_t
        .iter()
        .map(|wt| {
            let (big, ext) = padded(&grid, wt);
            let smoothed = apply_multiplier(&big, &ext, |rho| (1.0 + rho * rho).powf(-0.5));
            lp_norm(&grid, &smoothed[..grid.nr()], 4.0)
        })
        .collect();
    Ok(SolutionNorms {
        solution: time_norm(&l4, sol.dt, 4.0)?,
        derivative: time_norm(&weak, sol.dt, 4.0)?,
    })
}

fn measure_with(
    problem: &RadialWaveProblem,
    sol: &RadialWaveSolution,
    norms: &SolutionNorms,
    variant: StrichartzVariant,
) -> Result<StrichartzMeasurement> {
    let grid = sol.grid;
    let (big, f) = padded(&grid, &grid.sample(|r| problem.f.value(r)));
    let f_norm = homogeneous_norm(&big, &f, 0.5);
    let (big, g) = padded(&grid, &grid.sample(|r| problem.g.value(r)));
    let g_norm = homogeneous_norm(&big, &g, variant.g_order());
    let q = variant.forcing_exponent();
    let spatial: Vec<f64> = sol
        .times()
        .iter()
        .map(|&t| lp_norm(&grid, &grid.sample(|r| problem.forcing.value(r, t)), q))
        .collect();
    let forcing_norm = time_norm(&spatial, sol.dt, 1.0)?;
    let lhs = norms.solution + norms.derivative;
    let rhs = f_norm + g_norm + forcing_norm;
    Ok(StrichartzMeasurement {
        variant,
        solution_norm: norms.solution,
        derivative_norm: norms.derivative,
        f_norm,
        g_norm,
        forcing_norm,
        lhs,
        rhs,
        ratio: ratio_or_zero(lhs, rhs)?,
        ratio_no_derivative: ratio_or_zero(norms.solution, rhs)?,
    })
}

/// Measure one or more variants on a computed solution of `problem`.
pub fn strichartz_measure(
    problem: &RadialWaveProblem,
    sol: &RadialWaveSolution,
    variants: &[StrichartzVariant],
) -> Result<Vec<StrichartzMeasurement>> {
    let norms = solution_norms(sol)?;
    variants.iter().map(|&v| measure_with(problem, sol, &norms, v)).collect()
}

/// `LHS/RHS` of the selected estimate; zero data gives 0.
pub fn strichartz_ratio(problem: &RadialWaveProblem, variant: StrichartzVariant) -> Result<f64> {
    let sol = solve_radial_wave(problem)?;
    Ok(strichartz_measure(problem, &sol, &[variant])?[0].ratio)
}

fn random_profile(rng: &mut ChaCha8Rng) -> RadialProfile {
    let width = rng.gen_range(0.3..1.0);
    let center = if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(width..1.5) };
    let amplitude: f64 = rng.sample(StandardNormal);
    RadialProfile::Bump {
        center,
        width,
        amplitude,
    }
}

/// Random bump data and forcing, all supported in `r ≤ 2.5`, with the
/// forcing switched on during `t ∈ (0, d)`, `d ∈ [0.5, 1)`.
pub fn random_radial_problem(seed: u64, horizon: f64, nr: usize) -> Result<RadialWaveProblem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = random_profile(&mut rng);
    let g = random_profile(&mut rng);
    let forcing = RadialForcing {
        profile: random_profile(&mut rng),
        duration: rng.gen_range(0.5..1.0),
    };
    RadialWaveProblem::for_horizon(f, g, forcing, horizon, nr)
}

/// One line of the probe report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrichartzRow {
    pub variant: StrichartzVariant,
    pub seed: u64,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub ratio_no_derivative: f64,
}

/// Every `(seed, horizon)` pair, measured for both variants. Rows are
/// ordered by seed, then horizon, then variant.
pub fn strichartz_ensemble(seeds: &[u64], horizons: &[f64], nr: usize) -> Result<Vec<StrichartzRow>> {
    let jobs: Vec<(u64, f64)> = seeds
        .iter()
        .flat_map(|&s| horizons.iter().map(move |&h| (s, h)))
        .collect();
    let rows: Vec<Vec<StrichartzRow>> = jobs
        .par_iter()
        .map(|&(seed, horizon)| {
            let problem = random_radial_problem(seed, horizon, nr)?;
            let sol = solve_radial_wave(&problem)?;
            let measured = strichartz_measure(&problem, &sol, &StrichartzVariant::ALL)?;
            Ok(measured
                .into_iter()
                .map(|m| StrichartzRow {
                    variant: m.variant,
                    seed,
                    horizon,
                    lhs: m.lhs,
                    rhs: m.rhs,
                    ratio: m.ratio,
                    ratio_no_derivative: m.ratio_no_derivative,
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}
