//! Ensemble checks of the smoothing-lemma inequalities.
//!
//! Both inequalities are scale-covariant, so the worst case at a given `α`
//! comes from data concentrated at scale `≈ α`. Each ensemble member is a
//! random superposition of rescaled bumps `λ^{−s−d/q} Φ(x/λ)`, normalised so
//! every piece has unit size in the right-hand-side norm, with `λ` spread
//! log-uniformly around the `α` window. The fitted slope is that of the
//! ensemble supremum of `numerator/denominator` against `α`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::kernel::{bump, BumpTransform, RHO_CUTOFF};
use super::TorusMollifier;
use crate::diagnostics::rates::{fit_rate, log_space, RateFit};
use crate::error::{AcnsError, Result};
use crate::field::ops::bessel_potential;
use crate::field::{homogeneous_norm, lp_norm, sobolev_norm, Grid, ScalarField};
use crate::radial::{self, RadialGrid};

/// Where the ensemble lives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Backend {
    /// Radial functions on `ℝ³`.
    Radial { nr: usize, r_max: f64 },
    /// Periodic box `[0, 2π)^d`; kernels narrower than two cells are under-resolved.
    Torus { n: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub dim: usize,
    pub samples: usize,
    pub seed: u64,
    pub alphas: Vec<f64>,
    /// Bumps per ensemble member.
    pub components: usize,
    pub backend: Backend,
}

impl VerifyConfig {
    /// Defaults: 50 samples, α log-spaced over one decade. `d = 3` uses the
    /// radial backend on `[0.02, 0.2]`; `d = 2` a 512² torus on `[0.05, 0.5]`.
    pub fn new(dim: usize, seed: u64) -> Self {
        let (alphas, backend) = if dim == 3 {
            (log_space(0.02, 0.2, 10), Backend::Radial { nr: 32768, r_max: 4.0 })
        } else {
            (log_space(0.05, 0.5, 10), Backend::Torus { n: 512 })
        };
        Self {
            dim,
            samples: 50,
            seed,
            alphas,
            components: 3,
            backend,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityRow {
    pub sample_id: usize,
    pub alpha: f64,
    pub numerator: f64,
    pub denominator: f64,
    /// `numerator / (α^{exponent} · denominator)` with the stated exponent.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub dim: usize,
    pub p: f64,
    pub q: f64,
    pub s: f64,
    /// Exponent of `α` in the inequality as stated.
    pub stated_exponent: f64,
    /// Exponent implied by scaling (equal to the stated one for the
    /// approximation inequality).
    pub scaling_exponent: f64,
    pub rows: Vec<InequalityRow>,
    /// Per-α supremum over the ensemble of `numerator / denominator`.
    pub sup_ratio: Vec<f64>,
    pub rate: RateFit,
    /// Largest `ratio` over all rows: the empirical constant.
    pub max_constant: f64,
    pub under_resolved: bool,
}

/// `1 − σ` with `σ = d(1/2 − 1/p)`.
pub fn approx_exponent(dim: usize, p: f64) -> f64 {
    1.0 - dim as f64 * (0.5 - 1.0 / p)
}

/// `s − d(1/q − 1/p)`, the exponent as written in the Young-type inequality.
pub fn young_exponent_stated(dim: usize, s: f64, q: f64, p: f64) -> f64 {
    s - dim as f64 * (1.0 / q - 1.0 / p)
}

/// `−s − d(1/q − 1/p)`, the exponent forced by rescaling `x → x/α`.
pub fn young_exponent(dim: usize, s: f64, q: f64, p: f64) -> f64 {
    -s - dim as f64 * (1.0 / q - 1.0 / p)
}

fn check_alphas(alphas: &[f64]) -> Result<()> {
    if let Some(a) = alphas.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
        return Err(AcnsError::param(format!("alpha must lie in (0, 1), got {a}")));
    }
    Ok(())
}

/// One sampled member: scales, weights and (torus) centres.
struct Member {
    pieces: Vec<(f64, f64, [f64; 3])>,
}

fn draw_members(cfg: &VerifyConfig, lam_lo: f64, lam_hi: f64) -> Vec<Member> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..cfg.samples)
        .map(|_| Member {
            pieces: (0..cfg.components.max(1))
                .map(|_| {
                    let u: f64 = rng.gen();
                    let lam = (lam_lo.ln() + u * (lam_hi / lam_lo).ln()).exp();
                    let c: f64 = rng.sample(StandardNormal);
                    let centre = [rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()];
                    (lam, c, centre)
                })
                .collect(),
        })
        .collect()
}

/// Number of Laplacians applied to the bump so that negative-order norms
/// see the rescaled size.
fn laplacian_power(s: f64) -> i32 {
    if s > 0.0 {
        ((s + 1.0) / 2.0).ceil() as i32
    } else {
        0
    }
}

enum Measure {
    Approx,
    Young,
}

struct Problem {
    dim: usize,
    p: f64,
    q: f64,
    s: f64,
    measure: Measure,
}

impl Problem {
    /// Weight making each piece unit-size in the denominator norm.
    fn weight(&self, lam: f64) -> f64 {
        match self.measure {
            Measure::Approx => lam.powf(1.0 - self.dim as f64 / 2.0),
            Measure::Young => lam.powf(-self.s - self.dim as f64 / self.q),
        }
    }

    fn stated_exponent(&self) -> f64 {
        match self.measure {
            Measure::Approx => approx_exponent(self.dim, self.p),
            Measure::Young => young_exponent_stated(self.dim, self.s, self.q, self.p),
        }
    }

    fn scaling_exponent(&self) -> f64 {
        match self.measure {
            Measure::Approx => approx_exponent(self.dim, self.p),
            Measure::Young => young_exponent(self.dim, self.s, self.q, self.p),
        }
    }
}

fn run(problem: Problem, cfg: &VerifyConfig) -> Result<InequalityReport> {
    check_alphas(&cfg.alphas)?;
    if cfg.alphas.is_empty() || cfg.samples == 0 {
        return Err(AcnsError::InsufficientSamples { needed: 1, got: 0 });
    }
    let a_lo = cfg.alphas.iter().cloned().fold(f64::INFINITY, f64::min);
    let a_hi = cfg.alphas.iter().cloned().fold(0.0, f64::max);
    let m = laplacian_power(problem.s);
    let mut rows = Vec::new();
    let under_resolved;

    match cfg.backend {
        Backend::Radial { nr, r_max } => {
            if cfg.dim != 3 {
                return Err(AcnsError::param("the radial backend is three-dimensional"));
            }
            let grid = RadialGrid::new(nr, r_max)?;
            let lam_hi = (4.0 * a_hi).min(0.2 * r_max);
            let lam_lo = (a_lo / 4.0).max(40.0 * grid.dr());
            under_resolved = a_lo < 2.0 * grid.dr();
            let members = draw_members(cfg, lam_lo, lam_hi);
            let rho_top = grid.rho(nr);
            let kernels: Vec<Vec<f64>> = cfg
                .alphas
                .iter()
                .map(|&a| {
                    let t = BumpTransform::new(3, (a * rho_top).min(RHO_CUTOFF));
                    (0..nr).map(|k| t.eval(a * grid.rho(k))).collect()
                })
                .collect();
            for (sid, member) in members.iter().enumerate() {
                let mut f = vec![0.0; nr];
                for &(lam, c, _) in &member.pieces {
                    let mut piece = grid.sample(|r| bump(r / lam));
                    if m > 0 {
                        piece = radial::apply_multiplier(&grid, &piece, |rho| (-(rho * lam).powi(2)).powi(m));
                    }
                    let w = c * problem.weight(lam);
                    for (fi, pi) in f.iter_mut().zip(&piece) {
                        *fi += w * pi;
                    }
                }
                let denominator = match problem.measure {
                    Measure::Approx => radial::homogeneous_norm(&grid, &f, 1.0),
                    Measure::Young => {
                        let s = problem.s;
                        let g = radial::apply_multiplier(&grid, &f, |rho| (1.0 + rho * rho).powf(-s / 2.0));
                        radial::lp_norm(&grid, &g, problem.q)
                    }
                };
                for (ai, &alpha) in cfg.alphas.iter().enumerate() {
                    let table = &kernels[ai];
                    let idx = |rho: f64| ((rho * r_max / std::f64::consts::PI).round() as usize).min(nr - 1);
                    let filtered = match problem.measure {
                        Measure::Approx => radial::apply_multiplier(&grid, &f, |rho| 1.0 - table[idx(rho)]),
                        Measure::Young => radial::apply_multiplier(&grid, &f, |rho| table[idx(rho)]),
                    };
                    let numerator = radial::lp_norm(&grid, &filtered, problem.p);
                    rows.push(row(sid, alpha, numerator, denominator, problem.stated_exponent()));
                }
            }
        }
        Backend::Torus { n } => {
            let grid = Grid::new(cfg.dim, n)?;
            let mollifiers: Vec<TorusMollifier> =
                cfg.alphas.iter().map(|&a| TorusMollifier::new(grid, a)).collect::<Result<_>>()?;
            under_resolved = mollifiers.iter().any(TorusMollifier::under_resolved);
            let lam_hi = (4.0 * a_hi).min(1.0);
            let lam_lo = (a_lo / 4.0).max(3.0 * grid.spacing());
            let members = draw_members(cfg, lam_lo, lam_hi);
            let two_pi = 2.0 * std::f64::consts::PI;
            for (sid, member) in members.iter().enumerate() {
                let mut f = ScalarField::zeros(grid);
                for &(lam, c, centre) in &member.pieces {
                    let piece = ScalarField::from_fn(grid, |x| {
                        let mut r2 = 0.0;
                        for a in 0..grid.dim() {
                            let mut d = (x[a] - two_pi * centre[a]).rem_euclid(two_pi);
                            if d > std::f64::consts::PI {
                                d -= two_pi;
                            }
                            r2 += d * d;
                        }
                        bump(r2.sqrt() / lam)
                    });
                    let piece = if m > 0 {
                        piece
                            .transform()
                            .apply_symbol(|k| (-((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64) * lam * lam).powi(m))
                            .inverse()
                    } else {
                        piece
                    };
                    f = f.axpy(c * problem.weight(lam), &piece)?;
                }
                let denominator = match problem.measure {
                    Measure::Approx => homogeneous_norm(&f, 1.0),
                    Measure::Young => {
                        let g = bessel_potential(&f.transform(), -problem.s).inverse();
                        lp_norm(&g, problem.q)?
                    }
                };
                for (mol, &alpha) in mollifiers.iter().zip(&cfg.alphas) {
                    let smooth = mol.apply(&f)?;
                    let numerator = match problem.measure {
                        Measure::Approx => lp_norm(&f.sub(&smooth)?, problem.p)?,
                        Measure::Young => sobolev_norm(&smooth, 0.0, problem.p)?,
                    };
                    rows.push(row(sid, alpha, numerator, denominator, problem.stated_exponent()));
                }
            }
        }
    }

    let sup_ratio: Vec<f64> = cfg
        .alphas
        .iter()
        .map(|&a| {
            rows.iter()
                .filter(|r| r.alpha == a)
                .map(|r| r.numerator / r.denominator)
                .fold(0.0, f64::max)
        })
        .collect();
    let rate = fit_rate(&cfg.alphas, &sup_ratio)?;
    let max_constant = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(InequalityReport {
        dim: problem.dim,
        p: problem.p,
        q: problem.q,
        s: problem.s,
        stated_exponent: problem.stated_exponent(),
        scaling_exponent: problem.scaling_exponent(),
        rows,
        sup_ratio,
        rate,
        max_constant,
        under_resolved,
    })
}

fn row(sample_id: usize, alpha: f64, numerator: f64, denominator: f64, exponent: f64) -> InequalityRow {
    InequalityRow {
        sample_id,
        alpha,
        numerator,
        denominator,
        ratio: if denominator > 0.0 {
            numerator / (alpha.powf(exponent) * denominator)
        } else {
            0.0
        },
    }
}

/// `‖f − f∗ψ_α‖_{L^p} ≤ C α^{1−σ}‖∇f‖_{L²}` over a random ensemble.
pub fn verify_approx_inequality(cfg: &VerifyConfig, p: f64) -> Result<InequalityReport> {
    let ok = match cfg.dim {
        2 => (2.0..f64::INFINITY).contains(&p),
        3 => (2.0..=6.0).contains(&p),
        _ => false,
    };
    if !ok {
        return Err(AcnsError::param(format!("p = {p} is outside the lemma's range for d = {}", cfg.dim)));
    }
    run(
        Problem {
            dim: cfg.dim,
            p,
            q: 2.0,
            s: -1.0,
            measure: Measure::Approx,
        },
        cfg,
    )
}

/// `‖f∗ψ_α‖_{L^p} ≤ C α^{e}‖f‖_{W^{−s,q}}` over a random ensemble.
pub fn verify_young_inequality(cfg: &VerifyConfig, s: f64, q: f64, p: f64) -> Result<InequalityReport> {
    if !(q >= 1.0 && q <= p && s >= 0.0) {
        return Err(AcnsError::param(format!("need 1 ≤ q ≤ p and s ≥ 0, got s={s} q={q} p={p}")));
    }
    if !(2..=3).contains(&cfg.dim) {
        return Err(AcnsError::param(format!("dimension must be 2 or 3, got {}", cfg.dim)));
    }
    run(
        Problem {
            dim: cfg.dim,
            p,
            q,
            s,
            measure: Measure::Young,
        },
        cfg,
    )
}
