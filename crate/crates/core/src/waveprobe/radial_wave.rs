//! Radial solutions of `(−∂tt + Δ)w = F` on `ℝ³`.
//!
//! `v = r·w` solves the one-dimensional wave equation `v_tt = v_rr − rF` on
//! the odd extension through `r = 0`. With `dt = dr` the three-level scheme
//! `v^{n+1}_i = v^n_{i+1} + v^n_{i−1} − v^{n−1}_i` is exact d'Alembert
//! translation; the forcing enters through the midpoint rule on each
//! characteristic diamond and the first level is built from d'Alembert's
//! formula with Gauss–Legendre quadrature.

use serde::{Deserialize, Serialize};

use crate::error::{AcnsError, Result};
use crate::mollify::bump;
use crate::quadrature::gauss_legendre_on;
use crate::radial::{divide_by_r, RadialGrid};

/// Smooth compactly supported radial profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialProfile {
    Zero,
    /// `amplitude · e · ψ((r − center)/width)` with `ψ(x) = exp(−1/(1−x²))`,
    /// so the peak equals `amplitude`. Either `center = 0` or
    /// `center ≥ width`, which keeps the profile smooth at the origin.
    Bump { center: f64, width: f64, amplitude: f64 },
}

impl RadialProfile {
    pub fn value(&self, r: f64) -> f64 {
        match *self {
            RadialProfile::Zero => 0.0,
            RadialProfile::Bump {
                center,
                width,
                amplitude,
            } => amplitude * std::f64::consts::E * bump((r.abs() - center) / width),
        }
    }

    /// Radius outside which the profile vanishes.
    pub fn support(&self) -> f64 {
        match *self {
            RadialProfile::Zero => 0.0,
            RadialProfile::Bump { center, width, .. } => center + width,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        match *self {
            RadialProfile::Zero => RadialProfile::Zero,
            RadialProfile::Bump {
                center,
                width,
                amplitude,
            } => RadialProfile::Bump {
                center,
                width,
                amplitude: amplitude * factor,
            },
        }
    }

    fn validate(&self) -> Result<()> {
        if let RadialProfile::Bump {
            center,
            width,
            amplitude,
        } = *self
        {
            if !(width > 0.0 && width.is_finite() && amplitude.is_finite()) {
                return Err(AcnsError::param(format!("bad bump width {width} or amplitude {amplitude}")));
            }
            if !(center == 0.0 || center >= width) {
                return Err(AcnsError::param(format!(
                    "bump center {center} must be 0 or at least the width {width}"
                )));
            }
        }
        Ok(())
    }

    /// `x·f(|x|)`, the odd extension of `r·f`.
    fn odd(&self, x: f64) -> f64 {
        x * self.value(x.abs())
    }
}

/// `F(r, t) = profile(r) · χ(t)` with a smooth window `χ` on `(0, duration)`
/// whose peak is 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialForcing {
    pub profile: RadialProfile,
    pub duration: f64,
}

impl RadialForcing {
    pub fn none() -> Self {
        Self {
            profile: RadialProfile::Zero,
            duration: 1.0,
        }
    }

    pub fn window(&self, t: f64) -> f64 {
        std::f64::consts::E * bump(2.0 * t / self.duration - 1.0)
    }

    pub fn value(&self, r: f64, t: f64) -> f64 {
        match self.profile {
            RadialProfile::Zero => 0.0,
            p => p.value(r) * self.window(t),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            profile: self.profile.scaled(factor),
            duration: self.duration,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialWaveProblem {
    pub r_max: f64,
    pub nr: usize,
    pub f: RadialProfile,
    pub g: RadialProfile,
    #[serde(rename = "F")]
    pub forcing: RadialForcing,
    #[serde(rename = "T")]
    pub horizon: f64,
}

impl RadialWaveProblem {
    /// Chooses `r_max ≥ 2(T + support)` so that `T` is a whole number of
    /// grid steps.
    pub fn for_horizon(f: RadialProfile, g: RadialProfile, forcing: RadialForcing, horizon: f64, nr: usize) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(AcnsError::param(format!("horizon must be positive, got {horizon}")));
        }
        let support = f.support().max(g.support()).max(forcing.profile.support());
        let steps = (horizon * nr as f64 / (2.0 * (horizon + support))).floor();
        if steps < 1.0 {
            return Err(AcnsError::param(format!("nr = {nr} is too small for horizon {horizon}")));
        }
        Ok(Self {
            r_max: nr as f64 * horizon / steps,
            nr,
            f,
            g,
            forcing,
            horizon,
        })
    }

    pub fn support(&self) -> f64 {
        self.f.support().max(self.g.support()).max(self.forcing.profile.support())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            f: self.f.scaled(factor),
            g: self.g.scaled(factor),
            forcing: self.forcing.scaled(factor),
            ..*self
        }
    }

    pub fn grid(&self) -> Result<RadialGrid> {
        RadialGrid::new(self.nr, self.r_max)
    }

    fn steps(&self) -> Result<usize> {
        let dr = self.r_max / self.nr as f64;
        let steps = (self.horizon / dr).round();
        if steps < 1.0 || (self.horizon / dr - steps).abs() > 1e-8 {
            return Err(AcnsError::param(format!(
                "horizon {} must be a positive multiple of dr = {dr}",
                self.horizon
            )));
        }
        Ok(steps as usize)
    }

    fn validate(&self) -> Result<()> {
        self.f.validate()?;
        self.g.validate()?;
        self.forcing.profile.validate()?;
        if !(self.forcing.duration > 0.0) {
            return Err(AcnsError::param("forcing duration must be positive"));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(AcnsError::param(format!("horizon must be positive, got {}", self.horizon)));
        }
        let need = 2.0 * (self.horizon + self.support());
        if self.r_max < need * (1.0 - 1e-12) {
            return Err(AcnsError::SupportViolation(format!(
                "r_max = {} is below 2(T + support) = {need}",
                self.r_max
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct RadialWaveSolution {
    pub grid: RadialGrid,
    pub dt: f64,
    /// `w(r_i, t_n)` for `n = 0..=steps`, `i = 0..nr`.
    pub w: Vec<Vec<f64>>,
    /// `∂t w(r_i, t_n)` from central differences of `v` (exact at `n = 0`).
    pub w_t: Vec<Vec<f64>>,
    /// Conserved discrete energy `‖D_t v‖² + ⟨D_r v^{n+1}, D_r v^n⟩` between
    /// levels `n` and `n + 1`; approximates `∫(w_t² + |∇w|²) r² dr`.
    pub energy: Vec<f64>,
}

impl RadialWaveSolution {
    pub fn times(&self) -> Vec<f64> {
        (0..self.w.len()).map(|n| n as f64 * self.dt).collect()
    }
}

fn discrete_energy(next: &[f64], cur: &[f64], dt: f64, dr: f64) -> f64 {
    let kinetic: f64 = next.iter().zip(cur).map(|(a, b)| ((a - b) / dt).powi(2)).sum();
    let potential: f64 = (0..next.len() - 1)
        .map(|i| (next[i + 1] - next[i]) * (cur[i + 1] - cur[i]))
        .sum::<f64>()
        / (dr * dr);
    (kinetic + potential) * dr
}

pub fn solve_radial_wave(problem: &RadialWaveProblem) -> Result<RadialWaveSolution> {
    problem.validate()?;
    let grid = problem.grid()?;
    let steps = problem.steps()?;
    let nr = grid.nr();
    let h = grid.dr();
    let forcing = problem.forcing;
    let has_forcing = !matches!(forcing.profile, RadialProfile::Zero);
    let source = |x: f64, t: f64| x * forcing.value(x.abs(), t);

    // v on i = 0..=nr with v_0 = v_nr = 0
    let mut prev: Vec<f64> = (0..=nr).map(|i| problem.f.odd(grid.r(i))).collect();
    prev[nr] = 0.0;
    let space_rule = gauss_legendre_on(16, -1.0, 1.0);
    let time_rule = gauss_legendre_on(8, 0.0, 1.0);
    let mut cur = vec![0.0; nr + 1];
    for i in 1..nr {
        let r = grid.r(i);
        let mut val = 0.5 * (problem.f.odd(r + h) + problem.f.odd(r - h));
        val += 0.5 * h * space_rule.iter().map(|&(x, w)| w * problem.g.odd(r + h * x)).sum::<f64>();
        if has_forcing {
            let mut duhamel = 0.0;
            for &(s, ws) in &time_rule {
                let half = h * (1.0 - s);
                let inner: f64 = space_rule.iter().map(|&(x, w)| w * source(r + half * x, h * s)).sum();
                duhamel += ws * half * inner;
            }
            val -= 0.5 * h * duhamel;
        }
        cur[i] = val;
    }

    let to_w = |v: &[f64]| divide_by_r(&grid, &v[..nr]);
    let mut w = vec![to_w(&prev)];
    let mut w_t = vec![grid.sample(|r| problem.g.value(r))];
    let mut energy = Vec::with_capacity(steps);
    let mut next = vec![0.0; nr + 1];
    for n in 1..=steps {
        energy.push(discrete_energy(&cur, &prev, h, h));
        let t = n as f64 * h;
        for i in 1..nr {
            let mut val = cur[i + 1] + cur[i - 1] - prev[i];
            if has_forcing {
                val -= h * h * source(grid.r(i), t);
            }
            next[i] = val;
        }
        w.push(to_w(&cur));
        let deriv: Vec<f64> = next.iter().zip(&prev).map(|(a, b)| (a - b) / (2.0 * h)).collect();
        w_t.push(to_w(&deriv));
        if next.iter().any(|x| !x.is_finite()) {
            return Err(AcnsError::NonFinite {
                t,
                location: "radial wave solution".into(),
            });
        }
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(RadialWaveSolution {
        grid,
        dt: h,
        w,
        w_t,
        energy,
    })
}
