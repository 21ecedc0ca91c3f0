//! Damped Newton iteration for the discrete stationary problem.

use alloc::vec::Vec;

use crate::{
    bvp::{fit_tail_coefficients, max_norm, BoundaryClosure, Discretization, FrontProfile, Ramp},
    error::{Error, Result},
};

pub use crate::banded::banded_lu_solve;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Damping {
    None,
    /// Backtracking by `factor` until `‖F‖∞` decreases. With `natural_level` a step is
    /// also accepted when the simplified correction `‖J⁻¹F(u + λΔ)‖∞` (old Jacobian) is at
    /// most `(1 - λ/2)‖Δ‖∞`, which lets a steep front travel when `‖F‖∞` temporarily
    /// grows.
    Armijo {
        factor: f64,
        min_step: f64,
        natural_level: bool,
    },
}

impl Default for Damping {
    fn default() -> Self {
        Damping::Armijo {
            factor: 0.5,
            min_step: 1.0 / (1u64 << 20) as f64,
            natural_level: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub tol_residual: f64,
    pub max_iter: usize,
    pub damping: Damping,
    pub positivity_clip: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol_residual: 1e-10,
            max_iter: 50,
            damping: Damping::default(),
            positivity_clip: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_residual > 0.0) {
            return Err(Error::InvalidArgument("tol_residual must be positive"));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be at least 1"));
        }
        if let Damping::Armijo { factor, min_step, .. } = self.damping {
            if !(factor > 0.0 && factor < 1.0) || !(min_step > 0.0 && min_step <= 1.0) {
                return Err(Error::InvalidArgument("invalid damping parameters"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub converged: bool,
    pub iterations: usize,
    pub final_residual: f64,
    /// `‖Δu‖∞` of every accepted step (after damping).
    pub step_norms: Vec<f64>,
    /// `‖F‖∞` before the first step and after every accepted step.
    pub residual_history: Vec<f64>,
    /// Number of accepted steps with a step length below one.
    pub damped_steps: usize,
    /// Tolerance actually applied: `tol_residual`, raised to the round-off floor of the
    /// discrete operator when that is larger.
    pub effective_tol: f64,
    pub positive: bool,
    pub monotone: bool,
}

impl SolveReport {
    /// `r_{k+1} / r_k²` over the last `last` steps, skipping residuals already at round-off
    /// level (below `floor`).
    pub fn contraction_constants(&self, last: usize, floor: f64) -> Vec<f64> {
        let r = &self.residual_history;
        let start = r.len().saturating_sub(last + 1);
        r[start..]
            .windows(2)
            .filter(|w| w[1] > floor)
            .map(|w| w[1] / (w[0] * w[0]))
            .collect()
    }
}

/// Whether `u` is positive and strictly decreasing at interior nodes.
pub fn shape_flags(u: &[f64]) -> (bool, bool) {
    let n = u.len();
    let positive = u[1..n - 1].iter().all(|&v| v > 0.0);
    let monotone = u.windows(2).all(|w| w[1] < w[0]);
    (positive, monotone)
}

/// Round-off level of the discrete residual at `u`: `ε ‖u‖∞ (‖D2‖ + |c| ‖D1‖)`, with the
/// operator norms taken as the absolute weight sums of the interior stencils (biased
/// stencil for `D1`).
pub fn roundoff_floor(u: &[f64], h: f64, c: f64) -> f64 {
    let d2 = (1.0 / 12.0 + 4.0 / 3.0 + 2.5 + 4.0 / 3.0 + 1.0 / 12.0) / (h * h);
    let d1 = (0.25 + 5.0 / 6.0 + 1.5 + 0.5 + 1.0 / 12.0) / h;
    f64::EPSILON * max_norm(u) * (d2 + c.abs() * d1)
}

const DIVERGENCE_WINDOW: usize = 5;
const DIVERGENCE_FACTOR: f64 = 10.0;

/// Runs damped Newton from `initial`. On success the returned profile is marked converged
/// and carries its residual norm; positivity and monotonicity are reported, not enforced.
pub fn solve(
    initial: &FrontProfile,
    bc: &BoundaryClosure,
    cfg: &SolverConfig,
) -> Result<(FrontProfile, SolveReport)> {
    cfg.validate()?;
    initial.ramp.validate()?;
    let disc = Discretization::new(initial.grid, initial.c, initial.ramp);
    let n = initial.grid.len();
    let mut u = initial.u.clone();
    initial.grid.check_len(u.len())?;
    let mut f = disc.residual(&u, bc)?;
    let mut r = max_norm(&f);
    let mut history = alloc::vec![r];
    let mut step_norms = Vec::new();
    let mut damped = 0;
    let mut trial = alloc::vec![0.0; n];
    let mut f_trial = alloc::vec![0.0; n];
    let mut simplified = alloc::vec![0.0; n];
    let mut iterations = 0;
    let h = initial.grid.h();
    let mut tol = cfg.tol_residual.max(roundoff_floor(&u, h, initial.c));

    while r > tol {
        if iterations == cfg.max_iter {
            return Err(Error::MaxIterations {
                iterations,
                residual: r,
            });
        }
        iterations += 1;
        let lu = disc.jacobian(&u)?.factor()?;
        let mut du = f.clone();
        lu.solve_in_place(&mut du);
        let du_norm = max_norm(&du);
        let mut lambda = 1.0;
        loop {
            for i in 0..n {
                trial[i] = u[i] - lambda * du[i];
            }
            if cfg.positivity_clip {
                for v in trial.iter_mut() {
                    *v = v.max(0.0);
                }
            }
            let r_trial = match disc.residual_into(&trial, bc, &mut f_trial) {
                Ok(()) => max_norm(&f_trial),
                Err(_) => f64::INFINITY,
            };
            match cfg.damping {
                Damping::None => {
                    if !r_trial.is_finite() {
                        return Err(Error::Diverged {
                            iteration: iterations,
                            residual: r_trial,
                        });
                    }
                    break;
                }
                Damping::Armijo {
                    factor,
                    min_step,
                    natural_level,
                } => {
                    if r_trial < r {
                        break;
                    }
                    if natural_level && r_trial.is_finite() {
                        simplified.copy_from_slice(&f_trial);
                        lu.solve_in_place(&mut simplified);
                        if max_norm(&simplified) <= (1.0 - 0.5 * lambda) * du_norm {
                            break;
                        }
                    }
                    lambda *= factor;
                    if lambda < min_step {
                        return Err(Error::LineSearchFailed {
                            iteration: iterations,
                            residual: r,
                        });
                    }
                }
            }
        }
        if lambda < 1.0 {
            damped += 1;
        }
        step_norms.push(lambda * du_norm);
        core::mem::swap(&mut u, &mut trial);
        core::mem::swap(&mut f, &mut f_trial);
        r = max_norm(&f);
        history.push(r);
        tol = cfg.tol_residual.max(roundoff_floor(&u, h, initial.c));
        if history.len() > DIVERGENCE_WINDOW {
            let past = history[history.len() - 1 - DIVERGENCE_WINDOW];
            if r > DIVERGENCE_FACTOR * past {
                return Err(Error::Diverged {
                    iteration: iterations,
                    residual: r,
                });
            }
        }
    }

    let (positive, monotone) = shape_flags(&u);
    let mut profile = FrontProfile {
        c: initial.c,
        ramp: initial.ramp,
        grid: initial.grid,
        u,
        residual_norm: r,
        converged: true,
        alpha_plus: None,
        alpha_minus: None,
    };
    if positive && monotone && initial.ramp == Ramp::Linear {
        if let Ok(t) = fit_tail_coefficients(&profile) {
            profile.alpha_plus = Some(t.alpha_plus);
            profile.alpha_minus = Some(t.alpha_minus);
        }
    }
    Ok((
        profile,
        SolveReport {
            converged: true,
            iterations,
            final_residual: r,
            step_norms,
            residual_history: history,
            damped_steps: damped,
            effective_tol: tol,
            positive,
            monotone,
        },
    ))
}

/// Solves at `c` on the default grid from the ramp guess.
pub fn solve_default(c: f64, cfg: &SolverConfig) -> Result<(FrontProfile, SolveReport)> {
    let guess = FrontProfile::default_guess(c)?;
    solve(&guess, &BoundaryClosure::default(), cfg)
}
