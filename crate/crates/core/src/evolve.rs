//! IMEX time stepping of `u_t = u_xx + c u_x - r(x) u - u³` and the tanh-ramp comparison.
//!
//! The linear part `A = D2 + c D1 - diag(r)` is implicit and factored once; the cubic term
//! is explicit. Boundary values stay at their initial values.

use alloc::vec::Vec;

use crate::{
    banded::{BandedLu, BandedMatrix},
    bvp::{self, max_norm, BoundaryClosure, Discretization, FrontProfile, Ramp},
    diagnostics,
    error::{Error, Result},
    grid::Grid,
    interp, math,
    newton::{self, SolveReport, SolverConfig},
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Backward Euler on `A`, forward Euler on the cubic term.
    ImexEuler,
    /// Crank–Nicolson on `A`, Adams–Bashforth-2 on the cubic term (first step AB1).
    ImexCn,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveConfig {
    pub ramp: Ramp,
    pub c: f64,
    pub dt: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    /// Record the deviation every this many steps.
    pub record_every: usize,
    pub ramp_term: bool,
    pub cubic_term: bool,
    /// Stop once the recorded deviation falls below this value (0 disables).
    pub stop_below: f64,
}

impl EvolveConfig {
    pub fn new(ramp: Ramp, c: f64) -> Self {
        EvolveConfig {
            ramp,
            c,
            dt: 0.01,
            t_end: 200.0,
            scheme: Scheme::ImexEuler,
            record_every: 10,
            ramp_term: true,
            cubic_term: true,
            stop_below: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.ramp.validate()?;
        if !(self.dt > 0.0) || !(self.t_end >= 0.0) || !self.c.is_finite() {
            return Err(Error::InvalidArgument("need dt > 0, t_end >= 0 and finite c"));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidArgument("record_every must be at least 1"));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        libm::ceil(self.t_end / self.dt - 1e-9).max(0.0) as usize
    }
}

/// Reusable time stepper for one grid and configuration.
#[derive(Debug, Clone)]
pub struct Stepper {
    cfg: EvolveConfig,
    grid: Grid,
    a: BandedMatrix,
    lu: BandedLu,
    boundary: (f64, f64),
    prev_nonlinear: Option<Vec<f64>>,
    steps_taken: usize,
}

impl Stepper {
    pub fn new(grid: Grid, cfg: EvolveConfig, boundary: (f64, f64)) -> Result<Self> {
        cfg.validate()?;
        let disc = Discretization::new(grid, cfg.c, cfg.ramp);
        let mut a = disc.linear_operator();
        if !cfg.ramp_term {
            for i in 1..grid.len() - 1 {
                a.add(i, i, disc.ramp_values()[i]);
            }
        }
        let theta = match cfg.scheme {
            Scheme::ImexEuler => 1.0,
            Scheme::ImexCn => 0.5,
        };
        let mut m = a.scaled_plus_identity(-theta * cfg.dt, 1.0);
        m.set_identity_row(0);
        m.set_identity_row(grid.len() - 1);
        let lu = m.factor()?;
        Ok(Stepper {
            cfg,
            grid,
            a,
            lu,
            boundary,
            prev_nonlinear: None,
            steps_taken: 0,
        })
    }

    pub fn config(&self) -> &EvolveConfig {
        &self.cfg
    }

    fn nonlinear(&self, u: &[f64]) -> Vec<f64> {
        if self.cfg.cubic_term {
            u.iter().map(|v| -v * v * v).collect()
        } else {
            alloc::vec![0.0; u.len()]
        }
    }

    /// Advances `u` by one time step.
    pub fn step(&mut self, u: &[f64]) -> Result<Vec<f64>> {
        self.grid.check_len(u.len())?;
        let n = u.len();
        let dt = self.cfg.dt;
        let nl = self.nonlinear(u);
        let mut rhs: Vec<f64> = match self.cfg.scheme {
            Scheme::ImexEuler => u.iter().zip(&nl).map(|(v, f)| v + dt * f).collect(),
            Scheme::ImexCn => {
                let au = self.a.matvec(u);
                let prev = self.prev_nonlinear.as_ref().unwrap_or(&nl);
                (0..n)
                    .map(|i| u[i] + 0.5 * dt * au[i] + dt * (1.5 * nl[i] - 0.5 * prev[i]))
                    .collect()
            }
        };
        rhs[0] = self.boundary.0;
        rhs[n - 1] = self.boundary.1;
        self.lu.solve_in_place(&mut rhs);
        self.steps_taken += 1;
        if rhs.iter().any(|v| !v.is_finite()) {
            return Err(Error::BlowUp {
                step: self.steps_taken,
            });
        }
        if self.cfg.scheme == Scheme::ImexCn {
            self.prev_nonlinear = Some(nl);
        }
        Ok(rhs)
    }
}

/// One step from `u`, holding the end values of `u` fixed.
pub fn step(u: &[f64], grid: &Grid, cfg: &EvolveConfig) -> Result<Vec<f64>> {
    grid.check_len(u.len())?;
    Stepper::new(*grid, *cfg, (u[0], u[u.len() - 1]))?.step(u)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveResult {
    pub final_profile: FrontProfile,
    /// `(t, deviation)`: distance to the reference, or `‖Δu‖∞/dt` without one.
    pub deviation_history: Vec<(f64, f64)>,
    /// Log-slope of the deviation tail (negative when decaying), NaN if unresolved.
    pub measured_rate: f64,
    pub steps: usize,
    pub t: f64,
}

/// Samples of the deviation used for the decay fit lie in `[FIT_FLOOR, FIT_CEILING · d₀]`.
pub const FIT_FLOOR: f64 = 1e-11;
pub const FIT_CEILING: f64 = 1e-2;

/// Least-squares slope of `ln d` against `t` over samples in `[floor, ceiling · d₀]`.
pub fn decay_rate(history: &[(f64, f64)], floor: f64, ceiling: f64) -> f64 {
    let d0 = match history.first() {
        Some(&(_, d)) => d,
        None => return f64::NAN,
    };
    let pts: Vec<(f64, f64)> = history
        .iter()
        .filter(|(_, d)| *d >= floor && *d <= ceiling * d0)
        .map(|&(t, d)| (t, math::ln(d)))
        .collect();
    if pts.len() < 3 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sty: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let stt: f64 = pts.iter().map(|p| (p.0 - mt) * (p.0 - mt)).sum();
    sty / stt
}

/// Evolves `initial` to `cfg.t_end` (or until the deviation drops below `cfg.stop_below`).
pub fn evolve(
    initial: &FrontProfile,
    cfg: &EvolveConfig,
    reference: Option<&[f64]>,
) -> Result<EvolveResult> {
    let grid = initial.grid;
    if let Some(r) = reference {
        grid.check_len(r.len())?;
    }
    let n = grid.len();
    let mut stepper = Stepper::new(grid, *cfg, (initial.u[0], initial.u[n - 1]))?;
    let mut u = initial.u.clone();
    let mut history = Vec::new();
    if let Some(r) = reference {
        history.push((0.0, dist(&u, r)));
    }
    let total = cfg.steps();
    let mut k = 0;
    while k < total {
        let next = stepper.step(&u)?;
        k += 1;
        if k % cfg.record_every == 0 || k == total {
            let t = k as f64 * cfg.dt;
            let d = match reference {
                Some(r) => dist(&next, r),
                None => dist(&next, &u) / cfg.dt,
            };
            history.push((t, d));
            if d < cfg.stop_below {
                u = next;
                break;
            }
        }
        u = next;
    }
    let (floor, ceiling) = if reference.is_some() {
        (FIT_FLOOR, FIT_CEILING)
    } else {
        (FIT_FLOOR, 1.0)
    };
    let measured_rate = decay_rate(&history, floor, ceiling);
    let mut final_profile = FrontProfile::new(cfg.c, grid, u)?.with_ramp(cfg.ramp);
    final_profile.residual_norm =
        max_norm(&Discretization::new(grid, cfg.c, cfg.ramp).residual(&final_profile.u, &BoundaryClosure::zero())?[1..n - 1]);
    Ok(EvolveResult {
        final_profile,
        deviation_history: history,
        measured_rate,
        steps: k,
        t: k as f64 * cfg.dt,
    })
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

/// Evolves until `‖Δu‖∞/dt < tol`; fails if `t_end` passes first.
pub fn steady_state(initial: &FrontProfile, cfg: &EvolveConfig, tol: f64) -> Result<EvolveResult> {
    let mut c = *cfg;
    c.stop_below = tol;
    let res = evolve(initial, &c, None)?;
    let last = res.deviation_history.last().map_or(f64::INFINITY, |d| d.1);
    if last < tol {
        Ok(res)
    } else {
        Err(Error::SteadyStateNotReached { deviation: last })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub measured_rate: f64,
    pub bump_center: f64,
    pub result: EvolveResult,
}

/// Adds `amplitude · exp(-(x - x₀)²)` at the level-0.1 interface of `front` and measures
/// the decay rate of `‖u(t) - front‖∞`.
pub fn perturbation_decay(front: &FrontProfile, amplitude: f64, cfg: &EvolveConfig) -> Result<DecayReport> {
    let center = diagnostics::front_position(front, diagnostics::DEFAULT_DELTA)?.x;
    let mut start = front.clone();
    let n = start.u.len();
    for i in 1..n - 1 {
        let d = front.x(i) - center;
        start.u[i] += amplitude * math::exp(-d * d);
    }
    let mut c = *cfg;
    c.c = front.c;
    c.ramp = front.ramp;
    let result = evolve(&start, &c, Some(&front.u))?;
    Ok(DecayReport {
        measured_rate: result.measured_rate,
        bump_center: center,
        result,
    })
}

/// `ε^{1/3}`.
pub fn inner_scale(eps: f64) -> f64 {
    math::cbrt(eps)
}

/// Unscaled grid for the tanh front at `(eps, c)`: the default inner domain for
/// `c̃ = c/ε^{1/3}` stretched by `ε^{-1/3}` (left end capped at `-3/ε`), spacing
/// `0.01 ε^{-1/3}`.
pub fn tanh_grid(eps: f64, c: f64) -> Result<Grid> {
    Ramp::Tanh { eps }.validate()?;
    let s = inner_scale(eps);
    let (a, b) = bvp::default_domain(c / s);
    Grid::with_max_spacing((a / s).max(-3.0 / eps), b / s, bvp::DEFAULT_SPACING / s)
}

/// `ε^{1/3} ũ(ε^{1/3} x)` on `grid`, with `sqrt(tanh(-εx))` left of the inner domain and
/// zero right of it.
pub fn inner_scaled_profile(eps: f64, c: f64, inner: &FrontProfile, grid: Grid) -> FrontProfile {
    let s = inner_scale(eps);
    let ramp = Ramp::Tanh { eps };
    let bc = BoundaryClosure::default();
    let g = inner.grid;
    FrontProfile::from_fn(c, grid, |x| {
        let xt = s * x;
        if xt < g.x_min() {
            bc.left_state(x, c, ramp)
        } else if xt > g.x_max() {
            0.0
        } else {
            s * interp::cubic(&g, &inner.u, xt)
        }
    })
    .with_ramp(ramp)
}

/// Newton solve of the tanh-ramp front, seeded with the scaled inner profile.
pub fn solve_tanh_front(
    eps: f64,
    c: f64,
    inner: &FrontProfile,
    cfg: &SolverConfig,
) -> Result<(FrontProfile, SolveReport)> {
    let grid = tanh_grid(eps, c)?;
    let guess = inner_scaled_profile(eps, c, inner, grid);
    newton::solve(&guess, &BoundaryClosure::default(), cfg)
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerComparison {
    pub eps: f64,
    pub c: f64,
    pub c_tilde: f64,
    /// Half-width of the comparison window in unscaled `x`.
    pub window: f64,
    /// `max |u_tanh - ε^{1/3} ũ(ε^{1/3}x)|` over the window.
    pub sup_gap: f64,
    /// Level-`ε^{1/3}δ` interface of the tanh front.
    pub x_delta_tanh: f64,
    /// `ε^{-1/3} x̃_δ(c̃)`.
    pub x_delta_inner: f64,
    pub delta: f64,
    /// `(x, u_tanh, u_inner_scaled)` at every tanh-grid node inside the inner domain.
    pub samples: Vec<(f64, f64, f64)>,
    pub tanh_front: FrontProfile,
}

impl InnerComparison {
    pub fn interface_gap(&self) -> f64 {
        (self.x_delta_tanh - self.x_delta_inner).abs()
    }
}

/// Compares the tanh front at `(eps, c)` with the scaled linear-ramp front `inner`, which
/// must sit at `c̃ = c/ε^{1/3}`.
pub fn compare_inner_scaling_with(
    eps: f64,
    c: f64,
    inner: &FrontProfile,
    delta: f64,
    cfg: &SolverConfig,
) -> Result<InnerComparison> {
    let s = inner_scale(eps);
    let c_tilde = c / s;
    if (inner.c - c_tilde).abs() > 1e-9 * (1.0 + c_tilde.abs()) {
        return Err(Error::InvalidArgument("inner profile is at the wrong drift"));
    }
    let (tanh_front, _) = solve_tanh_front(eps, c, inner, cfg)?;
    let window = 1.0 / s;
    let g = inner.grid;
    let mut samples = Vec::new();
    let mut sup_gap = 0.0f64;
    for (x, &ut) in tanh_front.grid.nodes().zip(&tanh_front.u) {
        let xt = s * x;
        if xt < g.x_min() || xt > g.x_max() {
            continue;
        }
        let ui = s * interp::cubic(&g, &inner.u, xt);
        samples.push((x, ut, ui));
        if x.abs() <= window {
            sup_gap = sup_gap.max((ut - ui).abs());
        }
    }
    let x_delta_tanh = diagnostics::front_position(&tanh_front, s * delta)?.x;
    let x_delta_inner = diagnostics::front_position(inner, delta)?.x / s;
    Ok(InnerComparison {
        eps,
        c,
        c_tilde,
        window,
        sup_gap,
        x_delta_tanh,
        x_delta_inner,
        delta,
        samples,
        tanh_front,
    })
}

/// [`compare_inner_scaling_with`] after solving the inner front at `c/ε^{1/3}` from the
/// default ramp guess.
pub fn compare_inner_scaling(eps: f64, c: f64, delta: f64, cfg: &SolverConfig) -> Result<InnerComparison> {
    Ramp::Tanh { eps }.validate()?;
    let (inner, _) = newton::solve_default(c / inner_scale(eps), cfg)?;
    compare_inner_scaling_with(eps, c, &inner, delta, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_state_invariant() {
        let g = Grid::new(-10.0, 10.0, 201).unwrap();
        for scheme in [Scheme::ImexEuler, Scheme::ImexCn] {
            let mut cfg = EvolveConfig::new(Ramp::Linear, 0.7);
            cfg.scheme = scheme;
            let mut st = Stepper::new(g, cfg, (0.0, 0.0)).unwrap();
            let mut u = alloc::vec![0.0; 201];
            for _ in 0..10 {
                u = st.step(&u).unwrap();
            }
            assert!(u.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn decay_rate_of_exponential() {
        let h: Vec<(f64, f64)> = (0..200).map(|k| (0.1 * k as f64, libm::exp(-0.7 * 0.1 * k as f64))).collect();
        assert!((decay_rate(&h, 1e-11, 1e-2) + 0.7).abs() < 1e-12);
        assert!(decay_rate(&h[..2], 1e-11, 1e-2).is_nan());
    }

    #[test]
    fn rejects_bad_config() {
        let mut cfg = EvolveConfig::new(Ramp::Tanh { eps: 1.5 }, 0.0);
        assert!(cfg.validate().is_err());
        cfg.ramp = Ramp::Linear;
        cfg.dt = 0.0;
        assert!(cfg.validate().is_err());
    }
}
