//! The acceptance suite: eleven pass/fail criteria with pinned tolerances and runtime budgets.
//!
//! Expensive shared inputs (the seed front at `c = 0` and the branches grown from it) are
//! computed once per [`Context`] and reused by every criterion.

use std::{
    fmt,
    sync::OnceLock,
    time::{Duration, Instant},
};

use quenchfront_core::{
    asymptotics, bvp,
    continuation::{self, Branch},
    diagnostics, evolve,
    grid::{self, Grid},
    newton::{self, SolverConfig},
    specialfns, spectrum, BoundaryClosure, FrontProfile, Ramp,
};

pub const DELTA: f64 = 0.1;
pub const CONTINUATION_DC: f64 = 0.1;
pub const NEGATIVE_WAYPOINTS: [f64; 5] = [-1.0, -10.0, -50.0, -100.0, -200.0];
pub const POSITIVE_WAYPOINTS: [f64; 6] = [1.0, 3.0, 5.0, 8.0, 10.0, 12.0];

pub const C1_RANGE: (f64, f64) = (-200.0, -50.0);
pub const C1_SLOPE_TOL: f64 = 0.01;
pub const C2_CS: [f64; 3] = [8.0, 10.0, 12.0];
pub const C2_TOL: f64 = 0.5;
pub const C3_CS: [f64; 2] = [-100.0, -200.0];
pub const C3_TOL: f64 = 1.0;
pub const C4_C: f64 = -200.0;
pub const C4_TOL: f64 = 0.05;
/// The interface region runs from `-2 sqrt(-c)` to where the erf profile falls to this level.
pub const C4_LOW_LEVEL: f64 = 0.01;
pub const C5_CS: [f64; 5] = [-10.0, -1.0, 0.0, 1.0, 10.0];
pub const C5_LAMBDA_MAX: f64 = -1e-3;
pub const C5_SIGN_TOL: f64 = 1e-8;
pub const C5_OSCILLATOR_TOL: f64 = 1e-3;
pub const C5_OSCILLATOR_LEVELS: usize = 5;
pub const C6_CS: [f64; 2] = [0.0, 1.0];
pub const C6_REL_TOL: f64 = 0.2;
pub const C6_AMPLITUDE: f64 = 1e-3;
pub const C7_UNIQUE_CS: [f64; 2] = [0.0, 3.0];
pub const C7_UNIQUE_TOL: f64 = 1e-8;
/// Values at or below this level are ignored by the ordering test (round-off floor).
pub const C7_ORDER_FLOOR: f64 = 1e-280;
/// Width skipped at each end of the common range, where the truncated Dirichlet closures differ.
pub const C7_EDGE_MARGIN: f64 = 1.0;
pub const C9_CS: [f64; 2] = [0.0, 1.0];
pub const C9_WINDOW: (f64, f64) = (6.0, 9.0);
pub const C9_SLOPE_TOL: f64 = 0.05;
pub const C9_LEFT_X: f64 = -10.0;
pub const C9_LEFT_TOL: f64 = 5e-4;
pub const C10_EPS: f64 = 1e-3;
pub const C10_GAP_FACTOR: f64 = 0.05;
pub const C10_WINDOW: f64 = 10.0;
pub const C10_INTERFACE_TOL: f64 = 0.5;
pub const C10_CS: usize = 9;
pub const C11_ORDER: (f64, f64) = (3.7, 4.3);
pub const C11_BASE_H: f64 = 0.05;
pub const C11_JACOBIAN_TOL: f64 = 1e-5;
pub const C11_JACOBIAN_STEP: f64 = 1e-5;
pub const C11_DOMAIN_CS: [f64; 2] = [0.0, 5.0];
pub const C11_DOMAIN_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Default)]
pub struct Options {
    /// Added to `Ω₀` in the front-delay prediction (sensitivity check).
    pub omega0_offset: f64,
    /// Coarse spacing for the order-of-accuracy study (default [`C11_BASE_H`]).
    pub order_h: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub measured: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>2} {}: {} ({:.1}s of {}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.measured,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs()
        )
    }
}

pub const TITLES: [&str; 11] = [
    "amplitude law u(0;c) ~ (-c/pi)^(1/4)",
    "front delay -c^2/4 - Omega0 (15/16)^(2/3)",
    "reverse-quench position sqrt(-c)",
    "erf closed form at c=-200",
    "spectral negativity",
    "perturbation decay rate vs |lambda0|",
    "monotonicity and uniqueness",
    "unique crossing of sqrt(-x) for c>=0",
    "tail asymptotics",
    "tanh front vs scaled inner front",
    "numerical hygiene",
];

pub const BUDGETS_S: [u64; 11] = [180, 120, 120, 60, 120, 180, 120, 30, 60, 240, 120];

type Shared<T> = OnceLock<Result<T, String>>;

pub struct Context {
    pub options: Options,
    pub solver: SolverConfig,
    seed: Shared<FrontProfile>,
    negative: Shared<Branch>,
    positive: Shared<Branch>,
}

impl Context {
    pub fn new(options: Options) -> Self {
        Context {
            options,
            solver: SolverConfig::default(),
            seed: OnceLock::new(),
            negative: OnceLock::new(),
            positive: OnceLock::new(),
        }
    }

    pub fn seed(&self) -> Result<&FrontProfile, String> {
        self.seed
            .get_or_init(|| {
                newton::solve_default(0.0, &self.solver)
                    .map(|(p, _)| p)
                    .map_err(|e| format!("seed solve failed: {e}"))
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    fn grow(&self, cell: &'static str, targets: &[f64]) -> Result<Branch, String> {
        let seed = self.seed()?;
        let b = continuation::continue_through(seed, targets, CONTINUATION_DC, &self.solver)
            .map_err(|e| format!("{cell} branch: {e}"))?;
        match &b.termination {
            None => Ok(b),
            Some(e) => Err(format!("{cell} branch stopped: {e}")),
        }
    }

    /// Branch from `c = 0` down to `-200` through [`NEGATIVE_WAYPOINTS`].
    pub fn negative(&self) -> Result<&Branch, String> {
        self.negative
            .get_or_init(|| self.grow("negative", &NEGATIVE_WAYPOINTS))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Branch from `c = 0` up to `12` through [`POSITIVE_WAYPOINTS`].
    pub fn positive(&self) -> Result<&Branch, String> {
        self.positive
            .get_or_init(|| self.grow("positive", &POSITIVE_WAYPOINTS))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Front at one of the waypoints (or the seed).
    pub fn front(&self, c: f64) -> Result<&FrontProfile, String> {
        let b = if c < 0.0 { self.negative()? } else { self.positive()? };
        b.at(c, 1e-9)
            .ok_or_else(|| format!("no branch point at c = {c}"))
    }

    pub fn run(&self, id: u8) -> Outcome {
        let start = Instant::now();
        let result = match id {
            1 => self.amplitude_law(),
            2 => self.front_delay(),
            3 => self.reverse_quench(),
            4 => self.erf_closed_form(),
            5 => self.spectral_negativity(),
            6 => self.decay_rate(),
            7 => self.monotonicity(),
            8 => self.crossings(),
            9 => self.tails(),
            10 => self.inner_outer(),
            11 => self.hygiene(),
            _ => Err(format!("unknown criterion {id}")),
        };
        let elapsed = start.elapsed();
        let idx = (id as usize).clamp(1, 11) - 1;
        let budget = Duration::from_secs(BUDGETS_S[idx]);
        let (ok, measured) = match result {
            Ok((ok, m)) => (ok, m),
            Err(e) => (false, format!("error: {e}")),
        };
        let over = elapsed > budget;
        Outcome {
            id,
            title: TITLES[idx],
            passed: ok && !over,
            measured: if over {
                format!("{measured}; over runtime budget")
            } else {
                measured
            },
            elapsed,
            budget,
        }
    }

    pub fn run_all(&self) -> Vec<Outcome> {
        (1..=11).map(|id| self.run(id)).collect()
    }
}

type Check = Result<(bool, String), String>;

fn e2s<E: fmt::Display>(e: E) -> String {
    e.to_string()
}

fn regression(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

impl Context {
    fn amplitude_law(&self) -> Check {
        let b = self.negative()?;
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for p in b.points.iter().filter(|p| p.c >= C1_RANGE.0 && p.c <= C1_RANGE.1) {
            xs.push((-p.c).powf(0.25));
            ys.push(p.u_at_zero().ok_or("x = 0 outside the grid")?);
        }
        if xs.len() < 3 {
            return Err(format!("only {} branch points in range", xs.len()));
        }
        let (slope, _) = regression(&xs, &ys);
        let target = std::f64::consts::PI.powf(-0.25);
        let dev = (slope - target).abs();
        Ok((
            dev <= C1_SLOPE_TOL,
            format!(
                "slope {slope:.5} over {} points vs pi^(-1/4) = {target:.5}, |diff| {dev:.2e} <= {C1_SLOPE_TOL}",
                xs.len()
            ),
        ))
    }

    fn front_delay(&self) -> Check {
        let omega = specialfns::omega0().map_err(e2s)?.value + self.options.omega0_offset;
        let mut ok = true;
        let mut parts = Vec::new();
        for c in C2_CS {
            let p = self.front(c)?;
            let xd = diagnostics::front_position(p, DELTA).map_err(e2s)?.x;
            let pred = asymptotics::front_loc_largec_with(c, omega).map_err(e2s)?;
            let gap = (xd - pred).abs();
            ok &= gap <= C2_TOL;
            parts.push(format!("c={c}: x_d {xd:.4} pred {pred:.4} gap {gap:.3}"));
        }
        Ok((ok, format!("{} (tol {C2_TOL})", parts.join("; "))))
    }

    fn reverse_quench(&self) -> Check {
        let mut ok = true;
        let mut parts = Vec::new();
        for c in C3_CS {
            let p = self.front(c)?;
            let xd = diagnostics::front_position(p, DELTA).map_err(e2s)?.x;
            let pred = asymptotics::front_loc_negc(c).map_err(e2s)?;
            let gap = (xd - pred).abs();
            ok &= gap <= C3_TOL;
            parts.push(format!("c={c}: x_d {xd:.4} sqrt(-c) {pred:.4} gap {gap:.3}"));
        }
        Ok((ok, format!("{} (tol {C3_TOL})", parts.join("; "))))
    }

    fn erf_closed_form(&self) -> Check {
        let p = self.front(C4_C)?;
        let lo = -2.0 * (-C4_C).sqrt();
        let hi = asymptotics::erf_profile_level_crossing(C4_C, C4_LOW_LEVEL)
            .map_err(e2s)?
            .ok_or("erf profile never reaches the low level")?;
        let mut worst = (0.0f64, 0.0);
        for (x, &u) in p.grid.nodes().zip(&p.u) {
            if x < lo || x > hi {
                continue;
            }
            let e = asymptotics::erf_profile(x, C4_C).map_err(e2s)?;
            let rel = (u - e).abs() / e;
            if rel > worst.0 {
                worst = (rel, x);
            }
        }
        Ok((
            worst.0 <= C4_TOL,
            format!(
                "sup relative gap {:.3e} at x = {:.2} on [{lo:.2}, {hi:.2}] (tol {C4_TOL})",
                worst.0, worst.1
            ),
        ))
    }

    fn spectral_negativity(&self) -> Check {
        let g = Grid::new(-20.0, 20.0, 4001).map_err(e2s)?;
        let v: Vec<f64> = g.nodes().map(|x| x * x).collect();
        let (ev, _, _) = spectrum::schrodinger_spectrum(&g, &v, C5_OSCILLATOR_LEVELS).map_err(e2s)?;
        let osc_err = ev
            .iter()
            .enumerate()
            .map(|(j, l)| (l + (2 * j + 1) as f64).abs())
            .fold(0.0, f64::max);
        let mut ok = osc_err <= C5_OSCILLATOR_TOL;
        let mut parts = vec![format!("oscillator max err {osc_err:.2e}")];
        for c in C5_CS {
            let p = if c == 0.0 { self.seed()? } else { self.front(c)? };
            let r = spectrum::leading_eigenvalues(p, 2).map_err(e2s)?;
            let l0 = r.lambda0();
            let gmin = r.ground_state_min();
            ok &= l0 < C5_LAMBDA_MAX && gmin >= -C5_SIGN_TOL;
            parts.push(format!("c={c}: l0 {l0:.4} min phi {gmin:.1e}"));
        }
        Ok((ok, parts.join("; ")))
    }

    fn decay_rate(&self) -> Check {
        let mut ok = true;
        let mut parts = Vec::new();
        for c in C6_CS {
            let p = if c == 0.0 { self.seed()? } else { self.front(c)? };
            let l0 = spectrum::leading_eigenvalues(p, 1).map_err(e2s)?.lambda0();
            let mut cfg = evolve::EvolveConfig::new(Ramp::Linear, c);
            cfg.stop_below = evolve::FIT_FLOOR * 0.1;
            let d = evolve::perturbation_decay(p, C6_AMPLITUDE, &cfg).map_err(e2s)?;
            let rel = (d.measured_rate.abs() - l0.abs()).abs() / l0.abs();
            ok &= rel <= C6_REL_TOL;
            parts.push(format!(
                "c={c}: rate {:.4} |l0| {:.4} rel {rel:.2e}",
                -d.measured_rate,
                l0.abs()
            ));
        }
        Ok((ok, format!("{} (tol {C6_REL_TOL})", parts.join("; "))))
    }

    fn all_points(&self) -> Result<Vec<&FrontProfile>, String> {
        let mut pts: Vec<&FrontProfile> = self.negative()?.points.iter().collect();
        pts.extend(self.positive()?.points.iter().filter(|p| p.c > 0.0));
        pts.sort_by(|a, b| a.c.total_cmp(&b.c));
        Ok(pts)
    }

    fn monotonicity(&self) -> Check {
        let pts = self.all_points()?;
        let mut bad_shape = Vec::new();
        for p in &pts {
            if !diagnostics::admissibility(p).decreasing {
                bad_shape.push(p.c);
            }
        }
        let mut bad_order = Vec::new();
        for w in pts.windows(2) {
            if let Some(x) = continuation::ordering_violation(w[0], w[1], C7_ORDER_FLOOR, C7_EDGE_MARGIN) {
                bad_order.push((w[0].c, w[1].c, x));
            }
        }
        let mut worst_unique = 0.0f64;
        for c in C7_UNIQUE_CS {
            let p = if c == 0.0 { self.seed()? } else { self.front(c)? };
            let alt = alternative_guess(c, p.grid);
            let (q, _) = newton::solve(&alt, &BoundaryClosure::default(), &self.solver).map_err(e2s)?;
            let d = q.u.iter().zip(&p.u).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            worst_unique = worst_unique.max(d);
        }
        let ok = bad_shape.is_empty() && bad_order.is_empty() && worst_unique <= C7_UNIQUE_TOL;
        Ok((
            ok,
            format!(
                "{} profiles, non-monotone {:?}, ordering violations {:?}, uniqueness gap {worst_unique:.2e} (tol {C7_UNIQUE_TOL:e})",
                pts.len(),
                bad_shape,
                bad_order.iter().take(3).collect::<Vec<_>>()
            ),
        ))
    }

    fn crossings(&self) -> Check {
        let b = self.positive()?;
        let mut bad = Vec::new();
        for p in b.points.iter().filter(|p| p.c >= 0.0) {
            let cr = diagnostics::crossings(p);
            if cr.roots.len() != 1 || cr.roots[0] >= 0.0 || !cr.positive_right {
                bad.push((p.c, cr.roots.len()));
            }
        }
        let n = b.points.iter().filter(|p| p.c >= 0.0).count();
        Ok((
            bad.is_empty(),
            format!("{n} fronts with c >= 0, exceptions (c, count): {bad:?}"),
        ))
    }

    fn tails(&self) -> Check {
        let mut ok = true;
        let mut parts = Vec::new();
        for c in C9_CS {
            let p = if c == 0.0 { self.seed()? } else { self.front(c)? };
            let fit = bvp::fit_right_tail(p, C9_WINDOW.0, C9_WINDOW.1).map_err(e2s)?;
            let rel = (fit.log_slope - fit.predicted_log_slope).abs() / fit.predicted_log_slope.abs();
            ok &= rel <= C9_SLOPE_TOL;
            parts.push(format!(
                "c={c}: slope {:.4} pred {:.4} rel {rel:.2e}",
                fit.log_slope, fit.predicted_log_slope
            ));
        }
        let p = self.seed()?;
        let s = (-C9_LEFT_X).sqrt();
        let gap = s - p.value_at(C9_LEFT_X);
        let pred = s / (8.0 * (-C9_LEFT_X).powi(3));
        let dev = (gap - pred).abs();
        ok &= dev <= C9_LEFT_TOL;
        parts.push(format!("left gap {gap:.4e} vs {pred:.4e}, |diff| {dev:.2e} (tol {C9_LEFT_TOL})"));
        Ok((ok, parts.join("; ")))
    }

    fn inner_outer(&self) -> Check {
        let s = evolve::inner_scale(C10_EPS);
        let base = evolve::compare_inner_scaling_with(C10_EPS, 0.0, self.seed()?, DELTA, &self.solver)
            .map_err(e2s)?;
        let sup = window_gap(&base, C10_WINDOW);
        let gap_tol = C10_GAP_FACTOR * s;
        let mut ok = sup <= gap_tol;
        let mut worst = (0.0f64, 0.0);
        let span = 2.0 * s;
        for j in 0..C10_CS {
            let c = -span + 2.0 * span * j as f64 / (C10_CS - 1) as f64;
            let r = if c == 0.0 {
                base.clone()
            } else {
                evolve::compare_inner_scaling(C10_EPS, c, DELTA, &self.solver).map_err(e2s)?
            };
            if r.interface_gap() >= worst.0 {
                worst = (r.interface_gap(), c);
            }
        }
        ok &= worst.0 <= C10_INTERFACE_TOL;
        Ok((
            ok,
            format!(
                "sup gap {sup:.2e} on |x| <= {C10_WINDOW} (tol {gap_tol:.1e}); worst interface gap {:.2e} at c = {:.3} over {C10_CS} speeds in [-{span:.1}, {span:.1}] (tol {C10_INTERFACE_TOL})",
                worst.0, worst.1
            ),
        ))
    }

    fn hygiene(&self) -> Check {
        let h = self.options.order_h.unwrap_or(C11_BASE_H);
        let orders = fd_orders(h).map_err(e2s)?;
        let (omin, omax) = orders
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), o| (a.min(*o), b.max(*o)));
        let mut ok = omin >= C11_ORDER.0 && omax <= C11_ORDER.1;
        let jac = jacobian_mismatch(self.seed()?, C11_JACOBIAN_STEP).map_err(e2s)?;
        ok &= jac <= C11_JACOBIAN_TOL;
        let mut dmax = 0.0f64;
        for c in C11_DOMAIN_CS {
            let p = if c == 0.0 { self.seed()? } else { self.front(c)? };
            let g = Grid::with_max_spacing(2.0 * p.grid.x_min(), 2.0 * p.grid.x_max(), p.grid.h())
                .map_err(e2s)?;
            let guess = continuation::reinterpolate(p, g).map_err(e2s)?;
            let (q, _) = newton::solve(&guess, &BoundaryClosure::default(), &self.solver).map_err(e2s)?;
            let a = p.u_at_zero().ok_or("x = 0 outside grid")?;
            let b = q.u_at_zero().ok_or("x = 0 outside grid")?;
            dmax = dmax.max((a - b).abs());
        }
        ok &= dmax < C11_DOMAIN_TOL;
        Ok((
            ok,
            format!(
                "FD orders in [{omin:.3}, {omax:.3}] from h = {h} (need [{}, {}]); Jacobian rel err {jac:.2e} (tol {C11_JACOBIAN_TOL:e}); domain doubling |du(0)| {dmax:.2e} (tol {C11_DOMAIN_TOL:e})",
                C11_ORDER.0, C11_ORDER.1
            ),
        ))
    }
}

fn window_gap(r: &evolve::InnerComparison, half_width: f64) -> f64 {
    r.samples
        .iter()
        .filter(|(x, _, _)| x.abs() <= half_width)
        .map(|(_, a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// A second admissible-shaped start: `sqrt(-x)` glued to a decaying exponential at `x = -3`.
pub fn alternative_guess(c: f64, g: Grid) -> FrontProfile {
    FrontProfile::from_fn(c, g, |x| {
        if x < -3.0 {
            (-x).sqrt()
        } else {
            3.0f64.sqrt() * (-(x + 3.0)).exp()
        }
    })
}

fn max_interior_error(approx: &[f64], exact: impl Fn(f64) -> f64, g: &Grid) -> f64 {
    (1..g.len() - 1)
        .map(|i| (approx[i] - exact(g.x(i))).abs())
        .fold(0.0, f64::max)
}

/// Measured orders `log2(e_h / e_{h/2})` of `D2` on `sin` and of `D1` (all three biases) on
/// `exp`, over `[-2, 2]`.
pub fn fd_orders(h: f64) -> quenchfront_core::Result<Vec<f64>> {
    let (a, b) = (-2.0, 2.0);
    let coarse = Grid::with_max_spacing(a, b, h)?;
    let fine = Grid::new(a, b, 2 * coarse.len() - 1)?;
    let err = |g: &Grid, which: i8| -> quenchfront_core::Result<f64> {
        if which == 2 {
            let u: Vec<f64> = g.nodes().map(f64::sin).collect();
            Ok(max_interior_error(&grid::d2_apply(g, &u)?, |x| -x.sin(), g))
        } else {
            let u: Vec<f64> = g.nodes().map(f64::exp).collect();
            Ok(max_interior_error(&grid::d1_apply(g, &u, which)?, f64::exp, g))
        }
    };
    [2i8, -1, 0, 1]
        .iter()
        .map(|&w| Ok((err(&coarse, w)? / err(&fine, w)?).log2()))
        .collect()
}

/// `‖(F(u + t v) - F(u - t v))/(2t) - J v‖∞ / ‖J v‖∞` for a smooth direction `v`.
pub fn jacobian_mismatch(p: &FrontProfile, t: f64) -> quenchfront_core::Result<f64> {
    let bc = BoundaryClosure::default();
    let n = p.u.len();
    let v: Vec<f64> = p
        .grid
        .nodes()
        .map(|x| (0.3 * x).sin() + 0.5 * (-(x * x) / 8.0).exp() * (1.7 * x).cos())
        .collect();
    let shifted = |s: f64| {
        let mut q = p.clone();
        for i in 0..n {
            q.u[i] += s * v[i];
        }
        bvp::residual(&q, &bc)
    };
    let fp = shifted(t)?;
    let fm = shifted(-t)?;
    let jv = bvp::jacobian(p, &bc)?.matvec(&v);
    let scale = jv.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let err = (0..n)
        .map(|i| ((fp[i] - fm[i]) / (2.0 * t) - jv[i]).abs())
        .fold(0.0, f64::max);
    Ok(err / scale)
}
