//! The subcommands. Each one turns an effective [`RunConfig`] into a [`Table`].

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use quenchfront_core::{
    bvp, continuation, diagnostics,
    evolve::{self, EvolveConfig, Scheme},
    newton::{self, SolverConfig},
    spectrum, BoundaryClosure, Branch, FrontDiagnostics, FrontProfile, Grid, Ramp, SolveReport,
};

use crate::{
    acceptance::{self, Context as Acceptance, Options},
    config::RunConfig,
    csvio::{self, fmt_f64, Table},
};

pub const DEFAULT_DC: f64 = 0.1;
pub const DEFAULT_K: usize = 5;
pub const DEFAULT_EPS: f64 = 1e-3;
pub const DEFAULT_AMPLITUDE: f64 = 1e-3;

/// A finished (or partially finished) command: the table to write and an optional failure
/// to report after writing it.
pub struct Output {
    pub table: Table,
    pub failure: Option<anyhow::Error>,
}

impl From<Table> for Output {
    fn from(table: Table) -> Self {
        Output { table, failure: None }
    }
}

fn solver_config(cfg: &RunConfig) -> Result<SolverConfig> {
    let mut s = SolverConfig::default();
    if let Some(tol) = cfg.tol {
        s.tol_residual = tol;
    }
    s.validate()?;
    Ok(s)
}

fn delta(cfg: &RunConfig) -> f64 {
    cfg.delta.unwrap_or(diagnostics::DEFAULT_DELTA)
}

fn require_c(cfg: &RunConfig) -> Result<f64> {
    cfg.c.ok_or_else(|| anyhow!("missing --c"))
}

/// The default domain for `c`, with any `xmin`/`xmax`/`h` overrides applied.
pub fn grid_for(c: f64, cfg: &RunConfig) -> Result<Grid> {
    let (a, b) = bvp::default_domain(c);
    let g = Grid::with_max_spacing(
        cfg.xmin.unwrap_or(a),
        cfg.xmax.unwrap_or(b),
        cfg.h.unwrap_or(bvp::DEFAULT_SPACING),
    )?;
    Ok(g)
}

fn echo_config(t: &mut Table, command: &str, cfg: &RunConfig) {
    t.meta("command", command);
    for (k, v) in cfg.pairs() {
        t.meta(format!("config.{k}"), v);
    }
}

fn seed(cfg: &RunConfig, solver: &SolverConfig) -> Result<FrontProfile> {
    match &cfg.seed_file {
        Some(path) => csvio::read_profile(Path::new(path)),
        None => Ok(newton::solve_default(0.0, solver)?.0),
    }
}

/// Solves at `c` on `grid`. Starts from the seed file (reinterpolated) or the ramp guess;
/// if a ramp-guess start fails, continues from `c = 0` and retries from the branch end.
pub fn solve_front(c: f64, grid: Grid, cfg: &RunConfig) -> Result<(FrontProfile, SolveReport)> {
    let solver = solver_config(cfg)?;
    let bc = BoundaryClosure::default();
    if cfg.seed_file.is_some() {
        let mut guess = continuation::reinterpolate(&seed(cfg, &solver)?, grid)?;
        guess.c = c;
        return Ok(newton::solve(&guess, &bc, &solver)?);
    }
    let direct = newton::solve(&FrontProfile::ramp_guess(c, grid), &bc, &solver);
    match direct {
        Ok(r) if r.1.positive && r.1.monotone => Ok(r),
        first => {
            let start = seed(cfg, &solver)?;
            let dc = cfg.dc.unwrap_or(DEFAULT_DC);
            let b = continuation::continue_branch(&start, c, dc, &solver)?;
            if let Some(e) = b.termination {
                return Err(anyhow::Error::new(e).context(format!(
                    "direct solve failed ({}) and continuation from c = 0 stopped",
                    first.err().map_or("inadmissible".to_string(), |e| e.to_string())
                )));
            }
            let end = b.points.last().ok_or_else(|| anyhow!("empty branch"))?;
            let mut guess = continuation::reinterpolate(end, grid)?;
            guess.c = c;
            Ok(newton::solve(&guess, &bc, &solver)?)
        }
    }
}

pub fn solve(cfg: &RunConfig) -> Result<Output> {
    let c = require_c(cfg)?;
    let grid = grid_for(c, cfg)?;
    bvp::check_domain(&grid, c)?;
    let (p, report) = solve_front(c, grid, cfg)?;
    let d = FrontDiagnostics::compute(&p, delta(cfg))?;
    let r = bvp::residual(&p, &BoundaryClosure::default())?;
    let mut t = Table::new("profile", &["x", "u", "residual"]);
    t.meta_f64("c", c)
        .meta_f64("h", grid.h())
        .meta("domain", format!("[{}, {}]", fmt_f64(grid.x_min()), fmt_f64(grid.x_max())))
        .meta_f64("residual_norm", p.residual_norm)
        .meta("iterations", report.iterations)
        .meta_f64("alpha_plus", p.alpha_plus.unwrap_or(f64::NAN))
        .meta_f64("alpha_minus", p.alpha_minus.unwrap_or(f64::NAN))
        .meta_f64("delta", d.delta)
        .meta_f64("x_delta", d.x_delta)
        .meta_f64("u_at_zero", d.u_at_zero)
        .meta(
            "crossings",
            d.crossing_points.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(" "),
        )
        .meta("admissible", d.admissible);
    if cfg.spectrum.unwrap_or(false) {
        let s = spectrum::leading_eigenvalues(&p, cfg.k.unwrap_or(1))?;
        t.meta_f64("lambda0", s.lambda0());
    }
    echo_config(&mut t, "solve", cfg);
    for ((x, &u), &res) in grid.nodes().zip(&p.u).zip(&r) {
        t.push_row(vec![x, u, res]);
    }
    Ok(t.into())
}

fn branch_row(p: &FrontProfile, delta: f64, with_spectrum: bool) -> Vec<f64> {
    let x_delta = diagnostics::front_position(p, delta).map_or(f64::NAN, |f| f.x);
    let crossings = diagnostics::crossings(p).roots.len() as f64;
    let lambda0 = if with_spectrum {
        spectrum::leading_eigenvalues(p, 1).map_or(f64::NAN, |s| s.lambda0())
    } else {
        f64::NAN
    };
    vec![
        p.c,
        p.u_at_zero().unwrap_or(f64::NAN),
        x_delta,
        crossings,
        lambda0,
        p.alpha_plus.unwrap_or(f64::NAN),
    ]
}

pub fn branch(cfg: &RunConfig) -> Result<Output> {
    let (cmin, cmax) = match (cfg.cmin, cfg.cmax) {
        (Some(a), Some(b)) if a <= b => (a, b),
        (Some(_), Some(_)) => bail!("--cmin must not exceed --cmax"),
        _ => bail!("branch needs --cmin and --cmax"),
    };
    let solver = solver_config(cfg)?;
    let start = seed(cfg, &solver)?;
    let dc = cfg.dc.unwrap_or(DEFAULT_DC);
    let b: Branch = continuation::branch_both_ways(&start, cmin, cmax, dc, &solver)?;
    let with_spectrum = cfg.spectrum.unwrap_or(true);
    let delta = delta(cfg);
    let mut t = Table::new(
        "branch",
        &["c", "u_at_zero", "x_delta", "crossing_count", "lambda0", "alpha_plus"],
    );
    t.meta_f64("cmin", cmin).meta_f64("cmax", cmax).meta_f64("delta", delta);
    for (c, e) in &b.failures {
        t.meta("failure", format!("c={} {e}", fmt_f64(*c)));
    }
    if let Some(e) = &b.termination {
        t.meta("termination", e);
    }
    echo_config(&mut t, "branch", cfg);
    for p in b.points.iter().filter(|p| p.c >= cmin - 1e-12 && p.c <= cmax + 1e-12) {
        t.push_row(branch_row(p, delta, with_spectrum));
    }
    let failure = b
        .termination
        .map(|e| anyhow::Error::new(e).context("branch incomplete; partial branch written"));
    Ok(Output { table: t, failure })
}

pub fn spectrum(cfg: &RunConfig) -> Result<Output> {
    let c = require_c(cfg)?;
    let grid = grid_for(c, cfg)?;
    bvp::check_domain(&grid, c)?;
    let (p, _) = solve_front(c, grid, cfg)?;
    let k = cfg.k.unwrap_or(DEFAULT_K);
    let s = spectrum::leading_eigenvalues(&p, k)?;
    let v = spectrum::build_potential(&p);
    let mut t = Table::new("spectrum", &["x", "potential", "ground_state"]);
    t.meta_f64("c", c).meta_f64("lambda0", s.lambda0());
    for (j, l) in s.eigenvalues.iter().enumerate() {
        t.meta_f64(format!("eigenvalue.{j}"), *l);
    }
    t.meta_f64("rayleigh_residual", s.rayleigh_residual)
        .meta_f64("potential_min", s.potential_min)
        .meta_f64("potential_argmin", s.potential_argmin);
    echo_config(&mut t, "spectrum", cfg);
    for ((x, &vi), &g) in grid.nodes().zip(&v).zip(&s.ground_state) {
        t.push_row(vec![x, vi, g]);
    }
    Ok(t.into())
}

fn parse_scheme(s: Option<&str>) -> Result<Scheme> {
    match s.unwrap_or("imex-euler") {
        "imex-euler" | "imex_euler" | "euler" => Ok(Scheme::ImexEuler),
        "imex-cn" | "imex_cn" | "cn" => Ok(Scheme::ImexCn),
        other => bail!("unknown scheme `{other}` (expected imex-euler or imex-cn)"),
    }
}

pub fn evolve(cfg: &RunConfig) -> Result<Output> {
    let c = require_c(cfg)?;
    let grid = grid_for(c, cfg)?;
    bvp::check_domain(&grid, c)?;
    let (p, _) = solve_front(c, grid, cfg)?;
    let mut ec = EvolveConfig::new(Ramp::Linear, c);
    if let Some(dt) = cfg.dt {
        ec.dt = dt;
    }
    if let Some(t_end) = cfg.t_end {
        ec.t_end = t_end;
    }
    ec.scheme = parse_scheme(cfg.scheme.as_deref())?;
    ec.stop_below = 0.1 * evolve::FIT_FLOOR;
    let amplitude = cfg.amplitude.unwrap_or(DEFAULT_AMPLITUDE);
    let d = evolve::perturbation_decay(&p, amplitude, &ec)?;
    let l0 = spectrum::leading_eigenvalues(&p, 1)?.lambda0();
    let mut t = Table::new("evolution", &["t", "deviation"]);
    t.meta_f64("c", c)
        .meta_f64("amplitude", amplitude)
        .meta_f64("bump_center", d.bump_center)
        .meta_f64("measured_rate", d.measured_rate)
        .meta_f64("lambda0", l0)
        .meta_f64("rate_ratio", d.measured_rate / l0)
        .meta("steps", d.result.steps);
    echo_config(&mut t, "evolve", cfg);
    for &(time, dev) in &d.result.deviation_history {
        t.push_row(vec![time, dev]);
    }
    Ok(t.into())
}

pub fn compare_tanh(cfg: &RunConfig) -> Result<Output> {
    let eps = cfg.eps.unwrap_or(DEFAULT_EPS);
    let c = cfg.c.unwrap_or(0.0);
    let solver = solver_config(cfg)?;
    let r = evolve::compare_inner_scaling(eps, c, delta(cfg), &solver)?;
    let mut t = Table::new("tanh_comparison", &["x", "u_tanh", "u_inner_scaled", "gap"]);
    t.meta_f64("eps", eps)
        .meta_f64("c", c)
        .meta_f64("c_tilde", r.c_tilde)
        .meta_f64("window", r.window)
        .meta_f64("sup_gap", r.sup_gap)
        .meta_f64("delta", r.delta)
        .meta_f64("x_delta_tanh", r.x_delta_tanh)
        .meta_f64("x_delta_inner_scaled", r.x_delta_inner)
        .meta_f64("interface_gap", r.interface_gap());
    echo_config(&mut t, "compare-tanh", cfg);
    for &(x, a, b) in &r.samples {
        t.push_row(vec![x, a, b, a - b]);
    }
    Ok(t.into())
}

/// Runs the acceptance suite, printing one line per criterion as it finishes.
pub fn validate(cfg: &RunConfig, omega0_offset: f64) -> Result<Output> {
    let ctx = Acceptance::new(Options {
        omega0_offset,
        order_h: cfg.h,
    });
    let mut t = Table::new("validation", &["criterion", "passed", "seconds"]);
    t.meta_f64("omega0_offset", omega0_offset);
    echo_config(&mut t, "validate", cfg);
    let mut failed = Vec::new();
    for id in 1..=acceptance::TITLES.len() as u8 {
        let o = ctx.run(id);
        println!("{o}");
        if !o.passed {
            failed.push(id);
        }
        t.meta(format!("criterion.{id}"), &o.measured);
        t.push_row(vec![
            id as f64,
            if o.passed { 1.0 } else { 0.0 },
            o.elapsed.as_secs_f64(),
        ]);
    }
    let failure = (!failed.is_empty()).then(|| anyhow!("criteria failed: {failed:?}"));
    Ok(Output { table: t, failure })
}

/// Reads a table and returns its recorded configuration, for reruns.
pub fn config_of(path: &Path) -> Result<RunConfig> {
    let t = Table::read(path)?;
    RunConfig::from_header(t.meta.iter().map(|(k, v)| (k.as_str(), v.as_str())))
        .with_context(|| format!("config header of {}", path.display()))
}
