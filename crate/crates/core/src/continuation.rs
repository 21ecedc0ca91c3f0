//! Natural-parameter continuation in `c`.

use alloc::vec::Vec;

use crate::{
    bvp::{self, BoundaryClosure, FrontProfile},
    diagnostics,
    error::{Error, Result},
    grid::Grid,
    interp,
    newton::{self, SolverConfig},
};

pub const MIN_STEP: f64 = 1e-4;
pub const MAX_STEP: f64 = 1.0;
pub const GROWTH: f64 = 1.5;
pub const SUCCESSES_BEFORE_GROWTH: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    IncreasingC,
    DecreasingC,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    /// Converged admissible profiles sorted by `c`.
    pub points: Vec<FrontProfile>,
    pub direction: Direction,
    /// Rejected attempts: `(c, reason)`.
    pub failures: Vec<(f64, Error)>,
    /// Why continuation stopped before the target, if it did.
    pub termination: Option<Error>,
}

impl Branch {
    pub fn single(seed: FrontProfile) -> Self {
        Branch {
            points: alloc::vec![seed],
            direction: Direction::IncreasingC,
            failures: Vec::new(),
            termination: None,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.termination.is_none()
    }

    pub fn cs(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.c)
    }

    /// Profile whose `c` is within `tol` of `c`.
    pub fn at(&self, c: f64, tol: f64) -> Option<&FrontProfile> {
        self.points.iter().find(|p| (p.c - c).abs() <= tol)
    }

    fn sort(&mut self) {
        self.points.sort_by(|a, b| a.c.total_cmp(&b.c));
        self.points.dedup_by(|a, b| a.c == b.c);
    }

    /// Union of two branches (duplicates in `c` keep the first occurrence).
    pub fn merge(mut self, other: Branch) -> Branch {
        self.points.extend(other.points);
        self.failures.extend(other.failures);
        if self.termination.is_none() {
            self.termination = other.termination;
        }
        self.sort();
        self
    }
}

/// Moves `p` onto `g_new`: cubic interpolation inside the old domain, the left closure
/// state to its left and zero to its right.
pub fn reinterpolate(p: &FrontProfile, g_new: Grid) -> Result<FrontProfile> {
    let old = p.grid;
    if g_new.x_max() <= old.x_min() || g_new.x_min() >= old.x_max() {
        return Err(Error::NoOverlap);
    }
    let bc = BoundaryClosure::default();
    let same = old == g_new;
    let u = g_new
        .nodes()
        .enumerate()
        .map(|(i, x)| {
            if same {
                p.u[i]
            } else if x < old.x_min() {
                bc.left_state(x, p.c, p.ramp)
            } else if x > old.x_max() {
                0.0
            } else {
                interp::cubic(&old, &p.u, x).max(0.0)
            }
        })
        .collect();
    let mut q = FrontProfile::new(p.c, g_new, u)?.with_ramp(p.ramp);
    q.converged = same && p.converged;
    q.residual_norm = if same { p.residual_norm } else { f64::INFINITY };
    Ok(q)
}

/// Grid covering both `g` and the default domain at `c`, or `None` if `g` already does.
pub fn enlarged_grid(g: &Grid, c: f64) -> Result<Option<Grid>> {
    let (a, b) = bvp::default_domain(c);
    if g.x_min() <= a && g.x_max() >= b {
        return Ok(None);
    }
    let h = g.h().min(bvp::DEFAULT_SPACING);
    Grid::with_max_spacing(g.x_min().min(a), g.x_max().max(b), h).map(Some)
}

fn attempt(prev: &FrontProfile, c: f64, cfg: &SolverConfig) -> Result<FrontProfile> {
    let mut guess = match enlarged_grid(&prev.grid, c)? {
        Some(g) => reinterpolate(prev, g)?,
        None => prev.clone(),
    };
    guess.c = c;
    let (p, report) = newton::solve(&guess, &BoundaryClosure::default(), cfg)?;
    let adm = diagnostics::admissibility(&p);
    if !(report.positive || adm.positive) || !adm.decreasing {
        return Err(Error::NotAdmissible { c });
    }
    Ok(p)
}

/// Steps from `seed.c` to `c_target`, starting with step `dc_init`.
///
/// Each converged admissible point is kept; on failure the step halves (down to
/// [`MIN_STEP`]) and after [`SUCCESSES_BEFORE_GROWTH`] consecutive successes it grows by
/// [`GROWTH`] (up to [`MAX_STEP`]). Stopping early is recorded in `termination`.
pub fn continue_branch(
    seed: &FrontProfile,
    c_target: f64,
    dc_init: f64,
    cfg: &SolverConfig,
) -> Result<Branch> {
    if !c_target.is_finite() || !(dc_init > 0.0) {
        return Err(Error::InvalidArgument("continuation needs finite target and dc > 0"));
    }
    let sign = if c_target >= seed.c { 1.0 } else { -1.0 };
    let mut branch = Branch {
        points: alloc::vec![seed.clone()],
        direction: if sign > 0.0 {
            Direction::IncreasingC
        } else {
            Direction::DecreasingC
        },
        failures: Vec::new(),
        termination: None,
    };
    let mut dc = dc_init.min(MAX_STEP);
    let mut streak = 0;
    let mut current = seed.clone();
    while (c_target - current.c) * sign > 0.0 {
        let remaining = (c_target - current.c).abs();
        let c_next = if remaining <= dc * (1.0 + 1e-9) {
            c_target
        } else {
            current.c + sign * dc
        };
        match attempt(&current, c_next, cfg) {
            Ok(p) => {
                branch.points.push(p.clone());
                current = p;
                streak += 1;
                if streak >= SUCCESSES_BEFORE_GROWTH {
                    dc = (dc * GROWTH).min(MAX_STEP);
                    streak = 0;
                }
            }
            Err(e) => {
                branch.failures.push((c_next, e));
                streak = 0;
                dc *= 0.5;
                if dc < MIN_STEP {
                    branch.termination = Some(Error::StepUnderflow { last_c: current.c });
                    break;
                }
            }
        }
    }
    branch.sort();
    Ok(branch)
}

/// Continues through the listed targets in order, so that every target is a branch point.
pub fn continue_through(
    seed: &FrontProfile,
    targets: &[f64],
    dc_init: f64,
    cfg: &SolverConfig,
) -> Result<Branch> {
    let mut total = Branch::single(seed.clone());
    let mut current = seed.clone();
    for &t in targets {
        let b = continue_branch(&current, t, dc_init, cfg)?;
        let stopped = !b.is_complete();
        let last = if t >= current.c {
            b.points.last()
        } else {
            b.points.first()
        }
        .cloned();
        total = total.merge(b);
        if stopped {
            break;
        }
        if let Some(p) = last {
            current = p;
        }
    }
    if let Some(first) = targets.first() {
        total.direction = if *first >= seed.c {
            Direction::IncreasingC
        } else {
            Direction::DecreasingC
        };
    }
    Ok(total)
}

/// Grows a branch from `seed` to both `c_min` and `c_max`.
pub fn branch_both_ways(
    seed: &FrontProfile,
    c_min: f64,
    c_max: f64,
    dc_init: f64,
    cfg: &SolverConfig,
) -> Result<Branch> {
    if !(c_min <= c_max) {
        return Err(Error::InvalidArgument("c_min must not exceed c_max"));
    }
    let up = continue_branch(seed, c_max.max(seed.c), dc_init, cfg)?;
    let down = continue_branch(seed, c_min.min(seed.c), dc_init, cfg)?;
    Ok(down.merge(up))
}

/// First node of the common range where `lo` (smaller `c`) fails to lie strictly above `hi`,
/// comparing on `lo`'s nodes where both values exceed `floor`. Nodes within `margin` of either
/// end of the common range are skipped (closure truncation layer).
pub fn ordering_violation(lo: &FrontProfile, hi: &FrontProfile, floor: f64, margin: f64) -> Option<f64> {
    let a = lo.grid.x_min().max(hi.grid.x_min()) + margin;
    let b = lo.grid.x_max().min(hi.grid.x_max()) - margin;
    for (i, x) in lo.grid.nodes().enumerate() {
        if x <= a || x >= b {
            continue;
        }
        let ul = lo.u[i];
        let uh = interp::cubic(&hi.grid, &hi.u, x);
        if ul > floor && uh > floor && ul <= uh {
            return Some(x);
        }
    }
    None
}
