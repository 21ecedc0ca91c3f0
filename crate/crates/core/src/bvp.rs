//! Discrete stationary problem `u'' + c u' - r(x) u - u³ = 0` with Dirichlet closures.
//!
//! `r(x) = x` for the linear ramp and `r(x) = tanh(εx)` for the slow tanh ramp. The left
//! boundary value comes from the left-tail series (or `sqrt(tanh(-εx))`), the right value
//! is zero.

use alloc::vec::Vec;

use crate::{
    asymptotics,
    banded::BandedMatrix,
    error::{Error, Result},
    grid::{DiffOperator, Grid},
    math,
};

/// Target grid spacing for front computations.
pub const DEFAULT_SPACING: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ramp {
    /// `r(x) = x`.
    Linear,
    /// `r(x) = tanh(ε x)`, `0 < ε < 1`.
    Tanh { eps: f64 },
}

impl Ramp {
    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Ramp::Linear => x,
            Ramp::Tanh { eps } => math::tanh(eps * x),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Ramp::Linear => Ok(()),
            Ramp::Tanh { eps } if eps > 0.0 && eps < 1.0 => Ok(()),
            Ramp::Tanh { .. } => Err(Error::InvalidArgument("tanh ramp needs 0 < eps < 1")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosureKind {
    /// Left value from the asymptotic state, right value zero.
    DirichletAsymptotic,
    /// Homogeneous values at both ends.
    DirichletZero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryClosure {
    pub kind: ClosureKind,
    /// Number of algebraic correction orders in the left value (0, 1 or 2).
    pub left_order: u8,
    /// Whether the `c`-dependent terms enter the left value.
    pub includes_drift_term: bool,
}

impl Default for BoundaryClosure {
    fn default() -> Self {
        BoundaryClosure {
            kind: ClosureKind::DirichletAsymptotic,
            left_order: 1,
            includes_drift_term: true,
        }
    }
}

impl BoundaryClosure {
    pub fn zero() -> Self {
        BoundaryClosure {
            kind: ClosureKind::DirichletZero,
            ..Default::default()
        }
    }

    pub fn with_left_order(mut self, order: u8) -> Self {
        self.left_order = order.min(2);
        self
    }

    /// Asymptotic state at `x` (used for the left value and for extending profiles).
    pub fn left_state(&self, x: f64, c: f64, ramp: Ramp) -> f64 {
        match ramp {
            Ramp::Linear => {
                if x >= 0.0 {
                    return 0.0;
                }
                let cc = if self.includes_drift_term { c } else { 0.0 };
                math::sqrt(-x) * (1.0 + asymptotics::left_algebraic(x, cc, self.left_order))
            }
            Ramp::Tanh { eps } => math::sqrt((-math::tanh(eps * x)).max(0.0)),
        }
    }

    pub fn boundary_values(&self, grid: &Grid, c: f64, ramp: Ramp) -> (f64, f64) {
        match self.kind {
            ClosureKind::DirichletZero => (0.0, 0.0),
            ClosureKind::DirichletAsymptotic => (self.left_state(grid.x_min(), c, ramp), 0.0),
        }
    }

    /// Relative tolerance for `|u(x_min) - sqrt(-x_min)| / sqrt(-x_min)` on the linear ramp.
    pub fn left_tolerance(x_min: f64, c: f64) -> f64 {
        let s = -x_min;
        2.0 * (c.abs() / (2.0 * math::SQRT_2 * s * s)).max(1.0 / (8.0 * s * s * s))
    }
}

/// One computed stationary front.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontProfile {
    pub c: f64,
    pub ramp: Ramp,
    pub grid: Grid,
    pub u: Vec<f64>,
    pub residual_norm: f64,
    pub converged: bool,
    pub alpha_plus: Option<f64>,
    pub alpha_minus: Option<f64>,
}

impl FrontProfile {
    pub fn new(c: f64, grid: Grid, u: Vec<f64>) -> Result<Self> {
        grid.check_len(u.len())?;
        Ok(FrontProfile {
            c,
            ramp: Ramp::Linear,
            grid,
            u,
            residual_norm: f64::INFINITY,
            converged: false,
            alpha_plus: None,
            alpha_minus: None,
        })
    }

    pub fn from_fn(c: f64, grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        let u = grid.nodes().map(f).collect();
        FrontProfile::new(c, grid, u).expect("length matches by construction")
    }

    pub fn with_ramp(mut self, ramp: Ramp) -> Self {
        self.ramp = ramp;
        self
    }

    /// Smooth decreasing ramp `sqrt((sqrt(x²+1) - x)/2) (1 - tanh x)/2`, which behaves like
    /// `sqrt(-x)` on the left and vanishes on the right.
    pub fn ramp_guess(c: f64, grid: Grid) -> Self {
        FrontProfile::from_fn(c, grid, |x| {
            math::sqrt(0.5 * (math::sqrt(x * x + 1.0) - x)) * 0.5 * (1.0 - math::tanh(x))
        })
    }

    /// Profile on the default domain for `c` seeded with [`FrontProfile::ramp_guess`].
    pub fn default_guess(c: f64) -> Result<Self> {
        Ok(FrontProfile::ramp_guess(c, default_grid(c)?))
    }

    pub fn x(&self, i: usize) -> f64 {
        self.grid.x(i)
    }

    /// Cubic interpolation at `x` (inside the grid).
    pub fn value_at(&self, x: f64) -> f64 {
        crate::interp::cubic(&self.grid, &self.u, x)
    }

    pub fn u_at_zero(&self) -> Option<f64> {
        self.grid.contains(0.0).then(|| self.value_at(0.0))
    }
}

/// Default computational domain for `c`.
///
/// `c >= 0`: `[-max(25, c²/4 + 30), max(15, sqrt(c) + 15)]`.
/// `c < 0`: the left end moves out to `-sqrt(50|c|)` so that `|c|/x²` stays small at the
/// boundary, and the right end covers the Gaussian spill-over of the erf profile down to
/// about 1e-8.
pub fn default_domain(c: f64) -> (f64, f64) {
    if c >= 0.0 {
        (-(25.0f64.max(0.25 * c * c + 30.0)), 15.0f64.max(math::sqrt(c) + 15.0))
    } else {
        let m = -c;
        let u0 = math::powf(m / math::PI, 0.25);
        let spill = if u0 > 1e-8 {
            math::sqrt(2.0 * m * math::ln(u0 / 1e-8))
        } else {
            0.0
        };
        (
            -(25.0f64.max(math::sqrt(50.0 * m))),
            15.0f64.max(math::sqrt(m) + 15.0).max(spill),
        )
    }
}

pub fn default_grid(c: f64) -> Result<Grid> {
    let (a, b) = default_domain(c);
    Grid::with_max_spacing(a, b, DEFAULT_SPACING)
}

/// Rough interface location used for domain checks: `-c²/4` for `c > 0`, the erf-profile
/// level-0.1 crossing for `c < 0`.
pub fn interface_estimate(c: f64) -> f64 {
    if c > 0.0 {
        -0.25 * c * c
    } else if c < 0.0 {
        asymptotics::erf_profile_level_crossing(c, 0.1)
            .ok()
            .flatten()
            .unwrap_or(0.0)
    } else {
        0.0
    }
}

/// Minimum distance between the interface estimate and either boundary.
pub const DOMAIN_MARGIN: f64 = 10.0;

/// Checks that the interface region lies at least [`DOMAIN_MARGIN`] inside the grid.
pub fn check_domain(grid: &Grid, c: f64) -> Result<()> {
    let est = interface_estimate(c);
    if grid.x_min() > est.min(0.0) - DOMAIN_MARGIN {
        return Err(Error::DomainViolation {
            what: "left margin",
            value: grid.x_min(),
        });
    }
    if grid.x_max() < est.max(0.0) + DOMAIN_MARGIN {
        return Err(Error::DomainViolation {
            what: "right margin",
            value: grid.x_max(),
        });
    }
    Ok(())
}

/// Cached operators for one grid and drift.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub grid: Grid,
    pub c: f64,
    pub ramp: Ramp,
    pub d2: DiffOperator,
    pub d1: DiffOperator,
    ramp_values: Vec<f64>,
}

impl Discretization {
    pub fn new(grid: Grid, c: f64, ramp: Ramp) -> Self {
        let sign = if c > 0.0 {
            1
        } else if c < 0.0 {
            -1
        } else {
            0
        };
        Discretization {
            grid,
            c,
            ramp,
            d2: DiffOperator::second(&grid),
            d1: DiffOperator::first(&grid, sign),
            ramp_values: grid.nodes().map(|x| ramp.value(x)).collect(),
        }
    }

    pub fn ramp_values(&self) -> &[f64] {
        &self.ramp_values
    }

    /// Linear part `D2 + c D1 - diag(r(x))` on interior rows; boundary rows are left empty.
    pub fn linear_operator(&self) -> BandedMatrix {
        let n = self.grid.len();
        let mut m = BandedMatrix::zeros(n, 4, 4);
        self.d2.add_to(&mut m, 1.0);
        if self.c != 0.0 {
            self.d1.add_to(&mut m, self.c);
        }
        for i in 1..n - 1 {
            m.add(i, i, -self.ramp_values[i]);
        }
        m
    }

    /// Interior value `u'' + c u' - r u - u³` at node `i`.
    #[inline]
    pub fn interior(&self, u: &[f64], i: usize) -> f64 {
        let ui = u[i];
        let mut f = self.d2.at(u, i) - self.ramp_values[i] * ui - ui * ui * ui;
        if self.c != 0.0 {
            f += self.c * self.d1.at(u, i);
        }
        f
    }

    pub fn residual_into(&self, u: &[f64], bc: &BoundaryClosure, out: &mut [f64]) -> Result<()> {
        let n = self.grid.len();
        self.grid.check_len(u.len())?;
        if let Some(index) = u.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        let (left, right) = bc.boundary_values(&self.grid, self.c, self.ramp);
        out[0] = u[0] - left;
        out[n - 1] = u[n - 1] - right;
        for (i, o) in out.iter_mut().enumerate().take(n - 1).skip(1) {
            *o = self.interior(u, i);
        }
        Ok(())
    }

    pub fn residual(&self, u: &[f64], bc: &BoundaryClosure) -> Result<Vec<f64>> {
        let mut out = alloc::vec![0.0; self.grid.len()];
        self.residual_into(u, bc, &mut out)?;
        Ok(out)
    }

    pub fn jacobian(&self, u: &[f64]) -> Result<BandedMatrix> {
        self.grid.check_len(u.len())?;
        if let Some(index) = u.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        let n = self.grid.len();
        let mut m = self.linear_operator();
        for i in 1..n - 1 {
            m.add(i, i, -3.0 * u[i] * u[i]);
        }
        m.set_identity_row(0);
        m.set_identity_row(n - 1);
        Ok(m)
    }
}

/// Discrete residual of `p`: interior rows carry the equation, the two end rows the closure.
pub fn residual(p: &FrontProfile, bc: &BoundaryClosure) -> Result<Vec<f64>> {
    Discretization::new(p.grid, p.c, p.ramp).residual(&p.u, bc)
}

/// Jacobian of [`residual`]: `D2 + c D1 - diag(r(x) + 3u²)` inside, identity rows at the ends.
pub fn jacobian(p: &FrontProfile, _bc: &BoundaryClosure) -> Result<BandedMatrix> {
    Discretization::new(p.grid, p.c, p.ramp).jacobian(&p.u)
}

pub fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Least-squares tail fits of a converged profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailFit {
    pub alpha_plus: f64,
    pub alpha_minus: f64,
    pub right_window: (f64, f64),
    pub left_window: (f64, f64),
    /// Max deviation of `ln u - shape` from its mean over the right window.
    pub right_deviation: f64,
    /// Regression slope of `ln u` over the right window.
    pub right_log_slope: f64,
    /// Regression slope of the predicted log-shape over the same nodes.
    pub predicted_log_slope: f64,
    /// Max residual of the linear fit for `α₋`.
    pub left_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RightTailFit {
    pub alpha_plus: f64,
    pub deviation: f64,
    pub log_slope: f64,
    pub predicted_log_slope: f64,
}

const UNDERFLOW_GUARD: f64 = 1e-300;

fn window_indices(grid: &Grid, a: f64, b: f64) -> core::ops::RangeInclusive<usize> {
    let lo = libm::ceil((a - grid.x_min()) / grid.h()).max(0.0) as usize;
    let hi = (libm::floor((b - grid.x_min()) / grid.h()) as usize).min(grid.len() - 2);
    lo..=hi
}

fn regression_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Fits `α₊` from `ln u - right_log_shape` over `[a, b]`.
pub fn fit_right_tail(p: &FrontProfile, a: f64, b: f64) -> Result<RightTailFit> {
    if !(a > (-0.25 * p.c * p.c).max(0.0) + 1.0) || !(b > a) {
        return Err(Error::DomainViolation {
            what: "right tail window",
            value: a,
        });
    }
    let idx = window_indices(&p.grid, a, b);
    let mut xs = Vec::new();
    let mut logs = Vec::new();
    let mut shapes = Vec::new();
    for i in idx {
        let (x, u) = (p.x(i), p.u[i]);
        if !(u > UNDERFLOW_GUARD) {
            return Err(Error::TailUnderflow);
        }
        xs.push(x);
        logs.push(math::ln(u));
        shapes.push(asymptotics::right_log_shape(x, p.c));
    }
    if xs.len() < 3 {
        return Err(Error::InvalidArgument("tail window holds fewer than 3 nodes"));
    }
    let diffs: Vec<f64> = logs.iter().zip(&shapes).map(|(l, s)| l - s).collect();
    let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
    let deviation = diffs.iter().fold(0.0f64, |m, d| m.max((d - mean).abs()));
    Ok(RightTailFit {
        alpha_plus: math::exp(mean),
        deviation,
        log_slope: regression_slope(&xs, &logs),
        predicted_log_slope: regression_slope(&xs, &shapes),
    })
}

/// Fits `α₋` by linear least squares of `u/sqrt(-x) - 1 - algebraic` against the
/// exponential shape over `[a, b]`. Returns `(α₋, max residual)`.
pub fn fit_left_tail(p: &FrontProfile, a: f64, b: f64, order: u8) -> Result<(f64, f64)> {
    if !(b < -2.0) || !(b > a) {
        return Err(Error::DomainViolation {
            what: "left tail window",
            value: b,
        });
    }
    let mut num = 0.0;
    let mut den = 0.0;
    let mut pairs = Vec::new();
    for i in window_indices(&p.grid, a, b) {
        let x = p.x(i);
        let r = p.u[i] / math::sqrt(-x) - 1.0 - asymptotics::left_algebraic(x, p.c, order);
        let e = asymptotics::left_exponential_shape(x, p.c);
        if !(e > UNDERFLOW_GUARD) || !e.is_finite() {
            return Err(Error::TailUnderflow);
        }
        num += r * e;
        den += e * e;
        pairs.push((r, e));
    }
    if pairs.len() < 3 {
        return Err(Error::InvalidArgument("tail window holds fewer than 3 nodes"));
    }
    let alpha = num / den;
    let residual = pairs.iter().fold(0.0f64, |m, (r, e)| m.max((r - alpha * e).abs()));
    Ok((alpha, residual))
}

/// Fits both tail coefficients on default windows placed around the level-0.1 front:
/// the right window is `[max(x_δ + 3, max(0, -c²/4) + 2)]` plus 4 units, the left window
/// the 3 units ending at `min(-2, x_δ - 2)`.
pub fn fit_tail_coefficients(p: &FrontProfile) -> Result<TailFit> {
    let x_delta = crate::diagnostics::front_position(p, 0.1)?.x;
    let ra = (x_delta + 3.0).max((-0.25 * p.c * p.c).max(0.0) + 2.0);
    let rb = (ra + 4.0).min(p.grid.x_max() - 2.0);
    let right = fit_right_tail(p, ra, rb)?;
    let lb = (-2.5f64).min(x_delta - 2.0);
    let la = (lb - 3.0).max(p.grid.x_min() + 1.0);
    let (alpha_minus, left_residual) = fit_left_tail(p, la, lb, 1)?;
    Ok(TailFit {
        alpha_plus: right.alpha_plus,
        alpha_minus,
        right_window: (ra, rb),
        left_window: (la, lb),
        right_deviation: right.deviation,
        right_log_slope: right.log_slope,
        predicted_log_slope: right.predicted_log_slope,
        left_residual,
    })
}
