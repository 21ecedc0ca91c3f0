//! Front descriptors: interface position, crossings of `sqrt(-x)`, admissibility.

use alloc::vec::Vec;

use crate::{
    bvp::{BoundaryClosure, FrontProfile},
    error::{Error, Result},
    interp, math,
};

/// Default interface level.
pub const DEFAULT_DELTA: f64 = 0.1;

/// Bisection tolerance for crossing points.
pub const ROOT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontPosition {
    pub x: f64,
    /// `h² |u''| / |u'|` at the bracketing cell.
    pub error_bound: f64,
}

/// `x_δ = sup{x : u(x) > δ}` by linear interpolation across the last node above `δ`.
pub fn front_position(p: &FrontProfile, delta: f64) -> Result<FrontPosition> {
    let u = &p.u;
    let n = u.len();
    let i = match u.iter().rposition(|&v| v > delta) {
        Some(i) if i + 1 < n => i,
        _ => return Err(Error::LevelOutOfRange { delta }),
    };
    let (a, b) = (u[i], u[i + 1]);
    let h = p.grid.h();
    let t = (a - delta) / (a - b);
    let x = p.x(i) + t * h;
    let slope = (b - a) / h;
    let j = i.clamp(1, n - 2);
    let curv = (u[j + 1] - 2.0 * u[j] + u[j - 1]) / (h * h);
    let error_bound = if slope != 0.0 {
        h * h * curv.abs() / slope.abs()
    } else {
        f64::INFINITY
    };
    Ok(FrontPosition { x, error_bound })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Crossings {
    /// Roots of `x u + u³` with `x < 0`, ascending.
    pub roots: Vec<f64>,
    /// `d/dx (x u + u³)` at each root.
    pub slopes: Vec<f64>,
    /// Whether `x u + u³ > 0` at every node with `x > 0` (holds whenever `u > 0` there).
    pub positive_right: bool,
}

fn g_at(p: &FrontProfile, x: f64) -> f64 {
    let u = interp::cubic(&p.grid, &p.u, x);
    u * (x + u * u)
}

// Sign of `x u + u³` computed factorwise, so that it survives when the product underflows
// (ahead of fast fronts `u` can be far below 1e-100).
fn g_sign(x: f64, u: f64) -> i8 {
    let su = sign(u);
    if x == 0.0 {
        su
    } else {
        su * sign(x + u * u)
    }
}

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Sign-change scan of `g = x u + u³` over nodes with `x < 0` (closed off by the value at
/// `x = 0`), each root refined by bisection on the cubic interpolant.
pub fn crossings(p: &FrontProfile) -> Crossings {
    let g = &p.grid;
    let mut pts: Vec<(f64, i8)> = g
        .nodes()
        .zip(&p.u)
        .take_while(|(x, _)| *x < 0.0)
        .map(|(x, &u)| (x, g_sign(x, u)))
        .collect();
    if g.contains(0.0) {
        pts.push((0.0, g_sign(0.0, interp::cubic(g, &p.u, 0.0))));
    }
    let sign_at = |x: f64| g_sign(x, interp::cubic(g, &p.u, x));
    let mut roots = Vec::new();
    let mut slopes = Vec::new();
    let h = g.h();
    for w in pts.windows(2) {
        let ((xa, sa), (xb, sb)) = (w[0], w[1]);
        if sa == 0 && xa > g.x_min() {
            roots.push(xa);
        } else if sa * sb < 0 {
            let (mut lo, mut hi) = (xa, xb);
            while hi - lo > ROOT_TOL {
                let mid = 0.5 * (lo + hi);
                if sign_at(mid) == sa {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        } else {
            continue;
        }
        let r = *roots.last().unwrap();
        let d = 0.25 * h;
        let a = (r - d).max(g.x_min());
        let b = (r + d).min(g.x_max());
        slopes.push((g_at(p, b) - g_at(p, a)) / (b - a));
    }
    let positive_right = g
        .nodes()
        .zip(&p.u)
        .filter(|(x, _)| *x > 0.0)
        .all(|(x, &u)| u <= 0.0 || g_sign(x, u) > 0);
    Crossings {
        roots,
        slopes,
        positive_right,
    }
}

/// Admissibility verdict; never fails.
#[derive(Debug, Clone, PartialEq)]
pub struct Admissibility {
    pub positive: bool,
    /// No increase anywhere and strict decrease (`∂ₓu < -1e-12`) on the interface region.
    pub decreasing: bool,
    /// Location of the first positivity or monotonicity violation.
    pub violation_at: Option<f64>,
    pub left_gap: f64,
    pub left_tolerance: f64,
    pub right_value: f64,
    pub max_slope: f64,
}

impl Admissibility {
    pub const RIGHT_TOL: f64 = 1e-8;
    pub const STRICT_SLOPE: f64 = -1e-12;
    /// Values above this level form the interface region for the strict-decrease test.
    pub const INTERFACE_LEVEL: f64 = 1e-6;

    pub fn left_ok(&self) -> bool {
        self.left_gap <= self.left_tolerance
    }

    pub fn right_ok(&self) -> bool {
        self.right_value.abs() < Self::RIGHT_TOL
    }

    pub fn is_admissible(&self) -> bool {
        self.positive && self.decreasing && self.left_ok() && self.right_ok()
    }
}

pub fn admissibility(p: &FrontProfile) -> Admissibility {
    let u = &p.u;
    let n = u.len();
    let h = p.grid.h();
    let mut violation_at = None;
    let mut positive = true;
    for i in 1..n - 1 {
        if !(u[i] > 0.0) {
            positive = false;
            violation_at.get_or_insert(p.x(i));
            break;
        }
    }
    let mut decreasing = true;
    let mut max_slope = f64::NEG_INFINITY;
    for i in 0..n - 1 {
        let s = (u[i + 1] - u[i]) / h;
        max_slope = max_slope.max(s);
        let interface = u[i].min(u[i + 1]) > Admissibility::INTERFACE_LEVEL;
        if s > 0.0 || (interface && s >= Admissibility::STRICT_SLOPE) {
            if decreasing {
                violation_at = Some(violation_at.map_or(p.x(i), |v: f64| v.min(p.x(i))));
            }
            decreasing = false;
        }
    }
    let left_tolerance;
    let left_gap;
    match p.ramp {
        crate::bvp::Ramp::Linear => {
            let xm = p.grid.x_min();
            let s = math::sqrt(-xm.min(0.0));
            left_gap = if s > 0.0 { (u[0] - s).abs() / s } else { f64::INFINITY };
            left_tolerance = BoundaryClosure::left_tolerance(xm, p.c);
        }
        crate::bvp::Ramp::Tanh { .. } => {
            let target = BoundaryClosure::default().left_state(p.grid.x_min(), p.c, p.ramp);
            left_gap = if target > 0.0 {
                (u[0] - target).abs() / target
            } else {
                f64::INFINITY
            };
            left_tolerance = 1e-8;
        }
    }
    Admissibility {
        positive,
        decreasing,
        violation_at,
        left_gap,
        left_tolerance,
        right_value: u[n - 1],
        max_slope,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrontDiagnostics {
    pub c: f64,
    pub delta: f64,
    pub x_delta: f64,
    pub x_delta_error: f64,
    pub crossing_points: Vec<f64>,
    pub monotone_x: bool,
    /// `max ∂ₓu` over the grid, negative for admissible fronts.
    pub min_slope_gap: f64,
    pub u_at_zero: f64,
    pub admissible: bool,
}

impl FrontDiagnostics {
    pub fn compute(p: &FrontProfile, delta: f64) -> Result<Self> {
        let pos = front_position(p, delta)?;
        let cr = crossings(p);
        let adm = admissibility(p);
        Ok(FrontDiagnostics {
            c: p.c,
            delta,
            x_delta: pos.x,
            x_delta_error: pos.error_bound,
            crossing_points: cr.roots,
            monotone_x: adm.decreasing,
            min_slope_gap: adm.max_slope,
            u_at_zero: p.u_at_zero().unwrap_or(f64::NAN),
            admissible: adm.is_admissible(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn exponential_level_crossing() {
        let g = Grid::new(0.0, 5.0, 5001).unwrap();
        let p = FrontProfile::from_fn(0.0, g, |x| libm::exp(-x));
        let pos = front_position(&p, libm::exp(-2.0)).unwrap();
        assert!((pos.x - 2.0).abs() < 1e-6);
        assert!(pos.error_bound < 1e-5);
        assert!(front_position(&p, 2.0).is_err());
    }

    #[test]
    fn zero_profile_not_admissible() {
        let g = Grid::new(-10.0, 10.0, 201).unwrap();
        let p = FrontProfile::from_fn(0.0, g, |_| 0.0);
        let a = admissibility(&p);
        assert!(!a.left_ok());
        assert!(!a.is_admissible());
    }

    #[test]
    fn bump_reported() {
        let g = Grid::new(-10.0, 10.0, 201).unwrap();
        let mut p = FrontProfile::ramp_guess(0.0, g);
        p.u[120] += 0.5;
        let a = admissibility(&p);
        assert!(!a.decreasing);
        let at = a.violation_at.unwrap();
        assert!((at - g.x(119)).abs() < 1e-12);
    }

    #[test]
    fn single_crossing_of_model_profile() {
        // sqrt(-x) minus a bump that lifts above the curve only near x = -1
        let g = Grid::new(-10.0, 5.0, 1501).unwrap();
        let p = FrontProfile::from_fn(0.0, g, |x| {
            if x < 0.0 {
                libm::sqrt(-x) * (1.0 - 0.1 * libm::tanh(-x - 1.0))
            } else {
                0.9 * libm::exp(-x)
            }
        });
        let cr = crossings(&p);
        assert_eq!(cr.roots.len(), 1);
        assert!((cr.roots[0] + 1.0).abs() < 1e-6);
        assert!(cr.positive_right);
    }
}
