//! Piecewise-cubic (4-point Lagrange) interpolation of nodal data on a uniform grid.

use crate::grid::Grid;

/// Interpolates `u` at `x`. Uses the four nodes around `x`, shifted inward at the ends.
/// `x` outside the grid is extrapolated from the end cells.
pub fn cubic(grid: &Grid, u: &[f64], x: f64) -> f64 {
    let n = grid.len();
    let i = grid.cell(x);
    let start = i.saturating_sub(1).min(n - 4);
    let t = (x - grid.x(start)) / grid.h();
    let mut acc = 0.0;
    for k in 0..4 {
        let mut l = 1.0;
        for m in 0..4 {
            if m != k {
                l *= (t - m as f64) / (k as f64 - m as f64);
            }
        }
        acc += l * u[start + k];
    }
    acc
}

/// Linear interpolation, clamped to the end values outside the grid.
pub fn linear(grid: &Grid, u: &[f64], x: f64) -> f64 {
    if x <= grid.x_min() {
        return u[0];
    }
    if x >= grid.x_max() {
        return u[grid.len() - 1];
    }
    let i = grid.cell(x);
    let t = (x - grid.x(i)) / grid.h();
    u[i] + t * (u[i + 1] - u[i])
}
