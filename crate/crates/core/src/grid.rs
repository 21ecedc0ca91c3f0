//! Uniform mesh and fourth-order finite-difference operators.
//!
//! Interior second derivatives use the centered 5-point stencil; the node next to each
//! boundary uses a 6-point one-sided stencil of the same order. First derivatives use a
//! 5-point stencil shifted one node toward the upwind side (sign of `c`), or centered
//! when the sign is zero. Boundary nodes are left to the closure.

use alloc::vec::Vec;

use crate::{
    banded::BandedMatrix,
    error::{Error, Result},
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n: usize,
    h: f64,
}

impl Grid {
    pub const MIN_NODES: usize = 9;

    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !x_min.is_finite() || !x_max.is_finite() || x_max <= x_min {
            return Err(Error::InvalidGrid("need finite x_min < x_max"));
        }
        if n < Self::MIN_NODES {
            return Err(Error::InvalidGrid("need at least 9 nodes"));
        }
        let h = (x_max - x_min) / (n - 1) as f64;
        Ok(Grid { x_min, x_max, n, h })
    }

    /// Grid on `[x_min, x_max]` with the fewest nodes giving spacing `<= h_max`.
    pub fn with_max_spacing(x_min: f64, x_max: f64, h_max: f64) -> Result<Self> {
        if !(h_max > 0.0) {
            return Err(Error::InvalidGrid("spacing must be positive"));
        }
        let cells = libm::ceil((x_max - x_min) / h_max - 1e-9);
        if !(cells >= 1.0) {
            return Err(Error::InvalidGrid("need finite x_min < x_max"));
        }
        Grid::new(x_min, x_max, (cells as usize + 1).max(Self::MIN_NODES))
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.h
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.x(i))
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x_min && x <= self.x_max
    }

    /// Index `i` with `x_i <= x < x_{i+1}`, clamped to the last cell.
    pub fn cell(&self, x: f64) -> usize {
        let t = (x - self.x_min) / self.h;
        if t <= 0.0 {
            0
        } else {
            (libm::floor(t) as usize).min(self.n - 2)
        }
    }

    /// Same interval and twice the resolution.
    pub fn refined(&self) -> Grid {
        Grid::new(self.x_min, self.x_max, 2 * self.n - 1).expect("refinement of a valid grid")
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len == self.n {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                expected: self.n,
                found: len,
            })
        }
    }
}

/// Weights on one node window for one derivative order.
#[derive(Debug, Clone, Copy)]
pub struct Stencil {
    pub first: usize,
    pub len: usize,
    pub weights: [f64; 6],
}

/// A differentiation operator acting on interior nodes `1..n-1`.
#[derive(Debug, Clone)]
pub struct DiffOperator {
    n: usize,
    rows: Vec<Stencil>,
}

impl DiffOperator {
    /// Fourth-order second derivative.
    pub fn second(grid: &Grid) -> Self {
        let n = grid.len();
        let scale = 1.0 / (grid.h() * grid.h());
        let centered = scaled(&fd_weights(&[-2, -1, 0, 1, 2], 2), scale);
        let left = scaled(&fd_weights(&[-1, 0, 1, 2, 3, 4], 2), scale);
        let right = scaled(&fd_weights(&[-4, -3, -2, -1, 0, 1], 2), scale);
        let rows = (1..n - 1)
            .map(|i| {
                if i == 1 {
                    Stencil::from_slice(0, &left)
                } else if i == n - 2 {
                    Stencil::from_slice(n - 6, &right)
                } else {
                    Stencil::from_slice(i - 2, &centered[..5])
                }
            })
            .collect();
        DiffOperator { n, rows }
    }

    /// Fourth-order first derivative biased toward `upwind_sign`: offsets `-1..=3` for a
    /// positive sign, `-3..=1` for a negative sign and `-2..=2` for zero. Windows that would
    /// leave the grid are shifted back inside it.
    pub fn first(grid: &Grid, upwind_sign: i8) -> Self {
        let n = grid.len();
        let scale = 1.0 / grid.h();
        let lo: isize = match upwind_sign.signum() {
            1 => -1,
            -1 => -3,
            _ => -2,
        };
        let mut cache: [Option<[f64; 6]>; 5] = [None; 5];
        let rows = (1..n - 1)
            .map(|i| {
                let start = (i as isize + lo).clamp(0, n as isize - 5) as usize;
                let shift = i - start;
                let w = cache[shift].get_or_insert_with(|| {
                    let offs: [i32; 5] = core::array::from_fn(|k| k as i32 - shift as i32);
                    scaled(&fd_weights(&offs, 1), scale)
                });
                Stencil::from_slice(start, &w[..5])
            })
            .collect();
        DiffOperator { n, rows }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn stencil(&self, i: usize) -> &Stencil {
        &self.rows[i - 1]
    }

    /// Value of the derivative at interior node `i`.
    ///
    /// Evaluated as `Σ w_j (u_j - u_i)`, exact for constants and free of the
    /// cancellation that the plain sum suffers when `|u| >> h |u'|`.
    #[inline]
    pub fn at(&self, u: &[f64], i: usize) -> f64 {
        let s = &self.rows[i - 1];
        let ui = u[i];
        s.weights[..s.len]
            .iter()
            .enumerate()
            .map(|(k, w)| w * (u[s.first + k] - ui))
            .sum()
    }

    /// Applies the operator; boundary entries of the output are zero.
    pub fn apply(&self, u: &[f64]) -> Result<Vec<f64>> {
        if u.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                found: u.len(),
            });
        }
        let mut out = alloc::vec![0.0; self.n];
        for (i, o) in out.iter_mut().enumerate().take(self.n - 1).skip(1) {
            *o = self.at(u, i);
        }
        Ok(out)
    }

    /// Adds `scale * D` to the interior rows of `m`.
    pub fn add_to(&self, m: &mut BandedMatrix, scale: f64) {
        for (r, s) in self.rows.iter().enumerate() {
            let i = r + 1;
            for (k, w) in s.weights[..s.len].iter().enumerate() {
                m.add(i, s.first + k, scale * w);
            }
        }
    }
}

impl Stencil {
    fn from_slice(first: usize, w: &[f64]) -> Self {
        let mut weights = [0.0; 6];
        weights[..w.len()].copy_from_slice(w);
        Stencil {
            first,
            len: w.len(),
            weights,
        }
    }
}

fn scaled(w: &[f64; 6], s: f64) -> [f64; 6] {
    w.map(|v| v * s)
}

/// Fornberg's recursion for the weights of the `order`-th derivative at offset 0
/// on integer node offsets. At most 6 nodes.
pub fn fd_weights(offsets: &[i32], order: usize) -> [f64; 6] {
    let m = offsets.len();
    debug_assert!(m <= 6 && order < m);
    let x: [f64; 6] = core::array::from_fn(|k| offsets.get(k).copied().unwrap_or(0) as f64);
    // c[j][d]: weight of node j for derivative d
    let mut c = [[0.0f64; 3]; 6];
    let mut c1 = 1.0;
    let mut c4 = x[0];
    c[0][0] = 1.0;
    for i in 1..m {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i];
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    core::array::from_fn(|j| if j < m { c[j][order] } else { 0.0 })
}

/// Second derivative of `u` at interior nodes (boundary entries are zero).
pub fn d2_apply(grid: &Grid, u: &[f64]) -> Result<Vec<f64>> {
    grid.check_len(u.len())?;
    DiffOperator::second(grid).apply(u)
}

/// First derivative of `u` at interior nodes with the given upwind bias.
pub fn d1_apply(grid: &Grid, u: &[f64], upwind_sign: i8) -> Result<Vec<f64>> {
    grid.check_len(u.len())?;
    DiffOperator::first(grid, upwind_sign).apply(u)
}
