//! Leading eigenvalues of the linearization about a front.
//!
//! The linearization `u'' + c u' - x u - 3u₀² u` is conjugated by `e^{cx/2}` to the
//! self-adjoint `∂ₓₓ - V`, `V = x + c²/4 + 3u₀²`, which has the same spectrum. The weight
//! itself is never formed. `∂ₓₓ` is discretized by the 3-point stencil on the interior
//! nodes with Dirichlet truncation, giving a symmetric tridiagonal matrix whose top
//! eigenvalues are found by Sturm-sequence bisection.

use alloc::vec::Vec;

use crate::{
    bvp::FrontProfile,
    error::{Error, Result},
    grid::Grid,
    math,
};

pub const MAX_EIGENVALUES: usize = 10;
/// Relative Rayleigh residual accepted for the ground state.
pub const RAYLEIGH_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub c: f64,
    /// Largest eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    /// Eigenvector of `eigenvalues[0]` on all grid nodes (zero at the ends), scaled so
    /// that its largest-magnitude entry is `+1`.
    pub ground_state: Vec<f64>,
    pub potential_min: f64,
    pub potential_argmin: f64,
    /// `‖T v - λ₀ v‖∞ / (‖T‖∞ ‖v‖∞)`.
    pub rayleigh_residual: f64,
}

impl SpectrumReport {
    pub fn lambda0(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Most negative entry of the normalized ground state.
    pub fn ground_state_min(&self) -> f64 {
        self.ground_state.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn ground_state_sign_definite(&self, tol: f64) -> bool {
        self.ground_state_min() >= -tol
    }
}

/// `V_i = x_i + c²/4 + 3u_i²`.
pub fn build_potential(p: &FrontProfile) -> Vec<f64> {
    let q = 0.25 * p.c * p.c;
    p.grid
        .nodes()
        .zip(&p.u)
        .map(|(x, &u)| x + q + 3.0 * u * u)
        .collect()
}

/// Symmetric tridiagonal `∂ₓₓ - V` on the interior nodes: diagonal entries and the constant
/// off-diagonal `1/h²`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: f64,
}

impl Tridiagonal {
    pub fn schrodinger(h: f64, v_interior: &[f64]) -> Self {
        let e = 1.0 / (h * h);
        Tridiagonal {
            diag: v_interior.iter().map(|v| -2.0 * e - v).collect(),
            off: e,
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn norm_inf(&self) -> f64 {
        self.diag
            .iter()
            .fold(0.0f64, |m, d| m.max(d.abs() + 2.0 * self.off.abs()))
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s += self.off * v[i - 1];
                }
                if i + 1 < n {
                    s += self.off * v[i + 1];
                }
                s
            })
            .collect()
    }

    /// Number of eigenvalues strictly below `lambda` (Sturm count of `T - λ` pivots).
    pub fn count_below(&self, lambda: f64) -> usize {
        let e2 = self.off * self.off;
        let tiny = f64::MIN_POSITIVE / f64::EPSILON;
        let mut count = 0;
        let mut d = 1.0;
        for (i, &a) in self.diag.iter().enumerate() {
            d = if i == 0 { a - lambda } else { a - lambda - e2 / d };
            if d == 0.0 {
                d = -tiny;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let r = 2.0 * self.off.abs();
        let lo = self.diag.iter().copied().fold(f64::INFINITY, f64::min) - r;
        let hi = self.diag.iter().copied().fold(f64::NEG_INFINITY, f64::max) + r;
        (lo, hi)
    }

    /// `j`-th largest eigenvalue (`j = 0` is the top) by bisection.
    pub fn eigenvalue_from_top(&self, j: usize) -> f64 {
        let m = self.len();
        let (mut lo, mut hi) = self.gershgorin();
        // want the smallest λ with #(eigenvalues ≥ λ) ≤ j, i.e. count_below(λ) ≥ m - j
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) >= m - j {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Solves `(T - σ) y = b` by the Thomas algorithm (no pivoting; `T - σ` definite).
    fn shifted_solve(&self, sigma: f64, b: &mut [f64]) {
        let n = self.len();
        let e = self.off;
        let mut d = Vec::with_capacity(n);
        d.push(self.diag[0] - sigma);
        for i in 1..n {
            let l = e / d[i - 1];
            d.push(self.diag[i] - sigma - l * e);
            b[i] -= l * b[i - 1];
        }
        b[n - 1] /= d[n - 1];
        for i in (0..n - 1).rev() {
            b[i] = (b[i] - e * b[i + 1]) / d[i];
        }
    }

    /// Eigenvector for the top eigenvalue `lambda0` by inverse iteration shifted just above
    /// it. Returns the vector (max entry +1) and its relative Rayleigh residual.
    pub fn top_eigenvector(&self, lambda0: f64) -> Result<(Vec<f64>, f64)> {
        let n = self.len();
        let scale = self.norm_inf().max(1.0);
        let sigma = lambda0 + 1e-9 * scale;
        let mut v = alloc::vec![1.0; n];
        let mut residual = f64::INFINITY;
        for _ in 0..20 {
            self.shifted_solve(sigma, &mut v);
            normalize(&mut v);
            let tv = self.matvec(&v);
            residual = tv
                .iter()
                .zip(&v)
                .fold(0.0f64, |m, (t, x)| m.max((t - lambda0 * x).abs()))
                / scale;
            if residual < RAYLEIGH_TOL {
                return Ok((v, residual));
            }
        }
        Err(Error::EigenNoConvergence { residual })
    }
}

fn normalize(v: &mut [f64]) {
    let (mut big, mut sign) = (0.0f64, 1.0);
    for &x in v.iter() {
        if x.abs() > big {
            big = x.abs();
            sign = if x < 0.0 { -1.0 } else { 1.0 };
        }
    }
    if big > 0.0 {
        let s = sign / big;
        for x in v.iter_mut() {
            *x *= s;
        }
    }
}

/// Top `k` eigenvalues of `∂ₓₓ - V` on `grid` with Dirichlet ends, plus the ground state.
pub fn schrodinger_spectrum(grid: &Grid, v: &[f64], k: usize) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    grid.check_len(v.len())?;
    if k == 0 || k > MAX_EIGENVALUES {
        return Err(Error::InvalidArgument("k must lie in 1..=10"));
    }
    let n = grid.len();
    let t = Tridiagonal::schrodinger(grid.h(), &v[1..n - 1]);
    let eigenvalues: Vec<f64> = (0..k).map(|j| t.eigenvalue_from_top(j)).collect();
    let (phi, residual) = t.top_eigenvector(eigenvalues[0])?;
    let mut ground = alloc::vec![0.0; n];
    ground[1..n - 1].copy_from_slice(&phi);
    Ok((eigenvalues, ground, residual))
}

/// Leading `k ≤ 10` eigenvalues of the linearization about `p`.
pub fn leading_eigenvalues(p: &FrontProfile, k: usize) -> Result<SpectrumReport> {
    if let Some(index) = p.u.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let v = build_potential(p);
    let (eigenvalues, ground_state, rayleigh_residual) = schrodinger_spectrum(&p.grid, &v, k)?;
    let (imin, vmin) = v[1..v.len() - 1]
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bv), (i, &x)| if x < bv { (i + 1, x) } else { (bi, bv) });
    Ok(SpectrumReport {
        c: p.c,
        eigenvalues,
        ground_state,
        potential_min: vmin,
        potential_argmin: p.x(imin),
        rayleigh_residual,
    })
}

/// Measured order `log2(|λ(h) - λ(h/2)| / |λ(h/2) - λ(h/4)|)`.
pub fn refinement_order(l_h: f64, l_h2: f64, l_h4: f64) -> f64 {
    math::ln((l_h - l_h2).abs() / (l_h2 - l_h4).abs()) / math::ln(2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        let g = Grid::new(-20.0, 20.0, 4001).unwrap();
        let v: Vec<f64> = g.nodes().map(|x| x * x).collect();
        let (ev, ground, res) = schrodinger_spectrum(&g, &v, 5).unwrap();
        for (j, l) in ev.iter().enumerate() {
            assert!((l + (2 * j + 1) as f64).abs() < 1e-3, "λ_{} = {}", j, l);
        }
        assert!(res < RAYLEIGH_TOL);
        assert!(ground.iter().all(|&x| x >= -1e-12));
        // ground state is the Gaussian e^{-x²/2}
        for (x, phi) in g.nodes().zip(&ground).step_by(200) {
            assert!((phi - libm::exp(-0.5 * x * x)).abs() < 1e-4);
        }
    }

    #[test]
    fn sturm_count_matches_dense_small_case() {
        // eigenvalues of tridiag(1, -2, 1)/h² on m interior nodes: -(4/h²) sin²(jπ/(2(m+1)))
        let m = 12;
        let h = 0.1;
        let t = Tridiagonal::schrodinger(h, &alloc::vec![0.0; m]);
        for j in 0..m {
            let exact = -4.0 / (h * h)
                * libm::pow(libm::sin((j + 1) as f64 * math::PI / (2.0 * (m + 1) as f64)), 2.0);
            assert!((t.eigenvalue_from_top(j) - exact).abs() < 1e-9);
        }
    }

    #[test]
    fn potential_of_zero_profile() {
        let g = Grid::new(-5.0, 5.0, 101).unwrap();
        let p = FrontProfile::from_fn(2.0, g, |_| 0.0);
        let v = build_potential(&p);
        for (x, vi) in g.nodes().zip(v) {
            assert_eq!(vi, x + 1.0);
        }
    }

    #[test]
    fn rejects_too_many_eigenvalues() {
        let g = Grid::new(-5.0, 5.0, 101).unwrap();
        let v = alloc::vec![0.0; 101];
        assert!(schrodinger_spectrum(&g, &v, 11).is_err());
    }
}
