//! Time stepping and the linearized spectrum.

use quenchfront_core::{
    evolve::{self, EvolveConfig, Scheme, Stepper},
    newton::{self, SolverConfig},
    spectrum, BoundaryClosure, FrontProfile, Grid, Ramp,
};

fn front(c: f64) -> FrontProfile {
    newton::solve_default(c, &SolverConfig::default()).unwrap().0
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

#[test]
fn converged_front_is_stationary() {
    let p = front(1.0);
    for scheme in [Scheme::ImexEuler, Scheme::ImexCn] {
        let mut cfg = EvolveConfig::new(Ramp::Linear, 1.0);
        cfg.scheme = scheme;
        let n = p.u.len();
        let mut s = Stepper::new(p.grid, cfg, (p.u[0], p.u[n - 1])).unwrap();
        let mut u = p.u.clone();
        for _ in 0..500 {
            u = s.step(&u).unwrap();
        }
        assert!(max_diff(&u, &p.u) < 1e-9, "{scheme:?}: {}", max_diff(&u, &p.u));
    }
}

#[test]
fn advection_diffusion_matches_heat_kernel() {
    // with ramp and cubic switched off, u_t = u_xx + c u_x moves and spreads a Gaussian exactly
    let c = 1.5;
    let g = Grid::new(-20.0, 20.0, 2001).unwrap();
    let exact = |x: f64, t: f64| (-(x + c * t).powi(2) / (1.0 + 4.0 * t)).exp() / (1.0 + 4.0 * t).sqrt();
    let start = FrontProfile::from_fn(c, g, |x| exact(x, 0.0));
    for (scheme, tol) in [(Scheme::ImexEuler, 5e-3), (Scheme::ImexCn, 2e-5)] {
        let mut cfg = EvolveConfig::new(Ramp::Linear, c);
        cfg.scheme = scheme;
        cfg.t_end = 1.0;
        cfg.ramp_term = false;
        cfg.cubic_term = false;
        let r = evolve::evolve(&start, &cfg, None).unwrap();
        let want: Vec<f64> = g.nodes().map(|x| exact(x, 1.0)).collect();
        let err = max_diff(&r.final_profile.u, &want);
        assert!(err < tol, "{scheme:?}: {err}");
    }
}

#[test]
fn comparison_principle_keeps_order() {
    let p = front(0.0);
    let cfg = EvolveConfig::new(Ramp::Linear, 0.0);
    let n = p.u.len();
    let mut above = p.u.clone();
    let mut below = p.u.clone();
    for i in 1..n - 1 {
        let bump = 0.2 * (-(p.x(i) + 1.0).powi(2)).exp();
        above[i] += bump;
        below[i] -= bump.min(p.u[i]);
    }
    let mut s = Stepper::new(p.grid, cfg, (p.u[0], p.u[n - 1])).unwrap();
    for _ in 0..400 {
        above = s.step(&above).unwrap();
        below = s.step(&below).unwrap();
        for i in 0..n {
            assert!(above[i] >= p.u[i] - 1e-12 && below[i] <= p.u[i] + 1e-12);
        }
    }
}

#[test]
fn decay_rate_matches_leading_eigenvalue_with_cn() {
    let p = front(-1.0);
    let l0 = spectrum::leading_eigenvalues(&p, 1).unwrap().lambda0();
    let mut cfg = EvolveConfig::new(Ramp::Linear, -1.0);
    cfg.scheme = Scheme::ImexCn;
    cfg.stop_below = 1e-12;
    let d = evolve::perturbation_decay(&p, 1e-3, &cfg).unwrap();
    assert!((d.measured_rate / l0 - 1.0).abs() < 0.02, "{} vs {l0}", d.measured_rate);
}

#[test]
fn tanh_steady_state_agrees_with_newton() {
    let eps = 1e-2;
    let inner = front(0.0);
    let (newton_front, _) = evolve::solve_tanh_front(eps, 0.0, &inner, &SolverConfig::default()).unwrap();
    let mut start = evolve::inner_scaled_profile(eps, 0.0, &inner, newton_front.grid);
    // the evolution keeps the initial end values, so pin them to the closure
    let n = start.u.len();
    let (left, right) = BoundaryClosure::default().boundary_values(&start.grid, 0.0, start.ramp);
    start.u[0] = left;
    start.u[n - 1] = right;
    let mut cfg = EvolveConfig::new(Ramp::Tanh { eps }, 0.0);
    cfg.dt = 0.05;
    cfg.t_end = 5000.0;
    let r = evolve::steady_state(&start, &cfg, 1e-10).unwrap();
    let gap = max_diff(&r.final_profile.u, &newton_front.u);
    assert!(gap < 1e-7, "gap {gap}");
}

#[test]
fn eigenvalue_refines_at_second_order() {
    let l: Vec<f64> = [0.1, 0.05, 0.025]
        .iter()
        .map(|&h| {
            let g = Grid::with_max_spacing(-25.0, 15.0, h).unwrap();
            let (p, _) = newton::solve(
                &FrontProfile::ramp_guess(0.0, g),
                &Default::default(),
                &SolverConfig::default(),
            )
            .unwrap();
            spectrum::leading_eigenvalues(&p, 1).unwrap().lambda0()
        })
        .collect();
    let order = spectrum::refinement_order(l[0], l[1], l[2]);
    assert!((1.8..=2.2).contains(&order), "order {order} from {l:?}");
}

#[test]
fn ground_state_is_positive_and_accurate() {
    for c in [-5.0, 0.0, 5.0] {
        let r = spectrum::leading_eigenvalues(&front(c), 3).unwrap();
        assert!(r.ground_state_sign_definite(1e-10));
        assert!(r.rayleigh_residual < spectrum::RAYLEIGH_TOL);
        assert!(r.eigenvalues.windows(2).all(|w| w[1] < w[0]));
        // V = x + c²/4 + 3u² is bounded below by its minimum, so λ₀ ≤ -min V
        assert!(r.lambda0() <= -r.potential_min);
    }
}
