//! The Newton front solver against a shooting oracle, grid refinement and the tail laws.

use quenchfront_core::{
    asymptotics, bvp,
    diagnostics,
    newton::{self, SolverConfig},
    BoundaryClosure, FrontProfile, Grid,
};

/// Asymptotic `Ai(x)` and `Ai'(x)` for large positive `x` (five terms).
fn airy_large(x: f64) -> (f64, f64) {
    const U: [f64; 5] = [1.0, 0.069_444_444_444_444_44, 0.037_133_487_654_320_99, 0.037_993_059_127_800_01, 0.057_649_190_412_669_4];
    const V: [f64; 5] = [1.0, -0.097_222_222_222_222_22, -0.043_885_030_864_197_53, -0.042_462_830_789_837_19, -0.062_662_163_249_207_2];
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let (mut su, mut sv, mut p) = (0.0, 0.0, 1.0);
    for k in 0..5 {
        su += U[k] * p;
        sv += V[k] * p;
        p *= -1.0 / zeta;
    }
    let base = (-zeta).exp() / (2.0 * std::f64::consts::PI.sqrt());
    (base * x.powf(-0.25) * su, -base * x.powf(0.25) * sv)
}

#[derive(Debug, PartialEq)]
enum Fate {
    Over,
    Under,
}

/// Integrates `u'' = -c u' + x u + u³` leftward from `x0` with RK4, starting on the decaying
/// linear solution `k e^{-cx/2} Ai(x + c²/4)`. Returns the fate and `u(0)`.
fn shoot(c: f64, k: f64, x0: f64, x_end: f64) -> (Fate, f64) {
    let z = x0 + 0.25 * c * c;
    let (ai, aip) = airy_large(z);
    let e = (-0.5 * c * x0).exp();
    let mut y = [k * e * ai, k * e * (aip - 0.5 * c * ai)];
    let f = |x: f64, y: [f64; 2]| [y[1], -c * y[1] + x * y[0] + y[0] * y[0] * y[0]];
    let h = -1e-3;
    let n = ((x0 - x_end) / 1e-3).round() as usize;
    let mut u0 = f64::NAN;
    for i in 0..n {
        let x = x0 + i as f64 * h;
        if x.abs() < 0.5e-3 {
            u0 = y[0];
        }
        let k1 = f(x, y);
        let k2 = f(x + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = f(x + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = f(x + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        for j in 0..2 {
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        let xn = x + h;
        if y[0] < 0.0 {
            return (Fate::Under, u0);
        }
        if y[0] > 2.0 * (-xn).max(1.0).sqrt() + 1.0 {
            return (Fate::Over, u0);
        }
    }
    let target = (-x_end).sqrt();
    (if y[0] > target { Fate::Over } else { Fate::Under }, u0)
}

fn shooting_u0(c: f64) -> (f64, f64) {
    let (mut lo, mut hi) = (0.5, 3.0);
    for _ in 0..60 {
        let m = 0.5 * (lo + hi);
        match shoot(c, m, 8.0, -8.0).0 {
            Fate::Over => hi = m,
            Fate::Under => lo = m,
        }
    }
    (0.5 * (lo + hi), shoot(c, lo, 8.0, -8.0).1)
}

#[test]
fn c0_matches_shooting_and_hastings_mcleod() {
    let (k, u0_shoot) = shooting_u0(0.0);
    // u'' = xu + u³ is sqrt(2) times the classical normalization, whose tail is Ai(x)
    assert!((k - std::f64::consts::SQRT_2).abs() < 1e-5, "k = {k}");
    let (p, _) = newton::solve_default(0.0, &SolverConfig::default()).unwrap();
    let u0 = p.u_at_zero().unwrap();
    assert!((u0 - u0_shoot).abs() < 1e-6, "{u0} vs {u0_shoot}");
    assert!((u0 - std::f64::consts::SQRT_2 * 0.367_061_551_548_1).abs() < 1e-6);
    let alpha = p.alpha_plus.unwrap();
    assert!((alpha / (1.0 / (2.0 * std::f64::consts::PI).sqrt()) - 1.0).abs() < 0.015, "alpha {alpha}");
}

#[test]
fn drift_matches_shooting() {
    for &c in &[-1.0, 1.0] {
        let (_, u0_shoot) = shooting_u0(c);
        let (p, _) = newton::solve_default(c, &SolverConfig::default()).unwrap();
        let u0 = p.u_at_zero().unwrap();
        assert!((u0 - u0_shoot).abs() < 1e-6, "c = {c}: {u0} vs {u0_shoot}");
    }
}

#[test]
fn u0_converges_at_fourth_order() {
    let cfg = SolverConfig {
        tol_residual: 1e-12,
        ..SolverConfig::default()
    };
    let vals: Vec<f64> = [0.2, 0.1, 0.05]
        .iter()
        .map(|&h| {
            let g = Grid::with_max_spacing(-25.0, 15.0, h).unwrap();
            let guess = FrontProfile::ramp_guess(0.5, g);
            newton::solve(&guess, &BoundaryClosure::default(), &cfg).unwrap().0.u_at_zero().unwrap()
        })
        .collect();
    let order = ((vals[0] - vals[1]) / (vals[1] - vals[2])).log2();
    assert!((3.5..=4.5).contains(&order), "order {order} from {vals:?}");
}

#[test]
fn newton_converges_quadratically_from_nearby_start() {
    let cfg = SolverConfig::default();
    let (p, _) = newton::solve_default(2.0, &cfg).unwrap();
    let mut guess = p.clone();
    guess.c = 2.05;
    let (_, report) = newton::solve(&guess, &BoundaryClosure::default(), &cfg).unwrap();
    assert!(report.iterations <= 6, "{report:?}");
    assert_eq!(report.damped_steps, 0);
    let r = &report.residual_history;
    for w in r.windows(3) {
        if w[2] > 1e3 * report.effective_tol {
            // q = log(r_{k+1}/r_k) / log(r_k/r_{k-1}) near 2
            let q = (w[2] / w[1]).ln() / (w[1] / w[0]).ln();
            assert!(q > 1.6, "order {q} in {r:?}");
        }
    }
}

#[test]
fn right_tail_is_flat_against_airy_shape() {
    let (p, _) = newton::solve_default(0.0, &SolverConfig::default()).unwrap();
    let vals: Vec<f64> = p
        .grid
        .nodes()
        .zip(&p.u)
        .filter(|(x, _)| (5.0..=9.0).contains(x))
        .map(|(x, u)| u.ln() - asymptotics::right_log_shape(x, 0.0))
        .collect();
    let (lo, hi) = vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
    // the next Airy term is -5/(72 ζ) ≈ -0.009 at x = 5
    assert!(hi - lo < 0.012, "spread {}", hi - lo);
}

#[test]
fn left_series_fits_at_zero_drift() {
    let (p, _) = newton::solve_default(0.0, &SolverConfig::default()).unwrap();
    for &x in &[-10.0, -15.0, -20.0] {
        let pred = asymptotics::left_tail(x, 0.0, 0.0, 2).unwrap();
        // the first omitted term is -(73/128) (-x)^{-6} relative to sqrt(-x)
        let bound = (-x).sqrt() * (-x).powi(-6);
        assert!((p.value_at(x) - pred).abs() < bound, "x = {x}");
    }
}

#[test]
fn erf_guess_converges_at_c_minus_200() {
    let c = -200.0;
    let g = bvp::default_grid(c).unwrap();
    let guess = FrontProfile::from_fn(c, g, |x| {
        if x < -2.0 * (-c).sqrt() {
            bvp::BoundaryClosure::default().left_state(x, c, bvp::Ramp::Linear)
        } else {
            asymptotics::erf_profile(x, c).unwrap()
        }
    });
    let (p, report) = newton::solve(&guess, &BoundaryClosure::default(), &SolverConfig::default()).unwrap();
    assert!(report.converged && report.positive && report.monotone);
    let gap = guess.u.iter().zip(&p.u).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let scale = p.u.iter().fold(0.0f64, |m, v| m.max(*v));
    assert!(gap / scale <= 0.05, "relative gap {}", gap / scale);
}

#[test]
fn right_margin_violation_is_reported() {
    let g = Grid::with_max_spacing(-25.0, 2.0, 0.01).unwrap();
    let err = bvp::check_domain(&g, 0.0).unwrap_err();
    assert!(matches!(err, quenchfront_core::Error::DomainViolation { what: "right margin", .. }));
}

#[test]
fn diagnostics_at_zero_drift() {
    let (p, _) = newton::solve_default(0.0, &SolverConfig::default()).unwrap();
    let d = diagnostics::FrontDiagnostics::compute(&p, 0.1).unwrap();
    assert!(d.admissible && d.monotone_x);
    assert_eq!(d.crossing_points.len(), 1);
    assert!((p.value_at(d.x_delta) - 0.1).abs() < 1e-6);
}
