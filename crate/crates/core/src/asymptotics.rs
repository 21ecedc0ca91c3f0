//! Closed-form predictions for admissible fronts, all in unscaled `(x, u, c)`.
//!
//! - right tail (`x → +∞`): `α₊ exp(-(2/3)(x + c²/4)^{3/2} - c x/2) x^{-1/4}`
//! - left tail (`x → -∞`): `sqrt(-x) (1 + algebraic series + α₋ · exponential)`
//! - `c ≪ -1`: the erf profile obtained from the Bernoulli reduction on the slow manifold,
//!   `u(x) = (-c)^{1/4} e^{x²/(2c)} / (π^{1/4} (erf(x/sqrt(-c)) + 1)^{1/2})`
//! - `c ≫ 1`: delayed front at `-c²/4 - Ω₀ (15/16)^{2/3}`
//! - `c → -∞`: reverse-quench position `sqrt(-c)`

use alloc::vec::Vec;

use crate::{
    error::{Error, Result},
    math,
    specialfns,
};

/// Algebraic part of the left-tail series, `u / sqrt(-x) - 1`, truncated at `order`:
///
/// - `0`: nothing
/// - `1`: `-c/(4x²) - 1/(8(-x)³)`
/// - `2`: additionally `-9c²/(32x⁴)`
///
/// The coefficients follow from balancing `u'' + c u' = x u + u³` with
/// `u = sqrt(-x)(1 + a)` order by order. At `c = 0` this is the Hastings–McLeod series;
/// for `c < 0` it agrees with the expansion of the erf profile.
pub fn left_algebraic(x: f64, c: f64, order: u8) -> f64 {
    let s = -x;
    let mut a = 0.0;
    if order >= 1 {
        a += -c / (4.0 * s * s) - 1.0 / (8.0 * s * s * s);
    }
    if order >= 2 {
        a += -9.0 * c * c / (32.0 * s * s * s * s);
    }
    a
}

/// Shape of the leading exponentially small left-tail correction (multiplies `α₋`).
///
/// `exp(-(2√2/3)(-x)^{3/2} - c x/2 - c²/(4√2) (-x)^{1/2}) (-x)^{-3/4}`; the last three
/// factors reduce to the Hastings–McLeod form at `c = 0`.
pub fn left_exponential_shape(x: f64, c: f64) -> f64 {
    let s = -x;
    let rs = math::sqrt(s);
    let exponent = -(2.0 * math::SQRT_2 / 3.0) * s * rs - 0.5 * c * x - c * c / (4.0 * math::SQRT_2) * rs;
    math::exp(exponent) * math::powf(s, -0.75)
}

/// Left-tail asymptotics `sqrt(-x)(1 + algebraic(order) + α₋ · shape)`, for `x < -2`.
pub fn left_tail(x: f64, c: f64, alpha_minus: f64, order: u8) -> Result<f64> {
    if !(x < -2.0) {
        return Err(Error::DomainViolation {
            what: "left_tail",
            value: x,
        });
    }
    let shape = if alpha_minus == 0.0 {
        0.0
    } else {
        alpha_minus * left_exponential_shape(x, c)
    };
    Ok(math::sqrt(-x) * (1.0 + left_algebraic(x, c, order) + shape))
}

/// Logarithm of the right-tail shape, `-(2/3)(x + c²/4)^{3/2} - c x/2 - (1/4) ln x`.
pub fn right_log_shape(x: f64, c: f64) -> f64 {
    let z = x + 0.25 * c * c;
    -(2.0 / 3.0) * z * math::sqrt(z) - 0.5 * c * x - 0.25 * math::ln(x)
}

/// Derivative of [`right_log_shape`] in `x`.
pub fn right_log_slope(x: f64, c: f64) -> f64 {
    -math::sqrt(x + 0.25 * c * c) - 0.5 * c - 0.25 / x
}

fn check_right_domain(x: f64, c: f64) -> Result<()> {
    if x > (-0.25 * c * c).max(0.0) + 1.0 {
        Ok(())
    } else {
        Err(Error::DomainViolation {
            what: "right_tail",
            value: x,
        })
    }
}

/// Leading right-tail term, for `x > max(0, -c²/4) + 1`.
pub fn right_tail(x: f64, c: f64, alpha_plus: f64) -> Result<f64> {
    check_right_domain(x, c)?;
    Ok(alpha_plus * math::exp(right_log_shape(x, c)))
}

fn require_negative(c: f64, what: &'static str) -> Result<()> {
    if c < 0.0 {
        Ok(())
    } else {
        Err(Error::DomainViolation { what, value: c })
    }
}

/// Leading-order profile for `c < 0`.
pub fn erf_profile(x: f64, c: f64) -> Result<f64> {
    require_negative(c, "erf_profile")?;
    let m = -c;
    let amp = math::powf(m / math::PI, 0.25);
    let z = x / math::sqrt(m);
    if z < 0.0 {
        // erf(z) + 1 = erfc(-z) = e^{-z²} erfcx(-z) and the Gaussian factors cancel
        Ok(amp / math::sqrt(specialfns::erfcx(-z)))
    } else {
        Ok(amp * math::exp(x * x / (2.0 * c)) / math::sqrt(specialfns::erf(z) + 1.0))
    }
}

/// `u(0; c) = (-c)^{1/4} / π^{1/4}` for `c < 0`.
pub fn u_at_zero_negc(c: f64) -> Result<f64> {
    require_negative(c, "u_at_zero_negc")?;
    Ok(math::powf(-c / math::PI, 0.25))
}

/// Delayed front location `-c²/4 - Ω₀ (15/16)^{2/3}` for `c > 0`.
pub fn front_loc_largec(c: f64) -> Result<f64> {
    let omega = specialfns::omega0()?.value;
    front_loc_largec_with(c, omega)
}

/// Same as [`front_loc_largec`] with a caller-supplied `Ω₀`.
pub fn front_loc_largec_with(c: f64, omega0: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::DomainViolation {
            what: "front_loc_largec",
            value: c,
        });
    }
    Ok(-0.25 * c * c - omega0 * delay_factor())
}

/// `(15/16)^{2/3}`.
pub fn delay_factor() -> f64 {
    math::powf(15.0 / 16.0, 2.0 / 3.0)
}

/// Reverse-quench position `sqrt(-c)` for `c < 0`.
pub fn front_loc_negc(c: f64) -> Result<f64> {
    require_negative(c, "front_loc_negc")?;
    Ok(math::sqrt(-c))
}

/// Position where the erf profile crosses `level`, or `None` if `u(0) <= level`
/// would put it at negative `x` (not needed by callers).
pub fn erf_profile_level_crossing(c: f64, level: f64) -> Result<Option<f64>> {
    require_negative(c, "erf_profile_level_crossing")?;
    if erf_profile(0.0, c)? <= level {
        return Ok(None);
    }
    // profile is decreasing; bracket then bisect
    let mut hi = math::sqrt(-c).max(1.0);
    while erf_profile(hi, c)? > level {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if erf_profile(mid, c)? > level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictionKind {
    RightTail,
    LeftTail,
    ErfProfile,
    UAtZeroNegc,
    FrontLocLargec,
    FrontLocNegc,
}

/// Sampled closed-form prediction. Scalar kinds carry one `(c, value)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticPrediction {
    pub kind: PredictionKind,
    pub c: f64,
    pub values: Vec<(f64, f64)>,
}

impl AsymptoticPrediction {
    /// Evaluates `kind` at `c` over `xs`. Tail kinds use unit coefficients `α₊ = 1`,
    /// `α₋ = 0`.
    pub fn sample(kind: PredictionKind, c: f64, xs: &[f64]) -> Result<Self> {
        let values = match kind {
            PredictionKind::RightTail => xs
                .iter()
                .map(|&x| right_tail(x, c, 1.0).map(|u| (x, u)))
                .collect::<Result<Vec<_>>>()?,
            PredictionKind::LeftTail => xs
                .iter()
                .map(|&x| left_tail(x, c, 0.0, 1).map(|u| (x, u)))
                .collect::<Result<Vec<_>>>()?,
            PredictionKind::ErfProfile => xs
                .iter()
                .map(|&x| erf_profile(x, c).map(|u| (x, u)))
                .collect::<Result<Vec<_>>>()?,
            PredictionKind::UAtZeroNegc => alloc::vec![(c, u_at_zero_negc(c)?)],
            PredictionKind::FrontLocLargec => alloc::vec![(c, front_loc_largec(c)?)],
            PredictionKind::FrontLocNegc => alloc::vec![(c, front_loc_negc(c)?)],
        };
        Ok(AsymptoticPrediction { kind, c, values })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erf_profile_at_origin() {
        for &c in &[-1.0, -50.0, -200.0] {
            let u0 = erf_profile(0.0, c).unwrap();
            assert!((u0 - u_at_zero_negc(c).unwrap()).abs() < 1e-14 * u0);
        }
        let u = erf_profile(0.0, -200.0).unwrap();
        assert!((u - 2.8247).abs() < 1e-4, "{u}");
    }

    #[test]
    fn erf_profile_decreasing_and_vanishing() {
        let c = -20.0;
        let mut prev = f64::INFINITY;
        for i in -400..=400 {
            let u = erf_profile(i as f64 * 0.1, c).unwrap();
            assert!(u < prev);
            prev = u;
        }
        assert!(erf_profile(200.0, c).unwrap() < 1e-100);
        assert!(erf_profile(0.0, 1.0).is_err());
    }

    #[test]
    fn erf_profile_grows_with_negative_c_at_origin() {
        let a = erf_profile(0.0, -10.0).unwrap();
        let b = erf_profile(0.0, -11.0).unwrap();
        assert!(b > a);
    }

    #[test]
    fn front_locations() {
        let v = front_loc_largec(10.0).unwrap();
        assert!((v + 27.24).abs() < 0.01, "{v}");
        let v2 = front_loc_largec(2.0).unwrap();
        assert!((v2 + 3.2397).abs() < 1e-3, "{v2}");
        let offset = front_loc_largec(3.0).unwrap() + 2.25;
        assert!((front_loc_largec(7.0).unwrap() + 12.25 - offset).abs() < 1e-12);
        assert_eq!(front_loc_negc(-100.0).unwrap(), 10.0);
        assert!((front_loc_negc(-200.0).unwrap() - 14.142).abs() < 1e-3);
        assert!(front_loc_largec(-1.0).is_err());
    }

    #[test]
    fn left_tail_values() {
        let v = left_tail(-10.0, 0.0, 0.0, 1).unwrap();
        assert!((v - 3.16188).abs() < 1e-5, "{v}");
        assert!(left_tail(-1.0, 0.0, 0.0, 1).is_err());
        // c -> 0 recovers the c = 0 series
        let a = left_algebraic(-7.0, 1e-9, 1);
        let b = left_algebraic(-7.0, 0.0, 1);
        assert!((a - b).abs() < 1e-11);
    }

    #[test]
    fn right_tail_ratio_matches_slope() {
        let (x, dx) = (6.0, 1e-5);
        let r = right_tail(x + dx, 0.5, 2.0).unwrap() / right_tail(x, 0.5, 2.0).unwrap();
        let predicted = 1.0 + dx * right_log_slope(x, 0.5);
        assert!((r - predicted).abs() < 1e-8);
        // extra e^{-x/2} factor at c = 1
        for &x in &[1.5, 3.0, 8.0] {
            assert!(right_tail(x, 1.0, 1.0).unwrap() < right_tail(x, 0.0, 1.0).unwrap());
        }
        assert!(right_tail(0.5, 0.0, 1.0).is_err());
    }
}
