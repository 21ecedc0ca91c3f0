//! erf, Bessel functions of order ±1/3 and the constant `Ω₀`.
//!
//! `Ω₀` is the smallest positive zero of `z ↦ J_{-1/3}(2z^{3/2}/3) + J_{1/3}(2z^{3/2}/3)`,
//! which is also the first zero of `Ai(-z)`. It sets the delay of the front for large
//! positive drift.

use crate::{
    error::{Error, Result},
    math,
};

/// Γ(1/3). Reference value (A&S 6.1.10 table); checked in tests against the
/// reflection identity Γ(1/3)Γ(2/3) = 2π/√3.
pub const GAMMA_ONE_THIRD: f64 = 2.678_938_534_707_747_6;
/// Γ(2/3), via the same reflection identity.
pub const GAMMA_TWO_THIRDS: f64 = 1.354_117_939_426_400_4;
/// Γ(4/3) = Γ(1/3)/3.
pub const GAMMA_FOUR_THIRDS: f64 = 0.892_979_511_569_249_2;

const FRAC_2_SQRT_PI: f64 = core::f64::consts::FRAC_2_SQRT_PI;

/// Error function. Absolute error below 1e-14 on `|x| <= 6`, exactly `±1` beyond.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return x;
    }
    let a = x.abs();
    let v = if a <= 3.0 {
        erf_series(a)
    } else if a <= 6.0 {
        1.0 - math::exp(-a * a) * erfcx_cf(a)
    } else {
        1.0
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        2.0 - erfc(-x)
    } else if x <= 1.0 {
        1.0 - erf_series(x)
    } else {
        math::exp(-x * x) * erfcx_cf(x)
    }
}

/// Scaled complementary error function `exp(x²) erfc(x)`, for `x >= 0`.
///
/// Stays finite where `erfc` underflows, which the erf profile needs far behind the front.
pub fn erfcx(x: f64) -> f64 {
    if x <= 1.0 {
        math::exp(x * x) * erfc(x)
    } else {
        erfcx_cf(x)
    }
}

// erf(x) = 2/sqrt(pi) e^{-x^2} sum_n 2^n x^{2n+1} / (2n+1)!!, all terms positive.
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    while term > 1e-17 * sum {
        n += 1.0;
        term *= 2.0 * x2 / (2.0 * n + 1.0);
        sum += term;
    }
    FRAC_2_SQRT_PI * math::exp(-x2) * sum
}

// Laplace continued fraction for erfcx, evaluated with the modified Lentz algorithm:
// erfcx(x) = (1/sqrt(pi)) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))).
fn erfcx_cf(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..500 {
        let a = 0.5 * k as f64;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    FRAC_2_SQRT_PI * 0.5 / f
}

/// Order of the fractional Bessel function: `+1/3` or `-1/3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThirdOrder {
    Plus,
    Minus,
}

impl ThirdOrder {
    pub fn nu(self) -> f64 {
        match self {
            ThirdOrder::Plus => 1.0 / 3.0,
            ThirdOrder::Minus => -1.0 / 3.0,
        }
    }

    fn gamma_nu_plus_one(self) -> f64 {
        match self {
            ThirdOrder::Plus => GAMMA_FOUR_THIRDS,
            ThirdOrder::Minus => GAMMA_TWO_THIRDS,
        }
    }
}

/// Result of the ascending series for `J_{±1/3}`.
#[derive(Debug, Clone, Copy)]
pub struct SeriesEval {
    pub value: f64,
    /// Magnitude of the first omitted term relative to the partial sum.
    pub truncation_ratio: f64,
    pub terms: usize,
}

/// Bessel function of the first kind `J_{±1/3}(x)` for `x > 0`.
///
/// The ascending series alternates, with terms up to ~e^x/sqrt(x) before they start to
/// decay, so the terms and the partial sum are carried in double-double arithmetic.
pub fn bessel_j_third(order: ThirdOrder, x: f64) -> Result<f64> {
    bessel_j_third_series(order, x).map(|s| s.value)
}

pub fn bessel_j_third_series(order: ThirdOrder, x: f64) -> Result<SeriesEval> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::DomainViolation {
            what: "bessel_j_third",
            value: x,
        });
    }
    let nu = order.nu();
    let nu_dd = Dd::from(nu);
    let half = Dd::from(0.5 * x);
    let q = half.mul(half);
    let mut term = Dd::from(1.0);
    let mut sum = term;
    let mut k = 0usize;
    let kmin = (0.5 * x) as usize + 2;
    let ratio = loop {
        k += 1;
        let kf = k as f64;
        let denom = Dd::from(kf).mul(Dd::from(kf).add(nu_dd));
        term = term.mul(q).div(denom).neg();
        let r = term.hi.abs() / sum.hi.abs();
        if k >= kmin && r < 1e-17 {
            break r;
        }
        sum = sum.add(term);
        if k > 400 {
            break r;
        }
    };
    let prefactor = math::powf(0.5 * x, nu) / order.gamma_nu_plus_one();
    Ok(SeriesEval {
        value: prefactor * (sum.hi + sum.lo),
        truncation_ratio: ratio,
        terms: k,
    })
}

/// The Bessel combination whose first positive zero is `Ω₀`.
pub fn airy_bessel_combination(z: f64) -> Result<f64> {
    let zeta = 2.0 / 3.0 * z * math::sqrt(z);
    Ok(bessel_j_third(ThirdOrder::Minus, zeta)? + bessel_j_third(ThirdOrder::Plus, zeta)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Omega0Result {
    pub value: f64,
    /// Bessel combination evaluated at `value`.
    pub residual: f64,
    /// Scan interval that first showed the sign change.
    pub bracket: (f64, f64),
}

/// Smallest positive zero of the Bessel combination, found by a scan at step 1e-3
/// followed by bisection.
pub fn omega0() -> Result<Omega0Result> {
    const STEP: f64 = 1e-3;
    let mut a = STEP;
    let mut fa = airy_bessel_combination(a)?;
    while a < 10.0 {
        let b = a + STEP;
        let fb = airy_bessel_combination(b)?;
        if fa.signum() != fb.signum() {
            let value = bisect(a, b, fa)?;
            return Ok(Omega0Result {
                value,
                residual: airy_bessel_combination(value)?,
                bracket: (a, b),
            });
        }
        a = b;
        fa = fb;
    }
    Err(Error::NoSignChange)
}

fn bisect(mut lo: f64, mut hi: f64, mut flo: f64) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fmid = airy_bessel_combination(mid)?;
        if fmid == 0.0 {
            return Ok(mid);
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Minimal double-double number (unevaluated sum `hi + lo`).
#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl From<f64> for Dd {
    fn from(hi: f64) -> Self {
        Dd { hi, lo: 0.0 }
    }
}

impl Dd {
    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        let e = (a - (s - bb)) + (b - bb);
        Dd { hi: s, lo: e }
    }

    fn quick(a: f64, b: f64) -> Dd {
        let s = a + b;
        Dd {
            hi: s,
            lo: b - (s - a),
        }
    }

    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn add(self, o: Dd) -> Dd {
        let s = Dd::two_sum(self.hi, o.hi);
        let t = Dd::two_sum(self.lo, o.lo);
        let r = Dd::quick(s.hi, s.lo + t.hi);
        Dd::quick(r.hi, r.lo + t.lo)
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = math::fma(self.hi, o.hi, -p);
        Dd::quick(p, e + (self.hi * o.lo + self.lo * o.hi))
    }

    fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul(Dd::from(q1)));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul(Dd::from(q2)));
        let q3 = r.hi / o.hi;
        Dd::quick(q1, q2).add(Dd::from(q3))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erf_fixed_points() {
        assert_eq!(erf(0.0), 0.0);
        assert!((erf(10.0) - 1.0).abs() <= 1e-15);
        assert_eq!(erf(-7.5), -1.0);
    }

    #[test]
    fn erf_is_odd_and_bounded() {
        let mut prev = -1.0;
        for i in -600..=600 {
            let x = i as f64 * 0.01;
            assert_eq!(erf(-x), -erf(x));
            let v = erf(x);
            assert!(v >= prev, "erf not monotone at {x}");
            if x.abs() < 5.0 {
                assert!(v > -1.0 && v < 1.0);
            }
            prev = v;
        }
    }

    #[test]
    fn erfcx_matches_definition_in_overlap() {
        for &x in &[0.5, 1.0, 2.5, 3.5, 5.0] {
            let direct = math::exp(x * x) * erfc(x);
            assert!((erfcx(x) - direct).abs() < 1e-12 * direct);
        }
        // large-argument asymptotics 1/(x sqrt(pi)) (1 - 1/(2x^2) + 3/(4x^4) - 15/(8x^6))
        let x = 50.0;
        let asym = 1.0 / (x * math::sqrt(math::PI)) * (1.0 - 0.5 / (x * x) + 0.75 / libm::pow(x, 4.0) - 1.875 / libm::pow(x, 6.0));
        assert!((erfcx(x) - asym).abs() < 1e-10 * asym);
    }

    #[test]
    fn gamma_constants_consistent() {
        let reflection = 2.0 * math::PI / math::sqrt(3.0);
        assert!((GAMMA_ONE_THIRD * GAMMA_TWO_THIRDS - reflection).abs() < 1e-15);
        assert!((GAMMA_FOUR_THIRDS * 3.0 - GAMMA_ONE_THIRD).abs() < 1e-15);
    }

    #[test]
    fn bessel_small_argument_leading_term() {
        let x = 1e-6;
        let lead = math::powf(0.5 * x, 1.0 / 3.0) / GAMMA_FOUR_THIRDS;
        let j = bessel_j_third(ThirdOrder::Plus, x).unwrap();
        assert!((j - lead).abs() < 1e-9 * lead);
    }

    #[test]
    fn bessel_minus_third_positive_near_zero() {
        for i in 1..=100 {
            let x = i as f64 * 1e-3;
            assert!(bessel_j_third(ThirdOrder::Minus, x).unwrap() > 0.0);
        }
    }

    #[test]
    fn bessel_rejects_nonpositive() {
        assert!(bessel_j_third(ThirdOrder::Plus, 0.0).is_err());
        assert!(bessel_j_third(ThirdOrder::Minus, -1.0).is_err());
    }

    #[test]
    fn series_truncation_bound_holds() {
        for &x in &[0.1, 1.0, 5.0, 12.0, 30.0] {
            for order in [ThirdOrder::Plus, ThirdOrder::Minus] {
                let s = bessel_j_third_series(order, x).unwrap();
                assert!(s.truncation_ratio < 1e-14, "x={x}: {}", s.truncation_ratio);
            }
        }
    }

    #[test]
    fn omega0_bracket_and_residual() {
        let r = omega0().unwrap();
        assert!(r.residual.abs() < 1e-12);
        assert!(r.bracket.0 < r.value && r.value < r.bracket.1);
        let fa = airy_bessel_combination(r.bracket.0).unwrap();
        let fb = airy_bessel_combination(r.bracket.1).unwrap();
        assert!(fa * fb < 0.0);
        assert!((r.value - 2.338_107_410_5).abs() < 1e-9);
    }

    #[test]
    fn combination_changes_sign_on_known_interval() {
        let a = airy_bessel_combination(2.0).unwrap();
        let b = airy_bessel_combination(2.5).unwrap();
        assert!(a > 0.0 && b < 0.0);
    }
}
