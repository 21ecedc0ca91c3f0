//! Thin wrappers over `libm` so the numerics read like ordinary float code.

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub(crate) fn cbrt(x: f64) -> f64 {
    libm::cbrt(x)
}

#[inline]
pub(crate) fn tanh(x: f64) -> f64 {
    libm::tanh(x)
}

#[inline]
pub(crate) fn fma(a: f64, b: f64, c: f64) -> f64 {
    libm::fma(a, b, c)
}

pub(crate) const PI: f64 = core::f64::consts::PI;
pub(crate) const SQRT_2: f64 = core::f64::consts::SQRT_2;
