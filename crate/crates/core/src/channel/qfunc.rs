//! Gaussian tail probability.

/// `Q(x) = ½·erfc(x/√2)`.
///
/// `erfc` is the fdlibm rational approximation shipped by `libm`, which
/// keeps relative accuracy deep into the tail (down to the underflow of
/// `Q` near `x ≈ 38`).
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x * std::f64::consts::FRAC_1_SQRT_2)
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}
