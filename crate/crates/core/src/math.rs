/// Exponents above this go through `exp(n ln x)`.
const LOG_DOMAIN_EXPONENT: u64 = 1_000_000;

/// `base^n` for a probability-like base in `[0, 1]`.
pub(crate) fn pow_n(base: f64, n: u64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    if n > LOG_DOMAIN_EXPONENT {
        if base <= 0.0 {
            return 0.0;
        }
        return libm::exp(n as f64 * libm::log(base));
    }
    libm::pow(base, n as f64)
}

pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}
