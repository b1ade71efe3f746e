//! Base-2 log-domain arithmetic.
//!
//! All codelengths, likelihoods, and posterior weights in this crate are
//! carried as `log2` values (bits). This module provides the small set of
//! numerically careful primitives everything else is built on.

/// `log2(e)`, the conversion factor from nats to bits.
pub const LOG2_E: f64 = std::f64::consts::LOG2_E;

/// `ln(2)`, the conversion factor from bits to nats.
pub const LN_2: f64 = std::f64::consts::LN_2;

/// `log2(2^a + 2^b)`, robust to `-inf` inputs and large magnitude gaps.
#[inline]
pub fn log2_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp2().ln_1p() * LOG2_E
}

/// `log2(2^a - 2^b)` for `a >= b`; returns `-inf` when the inputs are equal.
#[inline]
pub fn log2_sub(a: f64, b: f64) -> f64 {
    if b == f64::NEG_INFINITY {
        return a;
    }
    assert!(a >= b, "log2_sub requires a >= b (got {a} < {b})");
    let d = (b - a).exp2();
    if d >= 1.0 {
        return f64::NEG_INFINITY;
    }
    a + (-d).ln_1p() * LOG2_E
}

/// `log2(sum_i 2^{x_i})` over a slice, stable against overflow.
pub fn log2_sum(xs: &[f64]) -> f64 {
    let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let s: f64 = xs.iter().map(|&x| (x - hi).exp2()).sum();
    hi + s.log2()
}

/// Natural log-gamma re-expressed in bits: `log2(Gamma(x))`.
#[inline]
pub fn log2_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x) * LOG2_E
}

/// `log2(C(m, a))` via log-gamma.
pub fn log2_binomial(m: u64, a: u64) -> f64 {
    assert!(a <= m, "binomial coefficient requires a <= m");
    if a == 0 || a == m {
        return 0.0;
    }
    log2_gamma((m + 1) as f64) - log2_gamma((a + 1) as f64) - log2_gamma((m - a + 1) as f64)
}

/// `log2(B(a, b))` where `B` is the Beta function.
pub fn log2_beta(a: f64, b: f64) -> f64 {
    log2_gamma(a) + log2_gamma(b) - log2_gamma(a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    /// `log2` of an arbitrary-precision integer, exact to f64 precision via
    /// the top 53 bits plus the bit length.
    fn log2_biguint(x: &BigUint) -> f64 {
        let bits = x.bits();
        if bits <= 53 {
            let mut v = 0u64;
            for (i, d) in x.to_u64_digits().iter().enumerate() {
                v |= d << (64 * i);
            }
            return (v as f64).log2();
        }
        let shift = bits - 53;
        let top = (x >> shift).to_u64_digits()[0];
        (top as f64).log2() + shift as f64
    }

    fn big_binomial(m: u64, a: u64) -> BigUint {
        let mut acc = BigUint::from(1u32);
        let a = a.min(m - a);
        for i in 0..a {
            acc = acc * BigUint::from(m - i) / BigUint::from(i + 1);
        }
        acc
    }

    #[test]
    fn log2_add_basics() {
        assert!((log2_add(0.0, 0.0) - 1.0).abs() < 1e-15);
        assert_eq!(log2_add(f64::NEG_INFINITY, 3.5), 3.5);
        assert_eq!(log2_add(-2.0, f64::NEG_INFINITY), -2.0);
        // 2^10 + 2^0 = 1025
        assert!((log2_add(10.0, 0.0) - 1025f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn log2_sub_basics() {
        // 2^3 - 2^1 = 6
        assert!((log2_sub(3.0, 1.0) - 6f64.log2()).abs() < 1e-12);
        assert_eq!(log2_sub(2.0, 2.0), f64::NEG_INFINITY);
        assert_eq!(log2_sub(5.0, f64::NEG_INFINITY), 5.0);
    }

    #[test]
    fn log2_sum_matches_pairwise() {
        let xs = [0.0, -1.0, -2.0, -3.0, 7.25];
        let pair = xs[1..].iter().fold(xs[0], |acc, &x| log2_add(acc, x));
        assert!((log2_sum(&xs) - pair).abs() < 1e-12);
        assert_eq!(log2_sum(&[]), f64::NEG_INFINITY);
    }

    #[test]
    fn binomial_small_exact() {
        // C(4,2) = 6 -> log2 6 = 2.585 (frozen from integer arithmetic).
        assert!((log2_binomial(4, 2) - 6f64.log2()).abs() < 1e-12);
        assert!((log2_binomial(4, 2) - 2.584962500721156).abs() < 1e-12);
        assert_eq!(log2_binomial(17, 0), 0.0);
        assert_eq!(log2_binomial(17, 17), 0.0);
        assert!((log2_binomial(10, 3) - 120f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn binomial_matches_big_integer_oracle() {
        // Includes C(2000, 1000), which exceeds f64 range as a plain integer.
        for &(m, a) in &[
            (100u64, 20u64),
            (100, 50),
            (1000, 1),
            (1000, 500),
            (2000, 1000),
            (2000, 13),
        ] {
            let exact = log2_biguint(&big_binomial(m, a));
            let approx = log2_binomial(m, a);
            let rel = ((approx - exact) / exact).abs();
            assert!(rel < 1e-9, "C({m},{a}): {approx} vs {exact} (rel {rel})");
        }
    }

    #[test]
    fn beta_function_known_values() {
        // B(1,1) = 1, B(2,2) = 1/6, B(4,8) = 1/1320 (Beta-evidence identities).
        assert!(log2_beta(1.0, 1.0).abs() < 1e-12);
        assert!((log2_beta(2.0, 2.0) + 6f64.log2()).abs() < 1e-12);
        assert!((log2_beta(4.0, 8.0) + 1320f64.log2()).abs() < 1e-9);
    }
}
