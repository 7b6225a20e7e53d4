//! Self-contained special functions: the complementary error function and
//! the (scaled) confluent hypergeometric function of the first kind.
//!
//! Only what the closed-form distributions need is implemented: real
//! arguments, double precision, with overflow-safe scaled variants for the
//! large arguments that show up when the detector radius is large
//! (`z = d^2` reaches 900 and beyond).

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const SQRT_PI: f64 = 1.7724538509055160273;

/// Series/continued-fraction switch point for `erf`/`erfc`. Below this the
/// Maclaurin series of `erf` converges fast with mild cancellation; above it
/// the Lentz continued fraction for `erfc` converges in under ~100 terms.
const ERF_SERIES_CUTOFF: f64 = 1.5;

/// Kummer-series/asymptotic switch point for the scaled hypergeometric.
/// At `z = 30` the optimally truncated asymptotic series is already accurate
/// to ~3e-12 and improves rapidly for larger `z`, while the scaled series
/// stays far from overflow below it.
const HYP1F1_ASYMPTOTIC_CUTOFF: f64 = 30.0;

/// Complementary error function `erfc(x) = (2/sqrt(pi)) int_x^inf e^{-t^2} dt`.
///
/// Relative error is a few ulp wherever the result is a normal double
/// (roughly `x <= 26.5`); beyond that the exact value itself is subnormal
/// and precision degrades with the format. Satisfies
/// `erfc(-x) = 2 - erfc(x)` by construction.
pub fn erfc(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain(format!("erfc: x must be finite, got {x}")));
    }
    Ok(erfc_inner(x))
}

/// Error function `erf(x) = 1 - erfc(x)`.
pub fn erf(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain(format!("erf: x must be finite, got {x}")));
    }
    if x.abs() <= ERF_SERIES_CUTOFF {
        Ok(erf_series(x))
    } else if x > 0.0 {
        Ok(1.0 - erfc_cf(x))
    } else {
        Ok(erfc_cf(-x) - 1.0)
    }
}

fn erfc_inner(x: f64) -> f64 {
    if x.abs() <= ERF_SERIES_CUTOFF {
        1.0 - erf_series(x)
    } else if x > 0.0 {
        erfc_cf(x)
    } else {
        2.0 - erfc_cf(-x)
    }
}

/// Maclaurin series of `erf`, valid for small `|x|`.
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0u32;
    loop {
        n += 1;
        term *= -x2 / n as f64;
        let contribution = term / (2 * n + 1) as f64;
        sum += contribution;
        if contribution.abs() <= sum.abs() * 1e-17 {
            break;
        }
    }
    2.0 / SQRT_PI * sum
}

/// `exp(-x^2)` with the argument split into a high part whose square is
/// exact and a low correction, so the relative error stays O(eps) even for
/// x^2 ~ 700 where a naive `(-x*x).exp()` loses ~x^2 * eps.
pub(crate) fn exp_neg_x_squared(x: f64) -> f64 {
    let hi = f64::from_bits(x.to_bits() & 0xffff_ffff_0000_0000);
    (-hi * hi).exp() * ((hi - x) * (hi + x)).exp()
}

/// Continued fraction for `erfc`, `x > 0`, evaluated with the modified
/// Lentz algorithm:
/// `erfc(x) = e^{-x^2}/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))`.
fn erfc_cf(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = TINY;
    let mut c = TINY;
    let mut d = 0.0;
    let mut n = 0u32;
    loop {
        n += 1;
        let (a, b) = if n == 1 {
            (1.0, x)
        } else {
            ((n - 1) as f64 / 2.0, x)
        };
        d = b + a * d;
        if d == 0.0 {
            d = TINY;
        }
        c = b + a / c;
        if c == 0.0 {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-17 || n > 400 {
            break;
        }
    }
    exp_neg_x_squared(x) / SQRT_PI * f
}

/// Scaled confluent hypergeometric value `e^{-z} 1F1(a; b; z)` together
/// with the log of the unscaled function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledHyp1F1Result {
    /// `e^{-z} 1F1(a; b; z)`; finite for the parameter ranges used by the
    /// passage-time mean even when `1F1` itself overflows.
    pub value_scaled: f64,
    /// `ln 1F1(a; b; z)` (NaN when the function value is not positive).
    pub log_unscaled: f64,
}

/// `e^{-z} 1F1(a; b; z)` for real parameters and `z >= 0`.
///
/// Uses the Kummer series (all terms positive for `a, b > 0`) below
/// [`HYP1F1_ASYMPTOTIC_CUTOFF`] and the large-`z` asymptotic expansion
/// above it. Relative error is well under 1e-10 for `(a, b) = (1/2, 5/2)`
/// over `z` in `[0, 2500]`, the range exercised by the mean reciprocal
/// passage time.
pub fn hyp1f1_scaled(a: f64, b: f64, z: f64) -> Result<ScaledHyp1F1Result> {
    if !(a.is_finite() && b.is_finite() && z.is_finite()) {
        return Err(Error::domain("hyp1f1: parameters must be finite".to_string()));
    }
    if b <= 0.0 && b == b.floor() {
        return Err(Error::domain(format!(
            "hyp1f1: b must not be a non-positive integer, got {b}"
        )));
    }
    if z < 0.0 {
        return Err(Error::domain(format!("hyp1f1: z must be >= 0, got {z}")));
    }
    let value_scaled = if z <= HYP1F1_ASYMPTOTIC_CUTOFF {
        hyp1f1_series(a, b, z) * (-z).exp()
    } else {
        hyp1f1_scaled_asymptotic(a, b, z)
    };
    Ok(ScaledHyp1F1Result {
        value_scaled,
        log_unscaled: value_scaled.ln() + z,
    })
}

/// Kummer series `sum_k (a)_k / (b)_k z^k / k!` with compensated summation.
fn hyp1f1_series(a: f64, b: f64, z: f64) -> f64 {
    let mut sum = 1.0f64;
    let mut comp = 0.0f64;
    let mut term = 1.0f64;
    let mut k = 0u32;
    loop {
        term *= (a + k as f64) / (b + k as f64) * z / (k + 1) as f64;
        if term == 0.0 {
            break;
        }
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        k += 1;
        if term.abs() <= sum.abs() * 1e-17 || k > 10_000 {
            break;
        }
    }
    sum
}

/// Optimally truncated asymptotic expansion for large positive `z`:
/// `e^{-z} 1F1(a;b;z) ~ Gamma(b)/Gamma(a) z^{a-b} sum_k (b-a)_k (1-a)_k / (k! z^k)`.
fn hyp1f1_scaled_asymptotic(a: f64, b: f64, z: f64) -> f64 {
    let prefactor = gamma(b) / gamma(a) * z.powf(a - b);
    let mut sum = 1.0f64;
    let mut term = 1.0f64;
    let mut k = 0u32;
    loop {
        let next = term * (b - a + k as f64) * (1.0 - a + k as f64) / ((k + 1) as f64 * z);
        if next.abs() >= term.abs() && k > 0 {
            break; // divergent tail reached; stop at the minimal term
        }
        term = next;
        sum += term;
        k += 1;
        if term.abs() <= sum.abs() * 1e-17 || k > 400 {
            break;
        }
    }
    prefactor * sum
}

/// Gamma function via the Lanczos approximation (g = 7, n = 9), with the
/// reflection formula for arguments below 1/2. Used only for the asymptotic
/// prefactor; accuracy ~1e-14 relative on the real line away from poles.
fn gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEFFS: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        // Gamma(x) Gamma(1-x) = pi / sin(pi x)
        return std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut acc = COEFFS[0];
    for (i, c) in COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + G + 0.5;
    (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erfc_at_zero_is_one() {
        assert_eq!(erfc(0.0).unwrap(), 1.0);
    }

    #[test]
    fn erfc_reflection_identity() {
        let x = 0.7;
        let s = erfc(x).unwrap() + erfc(-x).unwrap();
        assert!((s - 2.0).abs() < 1e-15);
        let x = 3.2;
        let s = erfc(x).unwrap() + erfc(-x).unwrap();
        assert!((s - 2.0).abs() < 1e-15);
    }

    #[test]
    fn erfc_rejects_nan() {
        assert!(erfc(f64::NAN).is_err());
        assert!(erfc(f64::INFINITY).is_err());
        assert!(erf(f64::NAN).is_err());
    }

    #[test]
    fn erf_erfc_complementary() {
        for &x in &[-2.5, -0.3, 0.0, 0.4, 1.1, 1.9, 4.0] {
            let s = erf(x).unwrap() + erfc(x).unwrap();
            assert!((s - 1.0).abs() < 2e-15, "x={x}: erf+erfc={s}");
        }
    }

    #[test]
    fn erfc_branch_continuity() {
        // both branches evaluated at the switch point itself
        let series = 1.0 - erf_series(ERF_SERIES_CUTOFF);
        let fraction = erfc_cf(ERF_SERIES_CUTOFF);
        assert!(
            (series - fraction).abs() / series < 1e-9,
            "series {series} vs continued fraction {fraction}"
        );
        // and the seam stays monotone
        let lo = erfc(ERF_SERIES_CUTOFF - 1e-9).unwrap();
        let hi = erfc(ERF_SERIES_CUTOFF + 1e-9).unwrap();
        assert!(lo > hi);
    }

    #[test]
    fn hyp1f1_empty_series_is_one() {
        let r = hyp1f1_scaled(0.5, 2.5, 0.0).unwrap();
        assert_eq!(r.value_scaled, 1.0);
        assert_eq!(r.log_unscaled, 0.0);
    }

    #[test]
    fn hyp1f1_rejects_bad_b_and_negative_z() {
        assert!(hyp1f1_scaled(0.5, 0.0, 1.0).is_err());
        assert!(hyp1f1_scaled(0.5, -3.0, 1.0).is_err());
        assert!(hyp1f1_scaled(0.5, 2.5, -0.5).is_err());
        // non-integer negative b is allowed
        assert!(hyp1f1_scaled(0.5, -0.5, 1.0).is_ok());
    }

    #[test]
    fn hyp1f1_branch_continuity() {
        let eps = 1e-9;
        let lo = hyp1f1_scaled(0.5, 2.5, HYP1F1_ASYMPTOTIC_CUTOFF - eps)
            .unwrap()
            .value_scaled;
        let hi = hyp1f1_scaled(0.5, 2.5, HYP1F1_ASYMPTOTIC_CUTOFF + eps)
            .unwrap()
            .value_scaled;
        assert!((lo - hi).abs() / lo < 1e-9);
    }

    #[test]
    fn hyp1f1_log_unscaled_consistent() {
        let r = hyp1f1_scaled(0.5, 2.5, 900.0).unwrap();
        assert!(r.value_scaled.is_finite() && r.value_scaled > 0.0);
        assert!((r.log_unscaled - (r.value_scaled.ln() + 900.0)).abs() < 1e-12);
    }

    #[test]
    fn gamma_spot_values() {
        assert!((gamma(0.5) - SQRT_PI).abs() < 1e-14);
        assert!((gamma(2.5) - 0.75 * SQRT_PI).abs() < 1e-14);
        assert!((gamma(5.0) - 24.0).abs() < 1e-12);
    }
}
