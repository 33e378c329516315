//! Special functions needed by the closed-form yields.

use crate::{Error, Result};

/// Crossover between the power series and the large-argument expansion.
const SERIES_LIMIT: f64 = 30.0;

/// Modified Bessel function of the first kind, order zero.
///
/// Power series up to |x| = 30, Hankel asymptotic expansion beyond. Relative
/// accuracy is better than 1e-13 on |x| <= 50.
pub fn bessel_i0(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain("bessel_i0", format!("argument must be finite, got {x}")));
    }
    let ax = x.abs();
    if ax <= SERIES_LIMIT {
        Ok(1.0 + i0_series_tail(ax))
    } else {
        Ok(i0_asymptotic(ax))
    }
}

/// `I0(x) - 1`, accurate for small arguments where the subtraction cancels.
pub(crate) fn bessel_i0_minus_one(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain("bessel_i0", format!("argument must be finite, got {x}")));
    }
    let ax = x.abs();
    if ax <= SERIES_LIMIT {
        Ok(i0_series_tail(ax))
    } else {
        Ok(i0_asymptotic(ax) - 1.0)
    }
}

// sum_{k>=1} (x^2/4)^k / (k!)^2
fn i0_series_tail(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..500 {
        let kf = k as f64;
        term *= q / (kf * kf);
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
    }
    sum
}

fn i0_asymptotic(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        let next = term * odd * odd / (8.0 * kf * x);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    x.exp() / (2.0 * std::f64::consts::PI * x).sqrt() * sum
}

/// Binary Shannon entropy in bits, with `h(0) = h(1) = 0`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(
            "binary_entropy",
            format!("argument must lie in [0, 1], got {x}"),
        ));
    }
    if x == 0.0 || x == 1.0 {
        return Ok(0.0);
    }
    let ln2 = std::f64::consts::LN_2;
    Ok(-(x * x.ln() + (1.0 - x) * (-x).ln_1p()) / ln2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // Trapezoid rule on the periodic integrand (1/pi) int_0^pi exp(x cos t) dt
    // converges geometrically, so it serves as an independent reference.
    fn i0_quadrature(x: f64) -> f64 {
        let n = 4000;
        let h = std::f64::consts::PI / n as f64;
        let mut s = 0.5 * (x.exp() + (-x).exp());
        for i in 1..n {
            s += (x * (i as f64 * h).cos()).exp();
        }
        s * h / std::f64::consts::PI
    }

    #[test]
    fn i0_known_values() {
        assert_eq!(bessel_i0(0.0).unwrap(), 1.0);
        // truncated power series evaluated to 1e-16
        assert_relative_eq!(bessel_i0(1.0).unwrap(), 1.266_065_877_752_008_3, max_relative = 1e-15);
        assert_eq!(bessel_i0(-3.7).unwrap(), bessel_i0(3.7).unwrap());
    }

    #[test]
    fn i0_matches_quadrature() {
        for &x in &[1e-8, 0.01, 0.3, 1.0, 2.5, 7.0, 14.9, 15.1, 29.9, 30.1, 35.0, 49.0, 50.0] {
            let got = bessel_i0(x).unwrap();
            let want = i0_quadrature(x);
            assert_relative_eq!(got, want, max_relative = 1e-12);
        }
    }

    #[test]
    fn i0_minus_one_small_argument() {
        let x = 1e-6;
        assert_relative_eq!(bessel_i0_minus_one(x).unwrap(), 0.25 * x * x, max_relative = 1e-10);
    }

    #[test]
    fn i0_rejects_nan() {
        assert!(bessel_i0(f64::NAN).is_err());
        assert!(bessel_i0(f64::INFINITY).is_err());
    }

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        // -0.11 log2 0.11 - 0.89 log2 0.89
        assert_relative_eq!(
            binary_entropy(0.11).unwrap(),
            0.499_915_958_164_528,
            max_relative = 1e-13
        );
        assert!(binary_entropy(-0.01).is_err());
        assert!(binary_entropy(1.5).is_err());
    }
}
