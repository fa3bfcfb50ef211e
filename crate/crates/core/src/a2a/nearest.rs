//! Nearest-neighbour distance law of a 3-D PPP.

use std::f64::consts::PI;

use super::A2aError;

fn check(d: f64, intensity: f64) -> Result<(), A2aError> {
    if !(d >= 0.0) {
        return Err(A2aError::Invalid {
            what: "distance",
            value: d,
        });
    }
    if !(intensity >= 0.0) {
        return Err(A2aError::Invalid {
            what: "intensity",
            value: intensity,
        });
    }
    Ok(())
}

/// `1 − exp(−(4/3)πλd³)`.
pub fn nearest_distance_cdf(d: f64, intensity: f64) -> Result<f64, A2aError> {
    check(d, intensity)?;
    Ok(-(-(4.0 / 3.0) * PI * intensity * d.powi(3)).exp_m1())
}

/// `4πλd² exp(−(4/3)πλd³)`.
pub fn nearest_distance_pdf(d: f64, intensity: f64) -> Result<f64, A2aError> {
    check(d, intensity)?;
    Ok(4.0 * PI * intensity * d * d * (-(4.0 / 3.0) * PI * intensity * d.powi(3)).exp())
}

/// Inverse CDF.
pub fn nearest_distance_quantile(p: f64, intensity: f64) -> Result<f64, A2aError> {
    if !(0.0..1.0).contains(&p) {
        return Err(A2aError::Invalid {
            what: "probability",
            value: p,
        });
    }
    check(0.0, intensity)?;
    Ok((-(-p).ln_1p() * 3.0 / (4.0 * PI * intensity)).cbrt())
}

/// Distance at which the CDF reaches `1 − e^{−mass}`.
pub fn distance_for_mass(mass: f64, intensity: f64) -> f64 {
    (mass * 3.0 / (4.0 * PI * intensity)).cbrt()
}

/// One-sample Kolmogorov-Smirnov statistic against a continuous CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate, QuadConfig};

    const LAMBDA: f64 = 20.0 / 1e9;

    #[test]
    fn cdf_at_zero() {
        assert_eq!(nearest_distance_cdf(0.0, LAMBDA).unwrap(), 0.0);
        assert!(nearest_distance_cdf(-1.0, LAMBDA).is_err());
        assert!(nearest_distance_pdf(-1.0, LAMBDA).is_err());
    }

    #[test]
    fn pdf_normalizes() {
        let upper = distance_for_mass(60.0, LAMBDA);
        let q = integrate(
            |d| nearest_distance_pdf(d, LAMBDA).unwrap(),
            0.0,
            upper,
            &QuadConfig::with_rel_tol(1e-10),
        )
        .unwrap();
        assert!((q.value - 1.0).abs() < 1e-6, "{}", q.value);
    }

    #[test]
    fn median_by_bisection() {
        let (mut lo, mut hi) = (0.0, 1e5);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if nearest_distance_cdf(mid, LAMBDA).unwrap() < 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let closed = (3.0 * 2f64.ln() / (4.0 * PI * LAMBDA)).cbrt();
        assert!((lo - closed).abs() < 1e-9 * closed);
        let q = nearest_distance_quantile(0.5, LAMBDA).unwrap();
        assert!((q - closed).abs() < 1e-9 * closed);
    }

    #[test]
    fn ks_of_exact_quantiles_is_small() {
        let n = 1_000;
        let mut xs: Vec<f64> = (0..n)
            .map(|i| nearest_distance_quantile((i as f64 + 0.5) / n as f64, LAMBDA).unwrap())
            .collect();
        let ks = ks_statistic(&mut xs, |d| nearest_distance_cdf(d, LAMBDA).unwrap());
        assert!((ks - 0.5 / n as f64).abs() < 1e-9);
    }
}
