//! Convergence-order estimates.

/// Least-squares slope of `log y` against `log x`.
///
/// Returns `NaN` for fewer than two points or non-positive data.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len().min(y.len());
    if n < 2 || x.iter().chain(y).take(2 * n).any(|&v| v.is_nan() || v <= 0.0) {
        return f64::NAN;
    }
    let lx: Vec<f64> = x[..n].iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y[..n].iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n as f64;
    let my = ly.iter().sum::<f64>() / n as f64;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn degenerate_inputs() {
        assert!(loglog_slope(&[1.0], &[1.0]).is_nan());
        assert!(loglog_slope(&[1.0, 2.0], &[0.0, 1.0]).is_nan());
    }

    proptest! {
        #[test]
        fn recovers_power_laws(p in -4.0f64..4.0, c in 0.01f64..100.0) {
            let x = [0.04, 0.02, 0.01, 0.005];
            let y: Vec<f64> = x.iter().map(|v: &f64| c * v.powf(p)).collect();
            prop_assert!((loglog_slope(&x, &y) - p).abs() < 1e-10);
        }
    }
}
