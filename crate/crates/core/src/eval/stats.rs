use statrs::function::erf::erfc;

use crate::error::{Error, Result};

const ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProportionTest {
    pub z: f64,
    /// Two-sided p-value.
    pub p_value: f64,
    pub significant: bool,
}

/// Two-proportion z-test with pooled proportion; significant when the
/// two-sided p-value is below 0.05. A pooled proportion of exactly 0 or 1
/// gives `z = 0`.
pub fn equal_proportion_test(err_a: f64, n_a: u64, err_b: f64, n_b: u64) -> Result<ProportionTest> {
    if !(0.0..=1.0).contains(&err_a) || !(0.0..=1.0).contains(&err_b) {
        return Err(Error::InvalidArgument(format!(
            "proportions must lie in [0, 1]: {err_a}, {err_b}"
        )));
    }
    if n_a == 0 || n_b == 0 {
        return Err(Error::InvalidArgument("sample sizes must be positive".into()));
    }
    let (na, nb) = (n_a as f64, n_b as f64);
    let pooled = (err_a * na + err_b * nb) / (na + nb);
    if pooled <= 0.0 || pooled >= 1.0 {
        return Ok(ProportionTest {
            z: 0.0,
            p_value: 1.0,
            significant: false,
        });
    }
    let se = (pooled * (1.0 - pooled) * (1.0 / na + 1.0 / nb)).sqrt();
    let z = (err_a - err_b) / se;
    let p_value = erfc(z.abs() / std::f64::consts::SQRT_2);
    Ok(ProportionTest {
        z,
        p_value,
        significant: p_value < ALPHA,
    })
}

/// Sample mean and standard deviation (divisor `len - 1`).
pub fn mean_and_std(values: &[f64]) -> Option<(f64, f64)> {
    if values.len() < 2 {
        return None;
    }
    // Centered on the first value: constant input gives exactly zero.
    let n = values.len() as f64;
    let shift = values[0];
    let offset = values.iter().map(|v| v - shift).sum::<f64>() / n;
    let var = values
        .iter()
        .map(|v| (v - shift - offset).powi(2))
        .sum::<f64>()
        / (n - 1.0);
    Some((shift + offset, var.sqrt()))
}
