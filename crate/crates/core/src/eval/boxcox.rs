use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_LAMBDA_RANGE: (f64, f64) = (-5.0, 5.0);
const LOG_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxCoxResult {
    pub transformed: Vec<f64>,
    pub lambda: f64,
    /// Added to every value before transforming (0 when all were positive).
    pub shift: f64,
}

pub fn boxcox_transform(v: f64, lambda: f64) -> f64 {
    if lambda.abs() < LOG_THRESHOLD {
        v.ln()
    } else {
        (v.powf(lambda) - 1.0) / lambda
    }
}

/// Profile log-likelihood of `lambda` for positive `values`, up to a constant.
pub fn boxcox_log_likelihood(values: &[f64], lambda: f64) -> f64 {
    let n = values.len() as f64;
    let t: Vec<f64> = values.iter().map(|&v| boxcox_transform(v, lambda)).collect();
    let mean = t.iter().sum::<f64>() / n;
    let var = t.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let log_sum: f64 = values.iter().map(|v| v.ln()).sum();
    -0.5 * n * var.ln() + (lambda - 1.0) * log_sum
}

/// Shift nonpositive data by `1 - min`, then pick lambda in `range` by
/// golden-section search on the profile log-likelihood.
pub fn boxcox(values: &[f64], range: (f64, f64)) -> Result<BoxCoxResult> {
    if values.is_empty() {
        return Err(Error::Empty("Box-Cox input"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("Box-Cox input must be finite"));
    }
    let (lo, hi) = range;
    if !(lo < hi) {
        return Err(Error::invalid("Box-Cox lambda range is empty"));
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let shift = if min <= 0.0 { 1.0 - min } else { 0.0 };
    let shifted: Vec<f64> = values.iter().map(|v| v + shift).collect();
    if shifted.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::invalid("Box-Cox input not positive after shifting"));
    }

    let max = shifted.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lambda = if max - shifted.iter().copied().fold(f64::INFINITY, f64::min) <= 1e-12 * max {
        1.0
    } else {
        golden_max(|l| boxcox_log_likelihood(&shifted, l), lo, hi)
    };
    Ok(BoxCoxResult {
        transformed: shifted.iter().map(|&v| boxcox_transform(v, lambda)).collect(),
        lambda,
        shift,
    })
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-10 {
            break;
        }
        // NaN likelihoods (overflow at extreme lambda) lose to finite ones.
        if fc > fd || fd.is_nan() {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    (a + b) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::stats::describe_values;
    use rand::SeedableRng;
    use rand_distr::{Distribution, LogNormal};

    #[test]
    fn transform_special_cases() {
        assert_eq!(boxcox_transform(7.5, 1.0), 6.5);
        assert_eq!(boxcox_transform(std::f64::consts::E, 0.0), 1.0);
        assert!((boxcox_transform(4.0, 0.5) - 2.0).abs() < 1e-15);
        assert!((boxcox_transform(3.0, 1e-7) - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn lognormal_data_become_symmetric() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let d = LogNormal::new(1.0, 0.8).unwrap();
        let v: Vec<f64> = (0..2000).map(|_| d.sample(&mut rng)).collect();
        let r = boxcox(&v, DEFAULT_LAMBDA_RANGE).unwrap();
        let before = describe_values(&v).unwrap().skewness.unwrap();
        let after = describe_values(&r.transformed).unwrap().skewness.unwrap();
        assert!(after.abs() < before.abs());
        assert!(r.lambda.abs() < 0.15, "lambda {}", r.lambda);
        assert_eq!(r.shift, 0.0);
    }

    #[test]
    fn optimum_beats_neighbours() {
        let v = [0.5, 1.0, 1.5, 2.5, 4.0, 7.0, 12.0, 30.0];
        let r = boxcox(&v, DEFAULT_LAMBDA_RANGE).unwrap();
        let best = boxcox_log_likelihood(&v, r.lambda);
        for delta in [-0.05, 0.05, -0.5, 0.5] {
            assert!(best >= boxcox_log_likelihood(&v, r.lambda + delta));
        }
    }

    #[test]
    fn degenerate_and_shifted() {
        let r = boxcox(&[4.0; 5], DEFAULT_LAMBDA_RANGE).unwrap();
        assert_eq!(r.lambda, 1.0);
        assert_eq!(r.transformed, vec![3.0; 5]);

        let r = boxcox(&[0.0, 1.0, 3.0, 9.0], DEFAULT_LAMBDA_RANGE).unwrap();
        assert_eq!(r.shift, 1.0);
        let r = boxcox(&[-2.0, 1.0, 3.0], DEFAULT_LAMBDA_RANGE).unwrap();
        assert_eq!(r.shift, 3.0);

        assert!(boxcox(&[], DEFAULT_LAMBDA_RANGE).is_err());
        assert!(boxcox(&[1.0, f64::NAN], DEFAULT_LAMBDA_RANGE).is_err());
    }
}
