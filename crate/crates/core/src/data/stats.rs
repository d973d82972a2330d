use serde::{Deserialize, Serialize};

use super::dataset::ProjectRecord;
use crate::error::{Error, Result};

/// Moment summary of one variable. `sd` is the sample standard deviation;
/// skewness is `m3 / m2^1.5` and kurtosis `m4 / m2^2` (3 for a normal),
/// both `None` for a constant variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariableStats {
    pub mean: f64,
    pub sd: f64,
    pub skewness: Option<f64>,
    pub kurtosis: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub n: usize,
    pub ucp: VariableStats,
    pub effort: VariableStats,
    pub productivity: VariableStats,
}

pub fn describe_values(values: &[f64]) -> Result<VariableStats> {
    if values.len() < 2 {
        return Err(Error::TooFew {
            what: "values to describe",
            needed: 2,
            got: values.len(),
        });
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let central = |p: i32| values.iter().map(|v| (v - mean).powi(p)).sum::<f64>() / n;
    let m2 = central(2);
    let sd = (m2 * n / (n - 1.0)).sqrt();
    let spread = values.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
    if spread <= 1e-12 * mean.abs().max(1.0) {
        return Ok(VariableStats {
            mean,
            sd: 0.0,
            skewness: None,
            kurtosis: None,
        });
    }
    Ok(VariableStats {
        mean,
        sd,
        skewness: Some(central(3) / m2.powf(1.5)),
        kurtosis: Some(central(4) / (m2 * m2)),
    })
}

pub fn describe(records: &[ProjectRecord]) -> Result<DatasetStats> {
    let column = |f: fn(&ProjectRecord) -> f64| records.iter().map(f).collect::<Vec<_>>();
    Ok(DatasetStats {
        n: records.len(),
        ucp: describe_values(&column(|r| r.ucp))?,
        effort: describe_values(&column(|r| r.effort))?,
        productivity: describe_values(&column(|r| r.productivity))?,
    })
}
