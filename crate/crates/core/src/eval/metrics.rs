//! Accuracy measures over held-out predictions, and the random-guessing
//! baseline they are standardized against.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_SP0_RUNS: usize = 1000;
pub const DEFAULT_SEED: u64 = 20571;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub actual: f64,
    pub predicted: f64,
    pub model_name: String,
    pub fold_index: usize,
}

impl PredictionRecord {
    pub fn new(actual: f64, predicted: f64, model_name: impl Into<String>, fold_index: usize) -> Result<Self> {
        let model_name = model_name.into();
        if !(actual > 0.0 && actual.is_finite() && predicted > 0.0 && predicted.is_finite()) {
            return Err(Error::invalid(format!(
                "{model_name} fold {fold_index}: actual {actual} and predicted {predicted} must be positive"
            )));
        }
        Ok(Self {
            actual,
            predicted,
            model_name,
            fold_index,
        })
    }

    pub fn absolute_error(&self) -> f64 {
        absolute_error(self.actual, self.predicted)
    }
}

pub fn absolute_error(actual: f64, predicted: f64) -> f64 {
    (actual - predicted).abs()
}

fn check_records(records: &[PredictionRecord]) -> Result<()> {
    if records.is_empty() {
        return Err(Error::Empty("prediction records"));
    }
    if let Some(r) = records.iter().find(|r| !(r.actual > 0.0 && r.predicted > 0.0)) {
        return Err(Error::invalid(format!(
            "fold {}: actual {} / predicted {} must be positive",
            r.fold_index, r.actual, r.predicted
        )));
    }
    Ok(())
}

pub fn mae(records: &[PredictionRecord]) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::Empty("prediction records"));
    }
    Ok(records.iter().map(PredictionRecord::absolute_error).sum::<f64>() / records.len() as f64)
}

/// Mean of `AE / min(actual, predicted)`, in percent.
pub fn mbre(records: &[PredictionRecord]) -> Result<f64> {
    check_records(records)?;
    let sum: f64 = records
        .iter()
        .map(|r| r.absolute_error() / r.actual.min(r.predicted))
        .sum();
    Ok(100.0 * sum / records.len() as f64)
}

/// Mean of `AE / max(actual, predicted)`, in percent.
pub fn mibre(records: &[PredictionRecord]) -> Result<f64> {
    check_records(records)?;
    let sum: f64 = records
        .iter()
        .map(|r| r.absolute_error() / r.actual.max(r.predicted))
        .sum();
    Ok(100.0 * sum / records.len() as f64)
}

fn check_actuals(actuals: &[f64]) -> Result<()> {
    if actuals.len() < 2 {
        return Err(Error::TooFew {
            what: "actual values for random guessing",
            needed: 2,
            got: actuals.len(),
        });
    }
    Ok(())
}

/// Expected MAE of random guessing, where each project is "predicted" by
/// the actual value of a uniformly chosen other project.
pub fn baseline_mae_p0(actuals: &[f64]) -> Result<f64> {
    check_actuals(actuals)?;
    let n = actuals.len();
    // Every row averages over the same n - 1 guesses, so one division at
    // the end suffices (and is exact for integer data).
    let mut total = 0.0;
    for (t, &yt) in actuals.iter().enumerate() {
        for (r, &yr) in actuals.iter().enumerate() {
            if r != t {
                total += (yt - yr).abs();
            }
        }
    }
    Ok(total / (n * (n - 1)) as f64)
}

/// Sample standard deviation of the per-run MAE over `runs` seeded
/// random-guessing runs.
pub fn baseline_sd_sp0(actuals: &[f64], runs: usize, seed: u64) -> Result<f64> {
    check_actuals(actuals)?;
    if runs < 2 {
        return Err(Error::TooFew {
            what: "random-guessing runs",
            needed: 2,
            got: runs,
        });
    }
    let n = actuals.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut maes = Vec::with_capacity(runs);
    for _ in 0..runs {
        let mut sum = 0.0;
        for (t, &yt) in actuals.iter().enumerate() {
            let mut r = rng.random_range(0..n - 1);
            if r >= t {
                r += 1;
            }
            sum += (yt - actuals[r]).abs();
        }
        maes.push(sum / n as f64);
    }
    let mean = maes.iter().sum::<f64>() / runs as f64;
    let var = maes.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (runs - 1) as f64;
    Ok(var.sqrt())
}

fn actuals_of(records: &[PredictionRecord]) -> Vec<f64> {
    records.iter().map(|r| r.actual).collect()
}

/// `1 - MAE / MAE_p0`.
pub fn standardized_accuracy(records: &[PredictionRecord], actuals: &[f64]) -> Result<f64> {
    let base = baseline_mae_p0(actuals)?;
    if !(base > 0.0) {
        return Err(Error::invalid("random-guessing MAE is zero; SA is undefined"));
    }
    Ok(1.0 - mae(records)? / base)
}

/// `(MAE - MAE_p0) / SP0`; negative when the model beats random guessing.
pub fn effect_size(records: &[PredictionRecord], actuals: &[f64], sp0: f64) -> Result<f64> {
    if !(sp0 > 0.0) {
        return Err(Error::invalid("random-guessing SD is zero; effect size is undefined"));
    }
    Ok((mae(records)? - baseline_mae_p0(actuals)?) / sp0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub model: String,
    pub n: usize,
    pub mae: f64,
    /// Percent.
    pub mbre: f64,
    /// Percent.
    pub mibre: f64,
    pub sa: f64,
    /// Signed effect size.
    pub effect_size: f64,
    pub baseline_mae: f64,
    pub baseline_sd: f64,
}

impl MetricReport {
    /// Metrics of one model's records; the baseline uses those records'
    /// actual values.
    pub fn compute(records: &[PredictionRecord], sp0_runs: usize, seed: u64) -> Result<Self> {
        check_records(records)?;
        let actuals = actuals_of(records);
        let baseline_sd = baseline_sd_sp0(&actuals, sp0_runs, seed)?;
        Ok(Self {
            model: records[0].model_name.clone(),
            n: records.len(),
            mae: mae(records)?,
            mbre: mbre(records)?,
            mibre: mibre(records)?,
            sa: standardized_accuracy(records, &actuals)?,
            effect_size: effect_size(records, &actuals, baseline_sd)?,
            baseline_mae: baseline_mae_p0(&actuals)?,
            baseline_sd,
        })
    }

    pub fn abs_effect_size(&self) -> f64 {
        self.effect_size.abs()
    }
}
