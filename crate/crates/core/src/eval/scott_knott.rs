//! Scott-Knott grouping of model means.
//!
//! Absolute errors of all models are Box-Cox transformed with one pooled
//! lambda. Model means are sorted from worst (largest) to best, then split
//! recursively at the cut maximizing the between-group sum of squares. A cut
//! is kept when `lambda* = pi / (2 (pi - 2)) * B0 / s0^2` exceeds the
//! chi-square quantile with `k / (pi - 2)` degrees of freedom, where
//! `s0^2 = (sum (m_i - m)^2 + v s_m^2) / (k + v)`, `s_m^2` is the pooled
//! within-model variance divided by the per-model sample size, and `v` its
//! degrees of freedom.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::boxcox::{boxcox, DEFAULT_LAMBDA_RANGE};
use crate::error::{Error, Result};

pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMean {
    pub model: String,
    pub mean: f64,
    /// Index into `ScottKnottResult::groups`.
    pub group: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScottKnottResult {
    /// Left to right, worst to best.
    pub groups: Vec<Vec<String>>,
    /// Means of the transformed errors, in the same left-to-right order.
    pub means: Vec<ModelMean>,
    pub boxcox_lambda: f64,
    pub boxcox_shift: f64,
}

/// Group models by their absolute errors (all vectors the same length).
pub fn scott_knott(errors: &[(String, Vec<f64>)], alpha: f64) -> Result<ScottKnottResult> {
    if errors.is_empty() {
        return Err(Error::Empty("model list"));
    }
    let r = errors[0].1.len();
    if r == 0 || errors.iter().any(|(_, e)| e.len() != r) {
        return Err(Error::invalid(
            "Scott-Knott needs nonempty, equal-length error vectors",
        ));
    }
    let pooled: Vec<f64> = errors.iter().flat_map(|(_, e)| e.iter().copied()).collect();
    let bc = boxcox(&pooled, DEFAULT_LAMBDA_RANGE)?;
    let transformed: Vec<&[f64]> = bc.transformed.chunks(r).collect();

    let k = errors.len();
    let mut stats: Vec<(usize, f64)> = transformed
        .iter()
        .enumerate()
        .map(|(i, t)| (i, t.iter().sum::<f64>() / r as f64))
        .collect();
    // Descending mean; ties keep input order.
    stats.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));

    let dof = (k * (r - 1)) as f64;
    let within: f64 = transformed
        .iter()
        .map(|t| {
            let m = t.iter().sum::<f64>() / r as f64;
            t.iter().map(|x| (x - m).powi(2)).sum::<f64>()
        })
        .sum();
    let mean_var = if dof > 0.0 { within / dof / r as f64 } else { 0.0 };

    let means: Vec<f64> = stats.iter().map(|s| s.1).collect();
    let mut bounds = Vec::new();
    partition(&means, 0, k, mean_var, dof, alpha, &mut bounds)?;

    let mut groups = Vec::new();
    let mut out_means = Vec::new();
    for (g, &(start, end)) in bounds.iter().enumerate() {
        let mut names = Vec::new();
        for &(idx, mean) in &stats[start..end] {
            names.push(errors[idx].0.clone());
            out_means.push(ModelMean {
                model: errors[idx].0.clone(),
                mean,
                group: g,
            });
        }
        groups.push(names);
    }
    Ok(ScottKnottResult {
        groups,
        means: out_means,
        boxcox_lambda: bc.lambda,
        boxcox_shift: bc.shift,
    })
}

/// Best cut position and its between-group sum of squares.
fn best_cut(means: &[f64]) -> (usize, f64) {
    let k = means.len() as f64;
    let total: f64 = means.iter().sum();
    let mut best = (1, f64::NEG_INFINITY);
    let mut left = 0.0;
    for cut in 1..means.len() {
        left += means[cut - 1];
        let (k1, k2) = (cut as f64, k - cut as f64);
        let right = total - left;
        let b0 = left * left / k1 + right * right / k2 - total * total / k;
        if b0 > best.1 {
            best = (cut, b0);
        }
    }
    best
}

fn partition(
    means: &[f64],
    start: usize,
    end: usize,
    mean_var: f64,
    dof: f64,
    alpha: f64,
    out: &mut Vec<(usize, usize)>,
) -> Result<()> {
    let group = &means[start..end];
    let k = group.len();
    if k < 2 {
        out.push((start, end));
        return Ok(());
    }
    let (cut, b0) = best_cut(group);
    let centre = group.iter().sum::<f64>() / k as f64;
    let spread: f64 = group.iter().map(|m| (m - centre).powi(2)).sum();
    let s0 = (spread + dof * mean_var) / (k as f64 + dof);
    let scale = spread.max(centre.abs()).max(1.0);
    if !(b0 > 1e-12 * scale) || !(s0 > 0.0) {
        out.push((start, end));
        return Ok(());
    }
    let statistic = PI / (2.0 * (PI - 2.0)) * b0 / s0;
    let chi = ChiSquared::new(k as f64 / (PI - 2.0)).map_err(|e| Error::invalid(e.to_string()))?;
    if statistic > chi.inverse_cdf(1.0 - alpha) {
        partition(means, start, start + cut, mean_var, dof, alpha, out)?;
        partition(means, start + cut, end, mean_var, dof, alpha, out)?;
    } else {
        out.push((start, end));
    }
    Ok(())
}
