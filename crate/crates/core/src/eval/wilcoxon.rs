//! Two-sided Wilcoxon rank-sum test with midranks for ties.
//!
//! Samples that are both smaller than [`EXACT_LIMIT`] use the exact
//! permutation distribution of the rank sum (ties included); larger samples
//! use the normal approximation with continuity and tie corrections.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

pub const EXACT_LIMIT: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankSumMethod {
    Exact,
    Normal,
    /// Every value tied; no evidence either way.
    AllTied,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankSumResult {
    /// Rank sum of the first sample.
    pub statistic: f64,
    pub p_value: f64,
    pub method: RankSumMethod,
}

impl RankSumResult {
    pub fn significant(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

/// Midranks (1-based) of `values` in their own order, plus the tie-group sizes.
pub fn midranks(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        ties.push(j - i + 1);
        i = j + 1;
    }
    (ranks, ties)
}

pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64]) -> Result<RankSumResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty("rank-sum sample"));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::invalid("rank-sum samples must be finite"));
    }
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, ties) = midranks(&pooled);
    let statistic: f64 = ranks[..a.len()].iter().sum();
    if ties.len() == 1 {
        return Ok(RankSumResult {
            statistic,
            p_value: 1.0,
            method: RankSumMethod::AllTied,
        });
    }
    if a.len() < EXACT_LIMIT && b.len() < EXACT_LIMIT {
        Ok(RankSumResult {
            statistic,
            p_value: exact_p(&ranks, a.len(), statistic),
            method: RankSumMethod::Exact,
        })
    } else {
        Ok(RankSumResult {
            statistic,
            p_value: normal_p(a.len(), b.len(), &ties, statistic),
            method: RankSumMethod::Normal,
        })
    }
}

/// Two-sided p from the permutation distribution of the rank sum over all
/// `n`-subsets of the pooled midranks. Doubled midranks are integers, so
/// subset counts are tallied by dynamic programming over doubled sums.
fn exact_p(ranks: &[f64], n: usize, statistic: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let max_sum: usize = doubled.iter().sum();
    // counts[k][s]: subsets of size k with doubled sum s.
    let mut counts = vec![vec![0f64; max_sum + 1]; n + 1];
    counts[0][0] = 1.0;
    for &d in &doubled {
        for k in (1..=n).rev() {
            for s in (d..=max_sum).rev() {
                let add = counts[k - 1][s - d];
                if add != 0.0 {
                    counts[k][s] += add;
                }
            }
        }
    }
    let dist = &counts[n];
    let total: f64 = dist.iter().sum();
    let w = (2.0 * statistic).round() as usize;
    let lower: f64 = dist[..=w].iter().sum::<f64>() / total;
    let upper: f64 = dist[w..].iter().sum::<f64>() / total;
    (2.0 * lower.min(upper)).min(1.0)
}

fn normal_p(n: usize, m: usize, ties: &[usize], statistic: f64) -> f64 {
    let (nf, mf) = (n as f64, m as f64);
    let total = nf + mf;
    let mean = nf * (total + 1.0) / 2.0;
    let tie_term: f64 = ties
        .iter()
        .map(|&t| {
            let t = t as f64;
            t * t * t - t
        })
        .sum();
    let var = nf * mf / 12.0 * ((total + 1.0) - tie_term / (total * (total - 1.0)));
    if !(var > 0.0) {
        return 1.0;
    }
    let z = ((statistic - mean).abs() - 0.5).max(0.0) / var.sqrt();
    let normal = Normal::standard();
    (2.0 * (1.0 - normal.cdf(z))).clamp(0.0, 1.0)
}
