//! Comparison models: Karner's fixed ratio, Schneider & Winters' three
//! ratios, and the log-linear model `effort = alpha / P * UCP^beta` with a
//! four-level productivity map.
//!
//! The productivity map stands in for the original fuzzy inference system:
//! it is a crisp lookup on the weighted environmental sum with three ordered
//! breakpoints. Reports label it as an approximate baseline.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ucp::{weighted_env_sum, EnvRatings, WeightTable};

pub const KARNER_RATIO: f64 = 20.0;
/// Hours per UCP for counts `<= 2`, `3..=4`, and `> 4`.
pub const SW_RATIOS: [f64; 3] = [20.0, 28.0, 36.0];

fn check_ucp(ucp: f64) -> Result<()> {
    if ucp > 0.0 && ucp.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("UCP must be positive, got {ucp}")))
    }
}

pub fn karner_estimate(ucp: f64) -> Result<f64> {
    check_ucp(ucp)?;
    Ok(KARNER_RATIO * ucp)
}

/// E1..E6 rated below 3 plus E7..E8 rated above 3.
pub fn sw_count(env: &EnvRatings) -> u32 {
    let v = env.values();
    let low = v[..6].iter().filter(|&&e| e < 3).count();
    let high = v[6..].iter().filter(|&&e| e > 3).count();
    (low + high) as u32
}

pub fn sw_ratio(count: u32) -> f64 {
    match count {
        0..=2 => SW_RATIOS[0],
        3..=4 => SW_RATIOS[1],
        _ => SW_RATIOS[2],
    }
}

pub fn sw_estimate(ucp: f64, env: &EnvRatings) -> Result<f64> {
    check_ucp(ucp)?;
    Ok(sw_ratio(sw_count(env)) * ucp)
}

/// Crisp four-level productivity lookup on the weighted environmental sum.
///
/// Intervals are `(-inf, b0]`, `(b0, b1]`, `(b1, b2]`, `(b2, inf)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductivityMap {
    pub breakpoints: [f64; 3],
    pub levels: [f64; 4],
}

impl ProductivityMap {
    pub fn new(breakpoints: [f64; 3], levels: [f64; 4]) -> Result<Self> {
        if breakpoints.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(Error::Config(
                "productivity map breakpoints must be ascending".into(),
            ));
        }
        if levels.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
            return Err(Error::Config("productivity levels must be positive".into()));
        }
        Ok(Self {
            breakpoints,
            levels,
        })
    }

    pub fn level_index(&self, prod_sum: f64) -> usize {
        self.breakpoints.iter().filter(|&&b| prod_sum > b).count()
    }

    pub fn lookup(&self, prod_sum: f64) -> f64 {
        self.levels[self.level_index(prod_sum)]
    }

    /// Breakpoints at the quartiles of `prod_sums`; each level is the median
    /// productivity of the rows in its interval (overall median when an
    /// interval is empty).
    pub fn from_quartiles(prod_sums: &[f64], productivities: &[f64]) -> Result<Self> {
        if prod_sums.is_empty() || prod_sums.len() != productivities.len() {
            return Err(Error::invalid(
                "quartile map needs matching, nonempty prod_sum and productivity lists",
            ));
        }
        let mut sorted = prod_sums.to_vec();
        sorted.sort_by(f64::total_cmp);
        let breakpoints = [
            quantile(&sorted, 0.25),
            quantile(&sorted, 0.5),
            quantile(&sorted, 0.75),
        ];
        let overall = median(productivities.to_vec());
        let probe = Self {
            breakpoints,
            levels: [1.0; 4],
        };
        let mut buckets: [Vec<f64>; 4] = Default::default();
        for (&s, &p) in prod_sums.iter().zip(productivities) {
            buckets[probe.level_index(s)].push(p);
        }
        let levels = buckets.map(|b| if b.is_empty() { overall } else { median(b) });
        Self::new(breakpoints, levels)
    }
}

/// Linear-interpolation quantile of an ascending slice.
pub(crate) fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    quantile(&values, 0.5)
}

pub fn prod_sum(env: &EnvRatings, weights: &WeightTable) -> f64 {
    weighted_env_sum(env, weights)
}

pub fn nassif_productivity(env: &EnvRatings, weights: &WeightTable, map: &ProductivityMap) -> f64 {
    map.lookup(prod_sum(env, weights))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NassifSample {
    pub ucp: f64,
    pub productivity: f64,
    pub effort: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NassifModel {
    pub alpha: f64,
    pub beta: f64,
    pub productivity_map: ProductivityMap,
}

/// Least-squares fit of `ln(effort) + ln(P) = ln(alpha) + beta * ln(UCP)`.
pub fn fit_log_linear(rows: &[NassifSample]) -> Result<(f64, f64)> {
    if rows.len() < 3 {
        return Err(Error::TooFew {
            what: "rows for the log-linear fit",
            needed: 3,
            got: rows.len(),
        });
    }
    let mut xs = Vec::with_capacity(rows.len());
    let mut ys = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        if !(r.ucp > 0.0 && r.productivity > 0.0 && r.effort > 0.0) {
            return Err(Error::invalid(format!(
                "log-linear row {i} has a nonpositive value"
            )));
        }
        xs.push(r.ucp.ln());
        ys.push(r.effort.ln() + r.productivity.ln());
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx <= 1e-12 * n * mx.abs().max(1.0).powi(2) {
        return Err(Error::invalid(
            "UCP is constant across rows; the exponent is not identifiable",
        ));
    }
    let beta = sxy / sxx;
    let alpha = (my - beta * mx).exp();
    Ok((alpha, beta))
}

pub fn nassif_fit(rows: &[NassifSample], productivity_map: ProductivityMap) -> Result<NassifModel> {
    let (alpha, beta) = fit_log_linear(rows)?;
    Ok(NassifModel {
        alpha,
        beta,
        productivity_map,
    })
}

impl NassifModel {
    pub fn estimate_with_productivity(&self, ucp: f64, productivity: f64) -> Result<f64> {
        check_ucp(ucp)?;
        if !(productivity > 0.0) {
            return Err(Error::invalid("productivity must be positive"));
        }
        Ok(self.alpha / productivity * ucp.powf(self.beta))
    }

    pub fn estimate(&self, ucp: f64, env: &EnvRatings, weights: &WeightTable) -> Result<f64> {
        let p = nassif_productivity(env, weights, &self.productivity_map);
        self.estimate_with_productivity(ucp, p)
    }
}
