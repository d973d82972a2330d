//! LOOCV comparison of several models on one dataset.

use serde::{Deserialize, Serialize};

use super::loocv::{loocv, HybridBuilder, KarnerBuilder, ModelBuilder, ModelKind, NassifBuilder, SwBuilder};
use super::metrics::{MetricReport, PredictionRecord, DEFAULT_SEED, DEFAULT_SP0_RUNS};
use super::scott_knott::{scott_knott, ScottKnottResult, DEFAULT_ALPHA};
use super::wilcoxon::wilcoxon_rank_sum;
use crate::baselines::ProductivityMap;
use crate::data::dataset::ProjectRecord;
use crate::error::{Error, Result};
use crate::pipeline::HybridConfig;
use crate::ucp::WeightTable;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchmarkConfig {
    pub hybrid: HybridConfig,
    pub weights: WeightTable,
    /// Fixed productivity map for the log-linear baseline; quartiles of
    /// each training set when absent.
    pub nassif_map: Option<ProductivityMap>,
    pub sp0_runs: usize,
    pub seed: u64,
    pub alpha: f64,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self {
            hybrid: HybridConfig::default(),
            weights: WeightTable::default(),
            nassif_map: None,
            sp0_runs: DEFAULT_SP0_RUNS,
            seed: DEFAULT_SEED,
            alpha: DEFAULT_ALPHA,
        }
    }
}

impl BenchmarkConfig {
    pub fn validate(&self) -> Result<()> {
        self.hybrid.validate()?;
        self.weights.validate()?;
        if self.sp0_runs < 2 {
            return Err(Error::Config("benchmark.sp0_runs must be at least 2".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config("benchmark.alpha must be in (0, 1)".into()));
        }
        Ok(())
    }

    pub fn builder(&self, kind: ModelKind) -> Box<dyn ModelBuilder> {
        match kind {
            ModelKind::Hybrid => Box::new(HybridBuilder {
                config: self.hybrid.clone(),
            }),
            ModelKind::Karner => Box::new(KarnerBuilder),
            ModelKind::Sw => Box::new(SwBuilder),
            ModelKind::Nassif => Box::new(NassifBuilder {
                weights: self.weights,
                map: self.nassif_map,
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseTest {
    pub model_a: String,
    pub model_b: String,
    pub statistic: f64,
    pub p_value: f64,
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificanceReport {
    pub alpha: f64,
    /// One entry per unordered pair, in model order.
    pub tests: Vec<PairwiseTest>,
}

impl SignificanceReport {
    pub fn get(&self, a: &str, b: &str) -> Option<&PairwiseTest> {
        self.tests
            .iter()
            .find(|t| (t.model_a == a && t.model_b == b) || (t.model_a == b && t.model_b == a))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub models: Vec<String>,
    /// Project id of each fold.
    pub ids: Vec<String>,
    /// Per model, in model order, each in fold order.
    pub predictions: Vec<Vec<PredictionRecord>>,
    pub metrics: Vec<MetricReport>,
    /// Present when at least two models ran.
    pub significance: Option<SignificanceReport>,
    pub scott_knott: ScottKnottResult,
}

impl BenchmarkReport {
    pub fn metric(&self, model: &str) -> Option<&MetricReport> {
        self.metrics.iter().find(|m| m.model == model)
    }
}

pub fn run_benchmark(
    records: &[ProjectRecord],
    models: &[ModelKind],
    config: &BenchmarkConfig,
) -> Result<BenchmarkReport> {
    config.validate()?;
    if models.is_empty() {
        return Err(Error::Empty("model list"));
    }
    let mut kinds: Vec<ModelKind> = Vec::new();
    for &m in models {
        if !kinds.contains(&m) {
            kinds.push(m);
        }
    }

    let mut predictions = Vec::new();
    let mut metrics = Vec::new();
    for &kind in &kinds {
        log::info!("running leave-one-out for {kind}");
        let builder = config.builder(kind);
        let preds = loocv(records, builder.as_ref())?;
        metrics.push(MetricReport::compute(&preds, config.sp0_runs, config.seed)?);
        predictions.push(preds);
    }
    let names: Vec<String> = kinds.iter().map(|k| k.report_name().to_string()).collect();
    let errors: Vec<(String, Vec<f64>)> = names
        .iter()
        .zip(&predictions)
        .map(|(n, p)| (n.clone(), p.iter().map(PredictionRecord::absolute_error).collect()))
        .collect();

    let significance = if errors.len() >= 2 {
        let mut tests = Vec::new();
        for i in 0..errors.len() {
            for j in i + 1..errors.len() {
                let r = wilcoxon_rank_sum(&errors[i].1, &errors[j].1)?;
                tests.push(PairwiseTest {
                    model_a: errors[i].0.clone(),
                    model_b: errors[j].0.clone(),
                    statistic: r.statistic,
                    p_value: r.p_value,
                    significant: r.significant(config.alpha),
                });
            }
        }
        Some(SignificanceReport {
            alpha: config.alpha,
            tests,
        })
    } else {
        None
    };

    Ok(BenchmarkReport {
        models: names,
        ids: records.iter().map(|r| r.id.clone()).collect(),
        predictions,
        metrics,
        significance,
        scott_knott: scott_knott(&errors, config.alpha)?,
    })
}
