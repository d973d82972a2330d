//! Leave-one-out cross-validation and the model builders it drives.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::PredictionRecord;
use crate::baselines::{self, nassif_fit, NassifModel, NassifSample, ProductivityMap};
use crate::data::dataset::ProjectRecord;
use crate::error::{Error, Result};
use crate::pipeline::{train_hybrid, HybridConfig, HybridModel};
use crate::ucp::WeightTable;

/// A fitted model that estimates effort for a project.
pub trait Estimator: Send + Sync {
    fn estimate(&self, record: &ProjectRecord) -> Result<f64>;
}

/// Fits an [`Estimator`] on training rows.
pub trait ModelBuilder: Sync {
    fn name(&self) -> String;
    fn fit(&self, training: &[ProjectRecord]) -> Result<Box<dyn Estimator>>;
}

/// Fold `i` trains on every row except `i` and predicts row `i`. Folds run
/// in parallel; results come back in fold order.
pub fn loocv(records: &[ProjectRecord], builder: &dyn ModelBuilder) -> Result<Vec<PredictionRecord>> {
    if records.len() < 3 {
        return Err(Error::TooFew {
            what: "rows for leave-one-out cross-validation",
            needed: 3,
            got: records.len(),
        });
    }
    let name = builder.name();
    let outcomes: Vec<Result<PredictionRecord>> = (0..records.len())
        .into_par_iter()
        .map(|fold| {
            let training: Vec<ProjectRecord> = records
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != fold)
                .map(|(_, r)| r.clone())
                .collect();
            let test = &records[fold];
            let model = builder.fit(&training)?;
            let predicted = model.estimate(test)?;
            PredictionRecord::new(test.effort, predicted, name.clone(), fold)
        })
        .collect();
    outcomes
        .into_iter()
        .enumerate()
        .map(|(fold, r)| {
            r.map_err(|e| Error::Fold {
                fold,
                source: Box::new(e),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Hybrid,
    Karner,
    Sw,
    Nassif,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::Hybrid, ModelKind::Karner, ModelKind::Sw, ModelKind::Nassif];

    /// Name used in reports; the Nassif baseline is marked approximate.
    pub fn report_name(self) -> &'static str {
        match self {
            ModelKind::Hybrid => "hybrid",
            ModelKind::Karner => "karner",
            ModelKind::Sw => "sw",
            ModelKind::Nassif => "nassif_approx",
        }
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hybrid" => Ok(ModelKind::Hybrid),
            "karner" => Ok(ModelKind::Karner),
            "sw" => Ok(ModelKind::Sw),
            "nassif" | "nassif_approx" => Ok(ModelKind::Nassif),
            other => Err(Error::Config(format!(
                "unknown model {other:?}; expected hybrid, karner, sw or nassif"
            ))),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.report_name())
    }
}

pub struct KarnerBuilder;

struct Karner;

impl Estimator for Karner {
    fn estimate(&self, record: &ProjectRecord) -> Result<f64> {
        baselines::karner_estimate(record.ucp)
    }
}

impl ModelBuilder for KarnerBuilder {
    fn name(&self) -> String {
        ModelKind::Karner.report_name().into()
    }

    fn fit(&self, _training: &[ProjectRecord]) -> Result<Box<dyn Estimator>> {
        Ok(Box::new(Karner))
    }
}

pub struct SwBuilder;

struct SchneiderWinters;

impl Estimator for SchneiderWinters {
    fn estimate(&self, record: &ProjectRecord) -> Result<f64> {
        baselines::sw_estimate(record.ucp, &record.env)
    }
}

impl ModelBuilder for SwBuilder {
    fn name(&self) -> String {
        ModelKind::Sw.report_name().into()
    }

    fn fit(&self, _training: &[ProjectRecord]) -> Result<Box<dyn Estimator>> {
        Ok(Box::new(SchneiderWinters))
    }
}

/// Log-linear baseline; the productivity map is fixed or, when `map` is
/// `None`, rebuilt from each training set's quartiles.
pub struct NassifBuilder {
    pub weights: WeightTable,
    pub map: Option<ProductivityMap>,
}

struct Nassif {
    model: NassifModel,
    weights: WeightTable,
}

impl Estimator for Nassif {
    fn estimate(&self, record: &ProjectRecord) -> Result<f64> {
        self.model.estimate(record.ucp, &record.env, &self.weights)
    }
}

impl NassifBuilder {
    pub fn fit_model(&self, training: &[ProjectRecord]) -> Result<NassifModel> {
        let map = match self.map {
            Some(m) => m,
            None => {
                let sums: Vec<f64> = training
                    .iter()
                    .map(|r| baselines::prod_sum(&r.env, &self.weights))
                    .collect();
                let prods: Vec<f64> = training.iter().map(|r| r.productivity).collect();
                ProductivityMap::from_quartiles(&sums, &prods)?
            }
        };
        let samples: Vec<NassifSample> = training
            .iter()
            .map(|r| NassifSample {
                ucp: r.ucp,
                productivity: r.productivity,
                effort: r.effort,
            })
            .collect();
        nassif_fit(&samples, map)
    }
}

impl ModelBuilder for NassifBuilder {
    fn name(&self) -> String {
        ModelKind::Nassif.report_name().into()
    }

    fn fit(&self, training: &[ProjectRecord]) -> Result<Box<dyn Estimator>> {
        Ok(Box::new(Nassif {
            model: self.fit_model(training)?,
            weights: self.weights,
        }))
    }
}

pub struct HybridBuilder {
    pub config: HybridConfig,
}

struct Hybrid(HybridModel);

impl Estimator for Hybrid {
    fn estimate(&self, record: &ProjectRecord) -> Result<f64> {
        Ok(self.0.predict_effort(&record.env, record.ucp)?.effort)
    }
}

impl ModelBuilder for HybridBuilder {
    fn name(&self) -> String {
        ModelKind::Hybrid.report_name().into()
    }

    fn fit(&self, training: &[ProjectRecord]) -> Result<Box<dyn Estimator>> {
        Ok(Box::new(Hybrid(train_hybrid(training, &self.config)?)))
    }
}
