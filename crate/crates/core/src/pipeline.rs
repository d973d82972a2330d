//! The two-stage hybrid estimator.
//!
//! Training clusters the rows' productivity (hours per UCP) into labels,
//! teaches a classifier to map environmental ratings to those labels, and
//! fits the RBF network on `(ucp, actual productivity) -> effort`. Estimation
//! classifies the ratings, takes that label's medoid productivity, and feeds
//! it with the UCP size through the network.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cluster::{bisect, make_labels, row_labels, ClusterConfig, ClusterTree, ProductivityLabel};
use crate::data::dataset::ProjectRecord;
use crate::error::{Error, Result, Stage};
use crate::data::synth::Profile;
use crate::rbfnn::{self, EffortScale, RbfSample, RbfTrainConfig, RbfnnModel, UcpScale};
use crate::svm::{train_multiclass, MulticlassSvmModel, SvmConfig};
use crate::ucp::EnvRatings;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HybridConfig {
    pub cluster: ClusterConfig,
    pub svm: SvmConfig,
    pub rbf: RbfTrainConfig,
}

/// Smallest leaf the pipeline lets the clustering produce by default. With
/// two-row leaves a few dozen projects split into 15 to 35 labels, too few
/// rows per class for the classifier to learn anything.
pub const DEFAULT_MIN_LEAF: usize = 11;

impl Default for HybridConfig {
    /// Differs from the stage defaults: larger leaves, and a network on
    /// `ln(ucp)` with a log-effort output and linear terms, so that effort
    /// scales with size across projects that differ by orders of magnitude.
    fn default() -> Self {
        Self {
            cluster: ClusterConfig {
                min_leaf: DEFAULT_MIN_LEAF,
                ..ClusterConfig::default()
            },
            svm: SvmConfig::default(),
            rbf: RbfTrainConfig {
                ucp_scale: UcpScale::Log,
                effort_scale: EffortScale::Log,
                linear_terms: true,
                ..RbfTrainConfig::default()
            },
        }
    }
}

impl HybridConfig {
    /// Default configuration with the hidden-unit cap used for each
    /// synthetic profile (5, 6 and 8 units).
    pub fn for_profile(profile: &Profile) -> Self {
        let mut config = Self::default();
        config.rbf.max_neurons = match profile {
            Profile::Dataset1 => 5,
            Profile::Dataset2 => 6,
            Profile::Dataset3 | Profile::Custom(_) => 8,
        };
        config
    }

    pub fn validate(&self) -> Result<()> {
        self.cluster.validate()?;
        self.svm.validate()?;
        self.rbf.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config: HybridConfig,
    pub rows: usize,
    /// SHA-256 of the training rows, see [`dataset_fingerprint`].
    pub fingerprint: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridModel {
    pub labels: Vec<ProductivityLabel>,
    pub tree: ClusterTree,
    pub classifier: MulticlassSvmModel,
    pub regressor: RbfnnModel,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub effort: f64,
    pub label_id: usize,
    pub label_name: String,
    pub medoid_productivity: f64,
    pub raw_output: f64,
    pub clamped: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSummary {
    pub labels: usize,
    pub classifier_accuracy: f64,
    pub classifier_converged: bool,
    pub neurons: usize,
    pub loo_mse: f64,
}

/// Hex SHA-256 over `id,e1..e8,ucp,effort` lines of the rows.
pub fn dataset_fingerprint(records: &[ProjectRecord]) -> String {
    let mut hasher = Sha256::new();
    for r in records {
        let env: Vec<String> = r.env.values().iter().map(u8::to_string).collect();
        hasher.update(format!("{},{},{},{}\n", r.id, env.join(","), r.ucp, r.effort));
    }
    hex::encode(hasher.finalize())
}

pub fn train_hybrid(records: &[ProjectRecord], config: &HybridConfig) -> Result<HybridModel> {
    config.validate()?;
    if records.len() < 2 {
        return Err(Error::TooFew {
            what: "training rows",
            needed: 2,
            got: records.len(),
        });
    }
    let mut productivity = Vec::with_capacity(records.len());
    for r in records {
        if !(r.ucp > 0.0 && r.effort > 0.0) {
            return Err(Error::invalid(format!(
                "project {}: ucp and effort must be positive",
                r.id
            )));
        }
        productivity.push(r.effort / r.ucp);
    }

    let tree = bisect(&productivity, &config.cluster).map_err(|e| e.in_stage(Stage::Clustering))?;
    let labels = make_labels(&tree, &productivity);
    let targets = row_labels(&tree, &labels);

    let features: Vec<EnvRatings> = records.iter().map(|r| r.env).collect();
    let classifier = train_multiclass(&features, &targets, &config.svm)
        .map_err(|e| e.in_stage(Stage::Classification))?;
    if !classifier.converged() {
        log::warn!(
            "classifier stopped at the iteration cap ({}) before meeting the KKT tolerance",
            config.svm.max_iterations
        );
    }

    let samples: Vec<RbfSample> = records
        .iter()
        .zip(&productivity)
        .map(|(r, &p)| RbfSample {
            ucp: r.ucp,
            productivity: p,
            effort: r.effort,
        })
        .collect();
    let regressor = rbfnn::train(&samples, &config.rbf).map_err(|e| e.in_stage(Stage::Regression))?;

    Ok(HybridModel {
        labels,
        tree,
        classifier,
        regressor,
        provenance: Provenance {
            config: config.clone(),
            rows: records.len(),
            fingerprint: dataset_fingerprint(records),
        },
    })
}

impl HybridModel {
    pub fn label(&self, id: usize) -> Option<&ProductivityLabel> {
        self.labels.iter().find(|l| l.id == id)
    }

    pub fn predict_effort(&self, env: &EnvRatings, ucp: f64) -> Result<Estimate> {
        if !(ucp > 0.0 && ucp.is_finite()) {
            return Err(Error::invalid(format!("ucp must be positive, got {ucp}")));
        }
        let label_id = self
            .classifier
            .predict_label(env)
            .map_err(|e| e.in_stage(Stage::Classification))?;
        let label = self.label(label_id).ok_or_else(|| {
            Error::invalid(format!("classifier produced unknown label {label_id}"))
                .in_stage(Stage::Classification)
        })?;
        let out = self
            .regressor
            .output(ucp, label.medoid_productivity)
            .map_err(|e| e.in_stage(Stage::Regression))?;
        Ok(Estimate {
            effort: out.effort,
            label_id,
            label_name: label.name.clone(),
            medoid_productivity: label.medoid_productivity,
            raw_output: out.raw,
            clamped: out.clamped,
        })
    }

    pub fn summary(&self, records: &[ProjectRecord]) -> Result<TrainingSummary> {
        let productivity: Vec<f64> = records.iter().map(|r| r.effort / r.ucp).collect();
        let targets = row_labels(&self.tree, &self.labels);
        let features: Vec<EnvRatings> = records.iter().map(|r| r.env).collect();
        if targets.len() != records.len() || productivity.len() != records.len() {
            return Err(Error::invalid("summary rows differ from the training rows"));
        }
        Ok(TrainingSummary {
            labels: self.labels.len(),
            classifier_accuracy: self.classifier.training_accuracy(&features, &targets)?,
            classifier_converged: self.classifier.converged(),
            neurons: self.regressor.neurons.len(),
            loo_mse: self.regressor.loo_mse(),
        })
    }

    /// Structural checks run after deserializing a model.
    pub fn check_consistency(&self) -> std::result::Result<(), (&'static str, String)> {
        let mut ids: Vec<usize> = self.labels.iter().map(|l| l.id).collect();
        ids.sort_unstable();
        if ids != self.classifier.classes {
            return Err((
                "classifier",
                format!(
                    "class set {:?} differs from label ids {ids:?}",
                    self.classifier.classes
                ),
            ));
        }
        if self.labels.iter().any(|l| l.leaf >= self.tree.leaves.len()) {
            return Err(("labels", "label refers to a missing tree leaf".into()));
        }
        if self.regressor.weights.len() != self.regressor.neurons.len() {
            return Err(("regressor", "weight and neuron counts differ".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::synth::{synth_generate, Profile};

    fn record(id: &str, env: [u8; 8], ucp: f64, effort: f64) -> ProjectRecord {
        ProjectRecord::new(id, EnvRatings::new(env).unwrap(), None, ucp, effort).unwrap()
    }

    #[test]
    fn identical_rows_give_one_label() {
        let rows: Vec<ProjectRecord> = (0..6)
            .map(|i| record(&format!("r{i}"), [3; 8], 100.0, 2000.0))
            .collect();
        let m = train_hybrid(&rows, &HybridConfig::default()).unwrap();
        assert_eq!(m.labels.len(), 1);
        assert_eq!(m.labels[0].name, "fair");
        let est = m.predict_effort(&EnvRatings::new([0; 8]).unwrap(), 100.0).unwrap();
        assert_eq!(est.label_id, 0);
        assert_eq!(est.medoid_productivity, 20.0);
        assert!((est.effort - 2000.0).abs() < 1e-3);
    }

    #[test]
    fn two_rows_train() {
        let rows = [record("a", [1; 8], 50.0, 900.0), record("b", [4; 8], 80.0, 2400.0)];
        let m = train_hybrid(&rows, &HybridConfig::default()).unwrap();
        assert!(m.predict_effort(&EnvRatings::new([1; 8]).unwrap(), 60.0).unwrap().effort > 0.0);
        assert!(train_hybrid(&rows[..1], &HybridConfig::default()).is_err());
    }

    #[test]
    fn estimate_goes_through_medoid() {
        let rows = synth_generate(&Profile::Dataset2, 40, 3).unwrap();
        let m = train_hybrid(&rows, &HybridConfig::default()).unwrap();
        assert!(m.check_consistency().is_ok());
        for r in rows.iter().take(10) {
            let est = m.predict_effort(&r.env, r.ucp).unwrap();
            let label = m.label(est.label_id).unwrap();
            assert_eq!(est.medoid_productivity, label.medoid_productivity);
            assert_eq!(est.effort, m.regressor.predict(r.ucp, label.medoid_productivity).unwrap());
            assert_eq!(est.label_id, m.classifier.predict_label(&r.env).unwrap());
        }
    }

    #[test]
    fn stage_errors_are_tagged() {
        let rows = [record("a", [1; 8], 50.0, 900.0), record("b", [4; 8], 80.0, 2400.0)];
        let bad = HybridConfig {
            rbf: RbfTrainConfig {
                max_neurons: 0,
                ..Default::default()
            },
            ..Default::default()
        };
        // Config problems surface before any stage runs.
        assert!(matches!(train_hybrid(&rows, &bad), Err(Error::Config(_))));

        let m = train_hybrid(&rows, &HybridConfig::default()).unwrap();
        let mut broken = m.clone();
        broken.classifier.classes.clear();
        match broken.predict_effort(&EnvRatings::new([1; 8]).unwrap(), 60.0) {
            Err(Error::Stage { stage, .. }) => assert_eq!(stage, Stage::Classification),
            other => panic!("{other:?}"),
        }
        assert!(m.predict_effort(&EnvRatings::new([1; 8]).unwrap(), 0.0).is_err());
    }

    #[test]
    fn fingerprint_tracks_rows() {
        let rows = synth_generate(&Profile::Dataset2, 12, 1).unwrap();
        let f = dataset_fingerprint(&rows);
        assert_eq!(f.len(), 64);
        assert_eq!(f, dataset_fingerprint(&rows));
        assert_ne!(f, dataset_fingerprint(&rows[1..]));
    }
}
