//! Accuracy metrics, leave-one-out evaluation and model comparison.

pub mod benchmark;
pub mod boxcox;
pub mod loocv;
pub mod metrics;
pub mod report;
pub mod scott_knott;
pub mod wilcoxon;

pub use benchmark::{run_benchmark, BenchmarkConfig, BenchmarkReport, PairwiseTest, SignificanceReport};
pub use loocv::{loocv, Estimator, ModelBuilder, ModelKind};
pub use metrics::{MetricReport, PredictionRecord};
pub use scott_knott::{scott_knott, ScottKnottResult};
pub use wilcoxon::{wilcoxon_rank_sum, RankSumResult};
