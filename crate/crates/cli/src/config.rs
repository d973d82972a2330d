//! Configuration file and flag resolution. Precedence: flag, then file,
//! then built-in default.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use ucp_hybrid::baselines::ProductivityMap;
use ucp_hybrid::data::ProfileSpec;
use ucp_hybrid::eval::metrics::{DEFAULT_SEED, DEFAULT_SP0_RUNS};
use ucp_hybrid::eval::scott_knott::DEFAULT_ALPHA;
use ucp_hybrid::pipeline::HybridConfig;
use ucp_hybrid::ucp::WeightTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Table,
    Delimited,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub weights: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub hybrid: Option<HybridConfig>,
    pub benchmark: BenchmarkSection,
    pub synth: SynthSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchmarkSection {
    pub models: Option<Vec<String>>,
    pub sp0_runs: Option<usize>,
    pub alpha: Option<f64>,
    pub nassif_map: Option<ProductivityMap>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSection {
    pub profile: Option<String>,
    pub n: Option<usize>,
    /// Generator parameters used when the profile is `custom`.
    pub custom: Option<ProfileSpec>,
}

impl FileConfig {
    /// Relative paths inside the file are taken relative to its directory.
    pub fn load(path: &Path) -> ucp_hybrid::Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| ucp_hybrid::Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        let mut config: FileConfig = toml::from_str(&text)
            .map_err(|e| ucp_hybrid::Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut config.weights, &mut config.out].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(config)
    }
}

/// Flags shared by every command.
#[derive(Debug, Clone, Default)]
pub struct GlobalFlags {
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub weights: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

/// Everything a command may read, after precedence is applied.
#[derive(Debug, Clone, Serialize)]
pub struct Resolved {
    pub command: String,
    pub config_file: Option<PathBuf>,
    pub seed: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub weights_file: Option<PathBuf>,
    pub weights: WeightTable,
    pub hybrid: HybridConfig,
    pub models: Option<Vec<String>>,
    pub sp0_runs: usize,
    pub alpha: f64,
    pub nassif_map: Option<ProductivityMap>,
    pub synth_profile: Option<String>,
    pub synth_n: Option<usize>,
    #[serde(skip)]
    pub synth_custom: Option<ProfileSpec>,
}

impl Resolved {
    pub fn new(command: &str, flags: &GlobalFlags) -> ucp_hybrid::Result<Self> {
        let file = match &flags.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let weights_file = flags.weights.clone().or(file.weights);
        let weights = match &weights_file {
            Some(path) => WeightTable::load(path)?,
            None => WeightTable::default(),
        };
        Ok(Self {
            command: command.to_string(),
            config_file: flags.config.clone(),
            seed: flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            format: flags.format.or(file.format).unwrap_or(Format::Table),
            out: flags.out.clone().or(file.out),
            weights_file,
            weights,
            hybrid: file.hybrid.unwrap_or_default(),
            models: file.benchmark.models,
            sp0_runs: file.benchmark.sp0_runs.unwrap_or(DEFAULT_SP0_RUNS),
            alpha: file.benchmark.alpha.unwrap_or(DEFAULT_ALPHA),
            nassif_map: file.benchmark.nassif_map,
            synth_profile: file.synth.profile,
            synth_n: file.synth.n,
            synth_custom: file.synth.custom,
        })
    }

    pub fn log(&self) {
        match serde_json::to_string(self) {
            Ok(text) => log::info!("resolved configuration: {text}"),
            Err(e) => log::warn!("could not serialize the resolved configuration: {e}"),
        }
    }
}
