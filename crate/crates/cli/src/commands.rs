use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use serde::Deserialize;
use ucp_hybrid::baselines::{karner_estimate, sw_estimate};
use ucp_hybrid::data::{
    describe, load_dataset, load_model, save_dataset, save_model, synth_generate, write_dataset,
    Profile, ProjectRecord, VariableStats,
};
use ucp_hybrid::eval::{report, run_benchmark, BenchmarkConfig, ModelKind};
use ucp_hybrid::pipeline::{train_hybrid, HybridConfig};
use ucp_hybrid::rbfnn::EffortScale;
use ucp_hybrid::ucp::{
    compute_ucp, ActorCounts, EnvRatings, FactorRatings, TechRatings, UseCaseCounts,
};

use crate::config::{Format, Resolved};
use crate::UsageError;

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Up to six decimals, trailing zeros dropped.
fn num(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn kv_table(rows: &[(&str, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in rows {
        let _ = writeln!(out, "{k:<width$}  {v}");
    }
    out
}

fn emit(text: &str) -> Result<()> {
    let mut stdout = std::io::stdout().lock();
    stdout.write_all(text.as_bytes()).context("writing to stdout")?;
    stdout.flush().context("writing to stdout")
}

fn load_records(path: &Path) -> Result<Vec<ProjectRecord>> {
    let loaded = load_dataset(path)?;
    log::info!("loaded {} rows from {}", loaded.records.len(), path.display());
    Ok(loaded.records)
}

fn apply_preset(hybrid: &mut HybridConfig, preset: Option<&str>) -> Result<()> {
    if let Some(name) = preset {
        let profile: Profile = name.parse()?;
        hybrid.rbf.max_neurons = HybridConfig::for_profile(&profile).rbf.max_neurons;
    }
    Ok(())
}

// ---------------------------------------------------------------- size

#[derive(Debug, Args)]
pub struct SizeArgs {
    /// TOML use-case model with `actors`, `use_cases` or `transactions`,
    /// `technical` and `environmental`; flags override its entries.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Simple, average and complex actor counts.
    #[arg(long, value_delimiter = ',')]
    pub actors: Option<Vec<u32>>,
    /// Simple, average and complex use case counts.
    #[arg(long = "use-cases", value_delimiter = ',', conflicts_with = "transactions")]
    pub use_cases: Option<Vec<u32>>,
    /// Transaction count of each use case, classified automatically.
    #[arg(long, value_delimiter = ',')]
    pub transactions: Option<Vec<u32>>,
    /// 13 technical factor ratings, 0 to 5.
    #[arg(long, value_delimiter = ',')]
    pub tech: Option<Vec<u8>>,
    /// 8 environmental factor ratings, 0 to 5.
    #[arg(long, value_delimiter = ',')]
    pub env: Option<Vec<u8>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ModelFile {
    actors: Option<Vec<u32>>,
    use_cases: Option<Vec<u32>>,
    transactions: Option<Vec<u32>>,
    technical: Option<Vec<u8>>,
    environmental: Option<Vec<u8>>,
}

fn three(v: Option<Vec<u32>>, what: &str) -> Result<[u32; 3]> {
    let v = v.ok_or_else(|| usage(format!("{what} counts are required (--{what} s,a,c or the model file)")))?;
    <[u32; 3]>::try_from(v.as_slice())
        .map_err(|_| usage(format!("{what} needs exactly 3 counts (simple, average, complex), got {}", v.len())))
}

fn counts3(c: [u32; 3]) -> UseCaseCounts {
    UseCaseCounts::new(c[0], c[1], c[2])
}

pub fn size(args: SizeArgs, resolved: &Resolved) -> Result<()> {
    resolved.log();
    let file: ModelFile = match &args.model {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
                .map_err(|e| usage(format!("{e:#}")))?;
            toml::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?
        }
        None => ModelFile::default(),
    };
    let actors = three(args.actors.or(file.actors), "actors")?;
    let usecases = match (args.use_cases, args.transactions) {
        (Some(counts), _) => counts3(three(Some(counts), "use-cases")?),
        (None, Some(tx)) => UseCaseCounts::from_transactions(&tx),
        (None, None) => match (file.use_cases, file.transactions) {
            (Some(_), Some(_)) => return Err(usage("model file gives both use_cases and transactions")),
            (None, Some(tx)) => UseCaseCounts::from_transactions(&tx),
            (counts, None) => counts3(three(counts, "use-cases")?),
        },
    };
    let tech = args.tech.or(file.technical).ok_or_else(|| usage("technical ratings are required (--tech, 13 values)"))?;
    let env = args.env.or(file.environmental).ok_or_else(|| usage("environmental ratings are required (--env, 8 values)"))?;
    let env = EnvRatings::from_slice(&env)?;
    let ratings = FactorRatings::new(TechRatings::from_slice(&tech)?, env);

    let b = compute_ucp(
        ActorCounts::new(actors[0], actors[1], actors[2]),
        usecases,
        &ratings,
        &resolved.weights,
    )?;
    let karner = karner_estimate(b.ucp)?;
    let sw = sw_estimate(b.ucp, &env)?;
    let rows = [
        ("uaw", b.uaw),
        ("uuc", b.uuc),
        ("uucp", b.uucp),
        ("tcf", b.tcf),
        ("ef", b.ef),
        ("ucp", b.ucp),
        ("karner_effort", karner),
        ("sw_effort", sw),
    ];
    let text = match resolved.format {
        Format::Table => {
            let labels = ["UAW", "UUC", "UUCP", "TCF", "EF", "UCP", "Karner effort (h)", "S&W effort (h)"];
            let cells: Vec<(&str, String)> =
                labels.iter().zip(&rows).map(|(l, (_, v))| (*l, num(*v))).collect();
            kv_table(&cells)
        }
        Format::Delimited => {
            let mut out = String::from("quantity,value\n");
            for (k, v) in rows {
                let _ = writeln!(out, "{k},{v}");
            }
            out
        }
    };
    emit(&text)
}

// ---------------------------------------------------------------- train

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Training dataset (delimited text).
    #[arg(long)]
    pub data: PathBuf,
    /// Use the hidden-unit cap tuned for a synthetic profile (dataset1, dataset2, dataset3).
    #[arg(long)]
    pub preset: Option<String>,
}

pub fn train(args: TrainArgs, resolved: &mut Resolved) -> Result<()> {
    apply_preset(&mut resolved.hybrid, args.preset.as_deref())?;
    resolved.log();
    let out = resolved
        .out
        .clone()
        .ok_or_else(|| usage("train needs --out <artifact path>"))?;
    let records = load_records(&args.data)?;
    let model = train_hybrid(&records, &resolved.hybrid)?;
    save_model(&model, &out)?;
    let s = model.summary(&records)?;

    let loo_label = match resolved.hybrid.rbf.effort_scale {
        EffortScale::Log => "LOO MSE (ln hours)",
        EffortScale::Linear => "LOO MSE (hours^2)",
    };
    let text = match resolved.format {
        Format::Table => {
            let mut t = kv_table(&[
                ("rows", records.len().to_string()),
                ("labels", s.labels.to_string()),
                ("classifier training accuracy", num(s.classifier_accuracy)),
                ("classifier converged", if s.classifier_converged { "yes" } else { "no" }.into()),
                ("hidden units", s.neurons.to_string()),
                (loo_label, format!("{:.6e}", s.loo_mse)),
                ("artifact", out.display().to_string()),
            ]);
            let width = model.labels.iter().map(|l| l.name.len()).max().unwrap_or(0).max(4);
            let _ = writeln!(t, "\nlabel  {:<width$}  medoid hours/UCP", "name");
            for l in &model.labels {
                let _ = writeln!(t, "{:>5}  {:<width$}  {}", l.id, l.name, num(l.medoid_productivity));
            }
            t
        }
        Format::Delimited => {
            let mut t = String::from("label,name,medoid_productivity\n");
            for l in &model.labels {
                let _ = writeln!(t, "{},{},{}", l.id, l.name, l.medoid_productivity);
            }
            t
        }
    };
    emit(&text)
}

// ---------------------------------------------------------------- estimate

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Trained model artifact.
    #[arg(long)]
    pub model: PathBuf,
    /// Adjusted size of the new project.
    #[arg(long)]
    pub ucp: f64,
    /// 8 environmental factor ratings, 0 to 5.
    #[arg(long, value_delimiter = ',', required = true)]
    pub env: Vec<u8>,
    /// Print one JSON record on a single line.
    #[arg(long)]
    pub json: bool,
}

pub fn estimate(args: EstimateArgs, resolved: &Resolved) -> Result<()> {
    resolved.log();
    let env = EnvRatings::from_slice(&args.env)?;
    let model = load_model(&args.model)?;
    let e = model.predict_effort(&env, args.ucp)?;
    let text = if args.json {
        let record = serde_json::json!({
            "effort": e.effort,
            "label_id": e.label_id,
            "label": e.label_name,
            "medoid_productivity": e.medoid_productivity,
            "raw_output": e.raw_output,
            "clamped": e.clamped,
        });
        format!("{record}\n")
    } else {
        match resolved.format {
            Format::Table => kv_table(&[
                ("effort (h)", num(e.effort)),
                ("productivity label", format!("{} ({})", e.label_name, e.label_id)),
                ("medoid hours/UCP", num(e.medoid_productivity)),
                ("clamped", if e.clamped { "yes" } else { "no" }.into()),
            ]),
            Format::Delimited => format!(
                "effort,label_id,label,medoid_productivity,raw_output,clamped\n{},{},{},{},{},{}\n",
                e.effort, e.label_id, e.label_name, e.medoid_productivity, e.raw_output, e.clamped
            ),
        }
    };
    emit(&text)
}

// ---------------------------------------------------------------- benchmark

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    /// Dataset to evaluate with leave-one-out cross-validation.
    #[arg(long)]
    pub data: PathBuf,
    /// Comma-separated subset of hybrid, karner, sw, nassif (default: all).
    #[arg(long, value_delimiter = ',')]
    pub models: Option<Vec<String>>,
    /// Use the hidden-unit cap tuned for a synthetic profile.
    #[arg(long)]
    pub preset: Option<String>,
}

pub const REPORT_FILES: [&str; 6] = [
    "report.txt",
    "metrics.csv",
    "significance.csv",
    "scott_knott.csv",
    "scott_knott_plot.csv",
    "predictions.csv",
];

pub fn benchmark(args: BenchmarkArgs, resolved: &mut Resolved) -> Result<()> {
    apply_preset(&mut resolved.hybrid, args.preset.as_deref())?;
    if args.models.is_some() {
        resolved.models = args.models;
    }
    resolved.log();
    let models: Vec<ModelKind> = match &resolved.models {
        Some(names) => names.iter().map(|n| n.parse()).collect::<ucp_hybrid::Result<_>>()?,
        None => ModelKind::ALL.to_vec(),
    };
    let records = load_records(&args.data)?;
    let config = BenchmarkConfig {
        hybrid: resolved.hybrid.clone(),
        weights: resolved.weights,
        nassif_map: resolved.nassif_map,
        sp0_runs: resolved.sp0_runs,
        seed: resolved.seed,
        alpha: resolved.alpha,
    };
    let r = run_benchmark(&records, &models, &config)?;
    let text_report = format!(
        "{}\n{}\n{}",
        report::metrics_table(&r),
        report::significance_table(&r),
        report::scott_knott_table(&r)
    );
    if let Some(dir) = &resolved.out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let contents = [
            text_report.clone(),
            report::metrics_csv(&r),
            report::significance_csv(&r),
            report::scott_knott_csv(&r),
            report::scott_knott_plot_csv(&r),
            report::predictions_csv(&r),
        ];
        for (name, body) in REPORT_FILES.iter().zip(contents) {
            let path = dir.join(name);
            fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
        }
        log::info!("report files written to {}", dir.display());
    }
    match resolved.format {
        Format::Table => emit(&text_report),
        Format::Delimited => emit(&report::metrics_csv(&r)),
    }
}

// ---------------------------------------------------------------- synth

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// dataset1, dataset2, dataset3, or custom (parameters from the config file).
    #[arg(long)]
    pub profile: Option<String>,
    /// Number of rows (default: the profile's reference size).
    #[arg(long)]
    pub n: Option<usize>,
}

pub fn synth(args: SynthArgs, resolved: &mut Resolved) -> Result<()> {
    if args.profile.is_some() {
        resolved.synth_profile = args.profile;
    }
    if args.n.is_some() {
        resolved.synth_n = args.n;
    }
    resolved.log();
    let name = resolved
        .synth_profile
        .clone()
        .ok_or_else(|| usage("synth needs --profile"))?;
    let profile = if name.eq_ignore_ascii_case("custom") {
        Profile::Custom(resolved.synth_custom.clone().ok_or_else(|| {
            usage("profile custom needs a [synth.custom] table in the config file")
        })?)
    } else {
        name.parse()?
    };
    let n = resolved
        .synth_n
        .or(profile.reference_size())
        .ok_or_else(|| usage("custom profiles need --n"))?;
    let records = synth_generate(&profile, n, resolved.seed)?;
    match &resolved.out {
        Some(path) => {
            save_dataset(path, &records)?;
            log::info!("wrote {n} rows to {}", path.display());
            Ok(())
        }
        None => {
            let mut buf = Vec::new();
            write_dataset(&mut buf, &records)?;
            emit(&String::from_utf8(buf).context("dataset text is not UTF-8")?)
        }
    }
}

// ---------------------------------------------------------------- describe

#[derive(Debug, Args)]
pub struct DescribeArgs {
    /// Dataset to summarize.
    #[arg(long)]
    pub data: PathBuf,
}

fn opt(v: Option<f64>, table: bool) -> String {
    match v {
        Some(x) if table => format!("{x:.3}"),
        Some(x) => x.to_string(),
        None if table => "-".into(),
        None => String::new(),
    }
}

pub fn describe_cmd(args: DescribeArgs, resolved: &Resolved) -> Result<()> {
    resolved.log();
    let records = load_records(&args.data)?;
    let s = describe(&records)?;
    let vars: [(&str, &VariableStats); 3] =
        [("ucp", &s.ucp), ("effort", &s.effort), ("productivity", &s.productivity)];
    let text = match resolved.format {
        Format::Table => {
            let mut t = format!("n = {}\n", s.n);
            let _ = writeln!(t, "{:<12}  {:>12}  {:>12}  {:>8}  {:>8}", "variable", "mean", "sd", "skewness", "kurtosis");
            for (name, v) in vars {
                let _ = writeln!(
                    t,
                    "{name:<12}  {:>12.3}  {:>12.3}  {:>8}  {:>8}",
                    v.mean,
                    v.sd,
                    opt(v.skewness, true),
                    opt(v.kurtosis, true)
                );
            }
            t
        }
        Format::Delimited => {
            let mut t = String::from("variable,n,mean,sd,skewness,kurtosis\n");
            for (name, v) in vars {
                let _ = writeln!(
                    t,
                    "{name},{},{},{},{},{}",
                    s.n,
                    v.mean,
                    v.sd,
                    opt(v.skewness, false),
                    opt(v.kurtosis, false)
                );
            }
            t
        }
    };
    if let Some(path) = &resolved.out {
        fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
    }
    emit(&text)
}
