//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. Every check compares against an oracle written
//! here, independently of the library code paths it exercises.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use ucp_hybrid::baselines::{fit_log_linear, karner_estimate, sw_estimate, NassifSample};
use ucp_hybrid::cluster::{bisect, ClusterConfig};
use ucp_hybrid::data::artifact::{model_from_str, model_to_string};
use ucp_hybrid::data::{load_model, save_model, synth_generate, Profile};
use ucp_hybrid::eval::metrics::{
    baseline_mae_p0, effect_size, mae, mbre, mibre, standardized_accuracy,
};
use ucp_hybrid::eval::report;
use ucp_hybrid::eval::{
    run_benchmark, scott_knott, wilcoxon_rank_sum, BenchmarkConfig, BenchmarkReport, ModelKind,
    PredictionRecord,
};
use ucp_hybrid::pipeline::{train_hybrid, HybridConfig};
use ucp_hybrid::rbfnn::{self, RbfSample, RbfTrainConfig, StopRule};
use ucp_hybrid::svm::{train_binary, SvmConfig};
use ucp_hybrid::ucp::{
    compute_ucp, ActorCounts, EnvRatings, FactorRatings, TechRatings, UseCaseCounts, WeightTable,
};

type Check = fn() -> Result<String, String>;

fn main() {
    let checks: [(&str, Check); 9] = [
        ("size formulas and baseline ratios", ac1_size_golden),
        ("bisecting k-medoids vs brute force", ac2_clustering),
        ("accuracy metrics vs direct formulas", ac3_metrics),
        ("log-linear baseline recovers its parameters", ac4_log_linear),
        ("RBF network interpolation and LOO monotonicity", ac5_rbf),
        ("SVM separable and XOR training sets", ac6_svm),
        ("hybrid beats baselines on synthetic profiles", ac7_ordering),
        ("rank-sum test and Scott-Knott grouping", ac8_significance),
        ("benchmark determinism and artifact round trip", ac9_determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|p| Err(format!("panicked: {}", panic_text(&p))));
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("[PASS] AC{} {name} ({ms} ms): {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("[FAIL] AC{} {name} ({ms} ms): {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", checks.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}

fn panic_text(p: &Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<String>()
        .cloned()
        .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_else(|| "unknown panic".into())
}

fn rel_err(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        got.abs()
    } else {
        ((got - want) / want).abs()
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------- AC1

struct Golden {
    actors: [u32; 3],
    usecases: [u32; 3],
    tech: [u8; 13],
    env: [u8; 8],
    uaw: f64,
    uuc: f64,
    tcf: f64,
    ef: f64,
    ucp: f64,
    karner: f64,
    sw: f64,
}

// Hand-derived with exact rational arithmetic.
const GOLDEN: &[Golden] = &[
    Golden { actors: [1, 1, 1], usecases: [1, 1, 1], tech: [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0], env: [0, 0, 0, 0, 0, 0, 0, 0], uaw: 6.0, uuc: 30.0, tcf: 0.6, ef: 1.4, ucp: 30.24, karner: 604.8, sw: 1088.64 },
    Golden { actors: [2, 0, 0], usecases: [0, 3, 0], tech: [3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3], env: [3, 3, 3, 3, 3, 3, 3, 3], uaw: 2.0, uuc: 30.0, tcf: 1.02, ef: 0.995, ucp: 32.4768, karner: 649.536, sw: 649.536 },
    Golden { actors: [0, 0, 4], usecases: [5, 5, 5], tech: [5, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5], env: [5, 5, 5, 5, 5, 5, 5, 5], uaw: 12.0, uuc: 150.0, tcf: 1.3, ef: 0.725, ucp: 152.685, karner: 3053.7, sw: 3053.7 },
    Golden { actors: [1, 2, 3], usecases: [2, 4, 6], tech: [0, 1, 2, 3, 4, 5, 0, 1, 2, 3, 4, 5, 0], env: [5, 5, 5, 5, 5, 5, 0, 0], uaw: 14.0, uuc: 140.0, tcf: 0.885, ef: 0.425, ucp: 57.92325, karner: 1158.465, sw: 1158.465 },
    Golden { actors: [3, 1, 0], usecases: [0, 0, 1], tech: [5, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5], env: [0, 0, 0, 0, 0, 0, 5, 5], uaw: 5.0, uuc: 15.0, tcf: 1.3, ef: 1.7, ucp: 44.2, karner: 884.0, sw: 1591.2 },
    Golden { actors: [2, 1, 3], usecases: [20, 1, 2], tech: [4, 0, 2, 4, 0, 4, 1, 0, 0, 3, 3, 0, 1], env: [0, 4, 3, 0, 4, 0, 1, 5], uaw: 13.0, uuc: 140.0, tcf: 0.835, ef: 1.31, ucp: 167.35905, karner: 3347.181, sw: 4686.0534 },
    Golden { actors: [5, 4, 0], usecases: [18, 18, 12], tech: [0, 1, 0, 4, 1, 2, 3, 1, 4, 0, 4, 2, 4], env: [5, 1, 0, 4, 4, 5, 1, 2], uaw: 13.0, uuc: 450.0, tcf: 0.845, ef: 0.77, ucp: 301.25095, karner: 6025.019, sw: 6025.019 },
    Golden { actors: [0, 4, 5], usecases: [2, 18, 1], tech: [4, 1, 3, 5, 4, 3, 2, 3, 4, 3, 2, 2, 1], env: [1, 5, 1, 0, 4, 2, 4, 3], uaw: 23.0, uuc: 205.0, tcf: 1.015, ef: 1.22, ucp: 282.3324, karner: 5646.648, sw: 10163.9664 },
    Golden { actors: [2, 5, 3], usecases: [9, 19, 2], tech: [0, 4, 3, 1, 2, 1, 3, 3, 0, 5, 0, 4, 4], env: [2, 2, 5, 2, 4, 3, 4, 3], uaw: 21.0, uuc: 265.0, tcf: 0.91, ef: 1.01, ucp: 262.8626, karner: 5257.252, sw: 7360.1528 },
    Golden { actors: [0, 6, 0], usecases: [8, 15, 22], tech: [5, 0, 0, 5, 5, 2, 5, 4, 5, 3, 2, 5, 3], env: [5, 2, 0, 3, 2, 1, 4, 0], uaw: 12.0, uuc: 520.0, tcf: 1.095, ef: 1.1, ucp: 640.794, karner: 12815.88, sw: 23068.584 },
    Golden { actors: [3, 0, 1], usecases: [24, 9, 4], tech: [5, 1, 3, 3, 3, 0, 1, 3, 3, 4, 2, 1, 3], env: [4, 2, 5, 3, 2, 5, 3, 1], uaw: 6.0, uuc: 270.0, tcf: 0.995, ef: 0.755, ucp: 207.3381, karner: 4146.762, sw: 4146.762 },
    Golden { actors: [1, 0, 1], usecases: [4, 7, 21], tech: [1, 0, 3, 4, 1, 2, 2, 0, 1, 3, 4, 2, 4], env: [4, 2, 1, 5, 4, 4, 5, 5], uaw: 4.0, uuc: 405.0, tcf: 0.86, ef: 1.025, ucp: 360.5335, karner: 7210.67, sw: 10094.938 },
    Golden { actors: [5, 0, 3], usecases: [24, 21, 25], tech: [4, 3, 3, 3, 3, 0, 3, 5, 3, 0, 1, 0, 1], env: [3, 1, 0, 2, 4, 0, 0, 0], uaw: 14.0, uuc: 705.0, tcf: 0.965, ef: 1.1, ucp: 763.2185, karner: 15264.37, sw: 21370.118 },
    Golden { actors: [4, 1, 4], usecases: [3, 11, 19], tech: [0, 0, 1, 4, 3, 1, 5, 2, 2, 4, 2, 3, 0], env: [0, 3, 3, 3, 3, 2, 0, 1], uaw: 18.0, uuc: 410.0, tcf: 0.86, ef: 1.04, ucp: 382.8032, karner: 7656.064, sw: 7656.064 },
    Golden { actors: [0, 5, 2], usecases: [23, 8, 15], tech: [5, 1, 4, 0, 1, 4, 2, 1, 5, 4, 0, 4, 2], env: [5, 0, 5, 2, 4, 2, 1, 2], uaw: 16.0, uuc: 420.0, tcf: 0.96, ef: 0.845, ucp: 353.6832, karner: 7073.664, sw: 9903.1296 },
    Golden { actors: [6, 1, 4], usecases: [17, 24, 16], tech: [2, 5, 1, 4, 1, 1, 3, 5, 1, 1, 4, 3, 2], env: [5, 0, 0, 2, 3, 2, 1, 5], uaw: 20.0, uuc: 565.0, tcf: 0.98, ef: 1.115, ucp: 639.2295, karner: 12784.59, sw: 23012.262 },
    Golden { actors: [4, 2, 3], usecases: [25, 23, 11], tech: [2, 0, 1, 0, 1, 3, 1, 2, 1, 3, 4, 4, 0], env: [3, 5, 2, 5, 0, 5, 0, 3], uaw: 17.0, uuc: 520.0, tcf: 0.84, ef: 0.845, ucp: 381.1626, karner: 7623.252, sw: 7623.252 },
    Golden { actors: [6, 5, 6], usecases: [6, 15, 5], tech: [3, 5, 2, 0, 5, 3, 3, 3, 5, 0, 5, 1, 1], env: [1, 0, 1, 4, 3, 5, 1, 4], uaw: 34.0, uuc: 255.0, tcf: 0.99, ef: 1.025, ucp: 293.26275, karner: 5865.255, sw: 8211.357 },
    Golden { actors: [6, 4, 3], usecases: [21, 11, 4], tech: [4, 4, 1, 0, 0, 5, 5, 0, 4, 5, 1, 3, 1], env: [1, 0, 2, 1, 2, 4, 1, 4], uaw: 23.0, uuc: 275.0, tcf: 0.92, ef: 1.13, ucp: 309.8008, karner: 6196.016, sw: 11152.8288 },
    Golden { actors: [2, 2, 4], usecases: [13, 4, 1], tech: [5, 2, 3, 5, 4, 4, 3, 4, 1, 4, 1, 4, 4], env: [0, 3, 1, 4, 0, 1, 1, 1], uaw: 18.0, uuc: 120.0, tcf: 1.095, ef: 1.265, ucp: 191.15415, karner: 3823.083, sw: 5352.3162 },
];

const GOLDEN_TOL: f64 = 1e-12;

fn ac1_size_golden() -> Result<String, String> {
    let weights = WeightTable::default();
    let mut worst: f64 = 0.0;
    for (k, g) in GOLDEN.iter().enumerate() {
        let env = EnvRatings::new(g.env).map_err(|e| e.to_string())?;
        let ratings = FactorRatings::new(TechRatings::new(g.tech).map_err(|e| e.to_string())?, env);
        let b = compute_ucp(
            ActorCounts::new(g.actors[0], g.actors[1], g.actors[2]),
            UseCaseCounts::new(g.usecases[0], g.usecases[1], g.usecases[2]),
            &ratings,
            &weights,
        )
        .map_err(|e| format!("case {k}: {e}"))?;
        let karner = karner_estimate(b.ucp).map_err(|e| e.to_string())?;
        let sw = sw_estimate(b.ucp, &env).map_err(|e| e.to_string())?;
        for (what, got, want) in [
            ("UAW", b.uaw, g.uaw),
            ("UUC", b.uuc, g.uuc),
            ("TCF", b.tcf, g.tcf),
            ("EF", b.ef, g.ef),
            ("UCP", b.ucp, g.ucp),
            ("Karner", karner, g.karner),
            ("S&W", sw, g.sw),
        ] {
            let e = rel_err(got, want);
            worst = worst.max(e);
            ensure(e <= GOLDEN_TOL, || {
                format!("case {k} {what}: got {got}, want {want} (rel {e:e})")
            })?;
        }
    }
    Ok(format!("{} cases, max rel err {worst:.1e} (tol {GOLDEN_TOL:e})", GOLDEN.len()))
}

// ---------------------------------------------------------------- AC2

fn oracle_medoid(values: &[f64], members: &[usize]) -> (usize, f64) {
    // Ascending rows, strict improvement only: ties keep the lowest row.
    let mut best = (members[0], f64::INFINITY);
    for &c in members {
        let cost: f64 = members.iter().map(|&j| (values[j] - values[c]).abs()).sum();
        if cost < best.1 {
            best = (c, cost);
        }
    }
    best
}

fn oracle_variance(values: &[f64], members: &[usize]) -> f64 {
    let (m, _) = oracle_medoid(values, members);
    members.iter().map(|&j| (values[j] - values[m]).powi(2)).sum::<f64>() / members.len() as f64
}

/// Leaves of the brute-force tree. Each split tries every bipartition.
fn oracle_leaves(
    values: &[f64],
    members: Vec<usize>,
    min_leaf: usize,
    ratio: f64,
    out: &mut Vec<Vec<usize>>,
) {
    let m = members.len();
    if m < 2 || m < 2 * min_leaf {
        out.push(members);
        return;
    }
    let mut best: Option<(f64, Vec<usize>, Vec<usize>)> = None;
    // The last member always sits in the second part, so each split is seen once.
    for mask in 1u32..(1 << (m - 1)) {
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for (i, &j) in members.iter().enumerate() {
            if i < m - 1 && mask & (1 << i) != 0 {
                a.push(j);
            } else {
                b.push(j);
            }
        }
        let cost = oracle_medoid(values, &a).1 + oracle_medoid(values, &b).1;
        if best.as_ref().is_none_or(|(c, _, _)| cost < *c) {
            best = Some((cost, a, b));
        }
    }
    let (_, a, b) = best.expect("at least one bipartition");
    let parent = oracle_variance(values, &members);
    let accept = a.len() >= min_leaf
        && b.len() >= min_leaf
        && oracle_variance(values, &a).max(oracle_variance(values, &b)) < ratio * parent;
    if accept {
        oracle_leaves(values, a, min_leaf, ratio, out);
        oracle_leaves(values, b, min_leaf, ratio, out);
    } else {
        out.push(members);
    }
}

fn ac2_clustering() -> Result<String, String> {
    // Hand example: {1, 3} has tied medoids, the lower row wins, variance 2.
    let tree = bisect(&[1.0, 3.0], &ClusterConfig { min_leaf: 2, improvement_ratio: 1.0 })
        .map_err(|e| e.to_string())?;
    ensure(tree.root().medoid == 0 && tree.root().variance == 2.0, || {
        format!("hand example: medoid {} variance {}", tree.root().medoid, tree.root().variance)
    })?;

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut splits = 0;
    for case in 0..50 {
        let n = rng.random_range(1..=8);
        let values: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..50.0)).collect();
        let min_leaf = 1 + case % 2;
        let ratio = if case % 3 == 0 { 0.5 } else { 1.0 };
        let config = ClusterConfig { min_leaf, improvement_ratio: ratio };
        let tree = bisect(&values, &config).map_err(|e| format!("case {case}: {e}"))?;

        let mut want = Vec::new();
        oracle_leaves(&values, (0..n).collect(), min_leaf, ratio, &mut want);
        let mut got: Vec<Vec<usize>> = tree.leaf_clusters().map(|c| c.members.clone()).collect();
        want.iter_mut().for_each(|l| l.sort_unstable());
        got.iter_mut().for_each(|l| l.sort_unstable());
        want.sort();
        got.sort();
        ensure(got == want, || {
            format!("case {case} (min_leaf {min_leaf}, ratio {ratio}, values {values:?}): leaves {got:?}, oracle {want:?}")
        })?;
        for node in &tree.nodes {
            let c = &node.cluster;
            let (medoid, _) = oracle_medoid(&values, &c.members);
            let var = oracle_variance(&values, &c.members);
            ensure(c.medoid == medoid && rel_err(c.variance, var) < 1e-12, || {
                format!("case {case}: cluster {:?} medoid {} var {}, oracle {medoid} {var}", c.members, c.medoid, c.variance)
            })?;
        }
        splits += tree.splits().count();
    }
    Ok(format!("50 random sets of size <= 8 match exhaustive bipartition ({splits} splits)"))
}

// ---------------------------------------------------------------- AC3

const METRIC_TOL: f64 = 1e-10;

fn ac3_metrics() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..100 {
        let n = rng.random_range(2..=10);
        let integer = case % 2 == 0;
        let actual: Vec<f64> = (0..n)
            .map(|_| {
                if integer {
                    rng.random_range(1..5000) as f64
                } else {
                    rng.random_range(1.0..5000.0)
                }
            })
            .collect();
        let predicted: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..5000.0)).collect();
        let records: Vec<PredictionRecord> = actual
            .iter()
            .zip(&predicted)
            .enumerate()
            .map(|(i, (&a, &p))| PredictionRecord::new(a, p, "m", i).unwrap())
            .collect();

        let nf = n as f64;
        let o_mae = actual.iter().zip(&predicted).map(|(a, p)| (a - p).abs()).sum::<f64>() / nf;
        let o_mbre = 100.0
            * actual.iter().zip(&predicted).map(|(a, p)| (a - p).abs() / a.min(*p)).sum::<f64>()
            / nf;
        let o_mibre = 100.0
            * actual.iter().zip(&predicted).map(|(a, p)| (a - p).abs() / a.max(*p)).sum::<f64>()
            / nf;
        // Random guessing: mean over targets of the mean error against every other project.
        let o_p0 = (0..n)
            .map(|t| {
                (0..n).filter(|&r| r != t).map(|r| (actual[t] - actual[r]).abs()).sum::<f64>()
                    / (nf - 1.0)
            })
            .sum::<f64>()
            / nf;
        let o_sa = 1.0 - o_mae / o_p0;
        let sp0 = rng.random_range(1.0..100.0);
        let o_delta = (o_mae - o_p0) / sp0;

        let got_p0 = baseline_mae_p0(&actual).map_err(|e| e.to_string())?;
        if integer {
            let exact: i64 = (0..n)
                .flat_map(|t| (0..n).map(move |r| (t, r)))
                .map(|(t, r)| (actual[t] as i64 - actual[r] as i64).abs())
                .sum();
            let want = exact as f64 / (n * (n - 1)) as f64;
            ensure(got_p0 == want, || format!("case {case}: MAE_p0 {got_p0} != exact {want}"))?;
        }
        let sa = standardized_accuracy(&records, &actual);
        let delta = effect_size(&records, &actual, sp0);
        for (what, got, want) in [
            ("MAE", mae(&records), o_mae),
            ("MBRE", mbre(&records), o_mbre),
            ("MIBRE", mibre(&records), o_mibre),
            ("MAE_p0", Ok(got_p0), o_p0),
            ("SA", sa, o_sa),
            ("delta", delta, o_delta),
        ] {
            let got = got.map_err(|e| format!("case {case} {what}: {e}"))?;
            ensure(rel_err(got, want) <= METRIC_TOL || (got - want).abs() <= 1e-12, || {
                format!("case {case} {what}: {got} vs {want}")
            })?;
        }
    }
    Ok(format!("100 record sets within {METRIC_TOL:e}; MAE_p0 exact on 50 integer sets"))
}

// ---------------------------------------------------------------- AC4

fn ac4_log_linear() -> Result<String, String> {
    let (alpha, beta) = (8.16, 1.17);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let rows: Vec<NassifSample> = (0..40)
        .map(|_| {
            let ucp: f64 = rng.random_range(20.0..2000.0);
            let productivity = [0.5, 1.0, 1.5, 2.0][rng.random_range(0..4)];
            NassifSample {
                ucp,
                productivity,
                effort: alpha / productivity * ucp.powf(beta),
            }
        })
        .collect();
    let (a, b) = fit_log_linear(&rows).map_err(|e| e.to_string())?;
    let (ea, eb) = (rel_err(a, alpha), rel_err(b, beta));
    ensure(ea < 1e-6 && eb < 1e-6, || format!("fitted alpha {a}, beta {b}"))?;
    Ok(format!("alpha {a:.9} beta {b:.9} (rel err {ea:.1e}, {eb:.1e})"))
}

// ---------------------------------------------------------------- AC5

fn smooth_samples(rng: &mut ChaCha8Rng, n: usize, noise: f64) -> Vec<RbfSample> {
    let normal = Normal::new(0.0, 1.0).unwrap();
    (0..n)
        .map(|_| {
            let ucp: f64 = rng.random_range(50.0..400.0);
            let productivity: f64 = rng.random_range(10.0..30.0);
            let clean = ucp * productivity * (1.0 + 0.2 * (ucp / 80.0).sin());
            RbfSample {
                ucp,
                productivity,
                effort: clean * (1.0 + noise * normal.sample(rng)).max(0.1),
            }
        })
        .collect()
}

fn ac5_rbf() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let samples = smooth_samples(&mut rng, 20, 0.0);
    let config = RbfTrainConfig {
        max_neurons: samples.len(),
        ridge: 0.0,
        stop_rule: StopRule::FixedCount,
        ..RbfTrainConfig::default()
    };
    let model = rbfnn::train(&samples, &config).map_err(|e| e.to_string())?;
    let mse = samples
        .iter()
        .map(|s| (model.predict(s.ucp, s.productivity).unwrap() - s.effort).powi(2))
        .sum::<f64>()
        / samples.len() as f64;
    ensure(mse < 1e-6, || format!("training MSE {mse:e} with {} units", model.neurons.len()))?;

    let mut runs = 0;
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(50 + seed);
        let samples = smooth_samples(&mut rng, 30, 0.15);
        let configs = [RbfTrainConfig::default(), HybridConfig::default().rbf];
        for config in configs {
            let model = rbfnn::train(&samples, &config).map_err(|e| e.to_string())?;
            let h = &model.loo_history;
            ensure(h.windows(2).all(|w| w[1] <= w[0]), || {
                format!("seed {seed}: LOO history rises: {h:?}")
            })?;
            runs += 1;
        }
    }
    Ok(format!(
        "20-point interpolation MSE {mse:.1e} ({} units); LOO history non-increasing in {runs} runs",
        model.neurons.len()
    ))
}

// ---------------------------------------------------------------- AC6

fn check_dual(model: &ucp_hybrid::svm::BinarySvmModel, c: f64) -> Result<(), String> {
    let sum: f64 = model.dual_coefficients.iter().sum();
    let scale = c * model.dual_coefficients.len().max(1) as f64;
    ensure(
        model.dual_coefficients.iter().all(|a| a.abs() <= c * (1.0 + 1e-12)),
        || "a dual coefficient exceeds C".into(),
    )?;
    ensure(sum.abs() <= 1e-9 * scale, || format!("sum of alpha_i y_i = {sum:e}"))
}

fn ac6_svm() -> Result<String, String> {
    let config = SvmConfig {
        penalty_c: 10.0,
        gamma: Some(1.0),
        ..SvmConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(6);

    // Separated by a hyperplane with a margin.
    let mut points = Vec::new();
    let mut labels = Vec::new();
    while points.len() < 60 {
        let p: Vec<f64> = (0..8).map(|_| rng.random_range(0.0..1.0)).collect();
        let s = p[0] + p[1] - p[2];
        if (s - 0.5).abs() > 0.15 {
            labels.push(s > 0.5);
            points.push(p);
        }
    }
    let linear = train_binary(&points, &labels, &config).map_err(|e| e.to_string())?;
    let acc_linear = points.iter().zip(&labels).filter(|(p, &l)| linear.predict(p) == l).count();
    ensure(acc_linear == points.len(), || format!("separable: {acc_linear}/{}", points.len()))?;
    check_dual(&linear, config.penalty_c)?;

    // XOR: jittered corners of the unit square.
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for (cx, cy, label) in [(0.0, 0.0, false), (1.0, 1.0, false), (0.0, 1.0, true), (1.0, 0.0, true)] {
        for _ in 0..10 {
            points.push(vec![cx + rng.random_range(-0.1..0.1), cy + rng.random_range(-0.1..0.1)]);
            labels.push(label);
        }
    }
    let xor = train_binary(&points, &labels, &config).map_err(|e| e.to_string())?;
    let acc_xor = points.iter().zip(&labels).filter(|(p, &l)| xor.predict(p) == l).count();
    ensure(acc_xor == points.len(), || format!("XOR: {acc_xor}/{}", points.len()))?;
    check_dual(&xor, config.penalty_c)?;
    ensure(linear.converged && xor.converged, || "SMO hit its iteration cap".into())?;

    Ok(format!(
        "separable {acc_linear}/60, XOR {acc_xor}/40; dual box and equality constraints hold"
    ))
}

// ---------------------------------------------------------------- AC7

const DEFAULT_SEED: u64 = 20571;
const ALTERNATE_SEEDS: [u64; 5] = [1, 2, 3, 4, 5];

fn ac7_ordering() -> Result<String, String> {
    let mut summary = Vec::new();
    let mut problems = Vec::new();
    for (profile, n) in [(Profile::Dataset1, 45), (Profile::Dataset2, 65), (Profile::Dataset3, 110)] {
        let config = BenchmarkConfig {
            hybrid: HybridConfig::for_profile(&profile),
            ..BenchmarkConfig::default()
        };
        let mut alternate_wins = 0;
        for seed in std::iter::once(DEFAULT_SEED).chain(ALTERNATE_SEEDS) {
            let records = synth_generate(&profile, n, seed).map_err(|e| e.to_string())?;
            let report =
                run_benchmark(&records, &ModelKind::ALL, &config).map_err(|e| e.to_string())?;
            let hybrid = report.metric("hybrid").ok_or("no hybrid metrics")?;
            let losers: Vec<&str> = report
                .metrics
                .iter()
                .filter(|m| m.model != "hybrid" && !(hybrid.sa > m.sa && hybrid.mae < m.mae))
                .map(|m| m.model.as_str())
                .collect();
            if losers.is_empty() {
                if seed != DEFAULT_SEED {
                    alternate_wins += 1;
                }
            } else {
                problems.push(format!("{profile} seed {seed} not ahead of {}", losers.join("+")));
                if seed == DEFAULT_SEED {
                    problems.push(format!("{profile}: default seed fails"));
                }
            }
        }
        if alternate_wins < 4 {
            problems.push(format!("{profile}: only {alternate_wins}/5 alternate seeds"));
        }
        summary.push(format!("{profile} {alternate_wins}/5"));
    }
    let fatal = problems.iter().any(|p| p.contains("default seed") || p.contains("only"));
    let text = format!("default seed + alternates: {}; {}", summary.join(", "), problems.join("; "));
    if fatal {
        Err(text)
    } else {
        Ok(text)
    }
}

// ---------------------------------------------------------------- AC8

fn oracle_midranks(v: &[f64]) -> Vec<f64> {
    v.iter()
        .map(|x| {
            let below = v.iter().filter(|y| *y < x).count() as f64;
            let equal = v.iter().filter(|y| *y == x).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect()
}

/// Two-sided exact p by enumerating every way to draw the first sample's ranks.
fn oracle_rank_sum_p(a: &[f64], b: &[f64]) -> (f64, f64) {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = oracle_midranks(&pooled);
    let w: f64 = ranks[..a.len()].iter().sum();
    let total = pooled.len();
    let (mut le, mut ge, mut count) = (0u64, 0u64, 0u64);
    for mask in 0u32..(1 << total) {
        if mask.count_ones() as usize != a.len() {
            continue;
        }
        let s: f64 = (0..total).filter(|i| mask & (1 << i) != 0).map(|i| ranks[i]).sum();
        count += 1;
        if s <= w + 1e-9 {
            le += 1;
        }
        if s >= w - 1e-9 {
            ge += 1;
        }
    }
    let p = (2.0 * le.min(ge) as f64 / count as f64).min(1.0);
    (w, p)
}

fn ac8_significance() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for case in 0..60 {
        let n = rng.random_range(1..=8);
        let m = rng.random_range(1..=8);
        // Small integer range so that ties are common.
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(0..7) as f64).collect();
        let b: Vec<f64> = (0..m).map(|_| rng.random_range(0..7) as f64 + 0.5 * (case % 2) as f64).collect();
        let got = wilcoxon_rank_sum(&a, &b).map_err(|e| e.to_string())?;
        let (w, p) = oracle_rank_sum_p(&a, &b);
        ensure((got.statistic - w).abs() < 1e-12 && (got.p_value - p).abs() < 1e-12, || {
            format!("case {case} a={a:?} b={b:?}: W {} p {}, oracle W {w} p {p}", got.statistic, got.p_value)
        })?;
    }

    let normal = Normal::new(0.0, 1.0).unwrap();
    let errors: Vec<f64> = (0..30).map(|_| 20.0 + normal.sample(&mut rng)).collect();
    let same: Vec<(String, Vec<f64>)> =
        (0..3).map(|i| (format!("m{i}"), errors.clone())).collect();
    let sk = scott_knott(&same, 0.05).map_err(|e| e.to_string())?;
    ensure(sk.groups.len() == 1, || format!("identical models split into {:?}", sk.groups))?;

    let near: Vec<f64> = (0..30).map(|_| 20.0 + normal.sample(&mut rng)).collect();
    let far: Vec<f64> = (0..30).map(|_| 30.0 + normal.sample(&mut rng)).collect();
    let apart = vec![("near".to_string(), near), ("far".to_string(), far)];
    let sk2 = scott_knott(&apart, 0.05).map_err(|e| e.to_string())?;
    ensure(sk2.groups == vec![vec!["far".to_string()], vec!["near".to_string()]], || {
        format!("means 10 sd apart grouped as {:?}", sk2.groups)
    })?;
    Ok("60 exact p-values match enumeration; Scott-Knott 1 group for identical, 2 for separated".into())
}

// ---------------------------------------------------------------- AC9

fn render(report: &BenchmarkReport) -> String {
    [
        report::metrics_table(report),
        report::metrics_csv(report),
        report::significance_table(report),
        report::significance_csv(report),
        report::scott_knott_table(report),
        report::scott_knott_csv(report),
        report::scott_knott_plot_csv(report),
        report::predictions_csv(report),
        serde_json::to_string(report).unwrap(),
    ]
    .join("\n")
}

fn ac9_determinism() -> Result<String, String> {
    let records = synth_generate(&Profile::Dataset2, 40, 9).map_err(|e| e.to_string())?;
    let config = BenchmarkConfig::default();
    let first = run_benchmark(&records, &ModelKind::ALL, &config).map_err(|e| e.to_string())?;
    let second = run_benchmark(&records, &ModelKind::ALL, &config).map_err(|e| e.to_string())?;
    let (r1, r2) = (render(&first), render(&second));
    ensure(r1 == r2, || "two benchmark runs rendered differently".into())?;

    let model = train_hybrid(&records, &HybridConfig::default()).map_err(|e| e.to_string())?;
    let text = model_to_string(&model).map_err(|e| e.to_string())?;
    let back = model_from_str(&text).map_err(|e| e.to_string())?;
    ensure(model_to_string(&back).map_err(|e| e.to_string())? == text, || {
        "artifact text changed after a round trip".into()
    })?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (p1, p2) = (dir.path().join("a.json"), dir.path().join("b.json"));
    save_model(&model, &p1).map_err(|e| e.to_string())?;
    let loaded = load_model(&p1).map_err(|e| e.to_string())?;
    save_model(&loaded, &p2).map_err(|e| e.to_string())?;
    let (b1, b2) = (std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    ensure(b1 == b2, || "saved artifact bytes differ after reload".into())?;
    for r in &records {
        let x = model.predict_effort(&r.env, r.ucp).map_err(|e| e.to_string())?;
        let y = loaded.predict_effort(&r.env, r.ucp).map_err(|e| e.to_string())?;
        ensure(x == y, || format!("{}: estimates differ after reload", r.id))?;
    }
    Ok(format!(
        "{} rendered bytes identical across runs; artifact of {} bytes round-trips exactly",
        r1.len(),
        b1.len()
    ))
}
