//! Text and delimited renderings of a [`BenchmarkReport`].
//!
//! Tables put models in columns. Delimited files use shortest round-trip
//! float formatting so reruns are byte-identical.

use std::fmt::Write as _;

use super::benchmark::BenchmarkReport;
use super::metrics::MetricReport;

const APPROX_NOTE: &str =
    "* nassif_approx: log-linear model with a crisp four-level productivity map in place of the fuzzy system";

fn display_name(model: &str) -> String {
    if model == "nassif_approx" {
        "nassif*".to_string()
    } else {
        model.to_string()
    }
}

fn table(header: &[String], rows: &[Vec<String>]) -> String {
    let cols = header.len();
    let mut widths: Vec<usize> = header.iter().map(String::len).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, cells: &[String]| {
        for (i, cell) in cells.iter().enumerate() {
            if i == 0 {
                let _ = write!(out, "{:<w$}", cell, w = widths[i]);
            } else {
                let _ = write!(out, "  {:>w$}", cell, w = widths[i]);
            }
        }
        out.push('\n');
    };
    line(&mut out, header);
    let rule: Vec<String> = (0..cols).map(|i| "-".repeat(widths[i])).collect();
    line(&mut out, &rule);
    for row in rows {
        line(&mut out, row);
    }
    out
}

fn has_nassif(report: &BenchmarkReport) -> bool {
    report.models.iter().any(|m| m == "nassif_approx")
}

type Metric = fn(&MetricReport) -> f64;

pub fn metrics_table(report: &BenchmarkReport) -> String {
    let mut header = vec!["metric".to_string()];
    header.extend(report.models.iter().map(|m| display_name(m)));
    let rows: [(&str, Metric); 5] = [
        ("SA", |m| m.sa),
        ("|delta|", MetricReport::abs_effect_size),
        ("MAE", |m| m.mae),
        ("MBRE %", |m| m.mbre),
        ("MIBRE %", |m| m.mibre),
    ];
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|(name, f)| {
            let mut row = vec![name.to_string()];
            row.extend(report.metrics.iter().map(|m| format!("{:.3}", f(m))));
            row
        })
        .collect();
    let mut out = table(&header, &body);
    if let Some(m) = report.metrics.first() {
        let _ = writeln!(
            out,
            "n = {}, random-guessing MAE_p0 = {:.3}, SP0 = {:.3}",
            m.n, m.baseline_mae, m.baseline_sd
        );
    }
    if has_nassif(report) {
        out.push_str(APPROX_NOTE);
        out.push('\n');
    }
    out
}

pub fn metrics_csv(report: &BenchmarkReport) -> String {
    let mut out = String::from("model,n,sa,delta,abs_delta,mae,mbre,mibre,mae_p0,sp0\n");
    for m in &report.metrics {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            m.model,
            m.n,
            m.sa,
            m.effect_size,
            m.abs_effect_size(),
            m.mae,
            m.mbre,
            m.mibre,
            m.baseline_mae,
            m.baseline_sd
        );
    }
    out
}

/// Pairwise p-value matrix; `*` marks significance.
pub fn significance_table(report: &BenchmarkReport) -> String {
    let Some(sig) = &report.significance else {
        return "significance: needs at least two models\n".to_string();
    };
    let mut header = vec!["p-value".to_string()];
    header.extend(report.models.iter().map(|m| display_name(m)));
    let body: Vec<Vec<String>> = report
        .models
        .iter()
        .map(|a| {
            let mut row = vec![display_name(a)];
            for b in &report.models {
                row.push(match sig.get(a, b) {
                    Some(t) if a != b => {
                        format!("{:.4}{}", t.p_value, if t.significant { "*" } else { "" })
                    }
                    _ => "-".to_string(),
                });
            }
            row
        })
        .collect();
    let mut out = table(&header, &body);
    let _ = writeln!(out, "* significant at {} (Wilcoxon rank-sum on absolute errors)", sig.alpha);
    out
}

pub fn significance_csv(report: &BenchmarkReport) -> String {
    let mut out = String::from("model_a,model_b,rank_sum,p_value,significant\n");
    if let Some(sig) = &report.significance {
        for t in &sig.tests {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                t.model_a, t.model_b, t.statistic, t.p_value, t.significant
            );
        }
    }
    out
}

pub fn scott_knott_table(report: &BenchmarkReport) -> String {
    let sk = &report.scott_knott;
    let header = vec![
        "position".to_string(),
        "model".to_string(),
        "group".to_string(),
        "mean transformed AE".to_string(),
    ];
    let body: Vec<Vec<String>> = sk
        .means
        .iter()
        .enumerate()
        .map(|(i, m)| {
            vec![
                (i + 1).to_string(),
                display_name(&m.model),
                (m.group + 1).to_string(),
                format!("{:.4}", m.mean),
            ]
        })
        .collect();
    let mut out = table(&header, &body);
    let _ = writeln!(
        out,
        "Box-Cox lambda = {:.4} (shift {}); groups left to right, rightmost is best",
        sk.boxcox_lambda, sk.boxcox_shift
    );
    out
}

pub fn scott_knott_csv(report: &BenchmarkReport) -> String {
    let sk = &report.scott_knott;
    let mut out = String::from("position,model,group,mean_transformed_ae,boxcox_lambda,boxcox_shift\n");
    for (i, m) in sk.means.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            i + 1,
            m.model,
            m.group + 1,
            m.mean,
            sk.boxcox_lambda,
            sk.boxcox_shift
        );
    }
    out
}

/// x = left-to-right position, y = mean transformed absolute error.
pub fn scott_knott_plot_csv(report: &BenchmarkReport) -> String {
    let mut out = String::from("x,y,model,group\n");
    for (i, m) in report.scott_knott.means.iter().enumerate() {
        let _ = writeln!(out, "{},{},{},{}", i + 1, m.mean, m.model, m.group + 1);
    }
    out
}

pub fn predictions_csv(report: &BenchmarkReport) -> String {
    let mut out = String::from("model,fold,id,actual,predicted,absolute_error\n");
    for preds in &report.predictions {
        for p in preds {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                p.model_name,
                p.fold_index,
                report.ids[p.fold_index],
                p.actual,
                p.predicted,
                p.absolute_error()
            );
        }
    }
    out
}
