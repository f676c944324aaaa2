//! Runner for the frozen statistics oracle fixtures.
//!
//! `data/stats_oracle.jsonl` holds one case per line (inputs, expected
//! statistic, expected p, tolerances), generated independently of the Rust
//! implementation by `data/gen_stats_oracle.py`.

use greenmine::stats;
use serde::Deserialize;

#[derive(Debug, Deserialize)]
pub struct OracleCase {
    pub op: String,
    pub args: serde_json::Value,
    pub expect: serde_json::Value,
    pub tol: Tolerances,
}

#[derive(Debug, Deserialize)]
pub struct Tolerances {
    pub statistic: f64,
    pub p: f64,
}

pub fn load_cases() -> Vec<OracleCase> {
    let raw = include_str!("../data/stats_oracle.jsonl");
    raw.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).expect("valid oracle fixture line"))
        .collect()
}

fn vec_arg(args: &serde_json::Value, key: &str) -> Vec<f64> {
    args[key]
        .as_array()
        .unwrap_or_else(|| panic!("missing array arg {key}"))
        .iter()
        .map(|v| v.as_f64().expect("numeric fixture value"))
        .collect()
}

/// Runs one fixture case; returns an error description on mismatch.
pub fn run_case(case: &OracleCase) -> Result<(), String> {
    let check = |label: &str, got: f64, want: f64, tol: f64| -> Result<(), String> {
        if (got - want).abs() <= tol || (got.is_infinite() && want.is_infinite()) {
            Ok(())
        } else {
            Err(format!(
                "{} {}: got {got:.17e}, want {want:.17e} (tol {tol:e})",
                case.op, label
            ))
        }
    };

    match case.op.as_str() {
        "spearman" => {
            let r = stats::spearman(&vec_arg(&case.args, "x"), &vec_arg(&case.args, "y"))
                .map_err(|e| format!("spearman failed: {e}"))?;
            check("statistic", r.statistic, case.expect["statistic"].as_f64().unwrap(), case.tol.statistic)?;
            check("p", r.p_value, case.expect["p"].as_f64().unwrap(), case.tol.p)
        }
        "pearson_log" => {
            let r = stats::pearson_log(&vec_arg(&case.args, "x"), &vec_arg(&case.args, "y"))
                .map_err(|e| format!("pearson_log failed: {e}"))?;
            check("statistic", r.statistic, case.expect["statistic"].as_f64().unwrap(), case.tol.statistic)?;
            check("p", r.p_value, case.expect["p"].as_f64().unwrap(), case.tol.p)
        }
        "mann_whitney_u" => {
            let r = stats::mann_whitney_u(&vec_arg(&case.args, "a"), &vec_arg(&case.args, "b"))
                .map_err(|e| format!("mann_whitney_u failed: {e}"))?;
            check("statistic", r.statistic, case.expect["statistic"].as_f64().unwrap(), case.tol.statistic)?;
            check("p", r.p_value, case.expect["p"].as_f64().unwrap(), case.tol.p)
        }
        "shapiro_wilk" => {
            let r = stats::shapiro_wilk(&vec_arg(&case.args, "x"))
                .map_err(|e| format!("shapiro_wilk failed: {e}"))?;
            check("statistic", r.statistic, case.expect["statistic"].as_f64().unwrap(), case.tol.statistic)?;
            check("p", r.p_value, case.expect["p"].as_f64().unwrap(), case.tol.p)
        }
        "ols_slope_ttest" => {
            let ts = vec_arg(&case.args, "t");
            let ys = vec_arg(&case.args, "y");
            let series: Vec<(f64, f64)> = ts.into_iter().zip(ys).collect();
            let r = stats::ols_slope_ttest(&series)
                .map_err(|e| format!("ols_slope_ttest failed: {e}"))?;
            check("slope", r.slope, case.expect["slope"].as_f64().unwrap(), case.tol.statistic)?;
            if let Some(t) = case.expect.get("statistic").and_then(|v| v.as_f64()) {
                check("statistic", r.result.statistic, t, case.tol.statistic)?;
            }
            check("p", r.result.p_value, case.expect["p"].as_f64().unwrap(), case.tol.p)
        }
        "holm_bonferroni" => {
            let ps = vec_arg(&case.args, "p_values");
            let adjusted =
                stats::holm_bonferroni(&ps).map_err(|e| format!("holm_bonferroni failed: {e}"))?;
            let want: Vec<f64> = case.expect["adjusted"]
                .as_array()
                .unwrap()
                .iter()
                .map(|v| v.as_f64().unwrap())
                .collect();
            if adjusted.len() != want.len() {
                return Err("holm_bonferroni length mismatch".into());
            }
            for (i, (g, w)) in adjusted.iter().zip(&want).enumerate() {
                check(&format!("adjusted[{i}]"), *g, *w, case.tol.p)?;
            }
            Ok(())
        }
        "breusch_pagan" => {
            let r = stats::breusch_pagan(&vec_arg(&case.args, "residuals"), &vec_arg(&case.args, "x"))
                .map_err(|e| format!("breusch_pagan failed: {e}"))?;
            check("statistic", r.statistic, case.expect["statistic"].as_f64().unwrap(), case.tol.statistic)?;
            check("p", r.p_value, case.expect["p"].as_f64().unwrap(), case.tol.p)
        }
        other => Err(format!("unknown oracle op {other}")),
    }
}

/// Runs every fixture case, returning the list of failures.
pub fn run_all() -> Vec<String> {
    load_cases().iter().filter_map(|case| run_case(case).err()).collect()
}
