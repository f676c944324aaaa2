//! Statistics engine: rank and linear correlations, two-sample and
//! normality tests, regression slope inference, and familywise-error
//! correction.
//!
//! Every procedure returns a [`StatResult`] carrying the statistic, the
//! two-sided p-value, and bookkeeping notes (tie corrections, degenerate
//! inputs). `adjusted_p` stays empty until a whole family is passed through
//! [`holm_bonferroni`] by the reporting layer.

pub mod special;

mod shapiro;

pub use shapiro::shapiro_wilk;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("series too short: need at least {required} values, got {actual}")]
    TooShort { required: usize, actual: usize },
    #[error("series lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },
    #[error("non-positive value at index {index}: log-transform undefined")]
    NonPositive { index: usize },
    #[error("constant series: correlation undefined")]
    ConstantSeries,
    #[error("duplicate time value at index {index}")]
    DuplicateTime { index: usize },
    #[error("sample size {actual} outside supported range {min}..={max}")]
    SizeOutOfRange { actual: usize, min: usize, max: usize },
    #[error("p-value out of [0,1] at index {index}: {value}")]
    InvalidPValue { index: usize, value: f64 },
}

/// Which procedure produced a [`StatResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatMethod {
    Spearman,
    PearsonLog,
    MannWhitneyU,
    ShapiroWilk,
    OlsSlopeT,
    BreuschPagan,
}

/// Outcome of a single hypothesis test.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StatResult {
    pub method: StatMethod,
    pub statistic: f64,
    pub p_value: f64,
    /// Familywise-adjusted p; set by the reporting layer after the whole
    /// family is known.
    pub adjusted_p: Option<f64>,
    /// Sample size(s): one entry for one-sample procedures, two for
    /// two-sample ones.
    pub n: Vec<usize>,
    pub notes: Vec<String>,
}

impl StatResult {
    fn new(method: StatMethod, statistic: f64, p_value: f64, n: Vec<usize>) -> Self {
        StatResult {
            method,
            statistic,
            p_value: p_value.clamp(0.0, 1.0),
            adjusted_p: None,
            n,
            notes: Vec::new(),
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

/// Significance configuration shared across an analysis run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StatsConfig {
    pub alpha: f64,
    pub two_sided: bool,
}

impl Default for StatsConfig {
    fn default() -> Self {
        StatsConfig { alpha: 0.05, two_sided: true }
    }
}

impl StatsConfig {
    pub fn validate(&self) -> Result<(), StatsError> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(StatsError::InvalidPValue { index: 0, value: self.alpha });
        }
        Ok(())
    }
}

fn check_finite(xs: &[f64]) -> Result<(), StatsError> {
    match xs.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(StatsError::NonFinite { index }),
        None => Ok(()),
    }
}

/// Average ranks (1-based) with ties sharing the mean of their positions.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j + 2) as f64 / 2.0;
        for k in i..=j {
            ranks[order[k]] = avg;
        }
        i = j + 1;
    }
    ranks
}

fn pearson_on(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::ConstantSeries);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

// Two-sided p for a correlation coefficient via the t approximation
// t = r * sqrt((n-2)/(1-r^2)) with n-2 degrees of freedom.
fn correlation_p(r: f64, n: usize) -> f64 {
    let one_minus = 1.0 - r * r;
    if one_minus <= 0.0 {
        return 0.0;
    }
    let t = r * ((n as f64 - 2.0) / one_minus).sqrt();
    special::t_sf_two_sided(t, n as f64 - 2.0)
}

/// Spearman's rank correlation with average ranks on ties; p via the t
/// approximation, two-sided.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<StatResult, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch { left: x.len(), right: y.len() });
    }
    if x.len() < 3 {
        return Err(StatsError::TooShort { required: 3, actual: x.len() });
    }
    check_finite(x)?;
    check_finite(y)?;
    let rx = average_ranks(x);
    let ry = average_ranks(y);
    let rho = pearson_on(&rx, &ry)?;
    let p = correlation_p(rho, x.len());
    let mut result = StatResult::new(StatMethod::Spearman, rho, p, vec![x.len()]);
    let has_ties = |r: &[f64]| r.iter().any(|v| v.fract() != 0.0);
    if has_ties(&rx) || has_ties(&ry) {
        result = result.with_note("average ranks applied to ties");
    }
    if rho.abs() >= 1.0 {
        result = result.with_note("perfect monotone relation: p reported as 0");
    }
    Ok(result)
}

/// Pearson correlation of the log-transformed series; every value must be
/// strictly positive. Two-sided p via the t distribution with n-2 df.
pub fn pearson_log(x: &[f64], y: &[f64]) -> Result<StatResult, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch { left: x.len(), right: y.len() });
    }
    if x.len() < 3 {
        return Err(StatsError::TooShort { required: 3, actual: x.len() });
    }
    check_finite(x)?;
    check_finite(y)?;
    for (index, &v) in x.iter().enumerate() {
        if v <= 0.0 {
            return Err(StatsError::NonPositive { index });
        }
    }
    for (index, &v) in y.iter().enumerate() {
        if v <= 0.0 {
            return Err(StatsError::NonPositive { index });
        }
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let r = pearson_on(&lx, &ly)?;
    let p = correlation_p(r, x.len());
    let mut result = StatResult::new(StatMethod::PearsonLog, r, p, vec![x.len()]);
    if r.abs() >= 1.0 {
        result = result.with_note("exact log-linearity: p reported as 0");
    }
    Ok(result)
}

// Combined sample size at or below which the exact Mann-Whitney null
// distribution is enumerated (ties force the normal approximation).
const MWU_EXACT_LIMIT: usize = 12;

/// Mann-Whitney U test, two-sided. Statistic is U for the first group.
///
/// Exact p by enumerating the null distribution when the combined sample is
/// small and tie-free; otherwise the normal approximation with tie and
/// continuity corrections.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<StatResult, StatsError> {
    if a.is_empty() {
        return Err(StatsError::TooShort { required: 1, actual: 0 });
    }
    if b.is_empty() {
        return Err(StatsError::TooShort { required: 1, actual: 0 });
    }
    check_finite(a)?;
    check_finite(b)?;
    let n1 = a.len();
    let n2 = b.len();
    let mut combined: Vec<f64> = Vec::with_capacity(n1 + n2);
    combined.extend_from_slice(a);
    combined.extend_from_slice(b);
    let ranks = average_ranks(&combined);
    let r1: f64 = ranks[..n1].iter().sum();
    let u_a = r1 - (n1 * (n1 + 1)) as f64 / 2.0;
    let u_b = (n1 * n2) as f64 - u_a;

    let mut sorted = combined.clone();
    sorted.sort_by(|p, q| p.partial_cmp(q).expect("finite values"));
    let has_ties = sorted.windows(2).any(|w| w[0] == w[1]);

    if n1 + n2 <= MWU_EXACT_LIMIT && !has_ties {
        let p = mwu_exact_p(n1, n2, u_a);
        return Ok(StatResult::new(StatMethod::MannWhitneyU, u_a, p, vec![n1, n2])
            .with_note("exact null distribution"));
    }

    // Normal approximation on the larger U with continuity correction; the
    // variance gets the standard tie adjustment.
    let n = (n1 + n2) as f64;
    let mu = (n1 * n2) as f64 / 2.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let sigma2 = (n1 * n2) as f64 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    let mut result = StatResult::new(StatMethod::MannWhitneyU, u_a, 1.0, vec![n1, n2]);
    if sigma2 <= 0.0 {
        // every observation identical
        return Ok(result.with_note("degenerate: all values tied, p = 1"));
    }
    let z = (u_a.max(u_b) - mu - 0.5) / sigma2.sqrt();
    let p = (2.0 * special::normal_sf(z)).min(1.0);
    result.p_value = p;
    result = result.with_note("normal approximation with continuity correction");
    if has_ties {
        result = result.with_note("tie correction applied");
    }
    Ok(result)
}

// Exact two-sided p by counting the null distribution of U over all
// C(n1+n2, n1) labelings, via the classic recurrence
// f(i, j, u) = f(i, j-1, u) + f(i-1, j, u-j).
fn mwu_exact_p(n1: usize, n2: usize, u_a: f64) -> f64 {
    let u_max = n1 * n2;
    // prev[i][u] = f(i, j-1, u); base layer j = 0 has f(i, 0, u) = [u == 0]
    let mut prev = vec![vec![0f64; u_max + 1]; n1 + 1];
    for row in prev.iter_mut() {
        row[0] = 1.0;
    }
    for j in 1..=n2 {
        let mut next = vec![vec![0f64; u_max + 1]; n1 + 1];
        next[0][0] = 1.0;
        for i in 1..=n1 {
            for u in 0..=u_max {
                let mut c = prev[i][u];
                if u >= j {
                    c += next[i - 1][u - j];
                }
                next[i][u] = c;
            }
        }
        prev = next;
    }
    let u = u_a.round() as usize;
    let u_min = u.min(u_max - u);
    let total: f64 = prev[n1].iter().sum();
    let tail: f64 = prev[n1][..=u_min].iter().sum();
    (2.0 * tail / total).min(1.0)
}

/// Result of the regression slope t-test, bundling the slope estimate and
/// residual diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegressionTest {
    pub slope: f64,
    pub intercept: f64,
    pub result: StatResult,
    pub degenerate: bool,
    pub diagnostics: Option<RegressionDiagnostics>,
}

/// Residual checks backing the linear-regression assumptions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegressionDiagnostics {
    pub residuals: Vec<f64>,
    pub residual_normality: Option<StatResult>,
    pub homoscedasticity: Option<StatResult>,
}

/// OLS slope with a two-sided t-test against a zero slope, plus residual
/// normality (Shapiro-Wilk) and homoscedasticity (Breusch-Pagan) checks.
pub fn ols_slope_ttest(series: &[(f64, f64)]) -> Result<RegressionTest, StatsError> {
    let n = series.len();
    if n < 3 {
        return Err(StatsError::TooShort { required: 3, actual: n });
    }
    let ts: Vec<f64> = series.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = series.iter().map(|p| p.1).collect();
    check_finite(&ts)?;
    check_finite(&ys)?;
    let mut seen = ts.clone();
    seen.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    if let Some(pos) = seen.windows(2).position(|w| w[0] == w[1]) {
        return Err(StatsError::DuplicateTime { index: pos + 1 });
    }

    let nf = n as f64;
    let mt = ts.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&t, &y) in ts.iter().zip(&ys) {
        sxx += (t - mt) * (t - mt);
        sxy += (t - mt) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mt;
    let residuals: Vec<f64> =
        ts.iter().zip(&ys).map(|(&t, &y)| y - (intercept + slope * t)).collect();
    let sse: f64 = residuals.iter().map(|e| e * e).sum();

    if syy == 0.0 {
        // flat series: no trend by construction
        let result = StatResult::new(StatMethod::OlsSlopeT, 0.0, 1.0, vec![n])
            .with_note("constant series: slope 0, p = 1");
        return Ok(RegressionTest {
            slope: 0.0,
            intercept,
            result,
            degenerate: true,
            diagnostics: None,
        });
    }
    if sse / syy < 1e-12 {
        let result = StatResult::new(StatMethod::OlsSlopeT, f64::INFINITY, 0.0, vec![n])
            .with_note("degenerate: perfect fit, diagnostics skipped");
        return Ok(RegressionTest { slope, intercept, result, degenerate: true, diagnostics: None });
    }

    let se = (sse / (nf - 2.0) / sxx).sqrt();
    let t_stat = slope / se;
    let p = special::t_sf_two_sided(t_stat, nf - 2.0);
    let result = StatResult::new(StatMethod::OlsSlopeT, t_stat, p, vec![n]);

    let residual_normality = shapiro_wilk(&residuals).ok();
    let homoscedasticity = breusch_pagan(&residuals, &ts).ok();
    Ok(RegressionTest {
        slope,
        intercept,
        result,
        degenerate: false,
        diagnostics: Some(RegressionDiagnostics {
            residuals,
            residual_normality,
            homoscedasticity,
        }),
    })
}

/// Breusch-Pagan test for heteroscedasticity: LM = n * R-squared of the
/// auxiliary regression of squared residuals on the regressor, chi-squared
/// with 1 degree of freedom.
pub fn breusch_pagan(residuals: &[f64], x: &[f64]) -> Result<StatResult, StatsError> {
    if residuals.len() != x.len() {
        return Err(StatsError::LengthMismatch { left: residuals.len(), right: x.len() });
    }
    let n = residuals.len();
    if n < 3 {
        return Err(StatsError::TooShort { required: 3, actual: n });
    }
    check_finite(residuals)?;
    check_finite(x)?;
    let e2: Vec<f64> = residuals.iter().map(|e| e * e).collect();
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let me = e2.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&a, &b) in x.iter().zip(&e2) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - me);
        syy += (b - me) * (b - me);
    }
    if syy == 0.0 || sxx == 0.0 {
        return Ok(StatResult::new(StatMethod::BreuschPagan, 0.0, 1.0, vec![n])
            .with_note("degenerate: constant squared residuals"));
    }
    let slope = sxy / sxx;
    let intercept = me - slope * mx;
    let sse: f64 = x
        .iter()
        .zip(&e2)
        .map(|(&a, &b)| {
            let fit = intercept + slope * a;
            (b - fit) * (b - fit)
        })
        .sum();
    let r2 = 1.0 - sse / syy;
    let lm = nf * r2;
    let p = special::chi2_sf(lm, 1.0);
    Ok(StatResult::new(StatMethod::BreuschPagan, lm, p, vec![n]))
}

/// Holm-Bonferroni step-down adjustment. Returns adjusted p-values in the
/// original input order.
pub fn holm_bonferroni(p_values: &[f64]) -> Result<Vec<f64>, StatsError> {
    for (index, &p) in p_values.iter().enumerate() {
        if !(0.0..=1.0).contains(&p) {
            return Err(StatsError::InvalidPValue { index, value: p });
        }
    }
    let m = p_values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p_values[a].partial_cmp(&p_values[b]).expect("checked range"));
    let mut adjusted = vec![0.0; m];
    let mut running = 0.0f64;
    for (rank, &idx) in order.iter().enumerate() {
        let candidate = (m - rank) as f64 * p_values[idx];
        running = running.max(candidate);
        adjusted[idx] = running.min(1.0);
    }
    Ok(adjusted)
}

/// Median with the even-length midpoint convention. `None` on empty input.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let n = sorted.len();
    if n % 2 == 1 {
        Some(sorted[n / 2])
    } else {
        Some((sorted[n / 2 - 1] + sorted[n / 2]) / 2.0)
    }
}

/// Arithmetic mean. `None` on empty input.
pub fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}
