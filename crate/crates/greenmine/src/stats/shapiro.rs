//! Shapiro-Wilk normality test.
//!
//! Royston's polynomial-approximation algorithm: coefficients from Blom
//! normal order statistics with the published small/large-sample
//! corrections, and the matching log-normal transform for the p-value.

use super::special;
use super::{StatMethod, StatResult, StatsError};

const MIN_N: usize = 3;
const MAX_N: usize = 5000;

// Polynomial constants from the published algorithm.
const C1: [f64; 6] = [0.0, 0.221_157, -0.147_981, -2.071_19, 4.434_685, -2.706_056];
const C2: [f64; 6] = [0.0, 0.042_981, -0.293_762, -1.752_461, 5.682_633, -3.582_633];
const C3: [f64; 4] = [0.544, -0.399_78, 0.025_054, -6.714e-4];
const C4: [f64; 4] = [1.382_2, -0.778_57, 0.062_767, -0.002_032_2];
const C5: [f64; 4] = [-1.586_1, -0.310_82, -0.083_751, 0.003_891_5];
const C6: [f64; 3] = [-0.480_3, -0.082_676, 0.003_030_2];
const G: [f64; 2] = [-2.273, 0.459];

fn poly(c: &[f64], x: f64) -> f64 {
    let mut r = c[c.len() - 1];
    for v in c[..c.len() - 1].iter().rev() {
        r = r * x + v;
    }
    r
}

/// W statistic and p-value for the null hypothesis that the sample is
/// normally distributed. Supported for 3 <= n <= 5000.
pub fn shapiro_wilk(data: &[f64]) -> Result<StatResult, StatsError> {
    let n = data.len();
    if !(MIN_N..=MAX_N).contains(&n) {
        return Err(StatsError::SizeOutOfRange { actual: n, min: MIN_N, max: MAX_N });
    }
    if let Some(index) = data.iter().position(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite { index });
    }
    let mut x = data.to_vec();
    x.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    if x[n - 1] - x[0] == 0.0 {
        return Err(StatsError::ConstantSeries);
    }

    if n == 3 {
        return Ok(shapiro_n3(&x));
    }

    let nn2 = n / 2;
    // Blom approximation to the expected normal order statistics; only the
    // lower half is needed by antisymmetry.
    let mut m = vec![0.0; nn2];
    let mut summ2 = 0.0;
    for (i, mi) in m.iter_mut().enumerate() {
        let p = (i as f64 + 1.0 - 0.375) / (n as f64 + 0.25);
        *mi = special::inverse_normal_cdf(p);
        summ2 += *mi * *mi;
    }
    summ2 *= 2.0;
    let ssumm2 = summ2.sqrt();
    let rsn = 1.0 / (n as f64).sqrt();

    let mut a = vec![0.0; nn2];
    let a1 = poly(&C1, rsn) - m[0] / ssumm2;
    if n <= 5 {
        let fac = ((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1)).sqrt();
        a[0] = a1;
        for i in 1..nn2 {
            a[i] = -m[i] / fac;
        }
    } else {
        let a2 = -m[1] / ssumm2 + poly(&C2, rsn);
        let fac = ((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1])
            / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2))
            .sqrt();
        a[0] = a1;
        a[1] = a2;
        for i in 2..nn2 {
            a[i] = -m[i] / fac;
        }
    }

    let mut sa = 0.0;
    for i in 0..nn2 {
        sa += a[i] * (x[n - 1 - i] - x[i]);
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let ss: f64 = x.iter().map(|&v| (v - mean) * (v - mean)).sum();
    let w = ((sa * sa) / ss).min(1.0);

    let p = p_value(w, n);
    Ok(StatResult::new(StatMethod::ShapiroWilk, w, p, vec![n]))
}

// n = 3 has a closed form: a = (1/sqrt(2), 0, -1/sqrt(2)) and
// P(W <= w) = (6/pi) * (asin(sqrt(w)) - asin(sqrt(3/4))).
fn shapiro_n3(x: &[f64]) -> StatResult {
    let a1 = std::f64::consts::FRAC_1_SQRT_2;
    let mean = (x[0] + x[1] + x[2]) / 3.0;
    let ss: f64 = x.iter().map(|&v| (v - mean) * (v - mean)).sum();
    let num = a1 * (x[2] - x[0]);
    let w = ((num * num) / ss).clamp(0.75, 1.0);
    let p = (1.0 - (6.0 / std::f64::consts::PI) * w.sqrt().acos()).clamp(0.0, 1.0);
    StatResult::new(StatMethod::ShapiroWilk, w, p, vec![3])
}

fn p_value(w: f64, n: usize) -> f64 {
    let nf = n as f64;
    let w1 = 1.0 - w;
    if w1 <= 0.0 {
        return 1.0;
    }
    let y = w1.ln();
    let z = if n <= 11 {
        let gamma = poly(&G, nf);
        if y >= gamma {
            return 0.0;
        }
        let y2 = -(gamma - y).ln();
        let m = poly(&C3, nf);
        let s = poly(&C4, nf).exp();
        (y2 - m) / s
    } else {
        let xx = nf.ln();
        let m = poly(&C5, xx);
        let s = poly(&C6, xx).exp();
        (y - m) / s
    };
    special::normal_sf(z).clamp(0.0, 1.0)
}
