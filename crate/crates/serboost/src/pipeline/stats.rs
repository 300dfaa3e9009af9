//! Welch's t-test and the run-to-run statistical comparison.

use serde::{Deserialize, Serialize};

use super::PipelineError;

pub const ALPHA: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub t: f64,
    pub p: f64,
    pub df: f64,
    pub significant: bool,
    /// Set when a degenerate-variance convention decided the p value.
    pub degenerate: bool,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn sample_var(v: &[f64], m: f64) -> f64 {
    v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64
}

/// ln Gamma(x) by the Lanczos approximation.
fn ln_gamma(x: f64) -> f64 {
    const G: [f64; 6] = [
        76.18009172947146,
        -86.50532032941677,
        24.01409824083091,
        -1.231739572450155,
        0.1208650973866179e-2,
        -0.5395239384953e-5,
    ];
    let mut ser = 1.000000000190015;
    let mut tmp = x + 5.5;
    tmp -= (x + 0.5) * tmp.ln();
    for (j, &g) in G.iter().enumerate() {
        ser += g / (x + 1.0 + j as f64);
    }
    -tmp + (2.5066282746310005 * ser / x).ln()
}

/// Continued fraction for the incomplete beta (modified Lentz's method).
fn betacf(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 200;
    const EPS: f64 = 3e-14;
    const FPMIN: f64 = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta I_x(a, b).
pub(crate) fn reg_inc_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * betacf(a, b, x) / a
    } else {
        1.0 - front * betacf(b, a, 1.0 - x) / b
    }
}

/// Welch's unequal-variance two-sample t-test, two-sided.
///
/// Degenerate conventions when both samples have zero variance: equal
/// means give p = 1, different means give p = 0, each flagged.
pub fn welch_ttest(a: &[f64], b: &[f64]) -> Result<TTestResult, PipelineError> {
    if a.len() < 2 {
        return Err(PipelineError::SampleTooSmall(a.len()));
    }
    if b.len() < 2 {
        return Err(PipelineError::SampleTooSmall(b.len()));
    }
    let (ma, mb) = (mean(a), mean(b));
    let (va, vb) = (sample_var(a, ma), sample_var(b, mb));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let se2 = va / na + vb / nb;
    if se2 <= 0.0 {
        let equal = (ma - mb).abs() == 0.0;
        return Ok(TTestResult {
            t: if equal { 0.0 } else { f64::INFINITY },
            p: if equal { 1.0 } else { 0.0 },
            df: na + nb - 2.0,
            significant: !equal,
            degenerate: true,
        });
    }
    let t = (ma - mb) / se2.sqrt();
    // Welch-Satterthwaite degrees of freedom.
    let df = se2 * se2
        / ((va / na) * (va / na) / (na - 1.0) + (vb / nb) * (vb / nb) / (nb - 1.0));
    let p = reg_inc_beta(df / 2.0, 0.5, df / (df + t * t));
    Ok(TTestResult {
        t,
        p,
        df,
        significant: p < ALPHA,
        degenerate: false,
    })
}

/// Welch comparison of one metric across two runs' per-seed samples.
pub fn compare_metric_samples(a: &[f64], b: &[f64]) -> Result<TTestResult, PipelineError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(PipelineError::InsufficientRepeats(a.len().min(b.len())));
    }
    welch_ttest(a, b)
}
