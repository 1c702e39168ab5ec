//! Summary statistics and the Welch two-sample t-test.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::BenchError;

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population standard deviation.
pub fn std_dev(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64).sqrt()
}

fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WelchTest {
    pub t: f64,
    /// Welch-Satterthwaite degrees of freedom; `None` when both samples
    /// have zero variance.
    pub df: Option<f64>,
    /// Two-sided p-value.
    pub p_value: Option<f64>,
    pub significant: bool,
    /// Both samples have zero variance, so no test was possible.
    pub degenerate: bool,
}

/// Welch's unequal-variance t-test, two-sided at the 95% level.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<WelchTest, BenchError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(BenchError::SampleTooSmall(a.len().min(b.len())));
    }
    let (ma, mb) = (mean(a), mean(b));
    let (va, vb) = (
        sample_variance(a) / a.len() as f64,
        sample_variance(b) / b.len() as f64,
    );
    let se2 = va + vb;
    if se2 == 0.0 {
        let t = if ma == mb {
            0.0
        } else {
            (ma - mb).signum() * f64::INFINITY
        };
        return Ok(WelchTest {
            t,
            df: None,
            p_value: None,
            significant: false,
            degenerate: true,
        });
    }
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2 / (va * va / (a.len() - 1) as f64 + vb * vb / (b.len() - 1) as f64);
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    let p = 2.0 * (1.0 - dist.cdf(t.abs()));
    Ok(WelchTest {
        t,
        df: Some(df),
        p_value: Some(p),
        significant: p < 0.05,
        degenerate: false,
    })
}
