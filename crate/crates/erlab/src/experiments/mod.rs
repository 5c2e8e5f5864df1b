//! Experiment orchestration: configs, verdicts, the E1–E7 runners, and the
//! autocorrelation diagnostic.

mod config;
mod runners;
mod verdict;

pub use config::{
    parse_config_file, parse_config_str, parse_seed, ExperimentConfig, ExperimentId, Overrides,
};
pub use runners::run_experiment;
pub use verdict::{CriterionRow, Status, Verdict};

use std::path::Path;

use crate::error::{Error, Result};
use crate::processes::ProcessSpec;
use crate::util::linear_fit;

/// Autocorrelation table with decay-model fits.
#[derive(Debug, Clone)]
pub struct CorrTable {
    pub lags: Vec<u64>,
    pub values: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
    /// Fit of ln |C(l)| against l (exponential-decay candidate): (slope, rms residual).
    pub semilog: (f64, f64),
    /// Fit of ln |C(l)| against ln l (polynomial-decay candidate).
    pub loglog: (f64, f64),
}

/// Empirical autocorrelation C(l) = mean(phi_t phi_{t+l}) - mean^2 over one
/// realization, with both decay-model fits reported as diagnostics.
pub fn autocorrelation(spec: &ProcessSpec, length: usize, lags: &[u64]) -> Result<CorrTable> {
    if lags.is_empty() {
        return Err(Error::Argument("empty lag list".into()));
    }
    let max_lag = *lags.iter().max().unwrap();
    if max_lag as usize > length / 10 {
        return Err(Error::Argument(format!(
            "max lag {max_lag} exceeds length/10 = {}",
            length / 10
        )));
    }
    let series: Vec<f64> = spec.stream().take(length).collect();
    let n = length as f64;
    let mean = series.iter().sum::<f64>() / n;
    let variance = series.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    if variance < 1e-14 {
        return Err(Error::Degenerate(format!(
            "series variance {variance} too small for correlation analysis"
        )));
    }

    let values: Vec<f64> = lags
        .iter()
        .map(|&l| {
            let l = l as usize;
            let count = length - l;
            let mut s = 0.0;
            for t in 0..count {
                s += series[t] * series[t + l];
            }
            s / count as f64 - mean * mean
        })
        .collect();

    // decay fits over positive lags with nonzero |C|
    let mut semi_x = Vec::new();
    let mut semi_y = Vec::new();
    let mut log_x = Vec::new();
    let mut log_y = Vec::new();
    for (&l, &c) in lags.iter().zip(&values) {
        if l >= 1 && c.abs() > 0.0 {
            semi_x.push(l as f64);
            semi_y.push(c.abs().ln());
            log_x.push((l as f64).ln());
            log_y.push(c.abs().ln());
        }
    }
    let semilog = if semi_x.len() >= 2 {
        let (s, _, r) = linear_fit(&semi_x, &semi_y);
        (s, r)
    } else {
        (f64::NAN, f64::NAN)
    };
    let loglog = if log_x.len() >= 2 {
        let (s, _, r) = linear_fit(&log_x, &log_y);
        (s, r)
    } else {
        (f64::NAN, f64::NAN)
    };

    Ok(CorrTable {
        lags: lags.to_vec(),
        values,
        mean,
        variance,
        semilog,
        loglog,
    })
}

/// Write a CSV file: optional `# `-prefixed comment lines, a header, rows.
/// Comma separator, `.` decimal point, LF line endings.
pub fn write_csv(path: &Path, comments: &[String], header: &str, rows: &[String]) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    let mut text = String::new();
    for c in comments {
        text.push_str("# ");
        text.push_str(c);
        text.push('\n');
    }
    text.push_str(header);
    text.push('\n');
    for r in rows {
        text.push_str(r);
        text.push('\n');
    }
    std::fs::write(path, text)?;
    Ok(())
}
