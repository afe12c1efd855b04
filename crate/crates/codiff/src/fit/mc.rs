//! Monte Carlo study of the estimation pipeline across sample lengths.
//!
//! Replication `rep` at length index `li` draws from the dedicated RNG
//! substream `(li << 32) | rep` of the study seed, so every replication is
//! reproducible in isolation and lengths can be re-run independently.

use crate::error::{Error, Result};
use crate::io::SummaryRow;
use crate::rng;
use crate::var::{simulate, VarModel};

use super::noise_cf::CfGrid;
use super::{fit_pipeline, FitOptions};

#[derive(Debug, Clone)]
pub struct McStudy {
    pub model: VarModel,
    pub lengths: Vec<usize>,
    pub replications: usize,
    pub burn_in: usize,
    pub h_fit_min: i64,
    pub h_fit_max: i64,
    /// Fit one shared decay rate on both lag sides instead of one per side.
    pub assume_equal_diagonal: bool,
    pub seed: u64,
    pub grid: CfGrid,
}

/// Medians of each estimator at each length, over the replications that
/// completed; failed replications are counted and excluded.
#[derive(Debug, Clone, PartialEq)]
pub struct McSummary {
    pub lengths: Vec<usize>,
    pub estimators: Vec<String>,
    /// `medians[length_index][estimator_index]`
    pub medians: Vec<Vec<f64>>,
    /// Failed replications per length.
    pub failures: Vec<usize>,
    pub replications: usize,
    pub seed: u64,
}

impl McSummary {
    /// Flattens into one row per (length, estimator) pair.
    pub fn to_rows(&self) -> Vec<SummaryRow> {
        let mut rows = Vec::with_capacity(self.lengths.len() * self.estimators.len());
        for (li, &n) in self.lengths.iter().enumerate() {
            for (ei, name) in self.estimators.iter().enumerate() {
                rows.push(SummaryRow {
                    n,
                    estimator: name.clone(),
                    median: self.medians[li][ei],
                    failures: self.failures[li],
                });
            }
        }
        rows
    }
}

fn median_of(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite estimates"));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn run_mc_study(study: &McStudy) -> Result<McSummary> {
    if study.lengths.is_empty() {
        return Err(Error::invalid("study needs at least one sample length"));
    }
    if study.replications == 0 {
        return Err(Error::invalid("study needs at least one replication"));
    }
    let mut estimators: Vec<String> = if study.assume_equal_diagonal {
        vec!["a".into()]
    } else {
        vec!["a1".into(), "a4".into()]
    };
    estimators.extend(["alpha", "r11", "r12", "r22"].map(String::from));

    let options = FitOptions {
        h_min: study.h_fit_min,
        h_max: study.h_fit_max,
        assume_equal_diagonal: study.assume_equal_diagonal,
        init: None,
        grid: study.grid.clone(),
    };

    let mut medians = Vec::with_capacity(study.lengths.len());
    let mut failures = Vec::with_capacity(study.lengths.len());
    for (li, &n) in study.lengths.iter().enumerate() {
        let mut samples: Vec<Vec<f64>> =
            vec![Vec::with_capacity(study.replications); estimators.len()];
        let mut failed = 0usize;
        for rep in 0..study.replications {
            let mut r = rng::substream(study.seed, rng::mc_stream(li, rep));
            let outcome = simulate(&study.model, n, study.burn_in, &mut r)
                .and_then(|traj| fit_pipeline(&traj, &options));
            match outcome {
                Ok(fit) => {
                    let mut values = if study.assume_equal_diagonal {
                        vec![fit.a1_hat]
                    } else {
                        vec![fit.a1_hat, fit.a4_hat]
                    };
                    values.extend([
                        fit.noise.alpha_hat,
                        fit.noise.cov_hat.r11(),
                        fit.noise.cov_hat.r12(),
                        fit.noise.cov_hat.r22(),
                    ]);
                    for (bucket, v) in samples.iter_mut().zip(values) {
                        bucket.push(v);
                    }
                }
                Err(_) => failed += 1,
            }
        }
        if failed == study.replications {
            return Err(Error::FitFailure(format!(
                "every replication failed at length {n}"
            )));
        }
        medians.push(samples.into_iter().map(median_of).collect());
        failures.push(failed);
    }

    Ok(McSummary {
        lengths: study.lengths.clone(),
        estimators,
        medians,
        failures,
        replications: study.replications,
        seed: study.seed,
    })
}
