//! Trial loops on a rayon pool.
//!
//! Each trial depends only on `(seed, index)`, and outcomes are collected in
//! index order before aggregation, so the summary is the same for every
//! thread count.

use std::env;
use std::time::Instant;

use gruss_core::harness::{run_trial, summarize, TrialConfig, TrialOutcome, TrialSummary};
use rayon::prelude::*;

use crate::io::{LabError, LabResult};

pub const THREADS_ENV: &str = "GRUSS_LAB_THREADS";

/// Thread cap from [`THREADS_ENV`]: `Some(0)` means sequential, `None`
/// means rayon's default.
pub fn threads_from_env() -> LabResult<Option<usize>> {
    match env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| LabError::Usage(format!("{THREADS_ENV} must be a non-negative integer, got '{v}'"))),
    }
}

fn outcomes(config: &TrialConfig, threads: Option<usize>) -> LabResult<Vec<TrialOutcome>> {
    let run = || -> gruss_core::Result<Vec<TrialOutcome>> {
        (0..config.trials).into_par_iter().map(|i| run_trial(config, i)).collect()
    };
    let result = match threads {
        Some(0) => (0..config.trials).map(|i| run_trial(config, i)).collect(),
        None => run(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| LabError::Usage(format!("cannot start {n} threads: {e}")))?
            .install(run),
    };
    result.map_err(LabError::from)
}

/// Validates `config`, runs every trial and aggregates, stamping the wall
/// time.
pub fn run_trials(config: &TrialConfig, threads: Option<usize>) -> LabResult<TrialSummary> {
    config.validate()?;
    let start = Instant::now();
    let outs = outcomes(config, threads)?;
    let mut summary = summarize(config, &outs);
    summary.wall_time_ms = start.elapsed().as_millis() as u64;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use gruss_core::harness::{Check, Family};

    #[test]
    fn thread_count_does_not_change_the_summary() {
        let config = TrialConfig { family: Family::Cp, dims: vec![2, 3], trials: 24, seed: 5, check: Check::Theorem };
        let strip = |mut s: TrialSummary| {
            s.wall_time_ms = 0;
            s
        };
        let seq = strip(run_trials(&config, Some(0)).unwrap());
        assert_eq!(seq, strip(run_trials(&config, Some(3)).unwrap()));
        assert_eq!(seq, strip(run_trials(&config, None).unwrap()));
        assert_eq!(seq, gruss_core::harness::run_trials(&config).unwrap());
    }
}
