//! Monte Carlo means with a divergence heuristic.
//!
//! Heavy-tailed summands make the sample standard error meaningless, so the
//! running mean is inspected at sample sizes `1000, 2000, 4000, ...`. If two
//! consecutive doublings each move it by more than 20% the expectation is
//! reported as suspected infinite instead of as a number.

use crate::seed::{par_chunks, Seed, SimRng};
use crate::stats::Moments;

pub const FIRST_CHECKPOINT: usize = 1000;
pub const JUMP_THRESHOLD: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McOptions {
    pub samples: usize,
    pub seed: Seed,
}

impl McOptions {
    pub fn new(samples: usize, seed: impl Into<Seed>) -> Self {
        McOptions { samples, seed: seed.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum McOutcome {
    Stable { mean: f64, stderr: f64, samples: usize },
    /// `checkpoints` holds `(sample size, running mean)` pairs.
    SuspectedInfinite { checkpoints: Vec<(usize, f64)> },
}

impl McOutcome {
    pub fn mean(&self) -> Option<f64> {
        match self {
            McOutcome::Stable { mean, .. } => Some(*mean),
            McOutcome::SuspectedInfinite { .. } => None,
        }
    }
}

/// Mean of `f` over `opts.samples` draws, checked for divergence at doubling
/// checkpoints. Deterministic given the seed, independent of thread count.
pub fn doubling_mean<F>(opts: McOptions, f: F) -> McOutcome
where
    F: Fn(&mut SimRng) -> f64 + Sync + Send,
{
    let chunks = par_chunks(opts.seed, opts.samples, |rng, n| (0..n).map(|_| f(rng)).collect::<Vec<f64>>());
    let values: Vec<f64> = chunks.into_iter().flatten().collect();
    summarize(&values)
}

/// Applies the doubling heuristic to an ordered sample.
pub fn summarize(values: &[f64]) -> McOutcome {
    let mut checkpoints = Vec::new();
    let mut acc = Moments::new();
    let mut next = FIRST_CHECKPOINT;
    let mut strikes = 0;
    for (i, &v) in values.iter().enumerate() {
        if !v.is_finite() {
            checkpoints.push((i + 1, f64::INFINITY));
            return McOutcome::SuspectedInfinite { checkpoints };
        }
        acc.push(v);
        if i + 1 == next {
            let mean = acc.mean();
            if let Some(&(_, prev)) = checkpoints.last() {
                let prev: f64 = prev;
                let change = (mean - prev).abs() / prev.abs().max(f64::MIN_POSITIVE);
                if change > JUMP_THRESHOLD {
                    strikes += 1;
                } else {
                    strikes = 0;
                }
            }
            checkpoints.push((i + 1, mean));
            if strikes >= 2 {
                return McOutcome::SuspectedInfinite { checkpoints };
            }
            next *= 2;
        }
    }
    McOutcome::Stable { mean: acc.mean(), stderr: acc.stderr(), samples: values.len() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn bounded_summand_is_stable() {
        let out = doubling_mean(McOptions::new(50_000, 4), |rng| rng.random::<f64>());
        match out {
            McOutcome::Stable { mean, stderr, samples } => {
                assert_eq!(samples, 50_000);
                assert!((mean - 0.5).abs() < 5.0 * stderr);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn infinite_mean_is_flagged() {
        // U^{-2} has infinite mean; the running mean keeps jumping.
        let out = doubling_mean(McOptions::new(1 << 22, 9), |rng| {
            let u: f64 = rng.random();
            1.0 / (u * u)
        });
        assert!(matches!(out, McOutcome::SuspectedInfinite { .. }), "{out:?}");
    }

    #[test]
    fn non_finite_value_is_infinite() {
        assert!(matches!(summarize(&[1.0, f64::INFINITY]), McOutcome::SuspectedInfinite { .. }));
    }
}
