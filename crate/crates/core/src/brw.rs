//! Forward simulation of the branching population and the truncated
//! martingale decomposition.
//!
//! For a parent `u` in generation `n` with weight `Y_u = e^{-S(u)}`, let
//! `W_1(u)` be the sum of its children's weights relative to it. Then
//!
//! * `W̃_{n+1} = Σ_u Y_u W_1(u) 1{e^{an} Y_u W_1(u) <= 1}`
//! * `R_n = Σ_u Y_u E[W_1; W_1 > e^{-an}/Y_u]`
//! * `M_n = Σ_{k <= n} e^{ak} (W̃_{k+1} - W_k + R_k)`

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::{median, ols_slope};
use crate::offspring::OffspringModel;
use crate::seed::Seed;
use crate::stats::Moments;

pub const DEFAULT_CAP: usize = 10_000_000;
/// Draws in the empirical `W_1` table.
pub const EMPIRICAL_TABLE_SIZE: usize = 1_000_000;
pub const MIN_ENSEMBLE: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Individual {
    pub weight: f64,
    pub position: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Population {
    pub generation: usize,
    pub individuals: Vec<Individual>,
    pub truncated: bool,
}

impl Population {
    pub fn root() -> Self {
        Population { generation: 0, individuals: vec![Individual { weight: 1.0, position: 0.0 }], truncated: false }
    }

    /// `W_n = Σ Y_u`.
    pub fn w(&self) -> f64 {
        self.individuals.iter().map(|i| i.weight).sum()
    }
}

/// Tail first moments `t -> E[W_1; W_1 > t]` of the law of `W_1`.
#[derive(Debug, Clone, PartialEq)]
pub struct W1Tail {
    values: Vec<f64>,
    /// `suffix[k] = Σ_{j >= k} values[j] p_j`.
    suffix: Vec<f64>,
    exact: bool,
}

impl W1Tail {
    /// From the enumerated law of `W_1`; `FTableRequired` if it is not
    /// enumerable.
    pub fn exact(model: &OffspringModel) -> Result<Self> {
        let atoms = model
            .w1_atoms()
            .ok_or_else(|| Error::FTableRequired("the law of W_1 has no finite enumeration".into()))?;
        Ok(Self::from_atoms(&atoms, true))
    }

    /// From `draws` sampled values of `W_1`, each with mass `1/draws`.
    pub fn empirical(model: &OffspringModel, draws: usize, seed: Seed) -> Result<Self> {
        let chunks = crate::seed::par_chunks(seed, draws, |rng, n| {
            let mut buf = Vec::new();
            (0..n)
                .map(|_| model.sample_into(rng, &mut buf).map(|_| buf.iter().map(|x| (-x).exp()).sum::<f64>()))
                .collect::<Result<Vec<f64>>>()
        });
        let mut values = Vec::with_capacity(draws);
        for c in chunks {
            values.extend(c?);
        }
        values.sort_by(f64::total_cmp);
        let p = 1.0 / values.len().max(1) as f64;
        let atoms: Vec<(f64, f64)> = values.into_iter().map(|v| (v, p)).collect();
        Ok(Self::from_atoms(&atoms, false))
    }

    /// Exact when enumerable, otherwise an empirical table of
    /// [`EMPIRICAL_TABLE_SIZE`] draws.
    pub fn for_model(model: &OffspringModel, seed: Seed) -> Result<Self> {
        match Self::exact(model) {
            Ok(t) => Ok(t),
            Err(Error::FTableRequired(_)) => Self::empirical(model, EMPIRICAL_TABLE_SIZE, seed),
            Err(e) => Err(e),
        }
    }

    fn from_atoms(atoms: &[(f64, f64)], exact: bool) -> Self {
        let values: Vec<f64> = atoms.iter().map(|(v, _)| *v).collect();
        let mut suffix = vec![0.0; atoms.len() + 1];
        for k in (0..atoms.len()).rev() {
            suffix[k] = suffix[k + 1] + atoms[k].0 * atoms[k].1;
        }
        W1Tail { values, suffix, exact }
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// `E[W_1; W_1 > t]`.
    pub fn tail_moment(&self, t: f64) -> f64 {
        let k = self.values.partition_point(|v| *v <= t);
        self.suffix[k]
    }

    /// `E W_1` under the table.
    pub fn mean(&self) -> f64 {
        self.suffix[0]
    }
}

/// `R_n = Σ_v Y_v E[W_1; W_1 > e^{-an}/Y_v]` for the current generation.
pub fn conditional_remainder(population: &Population, tail: &W1Tail, a: f64) -> f64 {
    let scale = (-a * population.generation as f64).exp();
    population.individuals.iter().map(|i| i.weight * tail.tail_moment(scale / i.weight)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub n: usize,
    pub w: f64,
    pub w_next: f64,
    pub w_tilde_next: f64,
    pub remainder: f64,
    /// `e^{an}(W_{n+1} - W_n)`.
    pub increment: f64,
    pub m: f64,
    pub pop_size: usize,
    /// The population cap was hit while producing generation `n + 1`.
    pub truncated: bool,
    /// `W̃_{n+1} != W_{n+1}`.
    pub mismatch: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MartingaleTrace {
    pub a: f64,
    pub seed: Seed,
    pub model_id: String,
    pub rows: Vec<TraceRow>,
    pub truncated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    pub a: f64,
    pub n_max: usize,
    pub cap: usize,
    pub seed: Seed,
}

impl SimOptions {
    pub fn new(a: f64, n_max: usize, seed: impl Into<Seed>) -> Self {
        SimOptions { a, n_max, cap: DEFAULT_CAP, seed: seed.into() }
    }
}

/// Simulates generations `0..=n_max` (sampling the children of generation
/// `n_max` for `W_{n_max+1}`) and records one row per generation.
pub fn simulate(model: &OffspringModel, tail: &W1Tail, opts: SimOptions) -> Result<MartingaleTrace> {
    simulate_observed(model, tail, opts, |_| {})
}

/// As [`simulate`], calling `observer` on every generation `0..=n_max` before
/// it branches.
pub fn simulate_observed<F>(model: &OffspringModel, tail: &W1Tail, opts: SimOptions, mut observer: F) -> Result<MartingaleTrace>
where
    F: FnMut(&Population),
{
    if opts.cap < 1000 {
        return Err(Error::InvalidParameter(format!("population cap must be at least 1000, got {}", opts.cap)));
    }
    if !(opts.a > 0.0) {
        return Err(Error::InvalidParameter(format!("rate a must be positive, got {}", opts.a)));
    }
    model.require_canonical()?;
    let mut rng = opts.seed.rng();
    let mut pop = Population::root();
    let mut next: Vec<Individual> = Vec::new();
    let mut buf = Vec::new();
    let mut rows = Vec::with_capacity(opts.n_max + 1);
    let mut m = 0.0;
    let mut truncated = false;
    for n in 0..=opts.n_max {
        observer(&pop);
        let w = pop.w();
        let scale = (opts.a * n as f64).exp();
        let remainder = conditional_remainder(&pop, tail, opts.a);
        next.clear();
        let (mut w_next, mut w_tilde) = (0.0, 0.0);
        let mut mismatch = false;
        let store = n < opts.n_max;
        let mut produced = 0usize;
        for parent in &pop.individuals {
            model.sample_into(&mut rng, &mut buf)?;
            produced += buf.len();
            if produced > opts.cap {
                truncated = true;
                break;
            }
            let w1: f64 = buf.iter().map(|x| (-x).exp()).sum();
            let contribution = parent.weight * w1;
            w_next += contribution;
            if scale * contribution <= 1.0 {
                w_tilde += contribution;
            } else {
                mismatch = true;
            }
            if store {
                next.extend(buf.iter().map(|x| Individual { weight: parent.weight * (-x).exp(), position: parent.position + x }));
            }
        }
        if truncated {
            rows.push(TraceRow {
                n,
                w,
                w_next: f64::NAN,
                w_tilde_next: f64::NAN,
                remainder,
                increment: f64::NAN,
                m: f64::NAN,
                pop_size: pop.individuals.len(),
                truncated: true,
                mismatch: false,
            });
            break;
        }
        m += scale * (w_tilde - w + remainder);
        rows.push(TraceRow {
            n,
            w,
            w_next,
            w_tilde_next: w_tilde,
            remainder,
            increment: scale * (w_next - w),
            m,
            pop_size: pop.individuals.len(),
            truncated: false,
            mismatch,
        });
        std::mem::swap(&mut pop.individuals, &mut next);
        pop.generation = n + 1;
    }
    Ok(MartingaleTrace { a: opts.a, seed: opts.seed, model_id: model_id(model), rows, truncated })
}

fn model_id(model: &OffspringModel) -> String {
    use crate::offspring::OffspringKind::*;
    match &model.kind {
        GaltonWatson(c) => format!("galton-watson {c:?}"),
        Independent { count, displacement } => format!("independent {count:?} {displacement:?}"),
        Lattice(e) => format!("lattice {} entries", e.len()),
        Custom(c) => format!("custom {}", c.name),
    }
}

/// `reps` independent traces, trace `i` seeded by `opts.seed.derive(i)`.
pub fn simulate_ensemble(model: &OffspringModel, tail: &W1Tail, opts: SimOptions, reps: usize) -> Result<Vec<MartingaleTrace>> {
    (0..reps)
        .into_par_iter()
        .map(|i| simulate(model, tail, SimOptions { seed: opts.seed.derive(i as u64), ..opts }))
        .collect()
}

impl MartingaleTrace {
    pub const CSV_HEADER: &'static str = "n,W_n,Wtilde_next,R_n,increment,M_n,pop_size,truncated,mismatch_flag";

    /// One row per generation; floats with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{},{}",
                r.n, r.w, r.w_tilde_next, r.remainder, r.increment, r.m, r.pop_size, r.truncated as u8, r.mismatch as u8
            );
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesReport {
    /// `P_k = Σ_{n <= k} e^{an}(W_{n+1} - W_n)`.
    pub partial_sums: Vec<f64>,
    /// `Q_n = max_{n <= k <= K} |P_k - P_{n-1}|`.
    pub cauchy: Vec<f64>,
    pub truncated: bool,
}

/// Partial sums of the exponential series and its Cauchy-tail statistic.
pub fn exp_series_diagnostics(trace: &MartingaleTrace) -> SeriesReport {
    let incs: Vec<f64> = trace.rows.iter().filter(|r| !r.truncated).map(|r| r.increment).collect();
    let mut partial_sums = Vec::with_capacity(incs.len());
    let mut run = 0.0;
    for d in &incs {
        run += d;
        partial_sums.push(run);
    }
    let k = partial_sums.len();
    let mut cauchy = vec![0.0; k];
    for n in 0..k {
        let base = if n == 0 { 0.0 } else { partial_sums[n - 1] };
        cauchy[n] = partial_sums[n..].iter().map(|p| (p - base).abs()).fold(0.0, f64::max);
    }
    SeriesReport { partial_sums, cauchy, truncated: trace.truncated }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoSeriesReport {
    /// Traces used; truncated ones are excluded.
    pub used: usize,
    pub excluded: usize,
    /// Per-n frequency of `W̃_{n+1} != W_{n+1}`.
    pub mismatch_frequency: Vec<f64>,
    /// Per-n mean of `e^{an} R_n`.
    pub scaled_remainder_mean: Vec<f64>,
    /// Per-n mean of `M_n^2`.
    pub m_second_moment: Vec<f64>,
    /// Log-linear slopes over the positive entries; `-inf` when the series
    /// vanishes from some index on.
    pub mismatch_slope: f64,
    pub remainder_slope: f64,
    pub sup_m_second_moment: f64,
}

/// Ensemble statistics for the two series and the martingale `M_n`.
pub fn m_series_diagnostics(traces: &[MartingaleTrace]) -> Result<TwoSeriesReport> {
    if traces.len() < MIN_ENSEMBLE {
        return Err(Error::InvalidParameter(format!("ensemble needs at least {MIN_ENSEMBLE} traces, got {}", traces.len())));
    }
    let used: Vec<&MartingaleTrace> = traces.iter().filter(|t| !t.truncated).collect();
    let len = used.iter().map(|t| t.rows.len()).min().unwrap_or(0);
    let mut freq = vec![0.0; len];
    let mut rem = vec![Moments::new(); len];
    let mut m2 = vec![Moments::new(); len];
    for t in &used {
        for (n, r) in t.rows.iter().take(len).enumerate() {
            freq[n] += r.mismatch as u8 as f64;
            rem[n].push((t.a * n as f64).exp() * r.remainder);
            m2[n].push(r.m * r.m);
        }
    }
    let count = used.len().max(1) as f64;
    freq.iter_mut().for_each(|f| *f /= count);
    let scaled_remainder_mean: Vec<f64> = rem.iter().map(|m| m.mean()).collect();
    let m_second_moment: Vec<f64> = m2.iter().map(|m| m.mean()).collect();
    Ok(TwoSeriesReport {
        used: used.len(),
        excluded: traces.len() - used.len(),
        mismatch_slope: decay_slope(&freq),
        remainder_slope: decay_slope(&scaled_remainder_mean),
        sup_m_second_moment: m_second_moment.iter().copied().fold(0.0, f64::max),
        mismatch_frequency: freq,
        scaled_remainder_mean,
        m_second_moment,
    })
}

fn decay_slope(values: &[f64]) -> f64 {
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        values.iter().enumerate().filter(|(_, v)| **v > 0.0).map(|(n, v)| (n as f64, v.ln())).unzip();
    match ols_slope(&xs, &ys) {
        Some(s) => s,
        None if values.iter().any(|v| *v == 0.0) => f64::NEG_INFINITY,
        None => f64::NAN,
    }
}

/// Median over the ensemble of `Q_n` for each `n`.
pub fn median_cauchy(traces: &[MartingaleTrace]) -> Vec<f64> {
    let reports: Vec<SeriesReport> = traces.iter().filter(|t| !t.truncated).map(exp_series_diagnostics).collect();
    let len = reports.iter().map(|r| r.cauchy.len()).min().unwrap_or(0);
    (0..len).map(|n| median(&reports.iter().map(|r| r.cauchy[n]).collect::<Vec<_>>())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::law::CountLaw;

    fn gw(count: CountLaw) -> OffspringModel {
        OffspringModel::galton_watson(count).unwrap()
    }

    #[test]
    fn binary_tree_is_constant() {
        let model = gw(CountLaw::Fixed(2));
        let tail = W1Tail::exact(&model).unwrap();
        let a = 2f64.ln() / 3.0;
        let trace = simulate(&model, &tail, SimOptions::new(a, 8, 1)).unwrap();
        for r in &trace.rows {
            assert!((r.w - 1.0).abs() < 1e-12);
            assert!(r.increment.abs() < 1e-12);
            // e^{an} 2^{-n} <= 1 for every n, so nothing is truncated
            assert_eq!(r.remainder, 0.0);
            assert!(!r.mismatch);
        }
    }

    #[test]
    fn remainder_examples() {
        let model = gw(CountLaw::Fixed(2));
        let tail = W1Tail::exact(&model).unwrap();
        let mut pop = Population::root();
        assert_eq!(conditional_remainder(&pop, &tail, 1.0), 0.0);
        pop.generation = 2;
        pop.individuals = vec![Individual { weight: 0.5, position: 2f64.ln() }];
        // e^{2}·0.5 > 1: the whole mass is in the tail
        assert_eq!(conditional_remainder(&pop, &tail, 1.0), 0.5);
    }

    #[test]
    fn enumerated_tail_moments() {
        let model = gw(CountLaw::uniform(1, 3).unwrap());
        let tail = W1Tail::exact(&model).unwrap();
        let third = 1.0 / 3.0;
        assert!((tail.tail_moment(0.0) - 1.0).abs() < 1e-15);
        assert!((tail.tail_moment(0.5) - third * 2.5).abs() < 1e-15);
        assert!((tail.tail_moment(1.2) - third * 1.5).abs() < 1e-15);
        assert_eq!(tail.tail_moment(1.5), 0.0);
        let emp = W1Tail::empirical(&model, 200_000, Seed(3)).unwrap();
        for t in [0.25, 0.75, 1.25] {
            assert!((emp.tail_moment(t) - tail.tail_moment(t)).abs() < 0.01);
        }
    }

    #[test]
    fn extinction_pads_with_zeros() {
        let model = gw(CountLaw::categorical(vec![0.5, 0.0, 0.0, 0.5]).unwrap()).with_max_children(10);
        let tail = W1Tail::exact(&model).unwrap();
        let trace = (0..50)
            .map(|s| simulate(&model, &tail, SimOptions::new(0.1, 6, s)).unwrap())
            .find(|t| t.rows[0].w_next == 0.0)
            .expect("some seed goes extinct at once");
        assert_eq!(trace.rows.len(), 7);
        assert!(trace.rows[1..].iter().all(|r| r.w == 0.0 && r.pop_size == 0 && r.increment == 0.0));
    }

    #[test]
    fn cap_overflow_is_reported() {
        let model = gw(CountLaw::Fixed(4));
        let tail = W1Tail::exact(&model).unwrap();
        let trace = simulate(&model, &tail, SimOptions { cap: 1000, ..SimOptions::new(0.1, 20, 1) }).unwrap();
        assert!(trace.truncated);
        assert!(trace.rows.last().unwrap().truncated);
        assert_eq!(trace.rows.len(), 5);
    }

    #[test]
    fn decomposition_bookkeeping() {
        let model = gw(CountLaw::uniform(0, 4).unwrap());
        let tail = W1Tail::exact(&model).unwrap();
        let a = 2f64.ln() / 3.0;
        let trace = simulate(&model, &tail, SimOptions::new(a, 10, 7)).unwrap();
        let mut prev = 0.0;
        for r in &trace.rows {
            let inc = (a * r.n as f64).exp() * (r.w_tilde_next - r.w + r.remainder);
            assert!((r.m - prev - inc).abs() <= 1e-12 * r.m.abs().max(1.0));
            assert!(r.w_tilde_next <= r.w_next && r.remainder >= 0.0);
            prev = r.m;
        }
        let csv = trace.to_csv();
        assert!(csv.starts_with(MartingaleTrace::CSV_HEADER));
        assert_eq!(csv.lines().count(), trace.rows.len() + 1);
    }

    #[test]
    fn cauchy_statistic_of_constant_tree() {
        let model = gw(CountLaw::Fixed(2));
        let tail = W1Tail::exact(&model).unwrap();
        let trace = simulate(&model, &tail, SimOptions::new(0.2, 6, 1)).unwrap();
        let rep = exp_series_diagnostics(&trace);
        assert!(rep.cauchy.iter().all(|q| *q == 0.0));
    }

    #[test]
    fn slopes() {
        assert!((decay_slope(&[1.0, 0.5, 0.25]) + 2f64.ln()).abs() < 1e-12);
        assert!(decay_slope(&[0.7, 0.5, 0.0, 0.0]) < 0.0);
        assert_eq!(decay_slope(&[0.0, 0.0]), f64::NEG_INFINITY);
    }
}
