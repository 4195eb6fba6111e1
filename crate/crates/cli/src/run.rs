//! Executes a scenario and writes its artifacts.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use brw_core::brw::{exp_series_diagnostics, m_series_diagnostics, median_cauchy, simulate_ensemble, SimOptions, W1Tail};
use brw_core::laplace::{check_rate_conditions, model_moment_oracle, MomentStatus, Verdict};
use brw_core::renewal::{
    classify_finiteness, deterministic_v, estimate_v_grid, estimate_va_grid, estimate_va_integrals_grid, predict_asymptote, predict_va,
    AsymptotePrediction, AsymptoteKind, EstimateOptions, Finiteness, RenewalEstimate,
};
use brw_core::{associated_step, Error, LaplaceProfile, OffspringModel, RealLaw, StepLaw, WalkLattice};

use crate::modelfile::{ConfigError, Origin, Subject};
use crate::scenario::{Scenario, Task};
use crate::verify;
use crate::CliError;

/// Files written and the process exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub exit_code: i32,
}

pub fn run(s: &Scenario) -> Result<Outcome, CliError> {
    fs::create_dir_all(&s.out).map_err(|e| CliError::io(&s.out, e))?;
    match s.task {
        Task::Analyze => analyze(s),
        Task::Renewal => renewal(s),
        Task::Brw => brw(s),
        Task::Verify => verify(s),
    }
}

fn write(path: PathBuf, contents: &str) -> Result<PathBuf, CliError> {
    fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

fn subject(s: &Scenario) -> Result<Subject, CliError> {
    let model = s.model.as_ref().expect("validated by the scenario parser");
    Ok(model.build()?)
}

fn rate(s: &Scenario) -> f64 {
    s.a.expect("validated by the scenario parser")
}

/// 12 significant digits, trailing zeros trimmed.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("float round trip");
    if rounded != 0.0 && (rounded.abs() < 1e-4 || rounded.abs() >= 1e15) {
        format!("{rounded:e}")
    } else {
        format!("{rounded}")
    }
}

fn opt_num(x: Option<f64>) -> String {
    x.map_or_else(|| "none".into(), num)
}

struct Report(String);

impl Report {
    fn kv(&mut self, key: &str, value: impl AsRef<str>) {
        let _ = writeln!(self.0, "{key}={}", value.as_ref());
    }
}

fn finiteness_name(f: Finiteness) -> &'static str {
    match f {
        Finiteness::FiniteAll => "finite",
        Finiteness::InfiniteAll => "infinite",
        Finiteness::InfiniteFromZero => "infinite-for-x>=0",
    }
}

fn lattice_name(l: WalkLattice) -> String {
    match l {
        WalkLattice::NonArithmetic => "non-arithmetic".into(),
        WalkLattice::Lattice(span) => format!("lattice {}", num(span)),
        WalkLattice::Unknown => "unknown".into(),
    }
}

// Appends the walk-level quantities; returns whether anything was undecided.
fn walk_section(r: &mut Report, walk: &StepLaw, a: f64) -> Result<bool, CliError> {
    let mut undecided = false;
    match walk.rate() {
        Ok(info) => {
            r.kv("R", num(info.r));
            r.kv("gamma0", opt_num(info.gamma0));
        }
        Err(Error::Undecided(m)) => {
            undecided = true;
            r.kv("R", format!("undecided ({m})"));
        }
        Err(e) => return Err(e.into()),
    }
    match classify_finiteness(walk, a) {
        Ok(c) => {
            r.kv("finiteness", finiteness_name(c.finiteness));
            r.kv("case", c.case.tag());
        }
        Err(Error::Undecided(m)) => {
            undecided = true;
            r.kv("finiteness", format!("undecided ({m})"));
        }
        Err(Error::Degenerate(m)) => r.kv("finiteness", format!("degenerate ({m})")),
        Err(e) => return Err(e.into()),
    }
    match walk.solve_gamma(a) {
        Ok(g) => r.kv("gamma", num(g)),
        Err(Error::NoRoot(m)) => r.kv("gamma", format!("none ({m})")),
        Err(Error::Undecided(m)) => {
            undecided = true;
            r.kv("gamma", format!("undecided ({m})"));
        }
        Err(e) => return Err(e.into()),
    }
    r.kv("walk_support", lattice_name(walk.walk_lattice()));
    Ok(undecided)
}

fn analyze(s: &Scenario) -> Result<Outcome, CliError> {
    let a = rate(s);
    let mut r = Report(String::new());
    r.kv("scenario", &s.name);
    r.kv("a", num(a));
    let undecided = match subject(s)? {
        Subject::Branching(model) => analyze_branching(&mut r, &model, a, s)?,
        Subject::Walk(walk) => {
            let undecided = walk_section(&mut r, &walk, a)?;
            if let Ok(p) = predict_asymptote(&walk, a) {
                r.kv("asymptote_exponent", num(p.exponent));
                r.kv("asymptote_constant", num(p.constant));
            }
            undecided
        }
    };
    r.kv("status", if undecided { "undecided" } else { "ok" });
    let file = write(s.out.join("report.txt"), &r.0)?;
    Ok(Outcome { files: vec![file], exit_code: if undecided { 3 } else { 0 } })
}

fn analyze_branching(r: &mut Report, model: &OffspringModel, a: f64, s: &Scenario) -> Result<bool, CliError> {
    let profile = LaplaceProfile::of_model(model)?;
    let cond = check_rate_conditions(&profile, a, model_moment_oracle(model, s.budgets.samples, s.seed))?;
    match cond.verdict {
        Verdict::Applies => r.kv("verdict", "applies"),
        Verdict::Silent(reason) => {
            r.kv("verdict", "silent");
            r.kv("silent_reason", reason.describe());
        }
    }
    r.kv("theta", opt_num(cond.theta));
    r.kv("theta0", opt_num(cond.theta0));
    r.kv("spectral_min", num(cond.spectral_min));
    r.kv("boundary_case", cond.is_boundary_case.to_string());
    r.kv("boundary_strict", cond.boundary_strict.to_string());
    r.kv(
        "moment_condition",
        match cond.moment_ok {
            MomentStatus::Holds => "holds",
            MomentStatus::Fails => "fails",
            MomentStatus::Undetermined => "undetermined",
        },
    );
    r.kv("root_residual", opt_num(cond.root_residual));
    let walk = associated_step(model)?.shift(a)?;
    walk_section(r, &walk, a)
}

pub const RENEWAL_HEADER: &str = "target,x,estimate,stderr,horizon,tail_bound,method,predicted,closed_form";

fn predicted(p: Option<&AsymptotePrediction>, x: f64, log_scale: bool) -> String {
    let Some(p) = p else { return String::new() };
    let value = match p.kind {
        AsymptoteKind::NonArithmetic => p.at(x),
        AsymptoteKind::Arithmetic { span } => {
            let pos = if log_scale { x.ln() } else { x };
            p.at_lattice((pos / span).round() as i64).expect("arithmetic prediction")
        }
    };
    format!("{value:.16e}")
}

fn rows(out: &mut String, target: &str, est: &[RenewalEstimate], pred: Option<&AsymptotePrediction>, log_scale: bool, closed: impl Fn(f64) -> Option<f64>) {
    for e in est {
        let _ = writeln!(
            out,
            "{target},{:.16e},{:.16e},{:.16e},{},{:.16e},{:?},{},{}",
            e.x,
            e.value,
            e.stderr,
            e.horizon,
            e.tail_bound,
            e.method,
            predicted(pred, e.x, log_scale),
            closed(e.x).map_or_else(String::new, |v| format!("{v:.16e}")),
        );
    }
}

fn estimate_options(s: &Scenario) -> EstimateOptions {
    EstimateOptions { max_horizon: s.budgets.horizon, ..EstimateOptions::new(s.budgets.paths, s.seed) }
}

fn renewal(s: &Scenario) -> Result<Outcome, CliError> {
    let a = rate(s);
    let opts = estimate_options(s);
    let mut csv = format!("{RENEWAL_HEADER}\n");
    match subject(s)? {
        Subject::Walk(walk) => {
            let grid = s.grid.clone().unwrap_or_else(|| (0..=15).map(f64::from).collect());
            let est = estimate_v_grid(&walk, a, &grid, opts)?;
            let pred = predict_asymptote(&walk, a).ok();
            let point = match walk.as_parametric() {
                Some(RealLaw::Point(c)) => Some(*c),
                _ => None,
            };
            rows(&mut csv, "V", &est, pred.as_ref(), false, |x| point.map(|c| deterministic_v(c, a, x)));
        }
        Subject::Branching(model) => {
            let grid = s.grid.clone().unwrap_or_else(|| (0..=12).map(|k| 2f64.powi(k)).collect());
            if grid.iter().any(|x| *x <= 0.0) {
                return Err(ConfigError::new(Origin::Flag, "V_a grids need positive points").into());
            }
            let shifted = associated_step(&model)?.shift(a)?;
            let pred = predict_va(&LaplaceProfile::of_model(&model)?, a, shifted.walk_lattice()).ok();
            let va = estimate_va_grid(&shifted, a, &grid, opts)?;
            rows(&mut csv, "Va", &va, pred.as_ref().map(|p| &p.va), true, |_| None);
            match estimate_va_integrals_grid(&shifted, a, &grid, opts) {
                Ok((first, inverse)) => {
                    rows(&mut csv, "Va_first_moment", &first, pred.as_ref().map(|p| &p.first_moment), true, |_| None);
                    let inv_pred = pred.as_ref().and_then(|p| p.inverse_moment.as_ref());
                    rows(&mut csv, "Va_inverse_moment", &inverse, inv_pred, true, |_| None);
                }
                Err(Error::NotApplicable(_)) => {}
                Err(e) => return Err(e.into()),
            }
        }
    }
    let file = write(s.out.join("renewal.csv"), &csv)?;
    Ok(Outcome { files: vec![file], exit_code: 0 })
}

fn brw(s: &Scenario) -> Result<Outcome, CliError> {
    let Subject::Branching(model) = subject(s)? else {
        return Err(ConfigError::new(Origin::Flag, "task `brw` needs a branching model, not a bare walk").into());
    };
    let a = rate(s);
    let b = s.budgets;
    let tail = W1Tail::for_model(&model, s.seed.derive(0xF7AB))?;
    let opts = SimOptions { a, n_max: b.n_max, cap: b.cap, seed: s.seed };
    let traces = simulate_ensemble(&model, &tail, opts, b.replicates)?;
    let dir = s.out.join("traces");
    fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let mut files = Vec::with_capacity(traces.len() + 2);
    for (i, t) in traces.iter().enumerate() {
        files.push(write(dir.join(format!("trace_{i:04}.csv")), &t.to_csv())?);
    }
    let med_q = median_cauchy(&traces);
    let two = m_series_diagnostics(&traces).ok();
    let mut series = String::from("n,median_Q,mismatch_frequency,scaled_remainder_mean,m_second_moment\n");
    for (n, q) in med_q.iter().enumerate() {
        let col = |v: Option<&Vec<f64>>| v.and_then(|v| v.get(n)).map_or_else(String::new, |x| format!("{x:.16e}"));
        let _ = writeln!(
            series,
            "{n},{q:.16e},{},{},{}",
            col(two.as_ref().map(|t| &t.mismatch_frequency)),
            col(two.as_ref().map(|t| &t.scaled_remainder_mean)),
            col(two.as_ref().map(|t| &t.m_second_moment)),
        );
    }
    files.push(write(s.out.join("series.csv"), &series)?);
    let mut r = Report(String::new());
    r.kv("scenario", &s.name);
    r.kv("a", num(a));
    r.kv("replicates", b.replicates.to_string());
    r.kv("truncated_traces", traces.iter().filter(|t| t.truncated).count().to_string());
    r.kv("f_table", if tail.is_exact() { "exact" } else { "empirical" });
    if let (Some(q5), Some(q15)) = (med_q.get(5), med_q.get(15)) {
        r.kv("median_Q5_over_Q15", num(q5 / q15));
    }
    match &two {
        Some(t) => {
            r.kv("mismatch_slope", num(t.mismatch_slope));
            r.kv("remainder_slope", num(t.remainder_slope));
            r.kv("sup_m_second_moment", num(t.sup_m_second_moment));
        }
        None => r.kv("two_series", "skipped (needs at least 100 replicates)"),
    }
    if let Some(first) = traces.first() {
        let rep = exp_series_diagnostics(first);
        r.kv("trace0_final_partial_sum", opt_num(rep.partial_sums.last().copied()));
    }
    files.push(write(s.out.join("diagnostics.txt"), &r.0)?);
    Ok(Outcome { files, exit_code: 0 })
}

fn verify(s: &Scenario) -> Result<Outcome, CliError> {
    let results = verify::run_all(s.seed, |r| eprintln!("{}", r.line()));
    let file = write(s.out.join("verify.csv"), &verify::to_csv(&results))?;
    let ok = results.iter().all(|r| r.passed);
    Ok(Outcome { files: vec![file], exit_code: if ok { 0 } else { 1 } })
}

pub fn describe_files(files: &[PathBuf], root: &Path) -> String {
    let shown = files.len().min(5);
    let mut out: Vec<String> = files[..shown].iter().map(|f| f.strip_prefix(root).unwrap_or(f).display().to_string()).collect();
    if files.len() > shown {
        out.push(format!("... {} more", files.len() - shown));
    }
    out.join(", ")
}

#[cfg(test)]
mod tests {
    use super::num;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(num(1.5), "1.5");
        assert_eq!(num(1.0 / 3.0), "0.333333333333");
        assert_eq!(num(2f64.ln() / 3.0), "0.231049060187");
        assert_eq!(num(1.5 + 1e-14), "1.5");
        assert_eq!(num(f64::INFINITY), "inf");
        assert_eq!(num(2.5e-7), "2.5e-7");
    }
}
