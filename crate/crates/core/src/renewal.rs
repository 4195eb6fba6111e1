//! Exponential renewal functions `V(x) = Σ_n e^{an} P(T_n <= x)`.
//!
//! Estimation works under the tilted measure `P_γ` with `ψ(γ) = e^{-a}`, where
//! `V(x) = Σ_n E_γ[e^{γ T_n}; T_n <= x]` is a series of bounded terms along a
//! walk with positive drift. The same engine evaluates the integrals of `V_a`
//! for the shifted walk `U_n = S_n - an`:
//!
//! * `∫_{(0,x]} y V_a(dy) = Σ_n E_γ[e^{(γ+1) U_n}; U_n <= log x]`
//! * `∫_{[x,∞)} y^{-1} V_a(dy) = Σ_n E_γ[e^{(γ-1) U_n}; U_n >= log x]`
//!
//! Each series is truncated at a horizon certified by a Chernoff bound on the
//! omitted terms.

use crate::error::{Error, Result};
use crate::laplace::{left_derivative, solve_theta_unrestricted, LaplaceProfile};
use crate::law::WalkLattice;
use crate::seed::{par_chunks, Seed};
use crate::stats::Moments;
use crate::walk::{Sampler, StepLaw, RATE_TOL};

/// Relative size of the certified tail against the estimate.
pub const REL_TAIL: f64 = 1e-3;
/// Absolute floor for the tail target when the estimate is tiny.
pub const ABS_TAIL_FLOOR: f64 = 1e-9;
pub const MAX_HORIZON: usize = 100_000;
const PILOT_PATHS: usize = 1024;
const TAIL_GRID: usize = 32;
/// Slack when snapping evaluation points onto a lattice.
const SNAP_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Tilted,
    Direct,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenewalEstimate {
    pub x: f64,
    pub value: f64,
    pub stderr: f64,
    /// Largest `n` included.
    pub horizon: usize,
    /// Certified bound on the omitted terms `n > horizon`.
    pub tail_bound: f64,
    pub method: Method,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    V,
    VIncrement,
    Va,
    VaFirstMoment,
    VaInverseMoment,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AsymptoteKind {
    NonArithmetic,
    Arithmetic { span: f64 },
}

/// `value ~ constant · e^{exponent · x}` for `V`-type targets and
/// `constant · x^{exponent}` for `V_a`-type targets; along the lattice
/// `constant · e^{exponent · span · n}` for both.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptotePrediction {
    pub exponent: f64,
    pub constant: f64,
    pub kind: AsymptoteKind,
    pub target: Target,
}

impl AsymptotePrediction {
    fn power_law(&self) -> bool {
        matches!(self.target, Target::Va | Target::VaFirstMoment | Target::VaInverseMoment)
    }

    /// Predicted value at `x` (non-arithmetic form).
    pub fn at(&self, x: f64) -> f64 {
        if self.power_law() {
            self.constant * x.powf(self.exponent)
        } else {
            self.constant * (self.exponent * x).exp()
        }
    }

    /// Predicted value at lattice index `n`.
    pub fn at_lattice(&self, n: i64) -> Option<f64> {
        match self.kind {
            AsymptoteKind::Arithmetic { span } => Some(self.constant * (self.exponent * span * n as f64).exp()),
            AsymptoteKind::NonArithmetic => None,
        }
    }

    /// Ratio of consecutive lattice predictions.
    pub fn lattice_growth(&self) -> Option<f64> {
        match self.kind {
            AsymptoteKind::Arithmetic { span } => Some((self.exponent * span).exp()),
            AsymptoteKind::NonArithmetic => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Finiteness {
    FiniteAll,
    InfiniteAll,
    /// Infinite for `x >= 0`, zero for `x < 0`.
    InfiniteFromZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FinitenessCase {
    /// `P(T < 0) > 0`, `a < R`.
    NegativeBelowRate,
    /// `P(T < 0) > 0`, `a = R`, `-ψ'(γ₀) > 0`.
    NegativeAtRateDrift,
    /// `P(T < 0) > 0`, `a > R`.
    NegativeAboveRate,
    /// `P(T < 0) > 0`, `a = R`, `ψ'(γ₀) = 0`.
    NegativeAtRateFlat,
    /// `T > 0` almost surely.
    PositiveSteps,
    /// `T >= 0` with an atom at zero.
    AtomAtZero,
}

impl FinitenessCase {
    pub fn tag(self) -> &'static str {
        match self {
            FinitenessCase::NegativeBelowRate => "a-i",
            FinitenessCase::NegativeAtRateDrift => "a-ii",
            FinitenessCase::NegativeAboveRate => "a-iii",
            FinitenessCase::NegativeAtRateFlat => "a-iv",
            FinitenessCase::PositiveSteps => "b",
            FinitenessCase::AtomAtZero => "c",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub finiteness: Finiteness,
    pub case: FinitenessCase,
    pub r: f64,
}

/// Decides whether `V` is finite from the sign structure of `T` and the
/// position of `a` relative to `R`. At `a = R` the answer depends on the sign
/// of `ψ'(γ₀)`; if its error bar straddles zero the result is `Undecided`.
pub fn classify_finiteness(law: &StepLaw, a: f64) -> Result<Classification> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::InvalidParameter(format!("rate a must be positive, got {a}")));
    }
    let signs = law.signs().ok_or_else(|| Error::Undecided("sign structure of the step law is unknown".into()))?;
    if !signs.has_negative && !signs.has_positive {
        return Err(Error::Degenerate("step law is the point mass at 0".into()));
    }
    let rate = law.rate()?;
    let r = rate.r;
    let out = |finiteness, case| Ok(Classification { finiteness, case, r });
    if !signs.has_negative {
        if signs.zero_mass == 0.0 {
            return out(Finiteness::FiniteAll, FinitenessCase::PositiveSteps);
        }
        return if a < r {
            out(Finiteness::FiniteAll, FinitenessCase::AtomAtZero)
        } else {
            out(Finiteness::InfiniteFromZero, FinitenessCase::AtomAtZero)
        };
    }
    let tol = RATE_TOL * r.max(1.0);
    if a < r - tol {
        return out(Finiteness::FiniteAll, FinitenessCase::NegativeBelowRate);
    }
    if a > r + tol {
        return out(Finiteness::InfiniteAll, FinitenessCase::NegativeAboveRate);
    }
    if rate.flat {
        return out(Finiteness::InfiniteAll, FinitenessCase::NegativeAtRateFlat);
    }
    let g0 = rate.gamma0.ok_or_else(|| Error::Undecided("minimizer of ψ not located".into()))?;
    let d = law.laplace_derivative(g0)?;
    if -d.value - d.error > 0.0 {
        out(Finiteness::FiniteAll, FinitenessCase::NegativeAtRateDrift)
    } else if d.value.abs() <= d.error {
        Err(Error::Undecided(format!("ψ'(γ₀) = {} with error {}", d.value, d.error)))
    } else {
        out(Finiteness::InfiniteAll, FinitenessCase::NegativeAtRateFlat)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateOptions {
    pub paths: usize,
    pub seed: Seed,
    pub max_horizon: usize,
}

impl EstimateOptions {
    pub fn new(paths: usize, seed: impl Into<Seed>) -> Self {
        EstimateOptions { paths, seed: seed.into(), max_horizon: MAX_HORIZON }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Region {
    Below,
    AtLeast,
}

/// A series `Σ_n E_γ[e^{κ U_n}; U_n ∈ region(L)]` on a grid of levels.
struct Series<'a> {
    law: &'a StepLaw,
    a: f64,
    gamma: f64,
    kappa: f64,
    region: Region,
}

impl Series<'_> {
    fn s_grid(&self) -> Vec<f64> {
        let s_max = match self.region {
            Region::Below => {
                let room = self.law.right_edge() - self.gamma;
                if room.is_finite() {
                    0.999 * room
                } else {
                    8.0 * self.gamma.max(1.0)
                }
            }
            Region::AtLeast => (-self.kappa).min(0.999 * (self.law.right_edge() - self.gamma)),
        };
        (0..TAIL_GRID).map(|i| s_max * 1e-4f64.powf(1.0 - i as f64 / (TAIL_GRID - 1) as f64)).collect()
    }

    // (log C(s) at level L, log q(s)) pairs with q < 1.
    fn bound_terms(&self, level: f64) -> Vec<(f64, f64)> {
        self.s_grid()
            .into_iter()
            .filter_map(|s| {
                let q = self.a + self.law.laplace(self.gamma + s).ln();
                (q < 0.0).then(|| ((self.kappa + s) * level, q))
            })
            .collect()
    }

    /// Bound on `Σ_{n > horizon}` at `level`.
    fn tail(&self, level: f64, horizon: usize) -> f64 {
        self.bound_terms(level)
            .into_iter()
            .map(|(c, q)| (c + (horizon as f64 + 1.0) * q - (-q.exp_m1()).ln()).exp())
            .fold(f64::INFINITY, f64::min)
    }

    /// Smallest horizon whose tail at `level` is at most `target`.
    fn horizon(&self, level: f64, target: f64) -> Option<usize> {
        self.bound_terms(level)
            .into_iter()
            .map(|(c, q)| {
                let n = ((target.ln() - c + (-q.exp_m1()).ln()) / q - 1.0).ceil();
                n.max(0.0)
            })
            .fold(None, |best: Option<f64>, n| Some(best.map_or(n, |b| b.min(n))))
            .map(|n| n.min(usize::MAX as f64 / 2.0) as usize)
    }

    /// Per-level means and standard errors over `paths` tilted paths.
    fn simulate(&self, sampler: &Sampler, levels: &[f64], horizon: usize, paths: usize, seed: Seed) -> Result<Vec<Moments>> {
        let g = levels.len();
        let (kappa, region) = (self.kappa, self.region);
        let parts = par_chunks(seed, paths, |rng, n| {
            let mut acc = vec![Moments::new(); g];
            let mut diff = vec![0.0; g];
            for _ in 0..n {
                diff.iter_mut().for_each(|d| *d = 0.0);
                let mut u = 0.0;
                for step in 0..=horizon {
                    let w = (kappa * u).exp();
                    match region {
                        Region::Below => {
                            let idx = levels.partition_point(|l| *l < u);
                            if idx < g {
                                diff[idx] += w;
                            }
                        }
                        Region::AtLeast => {
                            let cnt = levels.partition_point(|l| *l <= u);
                            if cnt > 0 {
                                diff[cnt - 1] += w;
                            }
                        }
                    }
                    if step < horizon {
                        u += sampler.draw(rng)?;
                    }
                }
                match region {
                    Region::Below => {
                        let mut run = 0.0;
                        for (j, d) in diff.iter().enumerate() {
                            run += d;
                            acc[j].push(run);
                        }
                    }
                    Region::AtLeast => {
                        let mut run = 0.0;
                        for j in (0..g).rev() {
                            run += diff[j];
                            acc[j].push(run);
                        }
                    }
                }
            }
            Ok::<_, Error>(acc)
        });
        let mut total = vec![Moments::new(); g];
        for part in parts {
            for (t, p) in total.iter_mut().zip(part?) {
                t.merge(&p);
            }
        }
        Ok(total)
    }

    /// Estimates at each level (ascending), with pilot-chosen horizon.
    fn estimate(&self, levels: &[f64], reported: &[f64], opts: EstimateOptions) -> Result<Vec<RenewalEstimate>> {
        let tilted = self.law.tilt(self.gamma)?;
        let sampler = tilted.sampler()?;
        let contains_zero = |l: f64| match self.region {
            Region::Below => 0.0 <= l,
            Region::AtLeast => 0.0 >= l,
        };
        let horizon_for = |values: &dyn Fn(usize) -> f64| -> Result<usize> {
            let mut h = 0usize;
            for (j, &l) in levels.iter().enumerate() {
                let target = REL_TAIL * values(j).max(ABS_TAIL_FLOOR);
                let n = self.horizon(l, target).ok_or_else(|| Error::NotApplicable("no Chernoff exponent with e^a ψ(γ + s) < 1".into()))?;
                h = h.max(n);
            }
            Ok(h)
        };
        let pilot_horizon = horizon_for(&|j| if contains_zero(levels[j]) { 1.0 } else { 0.0 })?.min(opts.max_horizon);
        let pilot = self.simulate(&sampler, levels, pilot_horizon, PILOT_PATHS.min(opts.paths.max(1)), opts.seed.derive(0x9110))?;
        let wanted = horizon_for(&|j| pilot[j].mean())?;
        let horizon = wanted.min(opts.max_horizon);
        let main = self.simulate(&sampler, levels, horizon, opts.paths, opts.seed)?;
        let out: Vec<RenewalEstimate> = levels
            .iter()
            .zip(reported)
            .zip(&main)
            .map(|((&l, &x), m)| RenewalEstimate {
                x,
                value: m.mean(),
                stderr: m.stderr(),
                horizon,
                tail_bound: self.tail(l, horizon),
                method: Method::Tilted,
            })
            .collect();
        if wanted > opts.max_horizon {
            let worst = out.into_iter().max_by(|p, q| (p.tail_bound / p.value.max(ABS_TAIL_FLOOR)).total_cmp(&(q.tail_bound / q.value.max(ABS_TAIL_FLOOR)))).expect("non-empty grid");
            return Err(Error::HorizonExceeded { cap: opts.max_horizon, partial: Box::new(worst) });
        }
        Ok(out)
    }
}

// Sorted guard levels and reported points for a region on the walk lattice.
fn snap(points: &[f64], lattice: WalkLattice, region: Region) -> (Vec<f64>, Vec<f64>) {
    points
        .iter()
        .map(|&x| match (lattice, region) {
            (WalkLattice::Lattice(l), Region::Below) => {
                let k = (x / l + SNAP_EPS).floor();
                ((k + 0.5) * l, k * l)
            }
            (WalkLattice::Lattice(l), Region::AtLeast) => {
                let k = (x / l - SNAP_EPS).ceil();
                ((k - 0.5) * l, k * l)
            }
            _ => (x, x),
        })
        .unzip()
}

fn check_sorted(xs: &[f64]) -> Result<()> {
    if xs.is_empty() || xs.iter().any(|x| x.is_nan()) || xs.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter("evaluation grid must be non-empty and sorted ascending".into()));
    }
    Ok(())
}

/// Checks finiteness and returns `γ`. Laws with unknown sign structure are
/// accepted when `γ` exists with a positive tilted drift.
fn renewal_gamma(law: &StepLaw, a: f64) -> Result<f64> {
    match classify_finiteness(law, a) {
        Ok(c) if c.finiteness == Finiteness::FiniteAll => {}
        Ok(c) => return Err(Error::InfiniteRenewal(format!("case {} with R = {}", c.case.tag(), c.r))),
        Err(Error::Undecided(_)) if law.signs().is_none() => {}
        Err(e) => return Err(e),
    }
    let gamma = law.solve_gamma(a)?;
    if law.laplace_derivative(gamma)?.value >= 0.0 {
        return Err(Error::InfiniteRenewal("tilted walk has no positive drift".into()));
    }
    Ok(gamma)
}

/// `V(x)` on an ascending grid, all points evaluated on the same paths, so
/// the output is non-decreasing. Arithmetic walks are evaluated at the lattice
/// points `λ floor(x/λ)`, which are the reported `x`.
pub fn estimate_v_grid(law: &StepLaw, a: f64, xs: &[f64], opts: EstimateOptions) -> Result<Vec<RenewalEstimate>> {
    check_sorted(xs)?;
    let gamma = renewal_gamma(law, a)?;
    let (levels, reported) = snap(xs, law.walk_lattice(), Region::Below);
    Series { law, a, gamma, kappa: gamma, region: Region::Below }.estimate(&levels, &reported, opts)
}

pub fn estimate_v(law: &StepLaw, a: f64, x: f64, opts: EstimateOptions) -> Result<RenewalEstimate> {
    Ok(estimate_v_grid(law, a, &[x], opts)?.remove(0))
}

/// `V_a(x) = Σ_n e^{an} P(U_n <= log x)` for the shifted walk `U`, on an
/// ascending grid of `x > 0`.
pub fn estimate_va_grid(shifted: &StepLaw, a: f64, xs: &[f64], opts: EstimateOptions) -> Result<Vec<RenewalEstimate>> {
    let logs = log_points(xs)?;
    let mut out = estimate_v_grid(shifted, a, &logs, opts)?;
    out.iter_mut().for_each(|e| e.x = e.x.exp());
    Ok(out)
}

fn log_points(xs: &[f64]) -> Result<Vec<f64>> {
    if xs.iter().any(|x| !(*x > 0.0)) {
        return Err(Error::InvalidParameter("V_a arguments must be positive".into()));
    }
    Ok(xs.iter().map(|x| x.ln()).collect())
}

/// The two `V_a` integrals `∫_{(0,x]} y V_a(dy)` and `∫_{[x,∞)} y^{-1} V_a(dy)`
/// on an ascending grid of `x > 0`. The inverse moment is only finite when
/// the weight exponent `γ - 1` is negative.
pub fn estimate_va_integrals_grid(
    shifted: &StepLaw,
    a: f64,
    xs: &[f64],
    opts: EstimateOptions,
) -> Result<(Vec<RenewalEstimate>, Vec<RenewalEstimate>)> {
    let logs = log_points(xs)?;
    check_sorted(&logs)?;
    let gamma = renewal_gamma(shifted, a)?;
    if gamma >= 1.0 {
        return Err(Error::NotApplicable(format!("inverse moment needs γ < 1 (ϑ < 2), got γ = {gamma}")));
    }
    let lattice = shifted.walk_lattice();
    let (lv, rv) = snap(&logs, lattice, Region::Below);
    let mut first = Series { law: shifted, a, gamma, kappa: gamma + 1.0, region: Region::Below }.estimate(&lv, &rv, opts)?;
    let (lv, rv) = snap(&logs, lattice, Region::AtLeast);
    let mut inverse = Series { law: shifted, a, gamma, kappa: gamma - 1.0, region: Region::AtLeast }.estimate(&lv, &rv, opts)?;
    first.iter_mut().chain(inverse.iter_mut()).for_each(|e| e.x = e.x.exp());
    Ok((first, inverse))
}

pub fn estimate_va_integrals(shifted: &StepLaw, a: f64, x: f64, opts: EstimateOptions) -> Result<(RenewalEstimate, RenewalEstimate)> {
    let (mut f, mut i) = estimate_va_integrals_grid(shifted, a, &[x], opts)?;
    Ok((f.remove(0), i.remove(0)))
}

/// Naive estimate of `Σ_{n <= horizon} e^{an} P(T_n <= x)` from untilted
/// paths. Its variance grows like `e^{2an}`, so it is a cross-check at small
/// `x` only.
pub fn estimate_v_direct(law: &StepLaw, a: f64, x: f64, horizon: usize, reps: usize, seed: Seed) -> Result<RenewalEstimate> {
    let sampler = law.sampler()?;
    let parts = par_chunks(seed, reps, |rng, n| {
        let mut acc = Moments::new();
        for _ in 0..n {
            let mut s = 0.0;
            let mut total = 0.0;
            for k in 0..=horizon {
                if s <= x {
                    total += (a * k as f64).exp();
                }
                if k < horizon {
                    s += sampler.draw(rng)?;
                }
            }
            acc.push(total);
        }
        Ok::<_, Error>(acc)
    });
    let mut acc = Moments::new();
    for p in parts {
        acc.merge(&p?);
    }
    let tail_bound = match law.solve_gamma(a) {
        Ok(gamma) => Series { law, a, gamma, kappa: gamma, region: Region::Below }.tail(x, horizon),
        Err(_) => f64::INFINITY,
    };
    Ok(RenewalEstimate { x, value: acc.mean(), stderr: acc.stderr(), horizon, tail_bound, method: Method::Direct })
}

/// Running direct estimates `Σ_{k <= n} e^{ak} P̂(T_k <= x)` for
/// `n = 0..=horizon`.
pub fn direct_partial_sums(law: &StepLaw, a: f64, x: f64, horizon: usize, reps: usize, seed: Seed) -> Result<Vec<f64>> {
    let sampler = law.sampler()?;
    let parts = par_chunks(seed, reps, |rng, n| {
        let mut hits = vec![0u64; horizon + 1];
        for _ in 0..n {
            let mut s = 0.0;
            for (k, h) in hits.iter_mut().enumerate() {
                if s <= x {
                    *h += 1;
                }
                if k < horizon {
                    s += sampler.draw(rng)?;
                }
            }
        }
        Ok::<_, Error>(hits)
    });
    let mut hits = vec![0u64; horizon + 1];
    for p in parts {
        hits.iter_mut().zip(p?).for_each(|(h, c)| *h += c);
    }
    let mut run = 0.0;
    Ok(hits
        .iter()
        .enumerate()
        .map(|(k, &h)| {
            // skip empty levels so an overflowing weight does not give inf * 0
            if h > 0 {
                run += (a * k as f64).exp() * h as f64 / reps as f64;
            }
            run
        })
        .collect())
}

/// `V(x)` for `T ≡ c > 0`: `(e^{a(floor(x/c)+1)} - 1)/(e^a - 1)` for `x >= 0`.
pub fn deterministic_v(c: f64, a: f64, x: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    let k = (x / c + SNAP_EPS).floor();
    ((a * (k + 1.0)).exp_m1()) / a.exp_m1()
}

/// Asymptote of `V`: `e^{-a}/(γ(-ψ'(γ))) e^{γx}` for non-arithmetic walks and
/// `λ e^{-a}/((1 - e^{-λγ})(-ψ'(γ))) e^{γλn}` on the lattice `λZ`.
pub fn predict_asymptote(law: &StepLaw, a: f64) -> Result<AsymptotePrediction> {
    let (gamma, drift) = gamma_and_drift(law, a)?;
    let (constant, kind) = match law.walk_lattice() {
        WalkLattice::NonArithmetic => ((-a).exp() / (gamma * drift), AsymptoteKind::NonArithmetic),
        WalkLattice::Lattice(span) => {
            (span * (-a).exp() / ((-(-span * gamma).exp_m1()) * drift), AsymptoteKind::Arithmetic { span })
        }
        WalkLattice::Unknown => return Err(Error::SpanRequired),
    };
    Ok(AsymptotePrediction { exponent: gamma, constant, kind, target: Target::V })
}

/// Asymptote of the lattice increments `V(λn) - V(λ(n-1))`.
pub fn predict_increment(law: &StepLaw, a: f64) -> Result<AsymptotePrediction> {
    let (gamma, drift) = gamma_and_drift(law, a)?;
    match law.walk_lattice() {
        WalkLattice::Lattice(span) => Ok(AsymptotePrediction {
            exponent: gamma,
            constant: span * (-a).exp() / drift,
            kind: AsymptoteKind::Arithmetic { span },
            target: Target::VIncrement,
        }),
        WalkLattice::NonArithmetic => Err(Error::NotApplicable("increment asymptote is stated for lattice walks".into())),
        WalkLattice::Unknown => Err(Error::SpanRequired),
    }
}

fn gamma_and_drift(law: &StepLaw, a: f64) -> Result<(f64, f64)> {
    let gamma = law.solve_gamma(a)?;
    let drift = -law.laplace_derivative(gamma)?.value;
    if !(drift > 0.0) {
        return Err(Error::NotApplicable(format!("-ψ'(γ) = {drift} is not positive")));
    }
    Ok((gamma, drift))
}

#[derive(Debug, Clone, PartialEq)]
pub struct VaPredictions {
    pub theta: f64,
    /// `e^{aϑ}(-m'(ϑ)) - a`, positive under the hypotheses.
    pub denominator: f64,
    pub va: AsymptotePrediction,
    pub first_moment: AsymptotePrediction,
    /// Present only when `ϑ < 2`.
    pub inverse_moment: Option<AsymptotePrediction>,
}

impl VaPredictions {
    pub fn inverse_moment(&self) -> Result<AsymptotePrediction> {
        self.inverse_moment.ok_or_else(|| Error::NotApplicable(format!("inverse moment needs ϑ < 2, got {}", self.theta)))
    }
}

/// Asymptotes of `V_a` and its two integrals from the canonical intensity
/// transform. `lattice` is the lattice of the shifted walk `S_n - an`.
pub fn predict_va(profile: &LaplaceProfile, a: f64, lattice: WalkLattice) -> Result<VaPredictions> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::InvalidParameter(format!("rate a must be positive, got {a}")));
    }
    let (theta, boundary) = solve_theta_unrestricted(profile, a)?;
    let m = profile.eval(theta);
    let d = left_derivative(profile, theta)?;
    if boundary && !(-d.value / m - (-m.ln() / theta) > d.error / m + 1e-10) {
        return Err(Error::NotApplicable("boundary case without strict slope inequality".into()));
    }
    let denominator = (a * theta).exp() * (-d.value) - a;
    if !(denominator > 0.0 && denominator.is_finite()) {
        return Err(Error::NotApplicable(format!("e^(aϑ)(-m'(ϑ)) - a = {denominator} is not positive")));
    }
    let kind = match lattice {
        WalkLattice::NonArithmetic => AsymptoteKind::NonArithmetic,
        WalkLattice::Lattice(span) => AsymptoteKind::Arithmetic { span },
        WalkLattice::Unknown => return Err(Error::SpanRequired),
    };
    let build = |exponent: f64, target: Target, lattice_factor: f64| {
        let constant = match kind {
            AsymptoteKind::NonArithmetic => 1.0 / (exponent.abs() * denominator),
            AsymptoteKind::Arithmetic { span } => span / (lattice_factor * denominator),
        };
        AsymptotePrediction { exponent, constant, kind, target }
    };
    let span = match kind {
        AsymptoteKind::Arithmetic { span } => span,
        AsymptoteKind::NonArithmetic => 0.0,
    };
    let va = build(theta - 1.0, Target::Va, -(-span * (theta - 1.0)).exp_m1());
    let first_moment = build(theta, Target::VaFirstMoment, -(-span * theta).exp_m1());
    let inverse_moment = (theta < 2.0).then(|| build(theta - 2.0, Target::VaInverseMoment, -(span * (theta - 2.0)).exp_m1()));
    Ok(VaPredictions { theta, denominator, va, first_moment, inverse_moment })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::law::RealLaw;

    fn step(law: RealLaw) -> StepLaw {
        StepLaw::parametric(law).unwrap()
    }

    fn two_point() -> StepLaw {
        step(RealLaw::atoms(&[(-1.0, 1.0), (2.0, 2.0)]).unwrap())
    }

    #[test]
    fn classification_examples() {
        let c = classify_finiteness(&two_point(), 0.1).unwrap();
        assert_eq!((c.finiteness, c.case), (Finiteness::FiniteAll, FinitenessCase::NegativeBelowRate));
        let c = classify_finiteness(&two_point(), 0.3).unwrap();
        assert_eq!((c.finiteness, c.case), (Finiteness::InfiniteAll, FinitenessCase::NegativeAboveRate));
        let sym = step(RealLaw::atoms(&[(-1.0, 1.0), (1.0, 1.0)]).unwrap());
        assert_eq!(classify_finiteness(&sym, 0.05).unwrap().case, FinitenessCase::NegativeAboveRate);
        let c = classify_finiteness(&step(RealLaw::Point(0.4)), 5.0).unwrap();
        assert_eq!((c.finiteness, c.case), (Finiteness::FiniteAll, FinitenessCase::PositiveSteps));
        let half = step(RealLaw::atoms(&[(0.0, 1.0), (1.0, 1.0)]).unwrap());
        let c = classify_finiteness(&half, 2f64.ln()).unwrap();
        assert_eq!((c.finiteness, c.case), (Finiteness::InfiniteFromZero, FinitenessCase::AtomAtZero));
        let c = classify_finiteness(&two_point(), 2f64.ln() / 3.0).unwrap();
        assert_eq!(c.case, FinitenessCase::NegativeAtRateFlat);
    }

    #[test]
    fn deterministic_step_is_exact() {
        for (c, a, x) in [(0.5, 0.1, 0.75), (1.0, 1.0, 10.0), (2.0, 0.5, 5.25)] {
            let est = estimate_v(&step(RealLaw::Point(c)), a, x, EstimateOptions::new(10, 1)).unwrap();
            let want = deterministic_v(c, a, x);
            assert!((est.value - want).abs() <= 1e-12 * want, "{c} {a} {x}: {} vs {want}", est.value);
            assert_eq!(est.stderr, 0.0);
        }
    }

    #[test]
    fn below_support_and_negative_points() {
        let law = step(RealLaw::shifted_exp(2.0, 1.0).unwrap());
        let est = estimate_v_grid(&law, 0.5, &[-1.0, 0.0, 1.5], EstimateOptions::new(2000, 3)).unwrap();
        assert_eq!(est[0].value, 0.0);
        assert_eq!(est[1].value, 1.0);
        assert_eq!(est[2].value, 1.0);
    }

    #[test]
    fn infinite_renewal_refused() {
        assert!(matches!(estimate_v(&two_point(), 0.3, 1.0, EstimateOptions::new(10, 1)), Err(Error::InfiniteRenewal(_))));
        assert!(matches!(estimate_v(&two_point(), 2f64.ln() / 3.0, 1.0, EstimateOptions::new(10, 1)), Err(Error::InfiniteRenewal(_))));
    }

    #[test]
    fn tilted_matches_direct_on_two_point_law() {
        let law = two_point();
        let tilted = estimate_v_grid(&law, 0.1, &[0.0, 3.0, 6.0], EstimateOptions::new(40_000, 5)).unwrap();
        for est in tilted {
            let direct = estimate_v_direct(&law, 0.1, est.x, est.horizon, 40_000, Seed(6)).unwrap();
            let band = 4.0 * (est.stderr.powi(2) + direct.stderr.powi(2)).sqrt() + est.tail_bound;
            assert!((est.value - direct.value).abs() <= band, "x = {}: {} vs {}", est.x, est.value, direct.value);
        }
    }

    #[test]
    fn grid_estimates_are_monotone() {
        let law = step(RealLaw::normal(1.0, 1.0).unwrap());
        let xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.5).collect();
        let est = estimate_v_grid(&law, 0.3, &xs, EstimateOptions::new(5000, 2)).unwrap();
        assert!(est.windows(2).all(|w| w[0].value <= w[1].value));
        assert!(est.iter().all(|e| e.tail_bound <= REL_TAIL * e.value.max(ABS_TAIL_FLOOR)));
    }

    #[test]
    fn deterministic_asymptote_constant() {
        let (c, a) = (0.5, 0.4);
        let p = predict_asymptote(&step(RealLaw::Point(c)), a).unwrap();
        assert!((p.constant - 1.0 / (1.0 - (-a).exp())).abs() < 1e-12);
        let inc = predict_increment(&step(RealLaw::Point(c)), a).unwrap();
        assert!((inc.constant - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_asymptote_constant() {
        let p = predict_asymptote(&step(RealLaw::normal(1.0, 1.0).unwrap()), 0.3).unwrap();
        let gamma = 1.0 - 0.4f64.sqrt();
        // -ψ'(γ) = (1 - γ) e^{-a}, so the constant is 1/(γ(1 - γ))
        assert!((p.exponent - gamma).abs() < 1e-12);
        assert!((p.constant - 1.0 / (gamma * (1.0 - gamma))).abs() < 1e-9);
    }

    #[test]
    fn flat_boundary_has_no_prediction() {
        assert!(predict_asymptote(&two_point(), 2f64.ln() / 3.0).is_err());
    }
}
