//! Laplace-transform analysis.
//!
//! A [`LaplaceProfile`] wraps an evaluable transform: the intensity transform
//! `m(θ)` of an offspring model or `ψ(t) = E e^{-tT}` of a step law. On top of
//! it this module computes the spectral function `θ -> m(θ)^{1/θ}`, its
//! minimizer over `[1, 2]`, the rate root `ϑ` and the resulting
//! [`ConditionReport`] for exponential convergence of the intrinsic
//! martingale.
//!
//! The sign of the derivative of `g(θ) = log m(θ) / θ` equals the sign of
//! `h(θ) = θ m'(θ)/m(θ) - log m(θ)`, and `h` is non-decreasing by log-convexity,
//! so `g` is quasi-convex and its minimizer is a root of `h`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::law::RealLaw;
use crate::mc::McOutcome;
use crate::numeric::{bisect, golden_section};
use crate::offspring::{OffspringModel, PointConfiguration, Transform, CANONICAL_TOL};

/// Root tolerance in the argument.
pub const ROOT_TOL: f64 = 1e-13;
/// Step of the upward scan that enforces minimality of `ϑ`.
pub const SCAN_STEP: f64 = 1e-3;
/// `|a + log spectral_min|` below which the boundary test is applied.
pub const BOUNDARY_TOL: f64 = 1e-8;
/// Step sizes for the Richardson left derivative.
pub const DERIVATIVE_STEPS: [f64; 3] = [1e-4, 5e-5, 2.5e-5];
/// Upper limit of scans when the domain is unbounded.
const SCAN_LIMIT: f64 = 64.0;

#[derive(Clone)]
pub struct LaplaceProfile {
    eval: Transform,
    derivative: Option<Transform>,
    right_edge: f64,
    exact: bool,
}

impl fmt::Debug for LaplaceProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LaplaceProfile")
            .field("closed_form_derivative", &self.derivative.is_some())
            .field("right_edge", &self.right_edge)
            .field("exact", &self.exact)
            .finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative {
    pub value: f64,
    /// Estimated absolute error; zero for closed forms.
    pub error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralMinimum {
    pub theta0: f64,
    /// `m(ϑ₀)^{1/ϑ₀}`.
    pub value: f64,
}

impl LaplaceProfile {
    pub fn new(eval: Transform, derivative: Option<Transform>, right_edge: f64, exact: bool) -> Self {
        LaplaceProfile { eval, derivative, right_edge, exact }
    }

    pub fn from_fn(eval: impl Fn(f64) -> f64 + Send + Sync + 'static, right_edge: f64) -> Self {
        Self::new(Arc::new(eval), None, right_edge, true)
    }

    pub fn with_derivative(mut self, derivative: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.derivative = Some(Arc::new(derivative));
        self
    }

    /// `m` of an offspring model; needs a closed form.
    pub fn of_model(model: &OffspringModel) -> Result<Self> {
        if !model.has_closed_form() {
            return Err(Error::TransformUnavailable);
        }
        let m = model.clone();
        let d = model.clone();
        let derivative: Option<Transform> = model
            .exact_intensity_derivative(1.0)
            .map(|_| -> Transform { Arc::new(move |t| d.exact_intensity_derivative(t).unwrap_or(f64::NAN)) });
        Ok(Self::new(
            Arc::new(move |t| m.exact_intensity(t).unwrap_or(f64::INFINITY)),
            derivative,
            model.right_edge(),
            true,
        ))
    }

    /// `t -> E e^{-tX}` of a parametric law.
    pub fn of_law(law: &RealLaw) -> Self {
        let l = law.clone();
        let d = law.clone();
        Self::new(Arc::new(move |t| l.laplace(t)), Some(Arc::new(move |t| d.laplace_derivative(t))), law.right_edge(), true)
    }

    /// The empirical intensity transform of pre-sampled configurations. Exact
    /// for the empirical measure, an estimate of the model's `m`.
    pub fn empirical(configs: &[PointConfiguration]) -> Self {
        let xs: Arc<Vec<f64>> = Arc::new(configs.iter().flat_map(|c| c.displacements.iter().copied()).collect());
        let n = configs.len().max(1) as f64;
        let xe = xs.clone();
        let xd = xs;
        Self::new(
            Arc::new(move |t| xe.iter().map(|x| (-t * x).exp()).sum::<f64>() / n),
            Some(Arc::new(move |t| xd.iter().map(|x| -x * (-t * x).exp()).sum::<f64>() / n)),
            f64::INFINITY,
            false,
        )
    }

    /// The value at `t`; `+inf` outside the domain.
    pub fn eval(&self, t: f64) -> f64 {
        if t > self.right_edge {
            return f64::INFINITY;
        }
        let v = (self.eval)(t);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }

    pub fn right_edge(&self) -> f64 {
        self.right_edge
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn has_closed_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    /// `t -> e^{ct} f(t)`: the transform of `T - c`.
    pub fn shifted(&self, c: f64) -> Self {
        let e = self.eval.clone();
        let d = self.derivative.clone();
        let e2 = self.eval.clone();
        Self::new(
            Arc::new(move |t| (c * t).exp() * e(t)),
            d.map(|d| -> Transform { Arc::new(move |t| (c * t).exp() * (c * e2(t) + d(t))) }),
            self.right_edge,
            self.exact,
        )
    }

    /// `t -> f(k + t) / f(k)`: the transform of the law tilted by `k`.
    pub fn tilted(&self, k: f64) -> Result<Self> {
        let norm = self.eval(k);
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::OutsideDomain { theta: k });
        }
        let e = self.eval.clone();
        let d = self.derivative.clone();
        Ok(Self::new(
            Arc::new(move |t| e(k + t) / norm),
            d.map(|d| -> Transform { Arc::new(move |t| d(k + t) / norm) }),
            self.right_edge - k,
            self.exact,
        ))
    }

    /// `t -> f(1 + t)`: the step transform of the associated walk.
    pub fn offset_argument(&self, k: f64) -> Self {
        let e = self.eval.clone();
        let d = self.derivative.clone();
        Self::new(
            Arc::new(move |t| e(k + t)),
            d.map(|d| -> Transform { Arc::new(move |t| d(k + t)) }),
            self.right_edge - k,
            self.exact,
        )
    }

    /// Log-convexity spot check `f((s+t)/2)^2 <= f(s) f(t)` on a grid inside
    /// the domain.
    pub fn log_convex_on(&self, grid: &[f64], rel_tol: f64) -> bool {
        grid.iter().all(|&s| {
            grid.iter().all(|&t| {
                let (fs, ft, fm) = (self.eval(s), self.eval(t), self.eval(0.5 * (s + t)));
                !(fs.is_finite() && ft.is_finite()) || fm * fm <= fs * ft * (1.0 + rel_tol)
            })
        })
    }

    fn log_slope(&self, t: f64) -> Result<f64> {
        let d = left_derivative(self, t)?;
        Ok(d.value / self.eval(t))
    }
}

/// `m(θ)^{1/θ}`, `+inf` outside the domain.
pub fn spectral_function(profile: &LaplaceProfile, theta: f64) -> Result<f64> {
    if !(theta > 0.0) {
        return Err(Error::InvalidParameter(format!("spectral function needs θ > 0, got {theta}")));
    }
    let m = profile.eval(theta);
    if !m.is_finite() {
        return Ok(f64::INFINITY);
    }
    Ok(m.powf(1.0 / theta))
}

/// Left derivative of the profile: closed form when available, otherwise a
/// Richardson-extrapolated backward difference.
pub fn left_derivative(profile: &LaplaceProfile, theta: f64) -> Result<Derivative> {
    let f0 = profile.eval(theta);
    if !f0.is_finite() {
        return Err(Error::OutsideDomain { theta });
    }
    if let Some(d) = &profile.derivative {
        return Ok(Derivative { value: d(theta), error: 0.0 });
    }
    let diff = |h: f64| (f0 - profile.eval(theta - h)) / h;
    let [h1, h2, h3] = DERIVATIVE_STEPS;
    let (d1, d2, d3) = (diff(h1), diff(h2), diff(h3));
    if !(d1.is_finite() && d2.is_finite() && d3.is_finite()) {
        return Err(Error::OutsideDomain { theta: theta - h1 });
    }
    let r1 = 2.0 * d2 - d1;
    let r2 = 2.0 * d3 - d2;
    let value = (4.0 * r2 - r1) / 3.0;
    let error = (r2 - r1).abs() + 1e-7 * value.abs().max(f0);
    Ok(Derivative { value, error })
}

// Largest point of [lo, hi] at which the profile is finite, to ROOT_TOL.
fn finite_limit(profile: &LaplaceProfile, lo: f64, hi: f64) -> f64 {
    let hi = hi.min(profile.right_edge());
    if profile.eval(hi).is_finite() {
        return hi;
    }
    let mut l = lo;
    let mut h = hi;
    for _ in 0..200 {
        if h - l <= ROOT_TOL {
            break;
        }
        let mid = 0.5 * (l + h);
        if profile.eval(mid).is_finite() {
            l = mid;
        } else {
            h = mid;
        }
    }
    l
}

/// Minimizer `ϑ₀` of the spectral function over `[1, 2]`.
///
/// Fails with `NotAttained` when the infimum is not in `(0, 1)` or when the
/// profile diverges before the function stops decreasing.
pub fn minimize_spectral(profile: &LaplaceProfile) -> Result<SpectralMinimum> {
    let g = |t: f64| profile.eval(t).ln() / t;
    if !profile.eval(1.0).is_finite() {
        return Err(Error::NotAttained("m(1) is infinite".into()));
    }
    let hi = finite_limit(profile, 1.0, 2.0);
    let truncated = hi < 2.0;
    let theta0 = if profile.has_closed_derivative() {
        let h = |t: f64| profile.log_slope(t).map(|s| t * s - profile.eval(t).ln()).unwrap_or(f64::NAN);
        if h(1.0) >= 0.0 {
            return Err(Error::NotAttained("spectral function does not decrease to the right of 1".into()));
        }
        if h(hi) < 0.0 {
            hi
        } else {
            bisect(h, 1.0, hi, ROOT_TOL, 200)
        }
    } else {
        golden_section(g, 1.0, hi, 1e-11)
    };
    if truncated && (hi - theta0) <= 1e-6 {
        return Err(Error::NotAttained(format!(
            "m diverges at {hi:.6} while the spectral function is still decreasing"
        )));
    }
    let value = g(theta0).exp();
    if theta0 <= 1.0 + 1e-12 || !(value > 0.0 && value < 1.0) {
        return Err(Error::NotAttained(format!("infimum over [1, 2] is {value}, not in (0, 1)")));
    }
    Ok(SpectralMinimum { theta0, value })
}

// Minimal r in (1, limit] with a r + log m(r) <= 0, by upward scan and bisection.
fn minimal_root(profile: &LaplaceProfile, a: f64, limit: f64) -> Option<f64> {
    let f = |r: f64| a * r + profile.eval(r).ln();
    let mut prev = 1.0;
    let mut k = 1u32;
    loop {
        let r = (1.0 + k as f64 * SCAN_STEP).min(limit);
        let v = f(r);
        if v <= 0.0 {
            return Some(if v == 0.0 { r } else { bisect(f, prev, r, ROOT_TOL, 200) });
        }
        if r >= limit || !v.is_finite() {
            return None;
        }
        prev = r;
        k += 1;
    }
}

fn require_canonical(profile: &LaplaceProfile) -> Result<()> {
    let m1 = profile.eval(1.0);
    if (m1 - 1.0).abs() > CANONICAL_TOL {
        return Err(Error::NotCanonical { value: m1 });
    }
    Ok(())
}

/// The minimal `r > 1` with `e^{ar} m(r) = 1`, searched on `(1, ϑ₀]`.
pub fn solve_theta(profile: &LaplaceProfile, a: f64) -> Result<f64> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::InvalidParameter(format!("rate a must be positive, got {a}")));
    }
    require_canonical(profile)?;
    let min = minimize_spectral(profile)?;
    if (a + min.value.ln()).abs() <= BOUNDARY_TOL {
        return Ok(min.theta0);
    }
    minimal_root(profile, a, min.theta0).ok_or_else(|| Error::NoRoot(format!("e^(a r) m(r) > 1 on (1, {}]", min.theta0)))
}

/// The minimal `r > 1` with `e^{ar} m(r) = 1` without the restriction to
/// `[1, 2]`, together with the boundary flag relative to `inf_{r >= 1}`.
pub(crate) fn solve_theta_unrestricted(profile: &LaplaceProfile, a: f64) -> Result<(f64, bool)> {
    require_canonical(profile)?;
    let limit = finite_limit(profile, 1.0, profile.right_edge().min(SCAN_LIMIT));
    // Minimizer of g on [1, limit]; g is quasi-convex so golden section applies.
    let g = |t: f64| profile.eval(t).ln() / t;
    let t0 = golden_section(g, 1.0, limit, 1e-11);
    let inf = g(t0);
    if (a + inf).abs() <= BOUNDARY_TOL {
        return Ok((t0, true));
    }
    minimal_root(profile, a, t0).map(|r| (r, false)).ok_or_else(|| Error::NoRoot("e^(a r) m(r) > 1 for all r > 1".into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentStatus {
    Holds,
    Fails,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SilentReason {
    /// The spectral infimum over `[1, 2]` is not attained in `(1, 2]`.
    MinimumNotAttained,
    /// `e^a m(r)^{1/r} > 1` for every `r` in `(1, 2)`.
    RateTooLarge,
    /// The boundary case holds but `-log m(ϑ₀)/ϑ₀ < -m'(ϑ₀)/m(ϑ₀)` does not.
    BoundaryNotStrict,
    /// `ϑ = 2` is outside the open interval `(1, 2)`.
    ThetaAtTwo,
    MomentFails,
    MomentUndetermined,
}

impl SilentReason {
    pub fn describe(self) -> &'static str {
        match self {
            SilentReason::MinimumNotAttained => "spectral minimum not attained",
            SilentReason::RateTooLarge => "rate exceeds the spectral bound",
            SilentReason::BoundaryNotStrict => "boundary strictness fails",
            SilentReason::ThetaAtTwo => "root lies at 2",
            SilentReason::MomentFails => "moment condition fails",
            SilentReason::MomentUndetermined => "moment condition undetermined",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Applies,
    Silent(SilentReason),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub a: f64,
    pub theta: Option<f64>,
    pub theta0: Option<f64>,
    /// Infimum of the spectral function over `[1, 2]` (estimated on a grid
    /// when the minimum is not attained).
    pub spectral_min: f64,
    pub is_boundary_case: bool,
    pub boundary_strict: bool,
    pub moment_ok: MomentStatus,
    /// `|e^{aϑ} m(ϑ) - 1|`, when `ϑ` exists.
    pub root_residual: Option<f64>,
    pub verdict: Verdict,
}

impl ConditionReport {
    /// Every hypothesis recorded in the report holds whenever the verdict says
    /// the convergence result applies.
    pub fn is_sound(&self) -> bool {
        match self.verdict {
            Verdict::Silent(_) => true,
            Verdict::Applies => {
                self.theta.is_some_and(|t| t > 1.0 && t < 2.0)
                    && self.root_residual.is_some_and(|r| r <= 1e-9)
                    && self.moment_ok == MomentStatus::Holds
                    && (!self.is_boundary_case || self.boundary_strict)
            }
        }
    }
}

/// Evaluates the sufficient conditions for `Σ e^{an}(W - W_n)` to converge:
/// the spectral bound, the root `ϑ`, the moment condition `E W_1^ϑ < ∞`
/// supplied by `moment_oracle`, and in the boundary case the strictness of
/// the slope inequality at `ϑ₀`. A silent verdict never asserts divergence.
pub fn check_rate_conditions<F>(profile: &LaplaceProfile, a: f64, moment_oracle: F) -> Result<ConditionReport>
where
    F: FnOnce(f64) -> MomentStatus,
{
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::InvalidParameter(format!("rate a must be positive, got {a}")));
    }
    require_canonical(profile)?;
    let mut report = ConditionReport {
        a,
        theta: None,
        theta0: None,
        spectral_min: f64::NAN,
        is_boundary_case: false,
        boundary_strict: false,
        moment_ok: MomentStatus::Undetermined,
        root_residual: None,
        verdict: Verdict::Silent(SilentReason::MinimumNotAttained),
    };
    let min = match minimize_spectral(profile) {
        Ok(min) => min,
        Err(Error::NotAttained(_)) => {
            let hi = finite_limit(profile, 1.0, 2.0);
            report.spectral_min = (0..=1000)
                .map(|i| spectral_function(profile, 1.0 + (hi - 1.0) * i as f64 / 1000.0).unwrap_or(f64::INFINITY))
                .fold(f64::INFINITY, f64::min);
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    report.theta0 = Some(min.theta0);
    report.spectral_min = min.value;
    let gap = a + min.value.ln();
    report.is_boundary_case = gap.abs() <= BOUNDARY_TOL;
    if gap > BOUNDARY_TOL {
        report.verdict = Verdict::Silent(SilentReason::RateTooLarge);
        return Ok(report);
    }
    let theta = if report.is_boundary_case { min.theta0 } else { solve_theta(profile, a)? };
    report.theta = Some(theta);
    report.root_residual = Some(((a * theta).exp() * profile.eval(theta) - 1.0).abs());
    if report.is_boundary_case {
        let m0 = profile.eval(min.theta0);
        let d = left_derivative(profile, min.theta0)?;
        let lhs = -m0.ln() / min.theta0;
        let rhs = -d.value / m0;
        report.boundary_strict = rhs - lhs > d.error / m0 + 1e-10;
        if !report.boundary_strict {
            report.verdict = Verdict::Silent(SilentReason::BoundaryNotStrict);
            return Ok(report);
        }
    }
    if theta >= 2.0 {
        report.verdict = Verdict::Silent(SilentReason::ThetaAtTwo);
        return Ok(report);
    }
    report.moment_ok = moment_oracle(theta);
    report.verdict = match report.moment_ok {
        MomentStatus::Holds => Verdict::Applies,
        MomentStatus::Fails => Verdict::Silent(SilentReason::MomentFails),
        MomentStatus::Undetermined => Verdict::Silent(SilentReason::MomentUndetermined),
    };
    Ok(report)
}

/// Moment oracle backed by an offspring model: bounded or enumerable `W_1`
/// settles the question, otherwise the Monte Carlo divergence heuristic does.
pub fn model_moment_oracle(model: &OffspringModel, budget: usize, seed: crate::seed::Seed) -> impl FnOnce(f64) -> MomentStatus + '_ {
    move |theta| {
        if model.w1_sup().is_some() {
            return MomentStatus::Holds;
        }
        match model.w1_moment(theta, budget, seed) {
            Ok(McOutcome::Stable { .. }) => MomentStatus::Holds,
            _ => MomentStatus::Undetermined,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::law::CountLaw;

    fn gw_profile(m: f64) -> LaplaceProfile {
        LaplaceProfile::from_fn(move |t| m.powf(1.0 - t), f64::INFINITY).with_derivative(move |t| -m.ln() * m.powf(1.0 - t))
    }

    // Two atoms chosen so the spectral minimum is interior to (1, 2).
    fn interior_profile() -> LaplaceProfile {
        let raw = LaplaceProfile::from_fn(|t| 0.6 * (0.4 * t).exp() + 0.9 * (-1.2 * t).exp(), f64::INFINITY);
        let norm = raw.eval(1.0);
        LaplaceProfile::from_fn(move |t| (0.6 * (0.4 * t).exp() + 0.9 * (-1.2 * t).exp()) / norm.powf(t), f64::INFINITY)
    }

    #[test]
    fn spectral_function_of_galton_watson() {
        let p = gw_profile(2.0);
        assert!((spectral_function(&p, 2.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(spectral_function(&p, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn galton_watson_minimum_at_two() {
        let min = minimize_spectral(&gw_profile(2.0)).unwrap();
        assert_eq!(min.theta0, 2.0);
        assert!((min.value - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn constant_profile_not_attained() {
        let p = LaplaceProfile::from_fn(|_| 1.0, f64::INFINITY).with_derivative(|_| 0.0);
        assert!(matches!(minimize_spectral(&p), Err(Error::NotAttained(_))));
    }

    #[test]
    fn interior_minimum_matches_grid() {
        let p = interior_profile();
        let min = minimize_spectral(&p).unwrap();
        let grid = (0..=1_000_000)
            .map(|i| 1.0 + i as f64 * 1e-6)
            .min_by(|a, b| spectral_function(&p, *a).unwrap().total_cmp(&spectral_function(&p, *b).unwrap()))
            .unwrap();
        assert!(min.theta0 > 1.0 && min.theta0 < 2.0);
        assert!((min.theta0 - grid).abs() < 1e-5, "{} vs {grid}", min.theta0);
    }

    #[test]
    fn divergence_before_minimum_is_not_attained() {
        // finite up to 1.5 and infinite beyond, spectral function still decreasing there
        let p = LaplaceProfile::from_fn(|t| 0.5f64.powf(t - 1.0), 1.5);
        assert!(matches!(minimize_spectral(&p), Err(Error::NotAttained(_))));
    }

    #[test]
    fn left_derivative_closed_and_numeric() {
        let p = gw_profile(2.0);
        let d = left_derivative(&p, 2.0).unwrap();
        assert!((d.value + 2f64.ln() / 2.0).abs() < 1e-15);
        let numeric = LaplaceProfile::from_fn(|t| 2f64.powf(1.0 - t), f64::INFINITY);
        let n = left_derivative(&numeric, 2.0).unwrap();
        assert!((n.value + 2f64.ln() / 2.0).abs() < 1e-6);
        let step = LaplaceProfile::of_law(&RealLaw::Point(0.7));
        assert!((left_derivative(&step, 0.0).unwrap().value + 0.7).abs() < 1e-15);
        assert!(matches!(left_derivative(&LaplaceProfile::from_fn(|_| f64::INFINITY, 0.0), 1.0), Err(Error::OutsideDomain { .. })));
    }

    #[test]
    fn theta_of_galton_watson_example() {
        let theta = solve_theta(&gw_profile(2.0), 2f64.ln() / 3.0).unwrap();
        assert!((theta - 1.5).abs() < 1e-10);
    }

    #[test]
    fn theta_tends_to_one_for_small_rates() {
        let p = gw_profile(2.0);
        for a in [1e-2, 1e-4] {
            let theta = solve_theta(&p, a).unwrap();
            // e^{ar} 2^{1-r} = 1  <=>  r = log 2 / (log 2 - a)
            let want = 2f64.ln() / (2f64.ln() - a);
            assert!((theta - want).abs() < 1e-10);
        }
    }

    #[test]
    fn theta_rejects_non_canonical() {
        let p = LaplaceProfile::from_fn(|t| 2.0 * (-t).exp(), f64::INFINITY);
        assert!(matches!(solve_theta(&p, 0.1), Err(Error::NotCanonical { .. })));
    }

    #[test]
    fn boundary_returns_theta0() {
        let p = interior_profile();
        let min = minimize_spectral(&p).unwrap();
        let theta = solve_theta(&p, -min.value.ln()).unwrap();
        assert_eq!(theta, min.theta0);
    }

    #[test]
    fn report_for_example_applies() {
        let model = OffspringModel::galton_watson(CountLaw::uniform(0, 4).unwrap()).unwrap();
        let p = LaplaceProfile::of_model(&model).unwrap();
        let r = check_rate_conditions(&p, 2f64.ln() / 3.0, model_moment_oracle(&model, 1000, crate::seed::Seed(1))).unwrap();
        assert_eq!(r.verdict, Verdict::Applies);
        assert!((r.theta.unwrap() - 1.5).abs() < 1e-10);
        assert!(r.is_sound());
    }

    #[test]
    fn report_silent_cases() {
        let p = gw_profile(2.0);
        let r = check_rate_conditions(&p, 0.5, |_| MomentStatus::Holds).unwrap();
        assert_eq!(r.verdict, Verdict::Silent(SilentReason::RateTooLarge));
        let q = interior_profile();
        let min = minimize_spectral(&q).unwrap();
        let r = check_rate_conditions(&q, -min.value.ln(), |_| MomentStatus::Holds).unwrap();
        assert!(r.is_boundary_case);
        assert_eq!(r.verdict, Verdict::Silent(SilentReason::BoundaryNotStrict));
        let r = check_rate_conditions(&p, 0.1, |_| MomentStatus::Undetermined).unwrap();
        assert_eq!(r.verdict, Verdict::Silent(SilentReason::MomentUndetermined));
    }
}
