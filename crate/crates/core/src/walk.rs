//! Random walks: step laws, exponential tilting and the associated walk of a
//! branching model.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::laplace::{left_derivative, LaplaceProfile};
use crate::law::{RealLaw, SignStructure, SupportKind, WalkLattice, SPAN_MAX_DENOMINATOR};
use crate::numeric::{bisect, common_span};
use crate::offspring::{OffspringKind, OffspringModel, CANONICAL_TOL};
use crate::seed::{par_chunks, Seed, SimRng};
use crate::stats::Moments;

pub type StepSampler = Arc<dyn Fn(&mut SimRng) -> f64 + Send + Sync>;

/// Configurations pooled per draw by the custom associated-walk sampler.
pub const RESAMPLING_POOL: usize = 64;
/// Mass of the tilted law below the rejection floor.
pub const REJECTION_LOST_MASS: f64 = 1e-12;
const REJECTION_MAX_ATTEMPTS: u64 = 10_000_000;
/// Relative tolerance for treating `a` as equal to `R`.
pub const RATE_TOL: f64 = 1e-9;
/// Threshold on `-ψ'(γ₀)` for a certified positive drift at `a = R`.
pub const DRIFT_FLOOR: f64 = 1e-8;

#[derive(Clone)]
struct SampledStep {
    base: Option<StepSampler>,
    /// Transform of the base law.
    profile: LaplaceProfile,
    signs: Option<SignStructure>,
    support: SupportKind,
    /// Known lower bound of the base support.
    lower_bound: Option<f64>,
    tilt: f64,
    /// Amount subtracted from each base draw.
    shift: f64,
}

#[derive(Clone)]
enum Repr {
    Parametric(RealLaw),
    Sampled(SampledStep),
}

/// The law of one increment `T` of a random walk.
#[derive(Clone)]
pub struct StepLaw {
    repr: Repr,
    tilt_level: f64,
}

impl fmt::Debug for StepLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Parametric(law) => f.debug_struct("StepLaw").field("law", law).field("tilt_level", &self.tilt_level).finish(),
            Repr::Sampled(s) => f
                .debug_struct("StepLaw")
                .field("sampled", &s.base.is_some())
                .field("shift", &s.shift)
                .field("tilt_level", &self.tilt_level)
                .finish(),
        }
    }
}

/// `R = -log inf_{t >= 0} ψ(t)` and where the infimum sits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateInfo {
    pub r: f64,
    /// Minimizer of `ψ`; `None` when the infimum is only approached as `t -> ∞`.
    pub gamma0: Option<f64>,
    /// `ψ'(γ₀) = 0` at an interior point of the domain.
    pub flat: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltReport {
    pub gamma: f64,
    /// `-ψ'(γ)/ψ(γ)`.
    pub tilted_mean: f64,
    /// Monte Carlo `E_γ e^{γ T_1}` and its standard error.
    pub tilted_exp_identity: f64,
    pub tilted_exp_stderr: f64,
    /// `1/ψ(γ)`.
    pub identity_target: f64,
    /// Monte Carlo `E_γ T_1` and its standard error.
    pub sample_mean: f64,
    pub sample_mean_stderr: f64,
    /// `ν_γ = -e^a ψ'(γ)` when a rate is attached.
    pub drift_nu: Option<f64>,
}

impl StepLaw {
    /// A parametric step law; degenerate at zero is rejected.
    pub fn parametric(law: RealLaw) -> Result<Self> {
        if law == RealLaw::Point(0.0) {
            return Err(Error::Degenerate("step law is the point mass at 0".into()));
        }
        Ok(StepLaw { repr: Repr::Parametric(law), tilt_level: 0.0 })
    }

    /// A step law given by a sampler and its transform. `signs` and
    /// `lower_bound` describe the support when known.
    pub fn sampled(
        sampler: StepSampler,
        profile: LaplaceProfile,
        signs: Option<SignStructure>,
        support: SupportKind,
        lower_bound: Option<f64>,
    ) -> Self {
        StepLaw {
            repr: Repr::Sampled(SampledStep { base: Some(sampler), profile, signs, support, lower_bound, tilt: 0.0, shift: 0.0 }),
            tilt_level: 0.0,
        }
    }

    /// A step law known only through its transform; sampling fails with
    /// `NoSampler`.
    pub fn transform_only(profile: LaplaceProfile, signs: Option<SignStructure>, support: SupportKind) -> Self {
        StepLaw {
            repr: Repr::Sampled(SampledStep { base: None, profile, signs, support, lower_bound: None, tilt: 0.0, shift: 0.0 }),
            tilt_level: 0.0,
        }
    }

    pub fn as_parametric(&self) -> Option<&RealLaw> {
        match &self.repr {
            Repr::Parametric(law) => Some(law),
            Repr::Sampled(_) => None,
        }
    }

    pub fn tilt_level(&self) -> f64 {
        self.tilt_level
    }

    /// `ψ(t) = E e^{-tT}`.
    pub fn laplace(&self, t: f64) -> f64 {
        match &self.repr {
            Repr::Parametric(law) => law.laplace(t),
            Repr::Sampled(s) => {
                let base = s.profile.eval(s.tilt + t) / s.profile.eval(s.tilt);
                let v = (s.shift * t).exp() * base;
                if v.is_nan() {
                    f64::INFINITY
                } else {
                    v
                }
            }
        }
    }

    pub fn profile(&self) -> LaplaceProfile {
        match &self.repr {
            Repr::Parametric(law) => LaplaceProfile::of_law(law),
            Repr::Sampled(s) => {
                let tilted = s.profile.tilted(s.tilt).expect("tilt validated on construction");
                tilted.shifted(s.shift)
            }
        }
    }

    /// Supremum of the finiteness domain of `ψ`.
    pub fn right_edge(&self) -> f64 {
        match &self.repr {
            Repr::Parametric(law) => law.right_edge(),
            Repr::Sampled(s) => s.profile.right_edge() - s.tilt,
        }
    }

    /// Left derivative of `ψ`, closed form when available.
    pub fn laplace_derivative(&self, t: f64) -> Result<crate::laplace::Derivative> {
        left_derivative(&self.profile(), t)
    }

    pub fn signs(&self) -> Option<SignStructure> {
        match &self.repr {
            Repr::Parametric(law) => Some(law.signs()),
            Repr::Sampled(s) => {
                // Tilting preserves the support; shifting moves it.
                if s.shift == 0.0 {
                    s.signs
                } else {
                    None
                }
            }
        }
    }

    pub fn support_kind(&self) -> SupportKind {
        match &self.repr {
            Repr::Parametric(law) => law.support_kind(),
            Repr::Sampled(s) => match s.support {
                SupportKind::Arithmetic { span, offset, single_atom } => {
                    SupportKind::Arithmetic { span, offset: offset - s.shift, single_atom }
                }
                other => other,
            },
        }
    }

    /// Lattice carrying the zero-delayed walk.
    pub fn walk_lattice(&self) -> WalkLattice {
        self.support_kind().walk_lattice()
    }

    pub fn mean(&self) -> Result<f64> {
        match &self.repr {
            Repr::Parametric(law) => Ok(law.mean()),
            Repr::Sampled(_) => Ok(-self.laplace_derivative(0.0)?.value),
        }
    }

    /// The law of `T - a`.
    pub fn shift(&self, a: f64) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::InvalidParameter(format!("shift must be finite, got {a}")));
        }
        let repr = match &self.repr {
            Repr::Parametric(law) => {
                let shifted = law.affine(1.0, -a)?;
                if shifted == RealLaw::Point(0.0) {
                    return Err(Error::Degenerate("shifted step law is the point mass at 0".into()));
                }
                Repr::Parametric(shifted)
            }
            Repr::Sampled(s) => Repr::Sampled(SampledStep { shift: s.shift + a, ..s.clone() }),
        };
        Ok(StepLaw { repr, tilt_level: self.tilt_level })
    }

    /// The law of `T` under `P_γ`, with density `e^{-γt}/ψ(γ)`.
    pub fn tilt(&self, gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::InvalidParameter(format!("tilt must be non-negative, got {gamma}")));
        }
        if !self.laplace(gamma).is_finite() {
            return Err(Error::OutsideDomain { theta: gamma });
        }
        let repr = match &self.repr {
            Repr::Parametric(law) => Repr::Parametric(law.tilt(gamma)?),
            // Tilting T - s by γ equals tilting T by γ, then shifting.
            Repr::Sampled(s) => Repr::Sampled(SampledStep { tilt: s.tilt + gamma, ..s.clone() }),
        };
        Ok(StepLaw { repr, tilt_level: self.tilt_level + gamma })
    }

    pub fn has_sampler(&self) -> bool {
        match &self.repr {
            Repr::Parametric(_) => true,
            Repr::Sampled(s) => s.base.is_some(),
        }
    }

    /// A sampler for this law. Tilted sampled laws use rejection from the base
    /// sampler with envelope `e^{-k(t - f)}` on `t >= f`, where the floor `f`
    /// is a known support bound or, failing that, a Chernoff bound leaving
    /// less than `REJECTION_LOST_MASS` of the tilted law below it.
    pub fn sampler(&self) -> Result<Sampler> {
        match &self.repr {
            Repr::Parametric(law) => Ok(Sampler::Parametric(law.clone())),
            Repr::Sampled(s) => {
                let base = s.base.clone().ok_or(Error::NoSampler)?;
                if s.tilt == 0.0 {
                    return Ok(Sampler::Rejection { base, tilt: 0.0, floor: f64::NEG_INFINITY, shift: s.shift });
                }
                let floor = match s.lower_bound {
                    Some(b) => b,
                    None => chernoff_floor(&s.profile, s.tilt).ok_or_else(|| {
                        Error::NotApplicable("no finite rejection floor for the tilted law".into())
                    })?,
                };
                Ok(Sampler::Rejection { base, tilt: s.tilt, floor, shift: s.shift })
            }
        }
    }

    pub fn sample(&self, rng: &mut SimRng) -> Result<f64> {
        self.sampler()?.draw(rng)
    }

    /// Partial sums `T_0 = 0, T_1, ..., T_n`.
    pub fn sample_path(&self, n: usize, rng: &mut SimRng) -> Result<Vec<f64>> {
        let sampler = self.sampler()?;
        let mut path = Vec::with_capacity(n + 1);
        let mut s = 0.0;
        path.push(s);
        for _ in 0..n {
            s += sampler.draw(rng)?;
            path.push(s);
        }
        Ok(path)
    }

    /// `R` and the minimizer `γ₀` of `ψ` on `[0, ∞)`.
    pub fn rate(&self) -> Result<RateInfo> {
        if let Some(signs) = self.signs() {
            if !signs.has_negative {
                return Ok(if signs.zero_mass > 0.0 {
                    RateInfo { r: -signs.zero_mass.ln(), gamma0: None, flat: false }
                } else {
                    RateInfo { r: f64::INFINITY, gamma0: None, flat: false }
                });
            }
        }
        let d0 = self.laplace_derivative(0.0)?;
        if d0.value >= 0.0 {
            return Ok(RateInfo { r: 0.0, gamma0: Some(0.0), flat: d0.value == 0.0 });
        }
        let edge = self.right_edge();
        let slope = |t: f64| self.laplace_derivative(t).map(|d| d.value).unwrap_or(f64::INFINITY);
        // Bracket the zero of ψ' by doubling, staying inside the domain.
        let mut lo = 0.0;
        let mut hi = 1.0f64.min(0.5 * edge);
        loop {
            let v = slope(hi);
            if v >= 0.0 {
                break;
            }
            lo = hi;
            let next = if edge.is_finite() { hi + 0.5 * (edge - hi) } else { 2.0 * hi };
            if edge.is_finite() && edge - next <= 1e-12 * edge.max(1.0) {
                // Still decreasing at the edge of the domain.
                let g0 = next;
                let psi = self.laplace(g0);
                if !psi.is_finite() {
                    return Err(Error::Undecided(format!("ψ still decreasing at the domain edge {edge}")));
                }
                return Ok(RateInfo { r: -psi.ln(), gamma0: Some(g0), flat: false });
            }
            if !edge.is_finite() && next > 1e6 {
                return Err(Error::Undecided("ψ still decreasing at t = 1e6".into()));
            }
            hi = next;
        }
        let g0 = bisect(slope, lo, hi, 1e-15, 300);
        Ok(RateInfo { r: -self.laplace(g0).ln(), gamma0: Some(g0), flat: true })
    }

    /// The minimal `t > 0` with `ψ(t) = e^{-a}`.
    pub fn solve_gamma(&self, a: f64) -> Result<f64> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidParameter(format!("rate a must be positive, got {a}")));
        }
        let rate = self.rate()?;
        let at_rate = rate.r.is_finite() && (a - rate.r).abs() <= RATE_TOL * rate.r.max(1.0);
        if a > rate.r && !at_rate {
            return Err(Error::NoRoot(format!("exceeds R = {}", rate.r)));
        }
        if at_rate {
            let g0 = rate.gamma0.ok_or_else(|| Error::NoRoot("infimum of ψ not attained".into()))?;
            if rate.flat {
                return Err(Error::NoRoot("flat minimum".into()));
            }
            let d = self.laplace_derivative(g0)?;
            if -d.value - d.error > DRIFT_FLOOR {
                return Ok(g0);
            }
            return Err(Error::NoRoot("sign of ψ'(γ₀) not certified".into()));
        }
        let target = (-a).exp();
        let f = |t: f64| self.laplace(t) - target;
        let hi = match rate.gamma0 {
            Some(g0) => g0,
            None => {
                let mut hi = 1.0;
                while f(hi) > 0.0 {
                    hi *= 2.0;
                    if hi > 1e12 {
                        return Err(Error::NoRoot("ψ stays above e^{-a}".into()));
                    }
                }
                hi
            }
        };
        Ok(bisect(f, 0.0, hi, 1e-15, 300))
    }

    /// Lattice structure: exact for parametric laws, otherwise inferred from
    /// `samples` draws by rationalizing support differences.
    pub fn detect_span(&self, samples: usize, seed: Seed) -> Result<SupportKind> {
        if let Repr::Parametric(law) = &self.repr {
            return Ok(law.support_kind());
        }
        if samples < 1000 {
            return Ok(SupportKind::Unknown);
        }
        let sampler = self.sampler()?;
        let mut draws: Vec<f64> = par_chunks(seed, samples, |rng, n| (0..n).map(|_| sampler.draw(rng)).collect::<Result<Vec<_>>>())
            .into_iter()
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        Ok(empirical_support_kind(&mut draws))
    }

    /// Checks the tilt identities at `γ` against `samples` tilted draws.
    pub fn tilt_report(&self, gamma: f64, a: Option<f64>, samples: usize, seed: Seed) -> Result<TiltReport> {
        let psi = self.laplace(gamma);
        let d = self.laplace_derivative(gamma)?;
        let tilted = self.tilt(gamma)?;
        let sampler = tilted.sampler()?;
        let parts = par_chunks(seed, samples, |rng, n| {
            let mut e = Moments::new();
            let mut m = Moments::new();
            for _ in 0..n {
                let t = sampler.draw(rng)?;
                e.push((gamma * t).exp());
                m.push(t);
            }
            Ok::<_, Error>((e, m))
        });
        let mut e = Moments::new();
        let mut m = Moments::new();
        for part in parts {
            let (pe, pm) = part?;
            e.merge(&pe);
            m.merge(&pm);
        }
        Ok(TiltReport {
            gamma,
            tilted_mean: -d.value / psi,
            tilted_exp_identity: e.mean(),
            tilted_exp_stderr: e.stderr(),
            identity_target: 1.0 / psi,
            sample_mean: m.mean(),
            sample_mean_stderr: m.stderr(),
            drift_nu: a.map(|a| -a.exp() * d.value),
        })
    }
}

/// Support structure of an empirical sample (sorted in place).
pub fn empirical_support_kind(draws: &mut [f64]) -> SupportKind {
    draws.sort_by(f64::total_cmp);
    let Some(&min) = draws.first() else {
        return SupportKind::Unknown;
    };
    let mut diffs: Vec<f64> = Vec::new();
    let mut last = min;
    for &x in draws.iter() {
        if x != last {
            diffs.push(x - min);
            last = x;
        }
    }
    if diffs.is_empty() {
        return if min == 0.0 {
            SupportKind::Unknown
        } else {
            SupportKind::Arithmetic { span: min.abs(), offset: min, single_atom: true }
        };
    }
    match common_span(&diffs, SPAN_MAX_DENOMINATOR, 1e-9) {
        Some(span) => SupportKind::Arithmetic { span, offset: min, single_atom: false },
        None => SupportKind::Unknown,
    }
}

/// Largest floor `f` with `P_k(T < f) <= REJECTION_LOST_MASS`, from
/// `P_k(T < f) <= e^{r f} ψ(k + r)/ψ(k)` over a grid of `r`.
fn chernoff_floor(profile: &LaplaceProfile, k: f64) -> Option<f64> {
    let norm = profile.eval(k);
    let room = (profile.right_edge() - k).min(64.0);
    (1..=32)
        .map(|i| room * 0.999 * 2f64.powf(-(32 - i) as f64 / 3.0))
        .filter_map(|r| {
            let v = profile.eval(k + r);
            v.is_finite().then(|| (REJECTION_LOST_MASS.ln() - (v / norm).ln()) / r)
        })
        .fold(None, |best: Option<f64>, f| Some(best.map_or(f, |b| b.max(f))))
}

/// A ready-to-use increment sampler.
#[derive(Clone)]
pub enum Sampler {
    Parametric(RealLaw),
    Rejection { base: StepSampler, tilt: f64, floor: f64, shift: f64 },
}

impl Sampler {
    pub fn draw(&self, rng: &mut SimRng) -> Result<f64> {
        match self {
            Sampler::Parametric(law) => Ok(law.sample(rng)),
            Sampler::Rejection { base, tilt, floor, shift } => {
                if *tilt == 0.0 {
                    return Ok(base(rng) - shift);
                }
                for _ in 0..REJECTION_MAX_ATTEMPTS {
                    let t = base(rng);
                    if t < *floor {
                        continue;
                    }
                    if rng.random::<f64>() < (-tilt * (t - floor)).exp() {
                        return Ok(t - shift);
                    }
                }
                Err(Error::RejectionExhausted(REJECTION_MAX_ATTEMPTS))
            }
        }
    }
}

/// Step law of the associated walk: `ψ(t) = m(1 + t)`, and `S_1` is a child
/// chosen with probability proportional to its weight `e^{-X_i}` under the
/// size-biased configuration law.
pub fn associated_step(model: &OffspringModel) -> Result<StepLaw> {
    if model.prob_no_children() == Some(1.0) {
        return Err(Error::Degenerate("the model never produces children".into()));
    }
    model.require_canonical()?;
    match &model.kind {
        OffspringKind::GaltonWatson(count) => StepLaw::parametric(RealLaw::point(count.mean().ln())?),
        OffspringKind::Independent { displacement, .. } => StepLaw::parametric(displacement.tilt(1.0)?),
        OffspringKind::Lattice(entries) => {
            let atoms: Vec<(f64, f64)> = entries.iter().map(|e| (e.displacement, e.mean_count * (-e.displacement).exp())).collect();
            StepLaw::parametric(RealLaw::atoms(&atoms)?)
        }
        OffspringKind::Custom(c) => {
            let m = c.transform.clone().ok_or(Error::TransformUnavailable)?;
            if (m(1.0) - 1.0).abs() > CANONICAL_TOL {
                return Err(Error::NotCanonical { value: m(1.0) });
            }
            let profile = LaplaceProfile::of_model(model)?.offset_argument(1.0);
            let sampler_model = model.clone();
            let sampler: StepSampler = Arc::new(move |rng| pooled_child(&sampler_model, rng));
            Ok(StepLaw::sampled(sampler, profile, None, SupportKind::Unknown, None))
        }
    }
}

// Weighted resampling over RESAMPLING_POOL configurations; biased for finite
// pools, exact in the limit.
fn pooled_child(model: &OffspringModel, rng: &mut SimRng) -> f64 {
    let mut pool: Vec<f64> = Vec::new();
    let mut buf = Vec::new();
    for _ in 0..RESAMPLING_POOL {
        if model.sample_into(rng, &mut buf).is_ok() {
            pool.extend_from_slice(&buf);
        }
    }
    if pool.is_empty() {
        return f64::NAN;
    }
    let total: f64 = pool.iter().map(|x| (-x).exp()).sum();
    let mut u = rng.random::<f64>() * total;
    for &x in &pool {
        u -= (-x).exp();
        if u <= 0.0 {
            return x;
        }
    }
    pool[pool.len() - 1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::law::CountLaw;

    fn two_point() -> StepLaw {
        StepLaw::parametric(RealLaw::atoms(&[(-1.0, 1.0), (2.0, 2.0)]).unwrap()).unwrap()
    }

    #[test]
    fn degenerate_at_zero_is_rejected() {
        assert!(matches!(StepLaw::parametric(RealLaw::Point(0.0)), Err(Error::Degenerate(_))));
    }

    #[test]
    fn galton_watson_associated_step_is_log_mean() {
        let m = OffspringModel::galton_watson(CountLaw::Fixed(2)).unwrap();
        let s = associated_step(&m).unwrap();
        assert_eq!(s.as_parametric(), Some(&RealLaw::Point(2f64.ln())));
        assert!((s.laplace(0.7) - 2f64.powf(-0.7)).abs() < 1e-15);
        let none = OffspringModel::galton_watson(CountLaw::Fixed(0)).unwrap();
        assert!(matches!(associated_step(&none), Err(Error::Degenerate(_))));
    }

    #[test]
    fn associated_transform_is_offset_intensity() {
        let m = OffspringModel::independent(CountLaw::Poisson(2.0), RealLaw::normal(0.3, 0.7).unwrap())
            .unwrap()
            .canonicalize(1.0)
            .unwrap();
        let s = associated_step(&m).unwrap();
        for t in [0.0, 0.3, 0.9] {
            let want = m.exact_intensity(1.0 + t).unwrap();
            assert!((s.laplace(t) - want).abs() < 1e-12 * want);
        }
    }

    #[test]
    fn shift_of_galton_watson_walk() {
        let m = OffspringModel::galton_watson(CountLaw::Fixed(2)).unwrap();
        let a = 2f64.ln() / 3.0;
        let s = associated_step(&m).unwrap().shift(a).unwrap();
        let lambda = 2.0 * 2f64.ln() / 3.0;
        match s.walk_lattice() {
            WalkLattice::Lattice(l) => assert!((l - lambda).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
        assert!((s.solve_gamma(a).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn tilting_fixes_point_masses_and_moves_gaussians() {
        let c = StepLaw::parametric(RealLaw::Point(0.8)).unwrap().tilt(1.3).unwrap();
        assert_eq!(c.as_parametric(), Some(&RealLaw::Point(0.8)));
        let g = StepLaw::parametric(RealLaw::normal(1.0, 2.0).unwrap()).unwrap().tilt(0.25).unwrap();
        assert_eq!(g.as_parametric(), Some(&RealLaw::Normal { mean: 0.0, sd: 2.0 }));
        assert_eq!(g.tilt_level(), 0.25);
    }

    #[test]
    fn two_point_rate() {
        let rate = two_point().rate().unwrap();
        let g0 = 4f64.ln() / 3.0;
        assert!((rate.gamma0.unwrap() - g0).abs() < 1e-12);
        assert!((rate.r - 2f64.ln() / 3.0).abs() < 1e-12);
        assert!(rate.flat);
        let tilted_mean = -two_point().laplace_derivative(g0).unwrap().value / two_point().laplace(g0);
        assert!(tilted_mean.abs() < 1e-12);
    }

    #[test]
    fn rates_of_simple_laws() {
        let sym = StepLaw::parametric(RealLaw::atoms(&[(-1.0, 1.0), (1.0, 1.0)]).unwrap()).unwrap();
        let r = sym.rate().unwrap();
        assert_eq!((r.r, r.gamma0), (0.0, Some(0.0)));
        assert_eq!(StepLaw::parametric(RealLaw::Point(1.0)).unwrap().rate().unwrap().r, f64::INFINITY);
        let half = StepLaw::parametric(RealLaw::atoms(&[(0.0, 1.0), (1.0, 1.0)]).unwrap()).unwrap();
        assert!((half.rate().unwrap().r - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn gamma_roots() {
        let c = StepLaw::parametric(RealLaw::Point(0.5)).unwrap();
        assert!((c.solve_gamma(0.3).unwrap() - 0.6).abs() < 1e-12);
        let g = StepLaw::parametric(RealLaw::normal(1.0, 1.0).unwrap()).unwrap();
        assert!((g.solve_gamma(0.3).unwrap() - (1.0 - 0.4f64.sqrt())).abs() < 1e-12);
        assert!(matches!(two_point().solve_gamma(0.3), Err(Error::NoRoot(m)) if m.contains("exceeds")));
        assert!(matches!(two_point().solve_gamma(2f64.ln() / 3.0), Err(Error::NoRoot(m)) if m.contains("flat")));
    }

    #[test]
    fn span_detection() {
        assert_eq!(
            two_point().detect_span(0, Seed(1)).unwrap(),
            SupportKind::Arithmetic { span: 3.0, offset: -1.0, single_atom: false }
        );
        let mut draws = vec![0.5, 2.0, 1.25, 0.5, 3.5];
        assert_eq!(empirical_support_kind(&mut draws), SupportKind::Arithmetic { span: 0.75, offset: 0.5, single_atom: false });
        let mut irr = vec![0.0, 1.0, 2f64.sqrt(), 3f64.sqrt(), 5f64.sqrt()];
        assert_eq!(empirical_support_kind(&mut irr), SupportKind::Unknown);
    }

    #[test]
    fn paths() {
        let c = StepLaw::parametric(RealLaw::Point(0.25)).unwrap();
        let mut rng = Seed(1).rng();
        assert_eq!(c.sample_path(0, &mut rng).unwrap(), vec![0.0]);
        assert_eq!(c.sample_path(4, &mut rng).unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn sampled_tilt_by_rejection() {
        // Exp(1) steps given only as a sampler and transform; tilting by k gives
        // Exp(1 + k), mean 1/(1 + k).
        let law = RealLaw::shifted_exp(0.0, 1.0).unwrap();
        let l2 = law.clone();
        let s = StepLaw::sampled(Arc::new(move |rng| l2.sample(rng)), LaplaceProfile::of_law(&law), None, SupportKind::NonArithmetic, None);
        let report = s.tilt_report(0.5, None, 100_000, Seed(2)).unwrap();
        assert!((report.sample_mean - 1.0 / 1.5).abs() < 4.0 * report.sample_mean_stderr);
        assert!((report.tilted_exp_identity - report.identity_target).abs() < 4.0 * report.tilted_exp_stderr);
    }
}
