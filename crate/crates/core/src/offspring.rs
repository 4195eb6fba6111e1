//! Reproduction point processes.
//!
//! An [`OffspringModel`] describes the law of one individual's children: how
//! many there are and where they land relative to the parent. Displacements are
//! additive positions on the real line; the weight of a child at displacement
//! `x` is `e^{-x}`.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::law::{CountLaw, RealLaw};
use crate::mc::{doubling_mean, McOptions, McOutcome};
use crate::seed::{Seed, SimRng};

pub const DEFAULT_MAX_CHILDREN: usize = 1_000_000;

/// Tolerance on `|m(1) - 1|` for a model to count as canonical.
pub const CANONICAL_TOL: f64 = 1e-9;

/// Largest number of lattice entries for which `W_1` is enumerated exactly.
const MAX_ENUMERATED_ENTRIES: usize = 16;

pub type ConfigSampler = Arc<dyn Fn(&mut SimRng) -> Vec<f64> + Send + Sync>;
pub type Transform = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeEntry {
    pub displacement: f64,
    pub mean_count: f64,
}

/// A user-supplied reproduction law.
#[derive(Clone)]
pub struct CustomModel {
    pub name: String,
    pub sampler: ConfigSampler,
    /// Closed-form `m(θ)`, if known.
    pub transform: Option<Transform>,
    pub derivative: Option<Transform>,
    /// Supremum of the finiteness domain of `m`.
    pub right_edge: f64,
    /// A known almost-sure upper bound on `W_1`.
    pub w1_bound: Option<f64>,
}

impl fmt::Debug for CustomModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomModel")
            .field("name", &self.name)
            .field("closed_form", &self.transform.is_some())
            .field("right_edge", &self.right_edge)
            .field("w1_bound", &self.w1_bound)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum OffspringKind {
    /// `J` children, each at displacement `log E J`.
    GaltonWatson(CountLaw),
    /// `J` children at i.i.d. displacements independent of `J`.
    Independent { count: CountLaw, displacement: RealLaw },
    /// Independently for each entry, `floor(c)` children plus one more with
    /// probability `c - floor(c)`, all at that entry's displacement.
    Lattice(Vec<LatticeEntry>),
    Custom(CustomModel),
}

#[derive(Debug, Clone)]
pub struct OffspringModel {
    pub kind: OffspringKind,
    pub max_children: usize,
}

/// Displacements of one individual's children.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointConfiguration {
    pub displacements: Vec<f64>,
}

impl PointConfiguration {
    pub fn len(&self) -> usize {
        self.displacements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.displacements.is_empty()
    }

    /// `W_1 = Σ e^{-X_i}`.
    pub fn w1(&self) -> f64 {
        self.displacements.iter().map(|x| (-x).exp()).sum()
    }
}

/// A value of `m(θ)` that may be exact, estimated or infinite.
#[derive(Debug, Clone, PartialEq)]
pub enum ExtendedEstimate {
    Finite { value: f64, stderr: f64, exact: bool },
    Infinite { checkpoints: Vec<(usize, f64)> },
}

impl ExtendedEstimate {
    pub fn value(&self) -> f64 {
        match self {
            ExtendedEstimate::Finite { value, .. } => *value,
            ExtendedEstimate::Infinite { .. } => f64::INFINITY,
        }
    }
}

impl OffspringModel {
    pub fn new(kind: OffspringKind) -> Result<Self> {
        let model = OffspringModel { kind, max_children: DEFAULT_MAX_CHILDREN };
        model.validate()?;
        Ok(model)
    }

    pub fn galton_watson(count: CountLaw) -> Result<Self> {
        Self::new(OffspringKind::GaltonWatson(count))
    }

    pub fn independent(count: CountLaw, displacement: RealLaw) -> Result<Self> {
        Self::new(OffspringKind::Independent { count, displacement })
    }

    pub fn lattice(entries: Vec<LatticeEntry>) -> Result<Self> {
        Self::new(OffspringKind::Lattice(entries))
    }

    pub fn custom(model: CustomModel) -> Result<Self> {
        Self::new(OffspringKind::Custom(model))
    }

    pub fn with_max_children(mut self, cap: usize) -> Self {
        self.max_children = cap;
        self
    }

    fn validate(&self) -> Result<()> {
        if let OffspringKind::Lattice(entries) = &self.kind {
            if entries.is_empty() {
                return Err(Error::InvalidParameter("lattice model needs at least one entry".into()));
            }
            if entries.iter().any(|e| !e.displacement.is_finite() || !(e.mean_count.is_finite() && e.mean_count >= 0.0)) {
                return Err(Error::InvalidParameter("lattice entries need finite displacements and non-negative mean counts".into()));
            }
        }
        Ok(())
    }

    pub fn is_custom(&self) -> bool {
        matches!(self.kind, OffspringKind::Custom(_))
    }

    /// `E J`, when it is available without simulation.
    pub fn mean_children(&self) -> Option<f64> {
        match &self.kind {
            OffspringKind::GaltonWatson(count) | OffspringKind::Independent { count, .. } => Some(count.mean()),
            OffspringKind::Lattice(entries) => Some(entries.iter().map(|e| e.mean_count).sum()),
            OffspringKind::Custom(c) => c.transform.as_ref().map(|m| m(0.0)),
        }
    }

    pub fn prob_no_children(&self) -> Option<f64> {
        match &self.kind {
            OffspringKind::GaltonWatson(count) | OffspringKind::Independent { count, .. } => Some(count.prob_zero()),
            OffspringKind::Lattice(entries) => Some(entries.iter().map(|e| if e.mean_count >= 1.0 { 0.0 } else { 1.0 - e.mean_count }).product()),
            OffspringKind::Custom(_) => None,
        }
    }

    /// Supremum of `{θ >= 0 : m(θ) < ∞}`.
    pub fn right_edge(&self) -> f64 {
        match &self.kind {
            OffspringKind::Independent { displacement, .. } => displacement.right_edge(),
            OffspringKind::Custom(c) => c.right_edge,
            _ => f64::INFINITY,
        }
    }

    pub fn has_closed_form(&self) -> bool {
        !matches!(&self.kind, OffspringKind::Custom(c) if c.transform.is_none())
    }

    /// Closed-form `m(θ)`, or `None` for a custom model without one.
    pub fn exact_intensity(&self, theta: f64) -> Option<f64> {
        let v = match &self.kind {
            OffspringKind::GaltonWatson(count) => count.mean().powf(1.0 - theta),
            OffspringKind::Independent { count, displacement } => {
                let m = count.mean();
                if m == 0.0 {
                    0.0
                } else {
                    m * displacement.laplace(theta)
                }
            }
            OffspringKind::Lattice(entries) => entries.iter().map(|e| e.mean_count * (-theta * e.displacement).exp()).sum(),
            OffspringKind::Custom(c) => c.transform.as_ref()?(theta),
        };
        Some(if v.is_nan() { f64::INFINITY } else { v })
    }

    /// Closed-form derivative of `m`.
    pub fn exact_intensity_derivative(&self, theta: f64) -> Option<f64> {
        match &self.kind {
            OffspringKind::GaltonWatson(count) => {
                let m = count.mean();
                Some(-m.ln() * m.powf(1.0 - theta))
            }
            OffspringKind::Independent { count, displacement } => Some(count.mean() * displacement.laplace_derivative(theta)),
            OffspringKind::Lattice(entries) => {
                Some(entries.iter().map(|e| -e.displacement * e.mean_count * (-theta * e.displacement).exp()).sum())
            }
            OffspringKind::Custom(c) => c.derivative.as_ref().map(|d| d(theta)),
        }
    }

    /// `m(θ) = E Σ e^{-θ X_i}`: exact when a closed form exists, otherwise a
    /// Monte Carlo estimate that reports suspected divergence.
    pub fn intensity_laplace(&self, theta: f64, mc: McOptions) -> Result<ExtendedEstimate> {
        if !(theta >= 0.0) {
            return Err(Error::InvalidParameter(format!("θ must be non-negative, got {theta}")));
        }
        if let Some(value) = self.exact_intensity(theta) {
            return Ok(if value.is_finite() {
                ExtendedEstimate::Finite { value, stderr: 0.0, exact: true }
            } else {
                ExtendedEstimate::Infinite { checkpoints: Vec::new() }
            });
        }
        self.intensity_monte_carlo(theta, mc)
    }

    /// Monte Carlo `m(θ)` regardless of closed forms.
    pub fn intensity_monte_carlo(&self, theta: f64, mc: McOptions) -> Result<ExtendedEstimate> {
        self.check_sampler_cap(mc.seed)?;
        let out = doubling_mean(mc, |rng| {
            let mut buf = Vec::new();
            match self.sample_into(rng, &mut buf) {
                Ok(()) => buf.iter().map(|x| (-theta * x).exp()).sum(),
                Err(_) => f64::INFINITY,
            }
        });
        Ok(match out {
            McOutcome::Stable { mean, stderr, .. } => ExtendedEstimate::Finite { value: mean, stderr, exact: false },
            McOutcome::SuspectedInfinite { checkpoints } => ExtendedEstimate::Infinite { checkpoints },
        })
    }

    // Surfaces a cap violation as an error before it gets folded into a mean.
    fn check_sampler_cap(&self, seed: Seed) -> Result<()> {
        if self.is_custom() {
            let mut rng = seed.derive(u64::MAX).rng();
            let mut buf = Vec::new();
            for _ in 0..16 {
                self.sample_into(&mut rng, &mut buf)?;
            }
        }
        Ok(())
    }

    /// Draws one configuration into `buf`, replacing its contents.
    pub fn sample_into(&self, rng: &mut SimRng, buf: &mut Vec<f64>) -> Result<()> {
        buf.clear();
        match &self.kind {
            OffspringKind::GaltonWatson(count) => {
                let j = self.checked(count.sample(rng))?;
                let x = count.mean().ln();
                buf.extend(std::iter::repeat_n(x, j));
            }
            OffspringKind::Independent { count, displacement } => {
                let j = self.checked(count.sample(rng))?;
                buf.extend((0..j).map(|_| displacement.sample(rng)));
            }
            OffspringKind::Lattice(entries) => {
                for e in entries {
                    let whole = e.mean_count.floor();
                    let mut k = whole as u64;
                    if rng.random::<f64>() < e.mean_count - whole {
                        k += 1;
                    }
                    buf.extend(std::iter::repeat_n(e.displacement, k as usize));
                }
                self.checked(buf.len() as u64)?;
            }
            OffspringKind::Custom(c) => {
                let xs = (c.sampler)(rng);
                self.checked(xs.len() as u64)?;
                buf.extend(xs);
            }
        }
        Ok(())
    }

    fn checked(&self, j: u64) -> Result<usize> {
        if j > self.max_children as u64 {
            return Err(Error::CapExceeded { got: j.min(usize::MAX as u64) as usize, cap: self.max_children });
        }
        Ok(j as usize)
    }

    pub fn sample(&self, rng: &mut SimRng) -> Result<PointConfiguration> {
        let mut displacements = Vec::new();
        self.sample_into(rng, &mut displacements)?;
        Ok(PointConfiguration { displacements })
    }

    /// One configuration drawn from a generator seeded by `seed`.
    pub fn sample_offspring(&self, seed: Seed) -> Result<PointConfiguration> {
        self.sample(&mut seed.rng())
    }

    /// The model with displacements mapped by `X -> γ X + log m(γ)`, which has
    /// `m(1) = 1`. Requires a closed-form transform.
    pub fn canonicalize(&self, gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidParameter(format!("γ must be positive, got {gamma}")));
        }
        let value = self.exact_intensity(gamma).ok_or(Error::TransformUnavailable)?;
        self.canonicalize_by(gamma, value)
    }

    /// As [`OffspringModel::canonicalize`], estimating `m(γ)` by Monte Carlo
    /// when no closed form exists. The result is canonical only up to the
    /// Monte Carlo error of that estimate.
    pub fn canonicalize_with(&self, gamma: f64, mc: McOptions) -> Result<Self> {
        if self.has_closed_form() {
            return self.canonicalize(gamma);
        }
        match self.intensity_laplace(gamma, mc)? {
            ExtendedEstimate::Finite { value, .. } => self.canonicalize_by(gamma, value),
            ExtendedEstimate::Infinite { .. } => Err(Error::NotCanonicalizable { gamma, value: f64::INFINITY }),
        }
    }

    fn canonicalize_by(&self, gamma: f64, value: f64) -> Result<Self> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::NotCanonicalizable { gamma, value });
        }
        let shift = value.ln();
        let kind = match &self.kind {
            // Already canonical for every γ: γ log m + log m^{1-γ} = log m.
            OffspringKind::GaltonWatson(count) => OffspringKind::GaltonWatson(count.clone()),
            OffspringKind::Independent { count, displacement } => {
                OffspringKind::Independent { count: count.clone(), displacement: displacement.affine(gamma, shift)? }
            }
            OffspringKind::Lattice(entries) => OffspringKind::Lattice(
                entries
                    .iter()
                    .map(|e| LatticeEntry { displacement: gamma * e.displacement + shift, mean_count: e.mean_count })
                    .collect(),
            ),
            OffspringKind::Custom(c) => {
                let sampler = c.sampler.clone();
                let transform = c.transform.clone();
                let derivative = c.derivative.clone();
                OffspringKind::Custom(CustomModel {
                    name: format!("{} (canonical)", c.name),
                    sampler: Arc::new(move |rng| sampler(rng).into_iter().map(|x| gamma * x + shift).collect()),
                    transform: transform.clone().map(|m| -> Transform { Arc::new(move |t| m(gamma * t) * (-t * shift).exp()) }),
                    derivative: match (transform, derivative) {
                        (Some(m), Some(d)) => Some(Arc::new(move |t| {
                            (-t * shift).exp() * (gamma * d(gamma * t) - shift * m(gamma * t))
                        })),
                        _ => None,
                    },
                    right_edge: c.right_edge / gamma,
                    w1_bound: None,
                })
            }
        };
        Ok(OffspringModel { kind, max_children: self.max_children })
    }

    /// Checks `|m(1) - 1| <= CANONICAL_TOL` against the closed form.
    pub fn require_canonical(&self) -> Result<()> {
        match self.exact_intensity(1.0) {
            Some(v) if (v - 1.0).abs() <= CANONICAL_TOL => Ok(()),
            Some(v) => Err(Error::NotCanonical { value: v }),
            None => Err(Error::TransformUnavailable),
        }
    }

    /// Supercriticality `E J > 1`: analytic for parametric kinds, a one-sided
    /// 4-standard-error Monte Carlo bound for custom models without a closed
    /// form.
    pub fn check_invariants(&self, mc: McOptions) -> Result<()> {
        let mean = match self.mean_children() {
            Some(m) => m,
            None => match self.intensity_laplace(0.0, mc)? {
                ExtendedEstimate::Finite { value, stderr, .. } => {
                    if value - 4.0 * stderr <= 1.0 {
                        return Err(Error::InvalidParameter(format!(
                            "model is not clearly supercritical: E J = {value} ± {stderr}"
                        )));
                    }
                    value
                }
                ExtendedEstimate::Infinite { .. } => f64::INFINITY,
            },
        };
        if !(mean > 1.0) {
            return Err(Error::InvalidParameter(format!("model is not supercritical: E J = {mean}")));
        }
        Ok(())
    }

    /// The law of `W_1` as `(value, probability)` atoms when it is a finite
    /// enumerable distribution.
    pub fn w1_atoms(&self) -> Option<Vec<(f64, f64)>> {
        let mut atoms = match &self.kind {
            OffspringKind::GaltonWatson(count) => {
                let m = count.mean();
                count.finite_support()?.into_iter().map(|(j, p)| (j as f64 / m, p)).collect::<Vec<_>>()
            }
            OffspringKind::Independent { count, displacement: RealLaw::Point(c) } => {
                let w = (-c).exp();
                count.finite_support()?.into_iter().map(|(j, p)| (j as f64 * w, p)).collect()
            }
            OffspringKind::Lattice(entries) if entries.len() <= MAX_ENUMERATED_ENTRIES => {
                let mut atoms = vec![(0.0, 1.0)];
                for e in entries {
                    let whole = e.mean_count.floor();
                    let frac = e.mean_count - whole;
                    let w = (-e.displacement).exp();
                    let mut next = Vec::with_capacity(atoms.len() * 2);
                    for (v, p) in &atoms {
                        next.push((v + whole * w, p * (1.0 - frac)));
                        if frac > 0.0 {
                            next.push((v + (whole + 1.0) * w, p * frac));
                        }
                    }
                    atoms = next;
                }
                atoms
            }
            _ => return None,
        };
        atoms.retain(|(_, p)| *p > 0.0);
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (v, p) in atoms {
            match merged.last_mut() {
                Some(last) if (last.0 - v).abs() <= 1e-15 * v.abs().max(1.0) => last.1 += p,
                _ => merged.push((v, p)),
            }
        }
        Some(merged)
    }

    /// An almost-sure upper bound on `W_1`, when one is known.
    pub fn w1_sup(&self) -> Option<f64> {
        if let Some(atoms) = self.w1_atoms() {
            return atoms.last().map(|(v, _)| *v);
        }
        match &self.kind {
            OffspringKind::Independent { count, displacement } => {
                let lo = displacement.min_support();
                Some(count.max()? as f64 * (-lo).exp()).filter(|v| v.is_finite())
            }
            OffspringKind::Custom(c) => c.w1_bound,
            _ => None,
        }
    }

    /// `E W_1^ϑ`: exact for enumerable `W_1`, otherwise a Monte Carlo estimate
    /// with `budget` draws subject to the divergence heuristic.
    pub fn w1_moment(&self, theta: f64, budget: usize, seed: Seed) -> Result<McOutcome> {
        if !(theta > 1.0 && theta <= 2.0) {
            return Err(Error::InvalidParameter(format!("moment order must lie in (1, 2], got {theta}")));
        }
        if budget < 1000 {
            return Err(Error::InvalidParameter(format!("moment budget must be at least 1000, got {budget}")));
        }
        match self.exact_intensity(1.0) {
            Some(v) if (v - 1.0).abs() > CANONICAL_TOL => return Err(Error::NotCanonical { value: v }),
            Some(_) => {}
            None => {
                if let ExtendedEstimate::Finite { value, stderr, .. } = self.intensity_laplace(1.0, McOptions::new(budget, seed.derive(1)))? {
                    if (value - 1.0).abs() > 4.0 * stderr + CANONICAL_TOL {
                        return Err(Error::NotCanonical { value });
                    }
                }
            }
        }
        if let Some(atoms) = self.w1_atoms() {
            let mean = atoms.iter().map(|(v, p)| p * v.powf(theta)).sum();
            return Ok(McOutcome::Stable { mean, stderr: 0.0, samples: 0 });
        }
        self.check_sampler_cap(seed)?;
        Ok(doubling_mean(McOptions::new(budget, seed), |rng| {
            let mut buf = Vec::new();
            match self.sample_into(rng, &mut buf) {
                Ok(()) => buf.iter().map(|x| (-x).exp()).sum::<f64>().powf(theta),
                Err(_) => f64::INFINITY,
            }
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::Moments;

    fn gw(count: CountLaw) -> OffspringModel {
        OffspringModel::galton_watson(count).unwrap()
    }

    #[test]
    fn galton_watson_children_sit_at_log_mean() {
        let conf = gw(CountLaw::Fixed(2)).sample_offspring(Seed(5)).unwrap();
        assert_eq!(conf.displacements, vec![2f64.ln(); 2]);
        assert!((conf.w1() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn trivial_configurations() {
        assert!(gw(CountLaw::Fixed(0)).sample_offspring(Seed(1)).unwrap().is_empty());
        let m = OffspringModel::independent(CountLaw::Fixed(3), RealLaw::Point(0.7)).unwrap();
        assert_eq!(m.sample_offspring(Seed(2)).unwrap().displacements, vec![0.7; 3]);
        let lat = OffspringModel::lattice(vec![LatticeEntry { displacement: 0.0, mean_count: 3.0 }]).unwrap();
        assert_eq!(lat.sample_offspring(Seed(3)).unwrap().len(), 3);
        assert_eq!(lat.exact_intensity(5.0), Some(3.0));
    }

    #[test]
    fn galton_watson_transform() {
        let m = gw(CountLaw::Fixed(2));
        assert_eq!(m.exact_intensity(1.0), Some(1.0));
        assert!((m.exact_intensity(2.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((m.exact_intensity_derivative(2.0).unwrap() + 2f64.ln() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn gaussian_model_canonicalizes_exactly() {
        let m = OffspringModel::independent(CountLaw::Poisson(2.0), RealLaw::normal(0.3, 0.8).unwrap()).unwrap();
        for gamma in [0.5, 1.0, 1.7] {
            let c = m.canonicalize(gamma).unwrap();
            let OffspringKind::Independent { displacement: RealLaw::Normal { mean, sd }, .. } = c.kind else {
                panic!("kind changed")
            };
            // 2 e^{-μ' + σ'^2 / 2} written out by hand
            let direct = 2.0 * (-mean + 0.5 * sd * sd).exp();
            assert!((direct - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn custom_cap_is_enforced() {
        let m = OffspringModel::custom(CustomModel {
            name: "burst".into(),
            sampler: Arc::new(|_| vec![0.0; 20]),
            transform: None,
            derivative: None,
            right_edge: f64::INFINITY,
            w1_bound: None,
        })
        .unwrap()
        .with_max_children(10);
        assert!(matches!(m.sample_offspring(Seed(1)), Err(Error::CapExceeded { got: 20, cap: 10 })));
    }

    #[test]
    fn w1_moment_by_enumeration() {
        let m = gw(CountLaw::uniform(1, 3).unwrap());
        let want = (0.5f64.powf(1.5) + 1.0 + 1.5f64.powf(1.5)) / 3.0;
        let got = m.w1_moment(1.5, 1000, Seed(1)).unwrap().mean().unwrap();
        assert!((got - want).abs() < 1e-14);
        assert_eq!(gw(CountLaw::Fixed(2)).w1_moment(1.5, 1000, Seed(1)).unwrap().mean(), Some(1.0));
    }

    #[test]
    fn w1_moment_rejects_non_canonical() {
        let m = OffspringModel::independent(CountLaw::Fixed(3), RealLaw::Point(0.0)).unwrap();
        assert!(matches!(m.w1_moment(1.5, 1000, Seed(1)), Err(Error::NotCanonical { .. })));
    }

    #[test]
    fn w1_moment_monte_carlo_respects_bound() {
        let m = OffspringModel::independent(CountLaw::uniform(1, 3).unwrap(), RealLaw::uniform(0.0, 1.0).unwrap())
            .unwrap()
            .canonicalize(1.0)
            .unwrap();
        let sup = m.w1_sup().unwrap();
        let est = m.w1_moment(1.5, 20_000, Seed(4)).unwrap().mean().unwrap();
        assert!(est <= sup.powf(1.5));
    }

    #[test]
    fn lattice_w1_atoms_cover_fractional_counts() {
        let m = OffspringModel::lattice(vec![
            LatticeEntry { displacement: 0.0, mean_count: 0.5 },
            LatticeEntry { displacement: 1.0, mean_count: 1.25 },
        ])
        .unwrap();
        let atoms = m.w1_atoms().unwrap();
        let total: f64 = atoms.iter().map(|(_, p)| p).sum();
        let mean: f64 = atoms.iter().map(|(v, p)| v * p).sum();
        assert!((total - 1.0).abs() < 1e-14);
        assert!((mean - m.exact_intensity(1.0).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn sampler_matches_transform() {
        let m = OffspringModel::independent(CountLaw::Poisson(2.0), RealLaw::normal(0.5, 0.5).unwrap()).unwrap();
        let mut rng = Seed(8).rng();
        let mut acc = Moments::new();
        let mut buf = Vec::new();
        for _ in 0..100_000 {
            m.sample_into(&mut rng, &mut buf).unwrap();
            acc.push(buf.iter().map(|x| (-1.5 * x).exp()).sum());
        }
        let want = m.exact_intensity(1.5).unwrap();
        assert!((acc.mean() - want).abs() < 4.0 * acc.stderr());
    }
}
