//! Parametric one-dimensional laws: child counts, displacements and
//! random-walk increments.
//!
//! [`RealLaw`] is closed under the two operations the rest of the crate needs:
//! affine maps `x -> g x + s` (canonicalization, shifting) and exponential
//! tilting `dP' = e^{-k x} dP / L(k)` (change of measure). Every variant has a
//! closed-form Laplace transform `L(t) = E e^{-t X}` and its derivative.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Geometric, Poisson, StandardNormal};

use crate::error::{Error, Result};
use crate::numeric::common_span;
use crate::seed::SimRng;

/// Denominator bound used when rationalizing support differences.
pub const SPAN_MAX_DENOMINATOR: u64 = 1_000_000;

/// Law of the number of children `J`.
#[derive(Debug, Clone, PartialEq)]
pub enum CountLaw {
    Fixed(u64),
    Poisson(f64),
    /// Uniform on `lo..=hi`.
    Uniform { lo: u64, hi: u64 },
    /// `P(J = k) = p (1 - p)^k`, `k >= 0`.
    Geometric(f64),
    /// `P(J = k) = probs[k]`.
    Categorical(Vec<f64>),
}

impl CountLaw {
    pub fn poisson(mean: f64) -> Result<Self> {
        if !(mean.is_finite() && mean > 0.0) {
            return Err(Error::InvalidParameter(format!("poisson mean must be positive, got {mean}")));
        }
        Ok(CountLaw::Poisson(mean))
    }

    pub fn uniform(lo: u64, hi: u64) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidParameter(format!("uniform count law needs lo <= hi, got {lo} > {hi}")));
        }
        Ok(CountLaw::Uniform { lo, hi })
    }

    pub fn geometric(p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidParameter(format!("geometric parameter must lie in (0, 1], got {p}")));
        }
        Ok(CountLaw::Geometric(p))
    }

    pub fn categorical(probs: Vec<f64>) -> Result<Self> {
        let total: f64 = probs.iter().sum();
        if probs.is_empty() || probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) || total <= 0.0 {
            return Err(Error::InvalidParameter("categorical count law needs non-negative weights with positive sum".into()));
        }
        Ok(CountLaw::Categorical(probs.iter().map(|p| p / total).collect()))
    }

    pub fn mean(&self) -> f64 {
        match self {
            CountLaw::Fixed(k) => *k as f64,
            CountLaw::Poisson(l) => *l,
            CountLaw::Uniform { lo, hi } => 0.5 * (*lo as f64 + *hi as f64),
            CountLaw::Geometric(p) => (1.0 - p) / p,
            CountLaw::Categorical(probs) => probs.iter().enumerate().map(|(k, p)| k as f64 * p).sum(),
        }
    }

    pub fn prob_zero(&self) -> f64 {
        match self {
            CountLaw::Fixed(k) => (*k == 0) as u8 as f64,
            CountLaw::Poisson(l) => (-l).exp(),
            CountLaw::Uniform { lo, hi } => {
                if *lo == 0 {
                    1.0 / (hi - lo + 1) as f64
                } else {
                    0.0
                }
            }
            CountLaw::Geometric(p) => *p,
            CountLaw::Categorical(probs) => probs[0],
        }
    }

    /// The full probability mass function when the support is finite.
    pub fn finite_support(&self) -> Option<Vec<(u64, f64)>> {
        match self {
            CountLaw::Fixed(k) => Some(vec![(*k, 1.0)]),
            CountLaw::Uniform { lo, hi } => {
                let p = 1.0 / (hi - lo + 1) as f64;
                Some((*lo..=*hi).map(|k| (k, p)).collect())
            }
            CountLaw::Categorical(probs) => {
                Some(probs.iter().enumerate().filter(|(_, p)| **p > 0.0).map(|(k, p)| (k as u64, *p)).collect())
            }
            CountLaw::Poisson(_) | CountLaw::Geometric(_) => None,
        }
    }

    pub fn max(&self) -> Option<u64> {
        self.finite_support().and_then(|s| s.last().map(|(k, _)| *k))
    }

    pub fn sample(&self, rng: &mut SimRng) -> u64 {
        match self {
            CountLaw::Fixed(k) => *k,
            CountLaw::Poisson(l) => Poisson::new(*l).expect("validated mean").sample(rng) as u64,
            CountLaw::Uniform { lo, hi } => rng.random_range(*lo..=*hi),
            CountLaw::Geometric(p) => {
                if *p >= 1.0 {
                    0
                } else {
                    Geometric::new(*p).expect("validated parameter").sample(rng)
                }
            }
            CountLaw::Categorical(probs) => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (k, p) in probs.iter().enumerate() {
                    acc += p;
                    if u < acc {
                        return k as u64;
                    }
                }
                (probs.len() - 1) as u64
            }
        }
    }
}

/// Where a law puts mass relative to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignStructure {
    pub has_negative: bool,
    pub has_positive: bool,
    pub zero_mass: f64,
}

/// Lattice structure of a support: `offset + span * Z` with `span` maximal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SupportKind {
    NonArithmetic,
    Arithmetic { span: f64, offset: f64, single_atom: bool },
    Unknown,
}

/// The lattice `span * Z` that carries a zero-delayed walk with the given step
/// support, which is what renewal asymptotics are stated along.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WalkLattice {
    NonArithmetic,
    Lattice(f64),
    Unknown,
}

impl SupportKind {
    pub fn walk_lattice(&self) -> WalkLattice {
        match *self {
            SupportKind::NonArithmetic => WalkLattice::NonArithmetic,
            SupportKind::Unknown => WalkLattice::Unknown,
            SupportKind::Arithmetic { span, offset, .. } => {
                if span <= 0.0 {
                    return WalkLattice::Unknown;
                }
                let rem = offset.rem_euclid(span);
                if rem.min(span - rem) <= 1e-12 * span {
                    return WalkLattice::Lattice(span);
                }
                match common_span(&[span, offset], SPAN_MAX_DENOMINATOR, 1e-9) {
                    Some(l) => WalkLattice::Lattice(l),
                    None => WalkLattice::NonArithmetic,
                }
            }
        }
    }
}

/// A real-valued law with closed-form Laplace transform.
#[derive(Debug, Clone, PartialEq)]
pub enum RealLaw {
    Point(f64),
    Normal { mean: f64, sd: f64 },
    /// `shift + scale * E` with `E ~ Exp(1)`; a negative scale gives a left tail
    /// and a finite right edge `1/|scale|` of the transform's domain.
    ShiftedExp { shift: f64, scale: f64 },
    /// Density proportional to `exp(-tilt * x)` on `[lo, hi]`.
    TiltedUniform { lo: f64, hi: f64, tilt: f64 },
    /// Finitely many atoms `(x, p)`, sorted by `x`, probabilities summing to one.
    Atoms(Vec<(f64, f64)>),
}

// h(s) = int_0^w e^{-s y} dy
fn seg_integral(s: f64, w: f64) -> f64 {
    let sw = s * w;
    if sw.abs() < 1e-8 {
        w * (1.0 - 0.5 * sw)
    } else {
        -(-sw).exp_m1() / s
    }
}

// d/ds log h(s)
fn seg_log_derivative(s: f64, w: f64) -> f64 {
    let sw = s * w;
    if sw.abs() < 1e-5 {
        -0.5 * w + s * w * w / 12.0
    } else {
        w / sw.exp_m1() - 1.0 / s
    }
}

impl RealLaw {
    pub fn point(c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::InvalidParameter(format!("point mass location must be finite, got {c}")));
        }
        Ok(RealLaw::Point(c))
    }

    pub fn normal(mean: f64, sd: f64) -> Result<Self> {
        if !(mean.is_finite() && sd.is_finite() && sd > 0.0) {
            return Err(Error::InvalidParameter(format!("normal law needs finite mean and sd > 0, got ({mean}, {sd})")));
        }
        Ok(RealLaw::Normal { mean, sd })
    }

    pub fn shifted_exp(shift: f64, scale: f64) -> Result<Self> {
        if !(shift.is_finite() && scale.is_finite() && scale != 0.0) {
            return Err(Error::InvalidParameter(format!("shifted exponential needs finite shift and nonzero scale, got ({shift}, {scale})")));
        }
        Ok(RealLaw::ShiftedExp { shift, scale })
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        Self::tilted_uniform(lo, hi, 0.0)
    }

    pub fn tilted_uniform(lo: f64, hi: f64, tilt: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi && tilt.is_finite()) {
            return Err(Error::InvalidParameter(format!("uniform law needs finite lo < hi, got ({lo}, {hi})")));
        }
        Ok(RealLaw::TiltedUniform { lo, hi, tilt })
    }

    /// Normalizes the weights, merges coincident atoms and drops null ones.
    pub fn atoms(entries: &[(f64, f64)]) -> Result<Self> {
        let total: f64 = entries.iter().map(|(_, p)| p).sum();
        if entries.is_empty()
            || total <= 0.0
            || entries.iter().any(|(x, p)| !x.is_finite() || !(p.is_finite() && *p >= 0.0))
        {
            return Err(Error::InvalidParameter("atoms need finite locations and non-negative weights with positive sum".into()));
        }
        let mut atoms: Vec<(f64, f64)> = entries.iter().filter(|(_, p)| *p > 0.0).map(|(x, p)| (*x, p / total)).collect();
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (x, p) in atoms {
            match merged.last_mut() {
                Some(last) if last.0 == x => last.1 += p,
                _ => merged.push((x, p)),
            }
        }
        if merged.len() == 1 {
            return Ok(RealLaw::Point(merged[0].0));
        }
        Ok(RealLaw::Atoms(merged))
    }

    /// `E e^{-t X}`; `+inf` outside the finiteness domain.
    pub fn laplace(&self, t: f64) -> f64 {
        let v = match self {
            RealLaw::Point(c) => (-t * c).exp(),
            RealLaw::Normal { mean, sd } => (-t * mean + 0.5 * t * t * sd * sd).exp(),
            RealLaw::ShiftedExp { shift, scale } => {
                let d = 1.0 + t * scale;
                if d <= 0.0 {
                    f64::INFINITY
                } else {
                    (-t * shift).exp() / d
                }
            }
            RealLaw::TiltedUniform { lo, hi, tilt } => {
                let w = hi - lo;
                (-t * lo).exp() * seg_integral(t + tilt, w) / seg_integral(*tilt, w)
            }
            RealLaw::Atoms(atoms) => atoms.iter().map(|(x, p)| p * (-t * x).exp()).sum(),
        };
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }

    /// Derivative of [`RealLaw::laplace`] in `t`.
    pub fn laplace_derivative(&self, t: f64) -> f64 {
        match self {
            RealLaw::Point(c) => -c * (-t * c).exp(),
            RealLaw::Normal { mean, sd } => (-mean + t * sd * sd) * self.laplace(t),
            RealLaw::ShiftedExp { shift, scale } => {
                let d = 1.0 + t * scale;
                if d <= 0.0 {
                    f64::INFINITY
                } else {
                    self.laplace(t) * (-shift - scale / d)
                }
            }
            RealLaw::TiltedUniform { lo, hi, tilt } => self.laplace(t) * (-lo + seg_log_derivative(t + tilt, hi - lo)),
            RealLaw::Atoms(atoms) => atoms.iter().map(|(x, p)| -x * p * (-t * x).exp()).sum(),
        }
    }

    /// Supremum of `{t >= 0 : L(t) < inf}`; the edge itself is excluded.
    pub fn right_edge(&self) -> f64 {
        match self {
            RealLaw::ShiftedExp { scale, .. } if *scale < 0.0 => -1.0 / scale,
            _ => f64::INFINITY,
        }
    }

    pub fn mean(&self) -> f64 {
        -self.laplace_derivative(0.0)
    }

    pub fn variance(&self) -> f64 {
        match self {
            RealLaw::Point(_) => 0.0,
            RealLaw::Normal { sd, .. } => sd * sd,
            RealLaw::ShiftedExp { scale, .. } => scale * scale,
            RealLaw::TiltedUniform { .. } => {
                // second derivative of log L at 0 by central differences
                let h = 1e-4;
                let f = |t: f64| self.laplace(t).ln();
                (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h)
            }
            RealLaw::Atoms(atoms) => {
                let m = self.mean();
                atoms.iter().map(|(x, p)| p * (x - m) * (x - m)).sum()
            }
        }
    }

    /// The law of `g X + s`, `g > 0`.
    pub fn affine(&self, g: f64, s: f64) -> Result<Self> {
        if !(g.is_finite() && g > 0.0 && s.is_finite()) {
            return Err(Error::InvalidParameter(format!("affine map needs g > 0 and finite s, got ({g}, {s})")));
        }
        Ok(match self {
            RealLaw::Point(c) => RealLaw::Point(g * c + s),
            RealLaw::Normal { mean, sd } => RealLaw::Normal { mean: g * mean + s, sd: g * sd },
            RealLaw::ShiftedExp { shift, scale } => RealLaw::ShiftedExp { shift: g * shift + s, scale: g * scale },
            RealLaw::TiltedUniform { lo, hi, tilt } => RealLaw::TiltedUniform { lo: g * lo + s, hi: g * hi + s, tilt: tilt / g },
            RealLaw::Atoms(atoms) => RealLaw::Atoms(atoms.iter().map(|(x, p)| (g * x + s, *p)).collect()),
        })
    }

    /// The law with density `e^{-k x} / L(k)` against this one.
    pub fn tilt(&self, k: f64) -> Result<Self> {
        let lk = self.laplace(k);
        if !lk.is_finite() {
            return Err(Error::OutsideDomain { theta: k });
        }
        Ok(match self {
            RealLaw::Point(c) => RealLaw::Point(*c),
            RealLaw::Normal { mean, sd } => RealLaw::Normal { mean: mean - k * sd * sd, sd: *sd },
            RealLaw::ShiftedExp { shift, scale } => RealLaw::ShiftedExp { shift: *shift, scale: scale / (1.0 + k * scale) },
            RealLaw::TiltedUniform { lo, hi, tilt } => RealLaw::TiltedUniform { lo: *lo, hi: *hi, tilt: tilt + k },
            RealLaw::Atoms(atoms) => {
                let top = atoms.iter().map(|(x, _)| -k * x).fold(f64::NEG_INFINITY, f64::max);
                let w: Vec<(f64, f64)> = atoms.iter().map(|(x, p)| (*x, p * (-k * x - top).exp())).collect();
                RealLaw::atoms(&w)?
            }
        })
    }

    pub fn sample(&self, rng: &mut SimRng) -> f64 {
        match self {
            RealLaw::Point(c) => *c,
            RealLaw::Normal { mean, sd } => {
                let z: f64 = StandardNormal.sample(rng);
                mean + sd * z
            }
            RealLaw::ShiftedExp { shift, scale } => {
                let e: f64 = Exp1.sample(rng);
                shift + scale * e
            }
            RealLaw::TiltedUniform { lo, hi, tilt } => {
                let u: f64 = rng.random();
                let w = hi - lo;
                if (tilt * w).abs() < 1e-12 {
                    lo + u * w
                } else {
                    (lo - (u * (-tilt * w).exp_m1()).ln_1p() / tilt).clamp(*lo, *hi)
                }
            }
            RealLaw::Atoms(atoms) => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (x, p) in atoms {
                    acc += p;
                    if u < acc {
                        return *x;
                    }
                }
                atoms[atoms.len() - 1].0
            }
        }
    }

    pub fn min_support(&self) -> f64 {
        match self {
            RealLaw::Point(c) => *c,
            RealLaw::Normal { .. } => f64::NEG_INFINITY,
            RealLaw::ShiftedExp { shift, scale } => {
                if *scale > 0.0 {
                    *shift
                } else {
                    f64::NEG_INFINITY
                }
            }
            RealLaw::TiltedUniform { lo, .. } => *lo,
            RealLaw::Atoms(atoms) => atoms[0].0,
        }
    }

    pub fn max_support(&self) -> f64 {
        match self {
            RealLaw::Point(c) => *c,
            RealLaw::Normal { .. } => f64::INFINITY,
            RealLaw::ShiftedExp { shift, scale } => {
                if *scale > 0.0 {
                    f64::INFINITY
                } else {
                    *shift
                }
            }
            RealLaw::TiltedUniform { hi, .. } => *hi,
            RealLaw::Atoms(atoms) => atoms[atoms.len() - 1].0,
        }
    }

    /// Probability of the single point `x`.
    pub fn atom_mass(&self, x: f64) -> f64 {
        match self {
            RealLaw::Point(c) => (*c == x) as u8 as f64,
            RealLaw::Atoms(atoms) => atoms.iter().filter(|(y, _)| *y == x).map(|(_, p)| *p).sum(),
            _ => 0.0,
        }
    }

    pub fn signs(&self) -> SignStructure {
        SignStructure {
            has_negative: self.min_support() < 0.0,
            has_positive: self.max_support() > 0.0,
            zero_mass: self.atom_mass(0.0),
        }
    }

    pub fn support_kind(&self) -> SupportKind {
        match self {
            RealLaw::Point(c) if *c != 0.0 => SupportKind::Arithmetic { span: c.abs(), offset: *c, single_atom: true },
            RealLaw::Point(_) => SupportKind::Unknown,
            RealLaw::Atoms(atoms) => {
                let x0 = atoms[0].0;
                let diffs: Vec<f64> = atoms[1..].iter().map(|(x, _)| x - x0).collect();
                match common_span(&diffs, SPAN_MAX_DENOMINATOR, 1e-9) {
                    Some(span) => SupportKind::Arithmetic { span, offset: x0, single_atom: false },
                    None => SupportKind::NonArithmetic,
                }
            }
            _ => SupportKind::NonArithmetic,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::Seed;
    use crate::stats::Moments;

    fn laws() -> Vec<RealLaw> {
        vec![
            RealLaw::point(0.7).unwrap(),
            RealLaw::normal(0.4, 1.3).unwrap(),
            RealLaw::shifted_exp(-0.5, 2.0).unwrap(),
            RealLaw::shifted_exp(1.0, -0.5).unwrap(),
            RealLaw::uniform(-1.0, 2.0).unwrap(),
            RealLaw::tilted_uniform(-1.0, 2.0, 0.8).unwrap(),
            RealLaw::atoms(&[(-1.0, 1.0), (2.0, 2.0)]).unwrap(),
        ]
    }

    #[test]
    fn transform_is_one_at_zero() {
        for law in laws() {
            assert!((law.laplace(0.0) - 1.0).abs() < 1e-12, "{law:?}");
        }
    }

    #[test]
    fn derivative_matches_central_difference() {
        for law in laws() {
            for t in [0.1, 0.5, 1.2] {
                if !law.laplace(t + 1e-4).is_finite() {
                    continue;
                }
                let h = 1e-5;
                let fd = (law.laplace(t + h) - law.laplace(t - h)) / (2.0 * h);
                let d = law.laplace_derivative(t);
                assert!((fd - d).abs() <= 1e-6 * d.abs().max(1.0), "{law:?} at {t}: {fd} vs {d}");
            }
        }
    }

    #[test]
    fn tilted_transform_is_ratio() {
        for law in laws() {
            let k = 0.3;
            let tilted = law.tilt(k).unwrap();
            for t in [0.0, 0.2, 0.9] {
                let want = law.laplace(k + t) / law.laplace(k);
                if !want.is_finite() {
                    continue;
                }
                assert!((tilted.laplace(t) - want).abs() <= 1e-10 * want, "{law:?}");
            }
        }
    }

    #[test]
    fn affine_transform_identity() {
        for law in laws() {
            let (g, s) = (1.7, -0.4);
            let mapped = law.affine(g, s).unwrap();
            for t in [0.0, 0.15, 0.4] {
                let want = (-t * s).exp() * law.laplace(g * t);
                if !want.is_finite() {
                    continue;
                }
                assert!((mapped.laplace(t) - want).abs() <= 1e-10 * want, "{law:?}");
            }
        }
    }

    #[test]
    fn sample_means_match_transform_derivative() {
        for (i, law) in laws().into_iter().enumerate() {
            let mut rng = Seed(100 + i as u64).rng();
            let m: Moments = (0..200_000).map(|_| law.sample(&mut rng)).collect();
            let want = law.mean();
            assert!((m.mean() - want).abs() <= 5.0 * m.stderr() + 1e-12, "{law:?}: {} vs {want}", m.mean());
        }
    }

    #[test]
    fn right_edge_only_for_left_tailed_exponential() {
        assert_eq!(RealLaw::shifted_exp(1.0, -0.5).unwrap().right_edge(), 2.0);
        assert!(RealLaw::shifted_exp(1.0, -0.5).unwrap().laplace(2.0).is_infinite());
        assert!(RealLaw::normal(0.0, 1.0).unwrap().right_edge().is_infinite());
    }

    #[test]
    fn atoms_merge_and_collapse() {
        assert_eq!(RealLaw::atoms(&[(1.0, 1.0), (1.0, 3.0)]).unwrap(), RealLaw::Point(1.0));
        let two = RealLaw::atoms(&[(2.0, 2.0), (-1.0, 1.0)]).unwrap();
        assert_eq!(two, RealLaw::Atoms(vec![(-1.0, 1.0 / 3.0), (2.0, 2.0 / 3.0)]));
    }

    #[test]
    fn support_kinds() {
        let two = RealLaw::atoms(&[(-1.0, 1.0), (2.0, 2.0)]).unwrap();
        assert_eq!(two.support_kind(), SupportKind::Arithmetic { span: 3.0, offset: -1.0, single_atom: false });
        assert_eq!(two.support_kind().walk_lattice(), WalkLattice::Lattice(1.0));
        assert_eq!(RealLaw::normal(0.0, 1.0).unwrap().support_kind(), SupportKind::NonArithmetic);
        let c = RealLaw::point(0.5).unwrap();
        assert_eq!(c.support_kind(), SupportKind::Arithmetic { span: 0.5, offset: 0.5, single_atom: true });
        assert_eq!(c.support_kind().walk_lattice(), WalkLattice::Lattice(0.5));
    }

    #[test]
    fn count_law_moments() {
        assert_eq!(CountLaw::uniform(0, 4).unwrap().mean(), 2.0);
        assert_eq!(CountLaw::geometric(0.25).unwrap().mean(), 3.0);
        let cat = CountLaw::categorical(vec![1.0, 1.0, 2.0]).unwrap();
        assert_eq!(cat.mean(), 1.25);
        assert_eq!(cat.max(), Some(2));
        let mut rng = Seed(3).rng();
        let m: Moments = (0..100_000).map(|_| CountLaw::Poisson(2.0).sample(&mut rng) as f64).collect();
        assert!((m.mean() - 2.0).abs() < 5.0 * m.stderr());
    }
}
