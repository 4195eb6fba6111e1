//! Scalar root finding, minimization and lattice arithmetic.

/// Bisection on a bracket where `f(lo)` and `f(hi)` have opposite signs
/// (`f(hi) <= 0 < f(lo)` or the reverse). Stops when the bracket is narrower
/// than `tol` or after `max_iter` halvings.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64, max_iter: usize) -> f64 {
    let lo_positive = f(lo) > 0.0;
    for _ in 0..max_iter {
        if (hi - lo).abs() <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section search for the minimum of a unimodal function on `[lo, hi]`.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..300 {
        if hi - lo <= tol {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    let mid = 0.5 * (lo + hi);
    // The endpoints are never evaluated by the interior probes.
    [(lo, f(lo)), (mid, f(mid)), (hi, f(hi))]
        .into_iter()
        .filter(|(_, v)| !v.is_nan())
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map_or(mid, |(x, _)| x)
}

/// Best rational approximation `p/q` of `x` with `q <= max_den`, or `None` if
/// none lies within `tol` of `x`.
pub fn rationalize(x: f64, max_den: u64, tol: f64) -> Option<(i64, u64)> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            return None;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (x - h1 as f64 / k1 as f64).abs() <= tol {
            return Some((h1 as i64, k1 as u64));
        }
        let frac = r - a;
        if frac.abs() < 1e-300 {
            return None;
        }
        r = 1.0 / frac;
    }
    None
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Largest `span` such that every value is an integer multiple of it, using
/// continued-fraction rationalization against the smallest magnitude.
/// Returns `None` when some ratio has no rational form with denominator at
/// most `max_den`.
pub fn common_span(values: &[f64], max_den: u64, rel_tol: f64) -> Option<f64> {
    let mags: Vec<f64> = values.iter().map(|v| v.abs()).filter(|v| *v > 0.0).collect();
    let base = mags.iter().copied().fold(f64::INFINITY, f64::min);
    if !base.is_finite() {
        return None;
    }
    let mut ratios = Vec::with_capacity(mags.len());
    let mut lcm: u64 = 1;
    for &m in &mags {
        let r = m / base;
        let (p, q) = rationalize(r, max_den, rel_tol * r.max(1.0))?;
        lcm = lcm / gcd(lcm, q) * q;
        if lcm > max_den {
            return None;
        }
        ratios.push((p, q));
    }
    let mut g = 0u64;
    for (p, q) in ratios {
        let n = (p as u64) * (lcm / q);
        g = gcd(g, n);
    }
    Some(base * g as f64 / lcm as f64)
}

/// Ordinary least-squares slope of `ys` against `xs`.
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14, 200);
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let x = golden_section(|x| (x - 0.3) * (x - 0.3), -1.0, 2.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-7);
    }

    #[test]
    fn golden_section_returns_endpoint_minimum() {
        let x = golden_section(|x| -x, 1.0, 2.0, 1e-12);
        assert_eq!(x, 2.0);
    }

    #[test]
    fn rationalize_simple_fractions() {
        assert_eq!(rationalize(0.75, 100, 1e-12), Some((3, 4)));
        assert_eq!(rationalize(2.0 / 3.0, 100, 1e-12), Some((2, 3)));
        assert_eq!(rationalize(std::f64::consts::PI, 100, 1e-12), None);
    }

    #[test]
    fn common_span_of_two_point_support() {
        assert!((common_span(&[3.0], 1_000_000, 1e-9).unwrap() - 3.0).abs() < 1e-12);
        assert!((common_span(&[3.0, 1.0], 1_000_000, 1e-9).unwrap() - 1.0).abs() < 1e-12);
        assert!((common_span(&[0.5, 0.75, 1.25], 1_000_000, 1e-9).unwrap() - 0.25).abs() < 1e-12);
        assert!(common_span(&[1.0, 2f64.sqrt()], 1_000_000, 1e-12).is_none());
    }

    #[test]
    fn slope_and_median() {
        assert!((ols_slope(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
