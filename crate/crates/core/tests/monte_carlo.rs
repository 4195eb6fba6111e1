use brw_core::brw::{simulate_ensemble, simulate_observed, SimOptions, W1Tail};
use brw_core::renewal::{classify_finiteness, direct_partial_sums, estimate_v_grid, predict_asymptote, EstimateOptions, Finiteness};
use brw_core::stats::Moments;
use brw_core::{associated_step, CountLaw, OffspringModel, RealLaw, Seed, StepLaw};

fn gaussian_brw() -> OffspringModel {
    OffspringModel::independent(CountLaw::poisson(2.0).unwrap(), RealLaw::normal(2f64.ln() + 0.125, 0.5).unwrap()).unwrap()
}

#[test]
fn additive_martingale_has_unit_mean() {
    let model = OffspringModel::galton_watson(CountLaw::uniform(0, 4).unwrap()).unwrap();
    let tail = W1Tail::exact(&model).unwrap();
    let traces = simulate_ensemble(&model, &tail, SimOptions::new(2f64.ln() / 3.0, 8, 11), 10_000).unwrap();
    for n in [1, 4, 8] {
        let w: Moments = traces.iter().map(|t| t.rows[n].w).collect();
        assert!((w.mean() - 1.0).abs() < 4.0 * w.stderr(), "E W_{n} = {} ± {}", w.mean(), w.stderr());
        let m: Moments = traces.iter().map(|t| t.rows[n].m).collect();
        assert!(m.mean().abs() < 4.0 * m.stderr(), "E M_{n} = {} ± {}", m.mean(), m.stderr());
    }
}

#[test]
fn many_to_one_identity() {
    let model = gaussian_brw();
    model.require_canonical().unwrap();
    let tail = W1Tail::empirical(&model, 20_000, Seed(5)).unwrap();
    let levels = [0.0, 1.0, 2.0, 3.0];
    let mut acc = vec![vec![Moments::new(); levels.len()]; 3];
    for rep in 0..4000u64 {
        simulate_observed(&model, &tail, SimOptions::new(0.1, 3, Seed(17).derive(rep)), |pop| {
            let n = pop.generation;
            if (1..=3).contains(&n) {
                for (j, c) in levels.iter().enumerate() {
                    acc[n - 1][j].push(pop.individuals.iter().filter(|i| i.position <= *c).map(|i| i.weight).sum());
                }
            }
        })
        .unwrap();
    }
    // E Σ_{|u|=n} e^{-S(u)} 1{S(u) <= c} = P(S_n <= c) for the associated walk
    let step = associated_step(&model).unwrap();
    let (mu, sd) = match step.as_parametric().unwrap().clone() {
        RealLaw::Normal { mean, sd } => (mean, sd),
        other => panic!("unexpected associated step {other:?}"),
    };
    for (k, row) in acc.iter().enumerate() {
        let n = (k + 1) as f64;
        for (m, c) in row.iter().zip(levels) {
            let expected = normal_cdf((c - n * mu) / (sd * n.sqrt()));
            assert!(
                (m.mean() - expected).abs() < 4.0 * m.stderr(),
                "n = {n}, c = {c}: {} ± {} vs {expected}",
                m.mean(),
                m.stderr()
            );
        }
    }
}

#[test]
fn infinite_classification_shows_in_partial_sums() {
    let cases = [
        (StepLaw::parametric(RealLaw::atoms(&[(-1.0, 1.0), (1.0, 1.0)]).unwrap()).unwrap(), 0.1),
        (StepLaw::parametric(RealLaw::atoms(&[(-1.0, 1.0), (2.0, 2.0)]).unwrap()).unwrap(), 1.0),
    ];
    for (law, a) in cases {
        assert_eq!(classify_finiteness(&law, a).unwrap().finiteness, Finiteness::InfiniteAll);
        let sums = direct_partial_sums(&law, a, 0.0, 1000, 20_000, Seed(23)).unwrap();
        assert!(sums[1000] > 1e6, "a = {a}: partial sum {}", sums[1000]);
    }
}

#[test]
fn scaled_estimate_settles_near_constant() {
    let a = 0.3;
    let law = StepLaw::parametric(RealLaw::normal(1.0, 1.0).unwrap()).unwrap();
    let pred = predict_asymptote(&law, a).unwrap();
    let xs = [10.0, 12.0, 14.0];
    let est = estimate_v_grid(&law, a, &xs, EstimateOptions::new(200_000, 29)).unwrap();
    let scaled: Vec<f64> = est.iter().map(|e| (-pred.exponent * e.x).exp() * e.value).collect();
    let (lo, hi) = scaled.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &v| (l.min(v), h.max(v)));
    assert!(hi / lo - 1.0 < 0.1, "{scaled:?}");
    assert!((scaled[2] / pred.constant - 1.0).abs() < 0.1, "{} vs {}", scaled[2], pred.constant);
}

// Abramowitz and Stegun 7.1.26, absolute error below 1.5e-7.
fn normal_cdf(z: f64) -> f64 {
    let x = z.abs() / std::f64::consts::SQRT_2;
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let poly = t * (0.254829592 + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
    let erf = 1.0 - poly * (-x * x).exp();
    if z >= 0.0 {
        0.5 * (1.0 + erf)
    } else {
        0.5 * (1.0 - erf)
    }
}
