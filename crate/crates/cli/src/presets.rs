//! Built-in models.

use std::f64::consts::LN_2;

use brw_core::{CountLaw, RealLaw};

use crate::modelfile::{ModelDesc, ModelSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub model: ModelDesc,
    pub default_a: f64,
}

pub fn list_presets() -> Vec<Preset> {
    let p = |name, description, spec, default_a| Preset { name, description, model: ModelDesc::new(spec), default_a };
    vec![
        p(
            "gw-example",
            "Galton-Watson tree, J uniform on {0,...,4} (E J = 2), children at log 2",
            ModelSpec::GaltonWatson(CountLaw::Uniform { lo: 0, hi: 4 }),
            LN_2 / 3.0,
        ),
        p(
            "gaussian-brw",
            "Poisson(2) children at i.i.d. N(log 2 + 1/8, 1/4) displacements (canonical)",
            ModelSpec::Independent {
                count: CountLaw::Poisson(2.0),
                displacement: RealLaw::Normal { mean: LN_2 + 0.125, sd: 0.5 },
            },
            0.1,
        ),
        p(
            "two-point-walk",
            "random walk with steps -1 w.p. 1/3 and 2 w.p. 2/3",
            ModelSpec::Step(RealLaw::Atoms(vec![(-1.0, 1.0 / 3.0), (2.0, 2.0 / 3.0)])),
            0.1,
        ),
        p("deterministic-step", "random walk with steps identically 1", ModelSpec::Step(RealLaw::Point(1.0)), 0.5),
        p(
            "symmetric-walk",
            "simple symmetric random walk with steps +-1",
            ModelSpec::Step(RealLaw::Atoms(vec![(-1.0, 0.5), (1.0, 0.5)])),
            0.1,
        ),
        p(
            "gaussian-walk",
            "random walk with N(1, 1) steps",
            ModelSpec::Step(RealLaw::Normal { mean: 1.0, sd: 1.0 }),
            0.3,
        ),
    ]
}

pub fn find_preset(name: &str) -> Option<Preset> {
    list_presets().into_iter().find(|p| p.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modelfile::Subject;
    use brw_core::renewal::classify_finiteness;
    use brw_core::{McOptions, Seed};

    #[test]
    fn catalogue_has_required_entries() {
        for name in ["gw-example", "gaussian-brw", "two-point-walk", "deterministic-step", "symmetric-walk"] {
            assert!(find_preset(name).is_some(), "{name}");
        }
    }

    #[test]
    fn presets_pass_their_invariants() {
        for p in list_presets() {
            match p.model.build().unwrap() {
                Subject::Branching(m) => {
                    m.require_canonical().unwrap();
                    m.check_invariants(McOptions::new(10_000, Seed(1))).unwrap();
                }
                Subject::Walk(w) => {
                    classify_finiteness(&w, p.default_a).unwrap();
                }
            }
        }
    }

    #[test]
    fn presets_round_trip_through_text() {
        for p in list_presets() {
            assert_eq!(ModelDesc::parse(&p.model.to_text()).unwrap(), p.model, "{}", p.name);
        }
    }
}
