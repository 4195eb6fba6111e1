//! Scenario files: a model (inline or a preset), a rate, a task, budgets and
//! a seed, in the same `key = value` format as model files.
//!
//! ```text
//! name       = example
//! task       = analyze | renewal | brw | verify
//! preset     = gw-example          (or inline model keys)
//! a          = 0.2310490601866484  (defaults to the preset's rate)
//! seed       = 7                   (required)
//! out        = results
//! samples    = 100000              Monte Carlo draws for moment and tilt checks
//! paths      = 100000              tilted paths per renewal estimate
//! horizon    = 100000              hard cap on renewal horizons
//! replicates = 200                 population traces
//! cap        = 10000000            population cap
//! n_max      = 20                  generations per trace
//! grid       = 0 1 2 5 10          evaluation points for the renewal task
//! ```

use std::path::PathBuf;

use brw_core::Seed;

use crate::modelfile::{ConfigError, Document, ModelDesc, Origin, MODEL_KEYS};
use crate::presets::find_preset;

pub const SCENARIO_KEYS: &[&str] =
    &["name", "task", "preset", "a", "seed", "out", "samples", "paths", "horizon", "replicates", "cap", "n_max", "grid"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Analyze,
    Renewal,
    Brw,
    Verify,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Analyze => "analyze",
            Task::Renewal => "renewal",
            Task::Brw => "brw",
            Task::Verify => "verify",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [Task::Analyze, Task::Renewal, Task::Brw, Task::Verify].into_iter().find(|t| t.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budgets {
    pub samples: usize,
    pub paths: usize,
    pub horizon: usize,
    pub replicates: usize,
    pub cap: usize,
    pub n_max: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            samples: 100_000,
            paths: 100_000,
            horizon: brw_core::renewal::MAX_HORIZON,
            replicates: 200,
            cap: brw_core::brw::DEFAULT_CAP,
            n_max: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub task: Task,
    pub preset: Option<String>,
    /// Absent only for `verify`, which runs its own models.
    pub model: Option<ModelDesc>,
    pub a: Option<f64>,
    pub seed: Seed,
    pub out: PathBuf,
    pub budgets: Budgets,
    pub grid: Option<Vec<f64>>,
}

pub fn all_keys() -> Vec<&'static str> {
    SCENARIO_KEYS.iter().chain(MODEL_KEYS).copied().collect()
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Self::from_document(&Document::parse(text, &all_keys())?)
    }

    pub fn from_document(doc: &Document) -> Result<Self, ConfigError> {
        let task_entry = doc.get("task").ok_or_else(|| ConfigError::new(Origin::Line(1), "missing `task`"))?;
        let task = Task::parse(&task_entry.value)
            .ok_or_else(|| ConfigError::new(task_entry.origin, format!("unknown task `{}`", task_entry.value)))?;
        let seed = doc
            .parse_value::<u64>("seed")?
            .ok_or_else(|| ConfigError::new(Origin::Flag, "a seed is required (`seed = N` or --seed N)"))?;
        let inline = ModelDesc::from_document(doc)?;
        let (preset, model, preset_a) = match (doc.get("preset"), inline) {
            (Some(p), Some(_)) => {
                return Err(ConfigError::new(p.origin, "`preset` and inline model keys are mutually exclusive"));
            }
            (Some(p), None) => {
                let found = find_preset(&p.value).ok_or_else(|| ConfigError::new(p.origin, format!("unknown preset `{}`", p.value)))?;
                (Some(found.name.to_string()), Some(found.model), Some(found.default_a))
            }
            (None, inline) => (None, inline, None),
        };
        if model.is_none() && task != Task::Verify {
            return Err(ConfigError::new(task_entry.origin, format!("task `{}` needs a model (`preset` or `kind`)", task.name())));
        }
        let a = doc.parse_value::<f64>("a")?.or(preset_a);
        if let (Some(a), Some(e)) = (a, doc.get("a")) {
            if !(a.is_finite() && a > 0.0) {
                return Err(ConfigError::new(e.origin, format!("`a` must be positive, got {a}")));
            }
        }
        if a.is_none() && task != Task::Verify {
            return Err(ConfigError::new(task_entry.origin, "missing rate `a`"));
        }
        let defaults = Budgets::default();
        let budget = |key: &str, default: usize| -> Result<usize, ConfigError> {
            let v = doc.parse_value::<usize>(key)?.unwrap_or(default);
            if v == 0 {
                return Err(ConfigError::new(doc.get(key).map_or(Origin::Flag, |e| e.origin), format!("`{key}` must be positive")));
            }
            Ok(v)
        };
        let budgets = Budgets {
            samples: budget("samples", defaults.samples)?,
            paths: budget("paths", defaults.paths)?,
            horizon: budget("horizon", defaults.horizon)?,
            replicates: budget("replicates", defaults.replicates)?,
            cap: budget("cap", defaults.cap)?,
            n_max: budget("n_max", defaults.n_max)?,
        };
        let grid = match doc.get("grid") {
            None => None,
            Some(e) => {
                let xs = e
                    .value
                    .split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|w| !w.is_empty())
                    .map(|w| w.parse::<f64>().map_err(|_| ConfigError::new(e.origin, format!("`{w}` is not a number in `grid`"))))
                    .collect::<Result<Vec<_>, _>>()?;
                if xs.is_empty() || xs.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(ConfigError::new(e.origin, "`grid` must be non-empty and strictly increasing"));
                }
                Some(xs)
            }
        };
        Ok(Scenario {
            name: doc.get("name").map_or_else(|| task.name().to_string(), |e| e.value.clone()),
            task,
            preset,
            model,
            a,
            seed: Seed(seed),
            out: doc.get("out").map_or_else(|| PathBuf::from("brwlab-out"), |e| PathBuf::from(&e.value)),
            budgets,
            grid,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("name = {}\ntask = {}\n", self.name, self.task.name());
        match (&self.preset, &self.model) {
            (Some(p), _) => out += &format!("preset = {p}\n"),
            (None, Some(m)) => out += &m.to_text(),
            (None, None) => {}
        }
        if let Some(a) = self.a {
            out += &format!("a = {a}\n");
        }
        out += &format!("seed = {}\nout = {}\n", self.seed.0, self.out.display());
        let b = self.budgets;
        out += &format!(
            "samples = {}\npaths = {}\nhorizon = {}\nreplicates = {}\ncap = {}\nn_max = {}\n",
            b.samples, b.paths, b.horizon, b.replicates, b.cap, b.n_max
        );
        if let Some(g) = &self.grid {
            let xs: Vec<String> = g.iter().map(|x| x.to_string()).collect();
            out += &format!("grid = {}\n", xs.join(" "));
        }
        out
    }
}
