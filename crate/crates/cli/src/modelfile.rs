//! Flat `key = value` documents for models and scenarios.
//!
//! One entry per line, `#` starts a comment, blank lines are ignored. Model
//! keys:
//!
//! ```text
//! kind          = galton-watson | independent | lattice | step
//! count         = fixed K | poisson MEAN | uniform LO HI | geometric P | categorical P0 P1 ...
//! displacement  = <real law>          (independent)
//! entry         = X C                 (lattice, repeatable: C children on average at X)
//! step          = <real law>          (step: a bare random walk)
//! canonicalize  = GAMMA               (optional, maps X to GAMMA X + log m(GAMMA))
//! max_children  = N                   (optional)
//! ```
//!
//! Real laws: `point C`, `normal MEAN SD`, `shifted-exp SHIFT SCALE`,
//! `uniform LO HI`, `tilted-uniform LO HI TILT`, `atoms X:P X:P ...`.

use std::fmt;
use std::str::FromStr;

use brw_core::{CountLaw, LatticeEntry, OffspringModel, RealLaw, StepLaw};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    Flag,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub origin: Origin,
    pub message: String,
}

impl ConfigError {
    pub fn new(origin: Origin, message: impl Into<String>) -> Self {
        ConfigError { origin, message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.origin {
            Origin::Line(n) => write!(f, "line {n}: {}", self.message),
            Origin::Flag => write!(f, "command line: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub origin: Origin,
    pub key: String,
    pub value: String,
}

/// Keys that may appear more than once.
const REPEATABLE: &[&str] = &["entry"];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Document {
    entries: Vec<Entry>,
}

impl Document {
    pub fn parse(text: &str, known: &[&str]) -> Result<Self, ConfigError> {
        let mut entries: Vec<Entry> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let origin = Origin::Line(i + 1);
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::new(origin, format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                return Err(ConfigError::new(origin, "missing key"));
            }
            if !known.contains(&key) {
                return Err(ConfigError::new(origin, format!("unknown key `{key}`")));
            }
            if value.is_empty() {
                return Err(ConfigError::new(origin, format!("missing value for `{key}`")));
            }
            if !REPEATABLE.contains(&key) {
                if let Some(prev) = entries.iter().find(|e| e.key == key) {
                    let first = match prev.origin {
                        Origin::Line(n) => n,
                        Origin::Flag => 0,
                    };
                    return Err(ConfigError::new(origin, format!("duplicate key `{key}` (first set on line {first})")));
                }
            }
            entries.push(Entry { origin, key: key.to_string(), value: value.to_string() });
        }
        Ok(Document { entries })
    }

    /// Sets `key` from a command-line flag, replacing any earlier value.
    pub fn set_flag(&mut self, key: &str, value: impl Into<String>) {
        self.entries.retain(|e| e.key != key);
        self.entries.push(Entry { origin: Origin::Flag, key: key.to_string(), value: value.into() });
    }

    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().rev().find(|e| e.key == key)
    }

    pub fn all(&self, key: &str) -> impl Iterator<Item = &Entry> {
        let key = key.to_string();
        self.entries.iter().filter(move |e| e.key == key)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.get(key).is_some()
    }

    pub fn parse_value<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse()
                .map(Some)
                .map_err(|_| ConfigError::new(e.origin, format!("invalid value `{}` for `{key}`", e.value))),
        }
    }
}

pub const MODEL_KEYS: &[&str] = &["kind", "count", "displacement", "entry", "step", "canonicalize", "max_children"];

#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    GaltonWatson(CountLaw),
    Independent { count: CountLaw, displacement: RealLaw },
    Lattice(Vec<LatticeEntry>),
    Step(RealLaw),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelDesc {
    pub spec: ModelSpec,
    pub canonicalize: Option<f64>,
    pub max_children: Option<usize>,
}

/// A built model: a branching population or a bare random walk.
#[derive(Debug, Clone)]
pub enum Subject {
    Branching(OffspringModel),
    Walk(StepLaw),
}

impl ModelDesc {
    pub fn new(spec: ModelSpec) -> Self {
        ModelDesc { spec, canonicalize: None, max_children: None }
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let doc = Document::parse(text, MODEL_KEYS)?;
        Self::from_document(&doc)?.ok_or_else(|| ConfigError::new(Origin::Line(1), "missing `kind`"))
    }

    /// `None` when the document has no model keys.
    pub fn from_document(doc: &Document) -> Result<Option<Self>, ConfigError> {
        let Some(kind) = doc.get("kind") else {
            if let Some(stray) = MODEL_KEYS.iter().find_map(|k| doc.get(k)) {
                return Err(ConfigError::new(stray.origin, format!("`{}` given without `kind`", stray.key)));
            }
            return Ok(None);
        };
        let allowed: &[&str] = match kind.value.as_str() {
            "galton-watson" => &["count"],
            "independent" => &["count", "displacement"],
            "lattice" => &["entry"],
            "step" => &["step"],
            other => return Err(ConfigError::new(kind.origin, format!("unknown model kind `{other}`"))),
        };
        for key in ["count", "displacement", "entry", "step"] {
            if !allowed.contains(&key) {
                if let Some(e) = doc.get(key) {
                    return Err(ConfigError::new(e.origin, format!("`{key}` does not apply to kind `{}`", kind.value)));
                }
            }
        }
        let required = |key: &str| doc.get(key).ok_or_else(|| ConfigError::new(kind.origin, format!("kind `{}` needs `{key}`", kind.value)));
        let spec = match kind.value.as_str() {
            "galton-watson" => ModelSpec::GaltonWatson(parse_count(required("count")?)?),
            "independent" => ModelSpec::Independent {
                count: parse_count(required("count")?)?,
                displacement: parse_real(required("displacement")?)?,
            },
            "lattice" => {
                let entries = doc.all("entry").map(parse_entry).collect::<Result<Vec<_>, _>>()?;
                if entries.is_empty() {
                    return Err(ConfigError::new(kind.origin, "kind `lattice` needs at least one `entry`"));
                }
                ModelSpec::Lattice(entries)
            }
            _ => ModelSpec::Step(parse_real(required("step")?)?),
        };
        let canonicalize = doc.parse_value::<f64>("canonicalize")?;
        let max_children = doc.parse_value::<usize>("max_children")?;
        if let ModelSpec::Step(_) = spec {
            for key in ["canonicalize", "max_children"] {
                if let Some(e) = doc.get(key) {
                    return Err(ConfigError::new(e.origin, format!("`{key}` does not apply to kind `step`")));
                }
            }
        }
        Ok(Some(ModelDesc { spec, canonicalize, max_children }))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match &self.spec {
            ModelSpec::GaltonWatson(c) => {
                out += "kind = galton-watson\n";
                out += &format!("count = {}\n", format_count(c));
            }
            ModelSpec::Independent { count, displacement } => {
                out += "kind = independent\n";
                out += &format!("count = {}\n", format_count(count));
                out += &format!("displacement = {}\n", format_real(displacement));
            }
            ModelSpec::Lattice(entries) => {
                out += "kind = lattice\n";
                for e in entries {
                    out += &format!("entry = {} {}\n", e.displacement, e.mean_count);
                }
            }
            ModelSpec::Step(law) => {
                out += "kind = step\n";
                out += &format!("step = {}\n", format_real(law));
            }
        }
        if let Some(g) = self.canonicalize {
            out += &format!("canonicalize = {g}\n");
        }
        if let Some(m) = self.max_children {
            out += &format!("max_children = {m}\n");
        }
        out
    }

    pub fn build(&self) -> brw_core::Result<Subject> {
        let model = match &self.spec {
            ModelSpec::Step(law) => return Ok(Subject::Walk(StepLaw::parametric(law.clone())?)),
            ModelSpec::GaltonWatson(c) => OffspringModel::galton_watson(c.clone())?,
            ModelSpec::Independent { count, displacement } => OffspringModel::independent(count.clone(), displacement.clone())?,
            ModelSpec::Lattice(entries) => OffspringModel::lattice(entries.clone())?,
        };
        let model = match self.canonicalize {
            Some(g) => model.canonicalize(g)?,
            None => model,
        };
        Ok(Subject::Branching(match self.max_children {
            Some(m) => model.with_max_children(m),
            None => model,
        }))
    }
}

fn numbers(e: &Entry, words: &[&str]) -> Result<Vec<f64>, ConfigError> {
    words
        .iter()
        .map(|w| w.parse::<f64>().map_err(|_| ConfigError::new(e.origin, format!("`{w}` is not a number in `{}`", e.key))))
        .collect()
}

fn arity(e: &Entry, name: &str, got: usize, want: usize) -> Result<(), ConfigError> {
    if got != want {
        return Err(ConfigError::new(e.origin, format!("`{name}` takes {want} parameter(s), got {got}")));
    }
    Ok(())
}

fn core_err(e: &Entry, err: brw_core::Error) -> ConfigError {
    ConfigError::new(e.origin, err.to_string())
}

fn integer(e: &Entry, x: f64) -> Result<u64, ConfigError> {
    if x >= 0.0 && x.fract() == 0.0 && x < 9.0e15 {
        Ok(x as u64)
    } else {
        Err(ConfigError::new(e.origin, format!("`{x}` is not a non-negative integer")))
    }
}

pub fn parse_count(e: &Entry) -> Result<CountLaw, ConfigError> {
    let words: Vec<&str> = e.value.split_whitespace().collect();
    let (name, rest) = words.split_first().expect("non-empty value");
    let p = numbers(e, rest)?;
    let law = match *name {
        "fixed" => {
            arity(e, name, p.len(), 1)?;
            CountLaw::Fixed(integer(e, p[0])?)
        }
        "poisson" => {
            arity(e, name, p.len(), 1)?;
            CountLaw::poisson(p[0]).map_err(|x| core_err(e, x))?
        }
        "uniform" => {
            arity(e, name, p.len(), 2)?;
            CountLaw::uniform(integer(e, p[0])?, integer(e, p[1])?).map_err(|x| core_err(e, x))?
        }
        "geometric" => {
            arity(e, name, p.len(), 1)?;
            CountLaw::geometric(p[0]).map_err(|x| core_err(e, x))?
        }
        "categorical" => CountLaw::categorical(p).map_err(|x| core_err(e, x))?,
        other => return Err(ConfigError::new(e.origin, format!("unknown count law `{other}`"))),
    };
    Ok(law)
}

pub fn format_count(law: &CountLaw) -> String {
    match law {
        CountLaw::Fixed(k) => format!("fixed {k}"),
        CountLaw::Poisson(m) => format!("poisson {m}"),
        CountLaw::Uniform { lo, hi } => format!("uniform {lo} {hi}"),
        CountLaw::Geometric(p) => format!("geometric {p}"),
        CountLaw::Categorical(probs) => {
            let ps: Vec<String> = probs.iter().map(|p| p.to_string()).collect();
            format!("categorical {}", ps.join(" "))
        }
    }
}

pub fn parse_real(e: &Entry) -> Result<RealLaw, ConfigError> {
    let words: Vec<&str> = e.value.split_whitespace().collect();
    let (name, rest) = words.split_first().expect("non-empty value");
    if *name == "atoms" {
        let mut atoms = Vec::with_capacity(rest.len());
        for w in rest {
            let (x, p) = w
                .split_once(':')
                .ok_or_else(|| ConfigError::new(e.origin, format!("atom `{w}` is not of the form X:P")))?;
            let v = numbers(e, &[x, p])?;
            atoms.push((v[0], v[1]));
        }
        return RealLaw::atoms(&atoms).map_err(|x| core_err(e, x));
    }
    let p = numbers(e, rest)?;
    let law = match *name {
        "point" => {
            arity(e, name, p.len(), 1)?;
            RealLaw::point(p[0])
        }
        "normal" => {
            arity(e, name, p.len(), 2)?;
            RealLaw::normal(p[0], p[1])
        }
        "shifted-exp" => {
            arity(e, name, p.len(), 2)?;
            RealLaw::shifted_exp(p[0], p[1])
        }
        "uniform" => {
            arity(e, name, p.len(), 2)?;
            RealLaw::uniform(p[0], p[1])
        }
        "tilted-uniform" => {
            arity(e, name, p.len(), 3)?;
            RealLaw::tilted_uniform(p[0], p[1], p[2])
        }
        other => return Err(ConfigError::new(e.origin, format!("unknown law `{other}`"))),
    };
    law.map_err(|x| core_err(e, x))
}

pub fn format_real(law: &RealLaw) -> String {
    match law {
        RealLaw::Point(c) => format!("point {c}"),
        RealLaw::Normal { mean, sd } => format!("normal {mean} {sd}"),
        RealLaw::ShiftedExp { shift, scale } => format!("shifted-exp {shift} {scale}"),
        RealLaw::TiltedUniform { lo, hi, tilt } => {
            if *tilt == 0.0 {
                format!("uniform {lo} {hi}")
            } else {
                format!("tilted-uniform {lo} {hi} {tilt}")
            }
        }
        RealLaw::Atoms(atoms) => {
            let parts: Vec<String> = atoms.iter().map(|(x, p)| format!("{x}:{p}")).collect();
            format!("atoms {}", parts.join(" "))
        }
    }
}

fn parse_entry(e: &Entry) -> Result<LatticeEntry, ConfigError> {
    let words: Vec<&str> = e.value.split_whitespace().collect();
    arity(e, "entry", words.len(), 2)?;
    let v = numbers(e, &words)?;
    Ok(LatticeEntry { displacement: v[0], mean_count: v[1] })
}
