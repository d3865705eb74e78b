//! Flat `key = value` scenario files.
//!
//! Blank lines and `#` comments are ignored. Keys may appear once each and
//! in any order; a `preset` is applied first, then parameter overrides.
//! Unknown keys are errors.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;
use tipping::model::{ConfigError, EcosystemConfig, GratuityConvention, Param, QualityFormulation, State};
use tipping::presets::{self, DynamicsPanel};
use tipping::roots::linspace;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("line {line}: expected 'key = value', got '{text}'")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key '{key}'")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: '{key}' given twice (first on line {first})")]
    Duplicate { line: usize, key: String, first: usize },
    #[error("line {line}: bad value for '{key}': {message}")]
    Value { line: usize, key: String, message: String },
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// Named starting configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Baseline,
    Dynamics(DynamicsPanel),
    Threshold,
    StaffPay,
    Payroll,
    PhasePortrait,
    Typical,
}

impl Preset {
    pub const NAMES: [&'static str; 11] = [
        "baseline", "fig2a", "fig2b", "fig2c", "fig2d", "fig3", "figS3", "figS4", "figS5", "fig5",
        "typical",
    ];

    pub fn config(self) -> EcosystemConfig {
        match self {
            Preset::Baseline => EcosystemConfig::baseline(),
            Preset::Dynamics(panel) => presets::dynamics_panel(panel),
            Preset::Threshold => presets::threshold_example(),
            Preset::StaffPay => presets::staff_pay_example(),
            Preset::Payroll => presets::payroll_example(),
            Preset::PhasePortrait => presets::fig_s5(),
            Preset::Typical => presets::typical_restaurant(),
        }
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "baseline" => Preset::Baseline,
            "fig2a" => Preset::Dynamics(DynamicsPanel::LowerTipRate),
            "fig2b" => Preset::Dynamics(DynamicsPanel::LowerMenuPrice),
            "fig2c" => Preset::Dynamics(DynamicsPanel::LowerCookPay),
            "fig2d" => Preset::Dynamics(DynamicsPanel::CooksOverWaiters),
            "fig3" | "figS1" | "figS2" => Preset::Threshold,
            "figS3" => Preset::StaffPay,
            "figS4" => Preset::Payroll,
            "figS5" => Preset::PhasePortrait,
            "fig5" | "typical" => Preset::Typical,
            other => {
                return Err(format!(
                    "unknown preset '{other}' (expected one of {})",
                    Preset::NAMES.join(", ")
                ))
            }
        })
    }
}

/// Evenly spaced grid written `lo:hi:steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        linspace(self.lo, self.hi, self.steps)
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let [lo, hi, steps] = parts.as_slice() else {
            return Err(format!("expected lo:hi:steps, got '{s}'"));
        };
        let lo: f64 = lo.parse().map_err(|_| format!("bad grid start '{lo}'"))?;
        let hi: f64 = hi.parse().map_err(|_| format!("bad grid end '{hi}'"))?;
        let steps: usize = steps.parse().map_err(|_| format!("bad grid size '{steps}'"))?;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) || steps < 2 {
            return Err(format!("grid needs lo < hi and at least 2 steps, got '{s}'"));
        }
        Ok(Grid { lo, hi, steps })
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.steps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Analysis {
    Equilibrium,
    Threshold,
}

impl FromStr for Analysis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "equilibrium" => Ok(Analysis::Equilibrium),
            "threshold" => Ok(Analysis::Threshold),
            other => Err(format!("expected 'equilibrium' or 'threshold', got '{other}'")),
        }
    }
}

impl fmt::Display for Analysis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Analysis::Equilibrium => "equilibrium",
            Analysis::Threshold => "threshold",
        })
    }
}

pub const DEFAULT_T_END: f64 = 50.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub preset: Preset,
    pub config: EcosystemConfig,
    pub initial: State,
    pub t_end: f64,
    pub max_step: f64,
    pub seed: Option<u64>,
    pub n: Option<usize>,
    pub grid: Option<Grid>,
    pub out: Option<PathBuf>,
    pub figure: Option<String>,
    pub sweep: Option<Param>,
    pub analysis: Option<Analysis>,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            name: "baseline".into(),
            preset: Preset::Baseline,
            config: EcosystemConfig::baseline(),
            initial: State::PARITY,
            t_end: DEFAULT_T_END,
            max_step: tipping::dynamics::DEFAULT_MAX_STEP,
            seed: None,
            n: None,
            grid: None,
            out: None,
            figure: None,
            sweep: None,
            analysis: None,
        }
    }
}

const DIRECTIVE_KEYS: [&str; 15] = [
    "name", "preset", "quality", "gratuity", "D0", "W0", "C0", "tEnd", "maxStep", "seed", "n",
    "grid", "out", "figure", "sweep",
];

fn is_known(key: &str) -> bool {
    DIRECTIVE_KEYS.contains(&key) || key == "analysis" || key.parse::<Param>().is_ok()
}

struct Entry {
    line: usize,
    value: String,
}

fn parse_value<T: FromStr>(key: &str, e: &Entry) -> Result<T, ScenarioError>
where
    T::Err: fmt::Display,
{
    e.value.parse::<T>().map_err(|err| ScenarioError::Value {
        line: e.line,
        key: key.to_string(),
        message: err.to_string(),
    })
}

fn parse_f64(key: &str, e: &Entry) -> Result<f64, ScenarioError> {
    let v: f64 = parse_value(key, e)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ScenarioError::Value {
            line: e.line,
            key: key.to_string(),
            message: "must be finite".into(),
        })
    }
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let mut entries: BTreeMap<String, Entry> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ScenarioError::Syntax {
                line,
                text: raw.trim().to_string(),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(ScenarioError::Syntax {
                line,
                text: raw.trim().to_string(),
            });
        }
        if !is_known(key) {
            return Err(ScenarioError::UnknownKey {
                line,
                key: key.to_string(),
            });
        }
        if let Some(first) = entries.get(key) {
            return Err(ScenarioError::Duplicate {
                line,
                key: key.to_string(),
                first: first.line,
            });
        }
        entries.insert(
            key.to_string(),
            Entry {
                line,
                value: value.to_string(),
            },
        );
    }

    let mut s = Scenario::default();
    if let Some(e) = entries.get("preset") {
        s.preset = parse_value("preset", e)?;
        s.config = s.preset.config();
        s.name = e.value.clone();
    }
    if let Some(e) = entries.get("name") {
        s.name = e.value.clone();
    }
    // Shared price first so per-restaurant prices can refine it.
    for param in Param::ALL {
        if let Some(e) = entries.get(param.name()) {
            s.config.set(param, parse_f64(param.name(), e)?);
        }
    }
    if let Some(e) = entries.get("quality") {
        s.config.quality = parse_value::<QualityFormulation>("quality", e)?;
    }
    if let Some(e) = entries.get("gratuity") {
        s.config.gratuity = parse_value::<GratuityConvention>("gratuity", e)?;
    }
    let mut initial = s.initial.to_array();
    for (slot, key) in initial.iter_mut().zip(["D0", "W0", "C0"]) {
        if let Some(e) = entries.get(key) {
            let v = parse_f64(key, e)?;
            if !(0.0..=1.0).contains(&v) {
                return Err(ScenarioError::Value {
                    line: e.line,
                    key: key.into(),
                    message: format!("{v} outside [0, 1]"),
                });
            }
            *slot = v;
        }
    }
    s.initial = State::from_array(initial);
    for (key, slot) in [("tEnd", &mut s.t_end), ("maxStep", &mut s.max_step)] {
        if let Some(e) = entries.get(key) {
            let v = parse_f64(key, e)?;
            if v <= 0.0 {
                return Err(ScenarioError::Value {
                    line: e.line,
                    key: key.into(),
                    message: "must be positive".into(),
                });
            }
            *slot = v;
        }
    }
    if let Some(e) = entries.get("seed") {
        s.seed = Some(parse_value("seed", e)?);
    }
    if let Some(e) = entries.get("n") {
        s.n = Some(parse_value("n", e)?);
    }
    if let Some(e) = entries.get("grid") {
        s.grid = Some(parse_value("grid", e)?);
    }
    if let Some(e) = entries.get("out") {
        s.out = Some(PathBuf::from(&e.value));
    }
    if let Some(e) = entries.get("figure") {
        s.figure = Some(e.value.clone());
    }
    if let Some(e) = entries.get("sweep") {
        s.sweep = Some(parse_value("sweep", e)?);
    }
    if let Some(e) = entries.get("analysis") {
        s.analysis = Some(parse_value("analysis", e)?);
    }
    s.config.validate()?;
    Ok(s)
}

pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    parse_scenario(&text)
}

/// Resolved configuration as `key = value` lines, in a fixed order.
pub fn config_lines(cfg: &EcosystemConfig) -> Vec<(String, String)> {
    let mut lines: Vec<(String, String)> = Param::ALL
        .iter()
        .filter(|&&p| p != Param::MenuPrice)
        .map(|&p| (p.name().to_string(), cfg.get(p).to_string()))
        .collect();
    lines.push(("quality".into(), cfg.quality.to_string()));
    lines.push(("gratuity".into(), cfg.gratuity.to_string()));
    lines
}
