//! The JSON experiment description and its conversion into core objects.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Deserialize;
use thermoflow_core::deviations::LevelMode;
use thermoflow_core::escape::{Hole, HoleSequence};
use thermoflow_core::suspension::MAX_DEGREE;
use thermoflow_core::{FlowObservable, LocallyConstantFunction, RoofFunction, SftSpec, Word};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub sft: Option<SftBlock>,
    pub potential: Option<TableBlock>,
    pub roof: Option<TableBlock>,
    pub observable: Option<ObservableBlock>,
    pub deviations: Option<DeviationsBlock>,
    pub escape: Option<EscapeBlock>,
    pub simulate: Option<SimulateBlock>,
    pub output: Option<OutputBlock>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SftBlock {
    pub alphabet_size: usize,
    pub transition: Vec<Vec<u8>>,
    pub theta: f64,
}

/// A locally constant function: one value per admissible word of length `depth`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableBlock {
    pub depth: usize,
    pub table: BTreeMap<String, f64>,
}

/// Polynomial-in-level coefficients `[c_0, ..., c_degree]` per word.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableBlock {
    pub depth: usize,
    pub degree: usize,
    pub coefficients: BTreeMap<String, Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum DSetting {
    Value(f64),
    Keyword(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitBlock {
    pub m_grid: Vec<usize>,
    pub epsilon_grid: Vec<f64>,
}

impl Default for FitBlock {
    fn default() -> Self {
        FitBlock { m_grid: vec![2, 4, 6, 8, 10, 12, 14, 16], epsilon_grid: vec![0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5] }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviationsBlock {
    pub epsilon: f64,
    #[serde(rename = "D")]
    pub d: DSetting,
    pub t_grid: Vec<f64>,
    #[serde(default)]
    pub mc_samples: u64,
    pub seed: Option<u64>,
    #[serde(default = "default_level_mode")]
    pub level_mode: String,
    #[serde(default)]
    pub fit: Option<FitBlock>,
    /// Largest number of words an exact enumeration may visit.
    pub budget: Option<u64>,
}

fn default_level_mode() -> String {
    "zero".into()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EscapeBlock {
    pub hole_mode: String,
    pub z: String,
    #[serde(default)]
    pub n_range: Option<[usize; 2]>,
    #[serde(default)]
    pub holes: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub period: usize,
    #[serde(default)]
    pub t_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub mc_samples: u64,
    pub seed: Option<u64>,
    #[serde(default)]
    pub kappa_min: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateBlock {
    pub orbits: usize,
    pub length: usize,
    pub seed: u64,
    /// Flow each sampled orbit from level 0 for this long.
    #[serde(default)]
    pub flow_time: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub directory: Option<PathBuf>,
    #[serde(default = "default_formats")]
    pub formats: Vec<String>,
}

fn default_formats() -> Vec<String> {
    vec!["csv".into()]
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("config does not parse: {e}"))
    }
}

fn parse_table_words(spec: &SftSpec, keys: impl Iterator<Item = String>, what: &str, out: &mut Vec<String>) -> Vec<Word> {
    let mut words = Vec::new();
    for key in keys {
        match spec.parse_word(&key) {
            Ok(w) => words.push(w),
            Err(e) => out.push(format!("{what} table key \"{key}\": {e}")),
        }
    }
    words
}

/// Missing and surplus keys of a depth-`depth` table, as diagnostics.
fn check_keys(spec: &SftSpec, depth: usize, words: &[Word], what: &str, out: &mut Vec<String>) {
    for w in words {
        if w.len() != depth {
            out.push(format!("{what} table key \"{}\" has length {}, expected depth {depth}", spec.format_word(w), w.len()));
        }
    }
    for w in spec.enumerate_words(depth) {
        if !words.contains(&w) {
            out.push(format!("{what} table missing word \"{}\"", spec.format_word(&w)));
        }
    }
}

pub fn build_spec(block: &SftBlock) -> Result<SftSpec, String> {
    if block.transition.len() != block.alphabet_size {
        return Err(format!(
            "sft.transition has {} rows but alphabet_size is {}",
            block.transition.len(),
            block.alphabet_size
        ));
    }
    SftSpec::new(&block.transition, block.theta).map_err(|e| format!("sft: {e}"))
}

pub fn build_function(spec: &SftSpec, block: &TableBlock, what: &str) -> Result<LocallyConstantFunction, Vec<String>> {
    let mut diags = Vec::new();
    if block.depth == 0 {
        return Err(vec![format!("{what}.depth must be at least 1")]);
    }
    let words = parse_table_words(spec, block.table.keys().cloned(), what, &mut diags);
    check_keys(spec, block.depth, &words, what, &mut diags);
    for (k, v) in &block.table {
        if !v.is_finite() {
            diags.push(format!("{what} table value for \"{k}\" is not finite"));
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    let entries = words.into_iter().zip(block.table.values().copied());
    LocallyConstantFunction::from_table(spec, block.depth, entries).map_err(|e| vec![format!("{what}: {e}")])
}

pub fn build_roof(spec: &SftSpec, block: &TableBlock) -> Result<RoofFunction, Vec<String>> {
    let f = build_function(spec, block, "roof")?;
    if f.min_value() < 1.0 {
        return Err(vec![format!("roof below 1: minimum value {}", f.min_value())]);
    }
    RoofFunction::new(f).map_err(|e| vec![format!("roof: {e}")])
}

pub fn build_observable(spec: &SftSpec, roof: &RoofFunction, block: &ObservableBlock) -> Result<FlowObservable, Vec<String>> {
    let mut diags = Vec::new();
    if block.depth == 0 {
        return Err(vec!["observable.depth must be at least 1".into()]);
    }
    if block.degree > MAX_DEGREE {
        diags.push(format!("observable degree {} exceeds the maximum {MAX_DEGREE}", block.degree));
    }
    let words = parse_table_words(spec, block.coefficients.keys().cloned(), "observable", &mut diags);
    check_keys(spec, block.depth, &words, "observable", &mut diags);
    for (k, c) in &block.coefficients {
        if c.len() > block.degree + 1 {
            diags.push(format!("observable coefficients for \"{k}\" exceed degree {}", block.degree));
        }
        if c.iter().any(|x| !x.is_finite()) {
            diags.push(format!("observable coefficients for \"{k}\" are not finite"));
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    let entries = words.into_iter().zip(block.coefficients.values().cloned());
    FlowObservable::build(spec, roof, block.depth, entries).map_err(|e| vec![format!("observable: {e}")])
}

pub fn level_mode(text: &str) -> Result<LevelMode, String> {
    match text {
        "zero" => Ok(LevelMode::Zero),
        "nu" => Ok(LevelMode::Nu),
        other => Err(format!("deviations.level_mode must be \"zero\" or \"nu\", got \"{other}\"")),
    }
}

pub fn check_deviations(block: &DeviationsBlock) -> Vec<String> {
    let mut diags = Vec::new();
    if !(block.epsilon > 0.0 && block.epsilon.is_finite()) {
        diags.push(format!("deviations.epsilon must be positive, got {}", block.epsilon));
    }
    match &block.d {
        DSetting::Value(d) if !(*d > 0.0 && d.is_finite()) => diags.push(format!("deviations.D must be positive, got {d}")),
        DSetting::Keyword(k) if k != "fit" => diags.push(format!("deviations.D must be a number or \"fit\", got \"{k}\"")),
        _ => {}
    }
    if block.t_grid.is_empty() || block.t_grid.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        diags.push("deviations.t_grid must be a nonempty list of positive times".into());
    }
    if block.mc_samples > 0 && block.seed.is_none() {
        diags.push("deviations.seed is required when mc_samples > 0".into());
    }
    if let Err(e) = level_mode(&block.level_mode) {
        diags.push(e);
    }
    if let Some(fit) = &block.fit {
        if fit.m_grid.is_empty() || fit.m_grid.contains(&0) || fit.epsilon_grid.is_empty() {
            diags.push("deviations.fit grids must be nonempty with positive m".into());
        }
    }
    diags
}

pub fn build_holes(spec: &SftSpec, block: &EscapeBlock) -> Result<HoleSequence, Vec<String>> {
    let z = spec.parse_word(&block.z).map_err(|e| vec![format!("escape.z: {e}")])?;
    let seq = match block.hole_mode.as_str() {
        "cylinders_around_z" => {
            let Some([lo, hi]) = block.n_range else {
                return Err(vec!["escape.n_range is required for hole_mode \"cylinders_around_z\"".into()]);
            };
            HoleSequence::cylinders_around(spec, z, block.period, lo..=hi).map_err(|e| vec![format!("escape: {e}")])?
        }
        "explicit" => {
            let Some(lists) = &block.holes else {
                return Err(vec!["escape.holes is required for hole_mode \"explicit\"".into()]);
            };
            let mut diags = Vec::new();
            let mut holes = Vec::new();
            for (i, list) in lists.iter().enumerate() {
                let words = parse_table_words(spec, list.iter().cloned(), &format!("escape hole {}", i + 1), &mut diags);
                match Hole::new(spec, words) {
                    Ok(h) => holes.push(h),
                    Err(e) => diags.push(format!("escape hole {}: {e}", i + 1)),
                }
            }
            if !diags.is_empty() {
                return Err(diags);
            }
            HoleSequence::new(spec, z, block.period, holes).map_err(|e| vec![format!("escape: {e}")])?
        }
        other => {
            return Err(vec![format!(
                "escape.hole_mode must be \"cylinders_around_z\" or \"explicit\", got \"{other}\""
            )])
        }
    };
    let mut diags = Vec::new();
    for (i, hole) in seq.holes().iter().enumerate() {
        let n = hole.word_len();
        if !hole.contains(seq.z()) {
            diags.push(format!("hole nesting: I_{n} does not contain the prefix of z"));
        }
        if i > 0 {
            let prev = &seq.holes()[i - 1];
            if let Some(w) = hole.words().iter().find(|w| !prev.contains(&w.prefix(n - 1))) {
                diags.push(format!("hole nesting: word \"{}\" of I_{n} is not inside I_{}", spec.format_word(w), n - 1));
            }
        }
    }
    if block.t_grid.as_ref().is_some_and(|g| g.is_empty() || g.windows(2).any(|p| p[0] >= p[1]) || g[0] <= 0.0) {
        diags.push("escape.t_grid must be positive and strictly increasing".into());
    }
    if block.mc_samples > 0 && block.seed.is_none() {
        diags.push("escape.seed is required when mc_samples > 0".into());
    }
    if diags.is_empty() {
        Ok(seq)
    } else {
        Err(diags)
    }
}

/// Every structural and invariant problem in the config, without running anything.
pub fn validate_config_text(text: &str) -> Vec<String> {
    let config = match ExperimentConfig::parse(text) {
        Ok(c) => c,
        Err(e) => return vec![e],
    };
    let mut diags = Vec::new();
    let Some(sft) = &config.sft else {
        return vec!["missing sft block".into()];
    };
    let spec = match build_spec(sft) {
        Ok(s) => s,
        Err(e) => return vec![e],
    };
    if let Some(p) = &config.potential {
        if let Err(d) = build_function(&spec, p, "potential") {
            diags.extend(d);
        }
    }
    let roof = match &config.roof {
        Some(r) => match build_roof(&spec, r) {
            Ok(f) => Some(f),
            Err(d) => {
                diags.extend(d);
                None
            }
        },
        None => None,
    };
    if let Some(o) = &config.observable {
        match &roof {
            Some(f) => {
                if let Err(d) = build_observable(&spec, f, o) {
                    diags.extend(d);
                }
            }
            None if config.roof.is_none() => diags.push("observable block requires a roof block".into()),
            None => {}
        }
    }
    if let Some(d) = &config.deviations {
        diags.extend(check_deviations(d));
    }
    if let Some(e) = &config.escape {
        if let Err(d) = build_holes(&spec, e) {
            diags.extend(d);
        }
    }
    if let Some(s) = &config.simulate {
        if s.orbits == 0 || s.length == 0 {
            diags.push("simulate.orbits and simulate.length must be positive".into());
        }
    }
    if let Some(o) = &config.output {
        for f in &o.formats {
            if f != "csv" {
                diags.push(format!("unsupported output format \"{f}\""));
            }
        }
    }
    diags
}

/// Reads and validates a config file; unreadable files are reported as a diagnostic.
pub fn validate_config(path: &std::path::Path) -> Vec<String> {
    match std::fs::read_to_string(path) {
        Ok(text) => validate_config_text(&text),
        Err(e) => vec![format!("cannot read {}: {e}", path.display())],
    }
}
