use std::path::{Path, PathBuf};

use toml::{Table, Value};

use super::HarnessError;
use crate::guidance::Threshold;
use crate::inst::TriggerSel;
use crate::solver::SolveConfig;

/// A named option bundle, optionally paired with a model.
#[derive(Clone, Debug, PartialEq)]
pub struct Strategy {
    pub name: String,
    pub config: SolveConfig,
    pub model: Option<PathBuf>,
}

impl Strategy {
    pub fn new(name: &str, config: SolveConfig) -> Self {
        Strategy {
            name: name.to_string(),
            config,
            model: None,
        }
    }

    /// Same options with a model attached; named `<name>@<model stem>`.
    pub fn with_model(&self, model: &Path) -> Strategy {
        let stem = model
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Strategy {
            name: format!("{}@{}", self.name, stem),
            config: self.config.clone(),
            model: Some(model.to_path_buf()),
        }
    }
}

/// Built-in strategies named after the option they vary.
pub fn builtin_strategies() -> Vec<Strategy> {
    let base = SolveConfig::default();
    let mut out = vec![Strategy::new("ematch", base.clone())];
    let mut c = base.clone();
    c.triggers.sel = TriggerSel::Max;
    out.push(Strategy::new("trigger-max", c));
    let mut c = base.clone();
    c.triggers.multi_priority = true;
    c.triggers.multi_when_single = true;
    out.push(Strategy::new("multi-trigger", c));
    let mut c = base.clone();
    c.full_saturate_quant = true;
    out.push(Strategy::new("enum", c));
    let mut c = base;
    c.full_saturate_quant = true;
    c.enum_interleave = true;
    out.push(Strategy::new("enum-interleave", c));
    out
}

fn as_bool(key: &str, v: &Value) -> Result<bool, HarnessError> {
    v.as_bool()
        .ok_or_else(|| HarnessError::Config(format!("`{key}` must be a boolean")))
}

fn as_uint(key: &str, v: &Value) -> Result<u64, HarnessError> {
    v.as_integer()
        .filter(|&i| i > 0)
        .map(|i| i as u64)
        .ok_or_else(|| HarnessError::Config(format!("`{key}` must be a positive integer")))
}

fn as_str<'a>(key: &str, v: &'a Value) -> Result<&'a str, HarnessError> {
    v.as_str()
        .ok_or_else(|| HarnessError::Config(format!("`{key}` must be a string")))
}

fn apply_key(s: &mut Strategy, key: &str, v: &Value, base_dir: &Path) -> Result<(), HarnessError> {
    let c = &mut s.config;
    match key {
        "name" => s.name = as_str(key, v)?.to_string(),
        "full-saturate-quant" => c.full_saturate_quant = as_bool(key, v)?,
        "e-matching" => c.ematch = as_bool(key, v)?,
        "trigger-sel" => c.triggers.sel = as_str(key, v)?.parse().map_err(HarnessError::Config)?,
        "multi-trigger-priority" => c.triggers.multi_priority = as_bool(key, v)?,
        "multi-trigger-when-single" => c.triggers.multi_when_single = as_bool(key, v)?,
        "enum-inst-interleave" => c.enum_interleave = as_bool(key, v)?,
        "enum-lemmas-per-round" => c.enum_lemmas_per_round = as_uint(key, v)? as usize,
        "ematch-cap" => c.ematch_cap = as_uint(key, v)? as usize,
        "max-rounds" => c.max_rounds = as_uint(key, v)?,
        "max-lemmas" => c.max_lemmas = as_uint(key, v)?,
        "decision-budget" => c.decision_budget = as_uint(key, v)?,
        "produce-proofs" => c.produce_proofs = as_bool(key, v)?,
        "seed" => {
            c.seed = v
                .as_integer()
                .filter(|&i| i >= 0)
                .ok_or_else(|| HarnessError::Config("`seed` must be a non-negative integer".into()))?
                as u64
        }
        "threshold" => c.threshold = as_str(key, v)?.parse::<Threshold>().map_err(HarnessError::Config)?,
        "ml-model" => s.model = Some(base_dir.join(as_str(key, v)?)),
        _ => return Err(HarnessError::Config(format!("unknown strategy option `{key}`"))),
    }
    Ok(())
}

/// Reads `[[strategy]]` tables. Keys follow the solver's option names
/// (`full-saturate-quant`, `trigger-sel`, `multi-trigger-priority`, ...);
/// relative model paths are resolved against `base_dir`.
pub fn parse_strategies(text: &str, base_dir: &Path) -> Result<Vec<Strategy>, HarnessError> {
    let table: Table = text
        .parse()
        .map_err(|e: toml::de::Error| HarnessError::Config(e.to_string()))?;
    let list = match table.get("strategy") {
        Some(Value::Array(a)) => a,
        _ => return Err(HarnessError::Config("expected one or more [[strategy]] tables".into())),
    };
    if let Some(k) = table.keys().find(|k| *k != "strategy") {
        return Err(HarnessError::Config(format!("unknown top-level key `{k}`")));
    }
    let mut out: Vec<Strategy> = Vec::new();
    for (i, item) in list.iter().enumerate() {
        let t = item
            .as_table()
            .ok_or_else(|| HarnessError::Config(format!("strategy #{} is not a table", i + 1)))?;
        if !t.contains_key("name") {
            return Err(HarnessError::Config(format!("strategy #{} has no name", i + 1)));
        }
        let mut s = Strategy::new("", SolveConfig::default());
        for (k, v) in t {
            apply_key(&mut s, k, v, base_dir)?;
        }
        if out.iter().any(|o| o.name == s.name) {
            return Err(HarnessError::Config(format!("duplicate strategy name `{}`", s.name)));
        }
        out.push(s);
    }
    Ok(out)
}
