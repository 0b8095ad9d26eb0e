use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::{json, Map, Value};

use crate::energy::EnergyModel;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Fully resolved run configuration. Scalars are accepted wherever a list
/// is expected and are treated as one-point grids.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: String,
    pub model: EnergyModel,
    #[serde(deserialize_with = "grid")]
    pub n: Vec<u64>,
    #[serde(deserialize_with = "grid")]
    pub l: Vec<u64>,
    #[serde(deserialize_with = "grid")]
    pub lambda: Vec<f64>,
    #[serde(deserialize_with = "grid")]
    pub eps: Vec<f64>,
    #[serde(deserialize_with = "grid")]
    pub eps1: Vec<f64>,
    /// Explicit saving lengths for `outage-sim`; derived from ε₁ when empty.
    #[serde(deserialize_with = "grid")]
    pub m: Vec<u64>,
    #[serde(deserialize_with = "grid")]
    pub eta: Vec<f64>,
    /// Explicit rates for `adaptive-sim`; derived from the lower quantile when empty.
    #[serde(deserialize_with = "grid")]
    pub rate: Vec<f64>,
    #[serde(deserialize_with = "grid")]
    pub mode: Vec<String>,
    /// `growing` or a constant coherence time taken from `l`.
    #[serde(deserialize_with = "grid")]
    pub regime: Vec<String>,
    pub trials: u64,
    pub seed: u64,
    /// Not part of the recorded config: results do not depend on it.
    #[serde(skip_serializing)]
    pub workers: Option<usize>,
    #[serde(skip_serializing)]
    pub out: Option<String>,
    pub format: Format,
}

fn grid<'de, D, T>(d: D) -> std::result::Result<Vec<T>, D::Error>
where
    D: Deserializer<'de>,
    T: DeserializeOwned,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany<T> {
        Many(Vec<T>),
        One(T),
    }
    Ok(match OneOrMany::<T>::deserialize(d)? {
        OneOrMany::Many(v) => v,
        OneOrMany::One(x) => vec![x],
    })
}

pub fn defaults(command: &str) -> Value {
    let trials = match command {
        "quantile-sim" => 100_000,
        "outage-sim" | "adaptive-sim" => 10_000,
        _ => 0,
    };
    let n = if command == "outage-sim" { 200 } else { 10_000 };
    let eps = if command == "adaptive-sim" { 0.2 } else { 0.5 };
    json!({
        "command": command,
        "model": {"family": "deterministic", "params": {"value": 1.0}},
        "n": [n],
        "l": [1],
        "lambda": [0.5],
        "eps": [eps],
        "eps1": [0.1],
        "m": [],
        "eta": [0.05],
        "rate": [],
        "mode": ["lower", "threshold", "upper"],
        "regime": ["growing", "constant"],
        "trials": trials,
        "seed": 1,
        "workers": null,
        "out": null,
        "format": "csv",
    })
}

/// Recursively overlays `over` onto `base`. Objects merge key by key, any
/// other value replaces. The model is replaced whole so that a family
/// change does not inherit stale parameters.
pub fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) if k != "model" => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Applies `key.path=value`. The value is parsed as JSON and falls back to
/// a plain string.
pub fn apply_set(base: &mut Value, assignment: &str) -> Result<()> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("--set expects key=value, got {assignment:?}")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut cur = base;
    let mut keys = path.split('.').peekable();
    while let Some(key) = keys.next() {
        if key.is_empty() {
            return Err(Error::Config(format!("empty key in --set {path:?}")));
        }
        let obj = match cur {
            Value::Object(m) => m,
            other => {
                *other = Value::Object(Map::new());
                other.as_object_mut().expect("just set")
            }
        };
        if keys.peek().is_none() {
            obj.insert(key.to_string(), value);
            return Ok(());
        }
        cur = obj.entry(key).or_insert_with(|| Value::Object(Map::new()));
    }
    unreachable!("split yields at least one key")
}

pub fn resolve(value: Value) -> Result<RunConfig> {
    let cfg: RunConfig = serde_json::from_value(value).map_err(|e| Error::Config(e.to_string()))?;
    if cfg.trials == 0 && matches!(cfg.command.as_str(), "outage-sim" | "quantile-sim" | "adaptive-sim") {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    Ok(cfg)
}
