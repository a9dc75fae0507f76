//! The run manifest that accompanies every output file: the resolved
//! configuration, artifact version, and every reported metric. Keys are
//! sorted maps so the serialized form is byte-stable across runs.

use std::collections::BTreeMap;

use coinwalk::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Serialize)]
pub struct ArtifactInfo {
    pub name: String,
    pub version: String,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub artifact: ArtifactInfo,
    pub mode: String,
    pub config: BTreeMap<String, String>,
    pub metrics: BTreeMap<String, Value>,
    pub warnings: Vec<String>,
}

impl Manifest {
    pub fn new(mode: &str, config: BTreeMap<String, String>) -> Self {
        Self {
            artifact: ArtifactInfo {
                name: "coinwalk".into(),
                version: env!("CARGO_PKG_VERSION").into(),
            },
            mode: mode.to_string(),
            config,
            metrics: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    pub fn number(&mut self, key: &str, value: f64) {
        self.metrics.insert(key.into(), json!(value));
    }

    pub fn integer(&mut self, key: &str, value: usize) {
        self.metrics.insert(key.into(), json!(value));
    }

    pub fn optional_integer(&mut self, key: &str, value: Option<usize>) {
        self.metrics.insert(
            key.into(),
            match value {
                Some(v) => json!(v),
                None => Value::Null,
            },
        );
    }

    pub fn complex(&mut self, key: &str, value: Complex64) {
        self.metrics
            .insert(key.into(), json!({"re": value.re, "im": value.im}));
    }

    pub fn flag(&mut self, key: &str, value: bool) {
        self.metrics.insert(key.into(), json!(value));
    }

    pub fn list(&mut self, key: &str, value: Value) {
        self.metrics.insert(key.into(), value);
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push(message.into());
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("manifest serializes")
    }
}
