//! Run records: a single JSON document per invocation.

use std::f64::consts::LN_2;
use std::time::Instant;

use serde_json::{Map, Value};

pub const SIGNIFICANT_DIGITS: usize = 12;

/// `v` rounded to 12 significant digits. Non-finite values become strings
/// since JSON has no literal for them.
pub fn num(v: f64) -> Value {
    if !v.is_finite() {
        return Value::String(
            if v.is_nan() {
                "nan"
            } else if v > 0.0 {
                "inf"
            } else {
                "-inf"
            }
            .into(),
        );
    }
    let rounded: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v).parse().expect("formatted float parses");
    // keep -0 out of golden files
    Value::from(if rounded == 0.0 { 0.0 } else { rounded })
}

pub fn nums(values: &[f64]) -> Value {
    Value::Array(values.iter().map(|v| num(*v)).collect())
}

/// Presentation-layer unit conversion for logarithmic quantities.
#[derive(Debug, Clone, Copy)]
pub struct Units {
    pub bits: bool,
}

impl Units {
    pub fn name(self) -> &'static str {
        if self.bits {
            "bits"
        } else {
            "nats"
        }
    }

    pub fn scale(self, nats: f64) -> f64 {
        if self.bits {
            nats / LN_2
        } else {
            nats
        }
    }

    pub fn num(self, nats: f64) -> Value {
        num(self.scale(nats))
    }
}

pub struct RunRecord {
    command: String,
    input: Option<String>,
    config: Map<String, Value>,
    started: Instant,
}

impl RunRecord {
    pub fn new(command: &str, input: Option<String>) -> Self {
        RunRecord {
            command: command.to_string(),
            input,
            config: Map::new(),
            started: Instant::now(),
        }
    }

    pub fn config(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.config.insert(key.to_string(), value.into());
        self
    }

    pub fn finish(self, result: Map<String, Value>, timing: bool) -> String {
        let mut doc = Map::new();
        doc.insert("command".into(), Value::String(self.command));
        if let Some(input) = self.input {
            doc.insert("input".into(), Value::String(input));
        }
        doc.insert("config".into(), Value::Object(self.config));
        doc.insert("result".into(), Value::Object(result));
        if timing {
            doc.insert("wall_clock_seconds".into(), Value::from(self.started.elapsed().as_secs_f64()));
        }
        doc.insert("version".into(), Value::String(hcap_core::VERSION.into()));
        serde_json::to_string_pretty(&Value::Object(doc)).expect("json values serialize")
    }
}
