//! The report every command produces, and its JSON, CSV and text renderings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

/// Finite floats become JSON numbers; infinities and NaN become strings.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or_else(|| {
        Value::String(if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        })
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub name: String,
    pub passed: bool,
    pub measured: Value,
    pub threshold: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub params: Value,
    pub seed: Option<u64>,
    pub version: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub checks: Option<Vec<CheckRow>>,
    pub passed: Option<bool>,
    pub constants: BTreeMap<String, Value>,
    pub observations: Vec<String>,
    pub info: Option<Value>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Text,
}

impl Report {
    pub fn new(command: &str, params: Value, seed: Option<u64>) -> Self {
        Self {
            command: command.to_string(),
            params,
            seed,
            version: ffharm_core::VERSION.to_string(),
            columns: Vec::new(),
            rows: Vec::new(),
            checks: None,
            passed: None,
            constants: BTreeMap::new(),
            observations: Vec::new(),
            info: None,
        }
    }

    pub fn columns(mut self, cols: &[&str]) -> Self {
        self.columns = cols.iter().map(|c| c.to_string()).collect();
        self
    }

    pub fn row(&mut self, values: Vec<Value>) {
        debug_assert_eq!(values.len(), self.columns.len());
        self.rows.push(values);
    }

    pub fn constant(&mut self, name: impl Into<String>, value: f64) {
        self.constants.insert(name.into(), num(value));
    }

    /// The machine-readable form:
    /// `{command, params, rows|checks, constants, seed, version}`.
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("command".into(), json!(self.command));
        m.insert("params".into(), self.params.clone());
        if let Some(checks) = &self.checks {
            m.insert("checks".into(), serde_json::to_value(checks).expect("checks serialize"));
            m.insert("passed".into(), json!(self.passed.unwrap_or(false)));
        } else {
            let rows: Vec<Value> = self
                .rows
                .iter()
                .map(|r| Value::Object(self.columns.iter().cloned().zip(r.iter().cloned()).collect()))
                .collect();
            m.insert("rows".into(), Value::Array(rows));
        }
        m.insert("constants".into(), Value::Object(self.constants.clone().into_iter().collect()));
        if !self.observations.is_empty() {
            m.insert("observations".into(), json!(self.observations));
        }
        if let Some(info) = &self.info {
            m.insert("info".into(), info.clone());
        }
        m.insert("seed".into(), json!(self.seed));
        m.insert("version".into(), json!(self.version));
        Value::Object(m)
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("json");
                s.push('\n');
                s
            }
            OutputFormat::Csv => self.render_csv(),
            OutputFormat::Text => self.render_text(),
        }
    }

    fn table(&self) -> (Vec<String>, Vec<Vec<String>>) {
        match &self.checks {
            Some(checks) => (
                ["name", "passed", "measured", "threshold"].iter().map(|s| s.to_string()).collect(),
                checks
                    .iter()
                    .map(|c| vec![c.name.clone(), c.passed.to_string(), cell(&c.measured), cell(&c.threshold)])
                    .collect(),
            ),
            None => (self.columns.clone(), self.rows.iter().map(|r| r.iter().map(cell).collect()).collect()),
        }
    }

    fn render_csv(&self) -> String {
        let (header, rows) = self.table();
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&header).expect("in-memory csv");
        for r in &rows {
            w.write_record(r).expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8")
    }

    fn render_text(&self) -> String {
        let (header, rows) = self.table();
        let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
        for r in &rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.len());
            }
        }
        let line = |cells: &[String]| -> String {
            let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            parts.join("  ").trim_end().to_string()
        };
        let mut out = format!("# {} (version {}", self.command, self.version);
        if let Some(seed) = self.seed {
            out.push_str(&format!(", seed {seed}"));
        }
        out.push_str(")\n");
        if !header.is_empty() {
            out.push_str(&line(&header));
            out.push('\n');
            for r in &rows {
                out.push_str(&line(r));
                out.push('\n');
            }
        }
        if let Some(p) = self.passed {
            out.push_str(if p { "result: pass\n" } else { "result: FAIL\n" });
        }
        for (k, v) in &self.constants {
            out.push_str(&format!("{k} = {}\n", cell(v)));
        }
        for o in &self.observations {
            out.push_str(&format!("note: {o}\n"));
        }
        out
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}
