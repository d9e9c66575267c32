use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{Map, Value};
use sqdb_core::{CostReport, Transcript};

use crate::CliError;

pub type Fields = BTreeMap<String, Value>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Aggregate of the quantum runs and the classical baseline runs of one row.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TranscriptSummary {
    pub quantum_runs: u64,
    pub quantum_successes: u64,
    pub quantum_oracle_calls: u64,
    pub max_quantum_calls_per_run: u64,
    pub min_outcome_probability: Option<f64>,
    pub min_kickback_fidelity: Option<f64>,
    pub classical_runs: u64,
    pub classical_successes: u64,
    pub classical_oracle_calls: u64,
}

impl TranscriptSummary {
    pub fn add_quantum(&mut self, t: &Transcript) {
        self.quantum_runs += 1;
        self.quantum_successes += t.success as u64;
        self.quantum_oracle_calls += t.oracle_calls;
        self.max_quantum_calls_per_run = self.max_quantum_calls_per_run.max(t.oracle_calls);
        let p = t.final_outcome_probability;
        self.min_outcome_probability = Some(self.min_outcome_probability.map_or(p, |q| q.min(p)));
        if let Some(f) = t.kickback_fidelity {
            self.min_kickback_fidelity = Some(self.min_kickback_fidelity.map_or(f, |g| g.min(f)));
        }
    }

    pub fn add_classical(&mut self, t: &Transcript) {
        self.classical_runs += 1;
        self.classical_successes += t.success as u64;
        self.classical_oracle_calls += t.oracle_calls;
    }

    pub fn mean_classical_calls(&self) -> f64 {
        self.classical_oracle_calls as f64 / self.classical_runs.max(1) as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub algorithm: String,
    pub params: Fields,
    pub predicted: Fields,
    pub observed: Fields,
    pub transcripts_summary: Option<TranscriptSummary>,
    pub cost_report: Option<CostReport>,
}

impl Report {
    pub fn new(algorithm: &str) -> Self {
        Self {
            algorithm: algorithm.into(),
            params: Fields::new(),
            predicted: Fields::new(),
            observed: Fields::new(),
            transcripts_summary: None,
            cost_report: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.into(), value.into());
        self
    }

    pub fn predict(&mut self, key: &str, value: impl Into<Value>) {
        self.predicted.insert(key.into(), value.into());
    }

    pub fn observe(&mut self, key: &str, value: impl Into<Value>) {
        self.observed.insert(key.into(), value.into());
    }
}

/// JSON array of records, or one CSV row per record with nested fields
/// flattened to dotted column names.
pub fn render(reports: &[Report], format: OutputFormat) -> Result<String, CliError> {
    match format {
        OutputFormat::Json => {
            let mut text = serde_json::to_string_pretty(reports)
                .map_err(|e| CliError::Invariant(format!("report serialization: {e}")))?;
            text.push('\n');
            Ok(text)
        }
        OutputFormat::Csv => render_csv(reports),
    }
}

fn flatten(prefix: &str, value: &Value, out: &mut BTreeMap<String, String>) {
    match value {
        Value::Object(map) => flatten_map(prefix, map, out),
        Value::Null => {
            out.insert(prefix.into(), String::new());
        }
        Value::String(s) => {
            out.insert(prefix.into(), s.clone());
        }
        other => {
            out.insert(prefix.into(), other.to_string());
        }
    }
}

fn flatten_map(prefix: &str, map: &Map<String, Value>, out: &mut BTreeMap<String, String>) {
    for (k, v) in map {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        flatten(&key, v, out);
    }
}

fn render_csv(reports: &[Report]) -> Result<String, CliError> {
    let rows = reports
        .iter()
        .map(|r| {
            let value = serde_json::to_value(r)
                .map_err(|e| CliError::Invariant(format!("report serialization: {e}")))?;
            let mut row = BTreeMap::new();
            flatten("", &value, &mut row);
            Ok(row)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let order = ["algorithm", "params", "predicted", "observed", "transcripts_summary", "cost_report"];
    let mut columns: Vec<String> = rows.iter().flat_map(|r| r.keys().cloned()).collect();
    columns.sort_by_key(|c| {
        let head = c.split('.').next().unwrap_or_default();
        (order.iter().position(|o| *o == head).unwrap_or(order.len()), c.clone())
    });
    columns.dedup();
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(&columns).map_err(csv_error)?;
    for row in &rows {
        writer
            .write_record(columns.iter().map(|c| row.get(c).map(String::as_str).unwrap_or("")))
            .map_err(csv_error)?;
    }
    let bytes = writer.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Invariant(e.to_string()))
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<Report> {
        let mut a = Report::new("x").param("n", 3).param("A", 2);
        a.predict("p", 0.5);
        a.observe("p", 0.25);
        let mut b = Report::new("y").param("n", 4);
        b.observe("note", "ok, fine");
        b.transcripts_summary = Some(TranscriptSummary { quantum_runs: 2, ..Default::default() });
        vec![a, b]
    }

    #[test]
    fn csv_flattens_and_aligns_columns() {
        let text = render(&sample(), OutputFormat::Csv).unwrap();
        let mut lines = text.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with("algorithm,params.A,params.n,predicted.p,observed.note,observed.p"));
        assert!(header.contains("transcripts_summary.quantum_runs"));
        let first = lines.next().unwrap();
        assert!(first.starts_with("x,2,3,0.5,,0.25"));
        let second = lines.next().unwrap();
        assert!(second.starts_with("y,,4,,\"ok, fine\","));
    }

    #[test]
    fn json_is_an_array_of_records() {
        let text = render(&sample(), OutputFormat::Json).unwrap();
        let value: Value = serde_json::from_str(&text).unwrap();
        let rows = value.as_array().unwrap();
        assert_eq!(rows.len(), 2);
        for key in ["algorithm", "params", "predicted", "observed", "transcripts_summary", "cost_report"] {
            assert!(rows[0].get(key).is_some(), "{key}");
        }
        assert_eq!(rows[1]["transcripts_summary"]["quantum_runs"], 2);
    }
}
