//! Parameter sweeps: one independent solve per value, run on a rayon pool.

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::commands::{run_command, Command};
use crate::config::{from_value, inline_reaction, normalize, RunConfig};
use crate::error::CliError;
use crate::output::{csv_bytes, json_bytes, write_atomic, Cell, SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Dotted path into the configuration, e.g. `reaction.a`.
    pub field: String,
    pub values: Vec<f64>,
}

/// Parses `field=v1,v2,...`; an empty value list is allowed.
pub fn parse_sweep(arg: &str) -> Result<SweepSpec, CliError> {
    let invalid = |msg: String| CliError::Validation(vec![format!("--sweep: {msg}")]);
    let (field, list) = arg
        .split_once('=')
        .ok_or_else(|| invalid(format!("expected field=v1,v2,..., got '{arg}'")))?;
    let field = field.trim();
    if field.is_empty() || field.split('.').any(str::is_empty) {
        return Err(invalid(format!("malformed field path '{field}'")));
    }
    let values = list
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| {
            v.parse::<f64>()
                .map_err(|_| invalid(format!("'{v}' is not a number")))
        })
        .collect::<Result<_, _>>()?;
    Ok(SweepSpec {
        field: field.to_string(),
        values,
    })
}

fn lookup<'v>(value: &'v Value, field: &str) -> Option<&'v Value> {
    field.split('.').try_fold(value, |v, key| v.get(key))
}

fn assign(value: &mut Value, field: &str, x: f64) {
    let mut node = value;
    for key in field.split('.') {
        if !node.is_object() {
            *node = Value::Object(Default::default());
        }
        node = node
            .as_object_mut()
            .expect("object")
            .entry(key.to_string())
            .or_insert(Value::Null);
    }
    *node = serde_json::json!(x);
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub index: usize,
    pub value: f64,
    pub status: String,
    pub message: Option<String>,
    pub metrics: Vec<Option<f64>>,
    pub warnings: Vec<String>,
    pub directory: String,
}

#[derive(Serialize)]
struct SweepArtifact<'a> {
    schema_version: u32,
    command: &'a str,
    config: &'a RunConfig,
    field: &'a str,
    metric_names: &'a [&'a str],
    rows: &'a [SweepRow],
}

/// Runs `cmd` once per value. Row failures are recorded, not propagated.
pub fn run_sweep(
    cmd: Command,
    raw: &Value,
    spec: &SweepSpec,
    out: &Path,
    threads: Option<usize>,
) -> Result<Vec<SweepRow>, CliError> {
    // Presets are inlined first so that fields such as `reaction.a` exist;
    // every other default is re-derived per row.
    let base = inline_reaction(raw)?;
    let base_cfg: RunConfig = serde_json::from_value(base.clone())
        .map_err(|e| CliError::Validation(vec![format!("config: {e}")]))?;
    let normalized = normalize(base_cfg)?.config;
    let normalized_value = serde_json::to_value(&normalized).expect("serializable");
    if !lookup(&normalized_value, &spec.field).is_some_and(Value::is_number) {
        return Err(CliError::Validation(vec![format!(
            "--sweep: '{}' is not a numeric configuration field",
            spec.field
        )]));
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Validation(vec![format!("BW_THREADS: {e}")]))?;
    let rows: Vec<SweepRow> = pool.install(|| {
        spec.values
            .par_iter()
            .enumerate()
            .map(|(index, &value)| {
                let directory = format!("rows/row_{index:03}");
                let mut cfg = base.clone();
                assign(&mut cfg, &spec.field, value);
                let outcome =
                    from_value(cfg).and_then(|r| run_command(cmd, &r, &out.join(&directory)));
                let (status, message, metrics, warnings) = match outcome {
                    Ok(s) => ("ok".to_string(), None, s.metrics, s.warnings),
                    Err(e) => (
                        e.status().to_string(),
                        Some(e.to_string()),
                        vec![None; cmd.metric_names().len()],
                        Vec::new(),
                    ),
                };
                SweepRow {
                    index,
                    value,
                    status,
                    message,
                    metrics,
                    warnings,
                    directory,
                }
            })
            .collect()
    });

    let names = cmd.metric_names();
    let mut header = vec!["index", spec.field.as_str(), "status"];
    header.extend_from_slice(names);
    let table = rows.iter().map(|row| {
        let mut cells = vec![
            Cell::Int(row.index),
            Cell::Num(row.value),
            Cell::Text(row.status.clone()),
        ];
        cells.extend(row.metrics.iter().map(|&m| Cell::from(m)));
        cells
    });
    write_atomic(&out.join("sweep.csv"), &csv_bytes(&header, table))?;
    let artifact = SweepArtifact {
        schema_version: SCHEMA_VERSION,
        command: cmd.name(),
        config: &normalized,
        field: &spec.field,
        metric_names: names,
        rows: &rows,
    };
    write_atomic(&out.join("sweep.json"), &json_bytes(&artifact))?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_argument_parsing() {
        let s = parse_sweep("reaction.a=0.1, 0.2,0.45").unwrap();
        assert_eq!(s.field, "reaction.a");
        assert_eq!(s.values, [0.1, 0.2, 0.45]);
        assert!(parse_sweep("reaction.a=").unwrap().values.is_empty());
        assert!(parse_sweep("reaction.a").is_err());
        assert!(parse_sweep("reaction..a=1").is_err());
        assert!(parse_sweep("grid.dx=0.1,x").is_err());
    }

    #[test]
    fn assignment_creates_missing_objects() {
        let mut v = serde_json::json!({"reaction": "quadratic_demo"});
        assign(&mut v, "grid.dx", 0.1);
        assert_eq!(v["grid"]["dx"], 0.1);
        assert_eq!(lookup(&v, "grid.dx"), Some(&serde_json::json!(0.1)));
        assert_eq!(lookup(&v, "grid.dy"), None);
    }
}
