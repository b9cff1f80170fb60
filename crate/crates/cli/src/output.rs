//! CSV and JSON writers shared by every subcommand.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

/// Bumped whenever a column or key changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Prepends `schema_version` to every CSV row.
#[derive(Serialize)]
struct Versioned<'a, R: Serialize> {
    schema_version: u32,
    #[serde(flatten)]
    row: &'a R,
}

#[derive(Serialize)]
struct Document<'a, C: Serialize, R: Serialize> {
    schema_version: u32,
    config: &'a C,
    rows: &'a [R],
}

fn sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Writes `rows` to `path` (stdout when absent). CSV rows carry the schema
/// version as their first column; JSON wraps them with the run config.
pub fn emit<C: Serialize, R: Serialize>(
    path: Option<&Path>,
    format: Format,
    config: &C,
    rows: &[R],
) -> Result<(), String> {
    let mut out = sink(path).map_err(|e| format!("cannot open output: {e}"))?;
    match format {
        Format::Csv => {
            // The csv crate cannot derive headers from flattened structs, so
            // rows go through serde_json maps first.
            let mut w = csv::Writer::from_writer(&mut out);
            let mut header_written = false;
            for row in rows {
                let value = serde_json::to_value(Versioned { schema_version: SCHEMA_VERSION, row })
                    .map_err(|e| e.to_string())?;
                let map = value.as_object().ok_or("row is not a record")?;
                if !header_written {
                    w.write_record(map.keys()).map_err(|e| e.to_string())?;
                    header_written = true;
                }
                w.write_record(map.values().map(csv_field)).map_err(|e| e.to_string())?;
            }
            w.flush().map_err(|e| e.to_string())?;
        }
        Format::Json => {
            let doc = Document { schema_version: SCHEMA_VERSION, config, rows };
            serde_json::to_writer_pretty(&mut out, &doc).map_err(|e| e.to_string())?;
            writeln!(out).map_err(|e| e.to_string())?;
        }
    }
    out.flush().map_err(|e| e.to_string())
}

fn csv_field(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::Null => String::new(),
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
