use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

use super::config::{Format, Kind};
use super::record::{Field, ResultRecord};

/// Written as the first line of every CSV and as the `schema` field of JSON.
pub const SCHEMA_VERSION: &str = "galign/1";

#[derive(Debug, Serialize, Deserialize)]
struct JsonDocument {
    schema: String,
    kind: Kind,
    records: Vec<ResultRecord>,
}

/// Writes records of one kind to `path`. An empty slice still produces the
/// header (CSV) or an empty record list (JSON).
pub fn write_results(records: &[ResultRecord], kind: Kind, format: Format, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    match format {
        Format::Csv => write_csv(&mut w, kind, records),
        Format::Json => write_json(&mut w, kind, records),
    }
    .map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })?;
    w.flush().map_err(|e| Error::io(path, e))
}

/// `# schema=galign/1 kind=<kind>`, the column header, then one row per
/// record. Reals are printed with 17 significant digits, absent values as
/// empty fields.
pub fn write_csv(mut w: impl Write, kind: Kind, records: &[ResultRecord]) -> Result<()> {
    let io = |e| Error::io("<csv>", e);
    writeln!(w, "# schema={SCHEMA_VERSION} kind={kind}").map_err(io)?;
    let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    let columns = ResultRecord::columns(kind);
    let csv_err = |e: csv::Error| Error::io("<csv>", e.into());
    out.write_record(&columns).map_err(csv_err)?;
    for r in records {
        if r.kind != kind {
            return invalid(format!("record of kind {} in a {kind} table", r.kind));
        }
        let mut row: Vec<String> = vec![r.cell.to_string(), r.rep.to_string(), r.seed.to_string()];
        row.extend(r.param_fields().into_iter().map(|f| f.map(format_field).unwrap_or_default()));
        match &r.metrics {
            Some(m) => row.extend(m.fields().into_iter().map(format_field)),
            None => row.extend(std::iter::repeat_n(String::new(), columns.len() - row.len() - 3)),
        }
        row.push(r.runtime_ms.map(format_real).unwrap_or_default());
        row.push(r.error.clone().unwrap_or_default());
        row.push(r.version.clone());
        debug_assert_eq!(row.len(), columns.len());
        out.write_record(&row).map_err(csv_err)?;
    }
    out.flush().map_err(io)
}

pub fn write_json(mut w: impl Write, kind: Kind, records: &[ResultRecord]) -> Result<()> {
    if let Some(r) = records.iter().find(|r| r.kind != kind) {
        return invalid(format!("record of kind {} in a {kind} table", r.kind));
    }
    let doc = JsonDocument {
        schema: SCHEMA_VERSION.to_string(),
        kind,
        records: records.to_vec(),
    };
    serde_json::to_writer_pretty(&mut w, &doc)?;
    writeln!(w).map_err(|e| Error::io("<json>", e))
}

/// Reads a file written by [`write_json`].
pub fn read_json(r: impl Read) -> Result<(Kind, Vec<ResultRecord>)> {
    let doc: JsonDocument = serde_json::from_reader(r)?;
    if doc.schema != SCHEMA_VERSION {
        return Err(Error::Parse(format!("unsupported schema `{}`", doc.schema)));
    }
    Ok((doc.kind, doc.records))
}

fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn format_field(f: Field) -> String {
    match f {
        Field::Int(x) => x.to_string(),
        Field::Real(x) => format_real(x),
        Field::Flag(b) => b.to_string(),
    }
}
