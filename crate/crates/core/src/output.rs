//! CSV and JSON emission with a versioned envelope.

use std::io::Write;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Writes `rows` as CSV with a header line.
pub fn write_csv<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// `{"schema_version": .., "kind": .., "data": ..}`
pub fn envelope<T: Serialize>(kind: &str, data: &T) -> Value {
    json!({
        "schema_version": crate::SCHEMA_VERSION,
        "kind": kind,
        "data": data,
    })
}

pub fn write_json<T: Serialize, W: Write>(kind: &str, data: &T, mut out: W) -> Result<()> {
    let text = serde_json::to_string_pretty(&envelope(kind, data)).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}
