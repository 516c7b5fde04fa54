use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use glq_core::geometry::Triangle;
use serde::Deserialize;

/// One triangle pair with its position in the input, for messages.
#[derive(Debug, Clone)]
pub struct PairRecord {
    pub id: String,
    pub location: String,
    pub x: [[f64; 3]; 3],
    pub y: [[f64; 3]; 3],
}

impl PairRecord {
    pub fn triangles(&self) -> glq_core::Result<(Triangle, Triangle)> {
        Ok((Triangle::from_arrays(self.x)?, Triangle::from_arrays(self.y)?))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonPair {
    id: String,
    x: [[f64; 3]; 3],
    y: [[f64; 3]; 3],
}

pub const CSV_COLUMNS: [&str; 19] = [
    "id", "x1x", "x1y", "x1z", "x2x", "x2y", "x2z", "x3x", "x3y", "x3z", "y1x", "y1y", "y1z", "y2x", "y2y", "y2z", "y3x",
    "y3y", "y3z",
];

fn check_finite(r: &PairRecord) -> Result<()> {
    if r.x.iter().chain(&r.y).flatten().all(|c| c.is_finite()) {
        Ok(())
    } else {
        bail!("{} (id {:?}): non-finite coordinate", r.location, r.id)
    }
}

/// Reads a JSON array or a CSV file, chosen by extension.
pub fn read_pairs(path: &Path) -> Result<Vec<PairRecord>> {
    let text = std::fs::read_to_string(path).with_context(|| path.display().to_string())?;
    let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
    let records = match ext.as_deref() {
        Some("json") => parse_json(&text),
        Some("csv") => parse_csv(&text),
        _ => bail!("{}: cannot tell the format, expected a .json or .csv extension", path.display()),
    }
    .with_context(|| path.display().to_string())?;
    records.iter().try_for_each(check_finite)?;
    Ok(records)
}

pub fn parse_json(text: &str) -> Result<Vec<PairRecord>> {
    let raw: Vec<serde_json::Value> = serde_json::from_str(text)?;
    raw.into_iter()
        .enumerate()
        .map(|(k, v)| {
            let p: JsonPair = serde_json::from_value(v).map_err(|e| anyhow!("record {k}: {e}"))?;
            Ok(PairRecord { id: p.id, location: format!("record {k}"), x: p.x, y: p.y })
        })
        .collect()
}

pub fn parse_csv(text: &str) -> Result<Vec<PairRecord>> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = reader.headers()?.clone();
    if header.iter().ne(CSV_COLUMNS) {
        bail!("line 1: expected header {}", CSV_COLUMNS.join(","));
    }
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let id = row.get(0).unwrap_or_default().to_string();
        if row.len() != CSV_COLUMNS.len() {
            bail!("line {line} (id {id:?}): expected {} columns, found {}", CSV_COLUMNS.len(), row.len());
        }
        let mut c = [0.0; 18];
        for (k, slot) in c.iter_mut().enumerate() {
            let field = &row[k + 1];
            *slot = field
                .parse()
                .map_err(|_| anyhow!("line {line} (id {id:?}): column {} is not a number: {field:?}", CSV_COLUMNS[k + 1]))?;
        }
        let p = |i: usize| [c[3 * i], c[3 * i + 1], c[3 * i + 2]];
        out.push(PairRecord { id, location: format!("line {line}"), x: [p(0), p(1), p(2)], y: [p(3), p(4), p(5)] });
    }
    Ok(out)
}
