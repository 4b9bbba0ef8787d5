//! Fixture documents: JSON with `genus`, `tau`, optional `points` and
//! `vectors`, and a required `provenance` note.

use std::collections::BTreeMap;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::theta::PeriodMatrix;
use crate::C64;

/// Names accepted under `"vectors"`.
pub const VECTOR_KEYS: [&str; 6] = ["U1", "U2", "U3", "Z", "V", "W"];
const TOP_KEYS: [&str; 5] = ["genus", "tau", "points", "vectors", "provenance"];

/// A validated fixture document.
#[derive(Clone, Debug)]
pub struct FixtureDocument {
    pub genus: usize,
    pub tau: PeriodMatrix,
    pub points: BTreeMap<String, Vec<C64>>,
    pub vectors: BTreeMap<String, Vec<C64>>,
    pub provenance: String,
}

impl FixtureDocument {
    pub fn vector(&self, key: &str) -> Option<&[C64]> {
        self.vectors.get(key).map(|v| v.as_slice())
    }

    pub fn point(&self, name: &str) -> Result<&[C64]> {
        self.points
            .get(name)
            .map(|v| v.as_slice())
            .ok_or_else(|| schema(&format!("$.points.{name}"), "named point is missing"))
    }

    /// JSON text of this document (round-trips through [`parse_fixture`]).
    pub fn to_json(&self) -> String {
        let pair = |z: &C64| Value::from(vec![z.re, z.im]);
        let vec = |v: &[C64]| Value::from(v.iter().map(pair).collect::<Vec<_>>());
        let mut doc = serde_json::Map::new();
        doc.insert("genus".into(), Value::from(self.genus));
        doc.insert("tau".into(), Value::from(self.tau.rows().iter().map(|r| vec(r)).collect::<Vec<_>>()));
        if !self.points.is_empty() {
            let m: serde_json::Map<String, Value> = self.points.iter().map(|(k, v)| (k.clone(), vec(v))).collect();
            doc.insert("points".into(), Value::Object(m));
        }
        if !self.vectors.is_empty() {
            let m: serde_json::Map<String, Value> = self.vectors.iter().map(|(k, v)| (k.clone(), vec(v))).collect();
            doc.insert("vectors".into(), Value::Object(m));
        }
        doc.insert("provenance".into(), Value::from(self.provenance.clone()));
        serde_json::to_string_pretty(&Value::Object(doc)).expect("serializable")
    }
}

fn schema(path: &str, message: &str) -> Error {
    Error::SchemaError { path: path.to_string(), message: message.to_string() }
}

fn complex(v: &Value, path: &str) -> Result<C64> {
    let arr = v.as_array().ok_or_else(|| schema(path, "expected a [re, im] pair"))?;
    if arr.len() != 2 {
        return Err(schema(path, "expected a [re, im] pair"));
    }
    let re = arr[0].as_f64().ok_or_else(|| schema(&format!("{path}[0]"), "expected a number"))?;
    let im = arr[1].as_f64().ok_or_else(|| schema(&format!("{path}[1]"), "expected a number"))?;
    Ok(C64::new(re, im))
}

fn gvector(v: &Value, g: usize, path: &str) -> Result<Vec<C64>> {
    let arr = v.as_array().ok_or_else(|| schema(path, "expected an array of [re, im] pairs"))?;
    if arr.len() != g {
        return Err(schema(path, &format!("expected {g} entries, got {}", arr.len())));
    }
    arr.iter().enumerate().map(|(i, x)| complex(x, &format!("{path}[{i}]"))).collect()
}

/// Parse and validate a fixture document.
pub fn parse_fixture(text: &str) -> Result<FixtureDocument> {
    let root: Value = serde_json::from_str(text).map_err(|e| schema("$", &format!("invalid JSON: {e}")))?;
    let obj = root.as_object().ok_or_else(|| schema("$", "expected an object"))?;
    for k in obj.keys() {
        if !TOP_KEYS.contains(&k.as_str()) {
            return Err(schema(&format!("$.{k}"), "unknown key"));
        }
    }
    let genus = obj
        .get("genus")
        .ok_or_else(|| schema("$.genus", "missing"))?
        .as_u64()
        .filter(|&g| g >= 1)
        .ok_or_else(|| schema("$.genus", "expected a positive integer"))? as usize;
    let rows = obj
        .get("tau")
        .ok_or_else(|| schema("$.tau", "missing"))?
        .as_array()
        .ok_or_else(|| schema("$.tau", "expected an array of rows"))?;
    if rows.len() != genus {
        return Err(schema("$.tau", &format!("expected {genus} rows, got {}", rows.len())));
    }
    let mut flat = Vec::with_capacity(genus * genus);
    for (i, row) in rows.iter().enumerate() {
        flat.extend(gvector(row, genus, &format!("$.tau[{i}]"))?);
    }
    let tau = PeriodMatrix::from_flat(genus, &flat).map_err(|e| match e {
        Error::AsymmetricInput { .. } | Error::NotPositiveDefinite { .. } => {
            Error::InvariantViolation(format!("$.tau: {e}"))
        }
        other => other,
    })?;
    let mut points = BTreeMap::new();
    if let Some(p) = obj.get("points") {
        let m = p.as_object().ok_or_else(|| schema("$.points", "expected an object"))?;
        for (k, v) in m {
            points.insert(k.clone(), gvector(v, genus, &format!("$.points.{k}"))?);
        }
    }
    let mut vectors = BTreeMap::new();
    if let Some(p) = obj.get("vectors") {
        let m = p.as_object().ok_or_else(|| schema("$.vectors", "expected an object"))?;
        for (k, v) in m {
            if !VECTOR_KEYS.contains(&k.as_str()) {
                return Err(schema(&format!("$.vectors.{k}"), "unknown key"));
            }
            vectors.insert(k.clone(), gvector(v, genus, &format!("$.vectors.{k}"))?);
        }
    }
    let provenance = obj
        .get("provenance")
        .ok_or_else(|| schema("$.provenance", "missing"))?
        .as_str()
        .ok_or_else(|| schema("$.provenance", "expected a string"))?
        .to_string();
    Ok(FixtureDocument { genus, tau, points, vectors, provenance })
}

/// Read and parse a fixture file.
pub fn read_fixture(path: &std::path::Path) -> Result<FixtureDocument> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_fixture(&text)
}
