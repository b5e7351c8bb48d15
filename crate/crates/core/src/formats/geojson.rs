//! Joins per-location results onto GeoJSON features. Geometry is passed
//! through untouched.

use std::collections::HashMap;

use serde_json::{Map, Value};

use crate::error::{Error, Result};

/// Result columns attached to one location; absent values become `null`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LocationRecord {
    pub lif: Option<f64>,
    pub lif_rank: Option<usize>,
    pub local_i: Option<f64>,
    pub lisa_p: Option<f64>,
    pub quadrant: Option<String>,
}

pub const JOINED_PROPERTIES: [&str; 5] = ["lif", "lif_rank", "local_i", "lisa_p", "quadrant"];

#[derive(Debug, Clone, PartialEq)]
pub struct JoinOutcome {
    pub collection: Value,
    /// Features whose key matched no result record.
    pub unmatched: usize,
}

fn key_string(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(match n.as_f64() {
            Some(f) if f.fract() == 0.0 && f.abs() < 1e15 => format!("{}", f as i64),
            _ => n.to_string(),
        }),
        _ => None,
    }
}

fn number(x: Option<f64>) -> Value {
    x.and_then(serde_json::Number::from_f64).map_or(Value::Null, Value::Number)
}

/// Adds the result properties to every feature of a FeatureCollection,
/// matching `key` against the record ids as strings (`1` and `1.0` both
/// match id `"1"`).
pub fn join_geojson(text: &str, key: &str, records: &HashMap<String, LocationRecord>) -> Result<JoinOutcome> {
    let mut collection: Value = serde_json::from_str(text).map_err(|e| Error::MalformedGeoJson(e.to_string()))?;
    if collection.get("type").and_then(Value::as_str) != Some("FeatureCollection") {
        return Err(Error::MalformedGeoJson("top-level object is not a FeatureCollection".into()));
    }
    let features = collection
        .get_mut("features")
        .and_then(Value::as_array_mut)
        .ok_or_else(|| Error::MalformedGeoJson("missing `features` array".into()))?;

    let mut unmatched = 0;
    for (index, feature) in features.iter_mut().enumerate() {
        let props = feature
            .as_object_mut()
            .ok_or_else(|| Error::MalformedGeoJson(format!("feature {index} is not an object")))?
            .entry("properties")
            .or_insert_with(|| Value::Object(Map::new()));
        if props.is_null() {
            *props = Value::Object(Map::new());
        }
        let props = props
            .as_object_mut()
            .ok_or_else(|| Error::MalformedGeoJson(format!("feature {index} has non-object properties")))?;
        let id = props
            .get(key)
            .and_then(key_string)
            .ok_or_else(|| Error::JoinKeyMissing { feature: index, key: key.to_string() })?;
        let rec = match records.get(&id) {
            Some(r) => r.clone(),
            None => {
                unmatched += 1;
                LocationRecord::default()
            }
        };
        props.insert("lif".into(), number(rec.lif));
        props.insert("lif_rank".into(), rec.lif_rank.map_or(Value::Null, Value::from));
        props.insert("local_i".into(), number(rec.local_i));
        props.insert("lisa_p".into(), number(rec.lisa_p));
        props.insert("quadrant".into(), rec.quadrant.map_or(Value::Null, Value::String));
    }
    Ok(JoinOutcome { collection, unmatched })
}
