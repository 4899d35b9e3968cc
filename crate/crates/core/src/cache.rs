//! Solved-table cache files.
//!
//! A cache is a compact JSON document
//! `{"format_version":1,"spec":{..},"values":[..],"goal_as_start":..}` with
//! `-1` standing for unwinnable entries, followed by a newline. Field order
//! and number formatting are fixed, so a given spec always produces the same
//! bytes.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::GoalSpec;
use crate::solver::{RemotenessTable, UNWINNABLE};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct TableDocument {
    format_version: u32,
    spec: GoalSpec,
    values: Vec<i64>,
    goal_as_start: Option<i64>,
}

fn to_stored(v: u32) -> i64 {
    if v == UNWINNABLE {
        -1
    } else {
        v as i64
    }
}

fn from_stored(v: i64) -> Result<u32> {
    match v {
        -1 => Ok(UNWINNABLE),
        v if (0..UNWINNABLE as i64).contains(&v) => Ok(v as u32),
        v => Err(Error::Cache(format!("bad remoteness entry {v}"))),
    }
}

pub fn to_bytes(table: &RemotenessTable) -> Result<Vec<u8>> {
    let doc = TableDocument {
        format_version: FORMAT_VERSION,
        spec: table.spec().clone(),
        values: table.values().iter().map(|&v| to_stored(v)).collect(),
        goal_as_start: table.goal_as_start().map(to_stored),
    };
    let mut bytes = serde_json::to_vec(&doc)?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn from_bytes(bytes: &[u8]) -> Result<RemotenessTable> {
    let doc: TableDocument = serde_json::from_slice(bytes)?;
    if doc.format_version != FORMAT_VERSION {
        return Err(Error::Cache(format!("unsupported format_version {}", doc.format_version)));
    }
    let values = doc.values.into_iter().map(from_stored).collect::<Result<Vec<_>>>()?;
    let goal_as_start = doc.goal_as_start.map(from_stored).transpose()?;
    RemotenessTable::from_parts(doc.spec, values, goal_as_start)
}

pub fn write_cache(table: &RemotenessTable, path: &Path) -> Result<()> {
    fs::write(path, to_bytes(table)?)?;
    Ok(())
}

pub fn read_cache(path: &Path) -> Result<RemotenessTable> {
    from_bytes(&fs::read(path)?)
}
