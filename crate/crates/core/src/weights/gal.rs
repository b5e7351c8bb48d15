//! GAL adjacency files.
//!
//! ```text
//! 3                 <- n, or the 4-token form "0 3 shapefile key"
//! a 2               <- id, neighbor count
//! b c               <- neighbor ids
//! b 1
//! a
//! c 0
//!                   <- empty neighbor line for an island
//! ```
//!
//! Parsing keeps record and neighbor order so that writing a parsed file
//! back reproduces it byte for byte when it uses single spaces and `\n`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::weights::SpatialWeights;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GalHeader {
    /// A single line holding the location count.
    Count,
    /// `first n shapefile key`; only `n` is interpreted.
    Extended { first: String, shapefile: String, key: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GalRecord {
    pub id: String,
    pub neighbors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GalFile {
    pub header: GalHeader,
    pub records: Vec<GalRecord>,
}

fn gal_err(line: usize, message: impl Into<String>) -> Error {
    Error::Gal { line, message: message.into() }
}

impl GalFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (_, head) = lines.next().ok_or_else(|| gal_err(1, "empty file"))?;
        let tokens: Vec<&str> = head.split_whitespace().collect();
        let (header, count_token) = match tokens.as_slice() {
            [n] => (GalHeader::Count, *n),
            [first, n, shapefile, key] => (
                GalHeader::Extended {
                    first: first.to_string(),
                    shapefile: shapefile.to_string(),
                    key: key.to_string(),
                },
                *n,
            ),
            _ => return Err(gal_err(1, "header must have 1 or 4 tokens")),
        };
        let n: usize = count_token.parse().map_err(|_| gal_err(1, format!("bad count `{count_token}`")))?;

        let mut records = Vec::with_capacity(n);
        while records.len() < n {
            let (lineno, line) =
                lines.next().ok_or_else(|| gal_err(0, format!("expected {n} records, found {}", records.len())))?;
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let [id, k] = tokens.as_slice() else {
                return Err(gal_err(lineno, "record line must be `id count`"));
            };
            let k: usize = k.parse().map_err(|_| gal_err(lineno, format!("bad neighbor count `{k}`")))?;
            let neighbors: Vec<String> = match lines.next() {
                Some((_, nl)) => nl.split_whitespace().map(str::to_owned).collect(),
                None if k == 0 => Vec::new(),
                None => return Err(gal_err(lineno + 1, "missing neighbor line")),
            };
            if neighbors.len() != k {
                return Err(gal_err(
                    lineno + 1,
                    format!("record `{id}` announces {k} neighbors, lists {}", neighbors.len()),
                ));
            }
            records.push(GalRecord { id: id.to_string(), neighbors });
        }
        if let Some((lineno, _)) = lines.find(|(_, l)| !l.trim().is_empty()) {
            return Err(gal_err(lineno, "trailing content after last record"));
        }
        Ok(Self { header, records })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn to_gal_string(&self) -> String {
        let n = self.records.len();
        let mut out = String::new();
        match &self.header {
            GalHeader::Count => writeln!(out, "{n}"),
            GalHeader::Extended { first, shapefile, key } => {
                writeln!(out, "{first} {n} {shapefile} {key}")
            }
        }
        .expect("writing to String");
        for r in &self.records {
            writeln!(out, "{} {}", r.id, r.neighbors.len()).expect("writing to String");
            out.push_str(&r.neighbors.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_gal_string())?;
        Ok(())
    }

    /// Location ids in record order and the binary weights between them.
    pub fn to_weights<T: Scalar>(&self) -> Result<(Vec<String>, SpatialWeights<T>)> {
        let mut index = HashMap::with_capacity(self.records.len());
        for (i, r) in self.records.iter().enumerate() {
            if index.insert(r.id.as_str(), i).is_some() {
                return Err(Error::DuplicateId(r.id.clone()));
            }
        }
        let adjacency = self
            .records
            .iter()
            .map(|r| {
                r.neighbors
                    .iter()
                    .map(|nb| index.get(nb.as_str()).copied().ok_or_else(|| Error::UnknownId(nb.clone())))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let ids = self.records.iter().map(|r| r.id.clone()).collect();
        Ok((ids, SpatialWeights::from_adjacency(adjacency)?))
    }

    /// Adjacency structure of `weights`; weight values are not representable in GAL.
    pub fn from_weights<T: Scalar>(ids: &[String], weights: &SpatialWeights<T>) -> Result<Self> {
        weights.check_len(ids.len())?;
        let records = (0..weights.n())
            .map(|i| GalRecord {
                id: ids[i].clone(),
                neighbors: weights.neighbors(i).iter().map(|&j| ids[j].clone()).collect(),
            })
            .collect();
        Ok(Self { header: GalHeader::Count, records })
    }
}
