//! The learned seed-embedding vocabulary and its on-disk format.
//!
//! File format, one record per line after a header:
//!
//! ```text
//! irvec-vocab v1 dim=<n>
//! E<TAB>name<TAB>v1 v2 ... vn
//! R<TAB>name<TAB>v1 v2 ... vn
//! ```
//!
//! Floats are written with 17 significant decimal digits, which
//! round-trips every finite f64 bit-exactly. Entities come first, then
//! relations, each sorted by name.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::linalg::Vector;

/// Map from entity and relation names to their learned n-dimensional
/// vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedVocabulary {
    pub dimension: usize,
    pub entities: BTreeMap<String, Vector>,
    pub relations: BTreeMap<String, Vector>,
}

impl SeedVocabulary {
    pub fn new(dimension: usize) -> Self {
        SeedVocabulary { dimension, entities: BTreeMap::new(), relations: BTreeMap::new() }
    }

    pub fn entity(&self, name: &str) -> Result<&Vector> {
        self.entities.get(name).ok_or_else(|| Error::UnknownEntity(name.to_string()))
    }

    pub fn relation(&self, name: &str) -> Result<&Vector> {
        self.relations.get(name).ok_or_else(|| Error::UnknownEntity(name.to_string()))
    }

    /// All finite components and consistent lengths.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in self.entities.iter().chain(self.relations.iter()) {
            if v.len() != self.dimension {
                return Err(Error::DimensionMismatch { expected: self.dimension, got: v.len() });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Format(format!("non-finite component in `{}`", name)));
            }
        }
        Ok(())
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "irvec-vocab v1 dim={}", self.dimension);
        for (name, v) in &self.entities {
            let _ = writeln!(out, "E\t{}\t{}", name, format_components(v));
        }
        for (name, v) in &self.relations {
            let _ = writeln!(out, "R\t{}\t{}", name, format_components(v));
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<SeedVocabulary> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Format("empty vocabulary file".into()))?;
        let dim = parse_header(header)?;
        let mut vocab = SeedVocabulary::new(dim);
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split('\t');
            let (kind, name, comps) = match (parts.next(), parts.next(), parts.next()) {
                (Some(k), Some(n), Some(c)) => (k, n, c),
                _ => {
                    return Err(Error::Format(format!(
                        "line {}: expected `E|R<TAB>name<TAB>components`",
                        i + 2
                    )))
                }
            };
            let v = parse_components(comps, dim, i + 2)?;
            match kind {
                "E" => vocab.entities.insert(name.to_string(), v),
                "R" => vocab.relations.insert(name.to_string(), v),
                other => {
                    return Err(Error::Format(format!(
                        "line {}: unknown record kind `{}`",
                        i + 2,
                        other
                    )))
                }
            };
        }
        Ok(vocab)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_tsv())?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<SeedVocabulary> {
        let text = std::fs::read_to_string(path)?;
        Self::from_tsv(&text)
    }
}

/// Format vector components with 17 significant digits, space-separated.
pub fn format_components(v: &[f64]) -> String {
    let mut s = String::new();
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{:.16e}", x);
    }
    s
}

pub fn parse_components(text: &str, dim: usize, line: usize) -> Result<Vector> {
    let v: std::result::Result<Vector, _> =
        text.split_whitespace().map(|t| t.parse::<f64>()).collect();
    let v = v.map_err(|e| Error::Format(format!("line {}: bad float: {}", line, e)))?;
    if v.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
    }
    Ok(v)
}

fn parse_header(header: &str) -> Result<usize> {
    let mut parts = header.split_whitespace();
    if parts.next() != Some("irvec-vocab") || parts.next() != Some("v1") {
        return Err(Error::Format("expected `irvec-vocab v1 dim=<n>` header".into()));
    }
    let dim_part = parts.next().ok_or_else(|| Error::Format("missing dim= in header".into()))?;
    let dim = dim_part
        .strip_prefix("dim=")
        .and_then(|d| d.parse::<usize>().ok())
        .ok_or_else(|| Error::Format(format!("bad dim field `{}`", dim_part)))?;
    Ok(dim)
}
