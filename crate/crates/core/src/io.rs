//! JSON function/spectrum files and atomic output helpers.
//!
//! ```json
//! { "dimension": 1, "half_extent": [16.0], "points_per_axis": [1024],
//!   "domain": "space", "values_re": [...], "values_im": [...] }
//! ```
//!
//! Values are row-major over zero-centered coordinates. Non-finite samples
//! may be spelled `null`, `"NaN"`, `"inf"` or `"-inf"`; they parse and are
//! then rejected by sample validation with a "non-finite sample" error.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::grid::{inverse_transform, Domain, GridSpec, SampledFunction, Samples, Spectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainTag {
    Space,
    Frequency,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionFile {
    pub dimension: usize,
    pub half_extent: Vec<f64>,
    pub points_per_axis: Vec<usize>,
    pub domain: DomainTag,
    #[serde(deserialize_with = "lenient_floats")]
    pub values_re: Vec<f64>,
    #[serde(deserialize_with = "lenient_floats")]
    pub values_im: Vec<f64>,
}

fn lenient_floats<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<Vec<f64>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }
    let raw: Vec<Option<Raw>> = Vec::deserialize(de)?;
    raw.into_iter()
        .map(|r| match r {
            Some(Raw::Num(v)) => Ok(v),
            None => Ok(f64::NAN),
            Some(Raw::Text(s)) => s
                .trim()
                .parse::<f64>()
                .map_err(|_| serde::de::Error::custom(format!("unparseable sample {s:?}"))),
        })
        .collect()
}

/// A loaded file, in whichever domain it was stored.
#[derive(Debug, Clone, PartialEq)]
pub enum Loaded {
    Space(SampledFunction),
    Frequency(Spectrum),
}

impl Loaded {
    /// The space-domain function, inverting a stored spectrum if needed.
    pub fn into_space(self) -> SampledFunction {
        match self {
            Loaded::Space(f) => f,
            Loaded::Frequency(s) => inverse_transform(&s),
        }
    }
}

impl FunctionFile {
    pub fn from_samples<D: Domain>(samples: &Samples<D>, domain: DomainTag) -> Self {
        let grid = samples.grid();
        Self {
            dimension: grid.dimension(),
            half_extent: grid.half_extents(),
            points_per_axis: grid.points_per_axis(),
            domain,
            values_re: samples.values().iter().map(|v| v.re).collect(),
            values_im: samples.values().iter().map(|v| v.im).collect(),
        }
    }

    pub fn from_function(f: &SampledFunction) -> Self {
        Self::from_samples(f, DomainTag::Space)
    }

    pub fn from_spectrum(s: &Spectrum) -> Self {
        Self::from_samples(s, DomainTag::Frequency)
    }

    /// Validates shape and samples.
    pub fn into_samples(self) -> Result<Loaded> {
        if self.dimension != self.half_extent.len() || self.dimension != self.points_per_axis.len() {
            return Err(Error::InvalidGrid(format!(
                "dimension {} disagrees with half_extent ({}) or points_per_axis ({})",
                self.dimension,
                self.half_extent.len(),
                self.points_per_axis.len()
            )));
        }
        let grid = GridSpec::new(&self.half_extent, &self.points_per_axis)?;
        if self.values_re.len() != self.values_im.len() {
            return Err(Error::LengthMismatch {
                expected: self.values_re.len(),
                actual: self.values_im.len(),
            });
        }
        let values: Vec<Complex64> = self
            .values_re
            .iter()
            .zip(&self.values_im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect();
        Ok(match self.domain {
            DomainTag::Space => Loaded::Space(SampledFunction::new(grid, values)?),
            DomainTag::Frequency => Loaded::Frequency(Spectrum::new(grid, values)?),
        })
    }
}

/// Failure to read or parse a function file.
#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("malformed file {path}: {source}")]
    Malformed { path: String, source: serde_json::Error },
    #[error("{path}: {source}")]
    Invalid { path: String, source: Error },
}

pub fn parse_function(text: &str) -> std::result::Result<FunctionFile, serde_json::Error> {
    serde_json::from_str(text)
}

pub fn load_function(path: &Path) -> std::result::Result<Loaded, LoadError> {
    let shown = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| LoadError::Read {
        path: shown.clone(),
        source,
    })?;
    let file = parse_function(&text).map_err(|source| LoadError::Malformed {
        path: shown.clone(),
        source,
    })?;
    file.into_samples().map_err(|source| LoadError::Invalid { path: shown, source })
}

/// Writes `contents` to a temporary file beside `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
