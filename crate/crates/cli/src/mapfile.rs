//! The JSON map-spec file format.
//!
//! ```json
//! { "kind": "similarity", "dimension": 4, "k": 2.0, "Q": [[...], ...], "a": [0, 0, 0, 0] }
//! ```
//!
//! `kind` is one of `affine`, `similarity`, `degenerate`, `table`; the other
//! fields are the serialized payload of the corresponding type.

use lightcone::analyzer::{BlackBoxMap, TableMap};
use lightcone::degenerate::DegenerateSpec;
use lightcone::transforms::{AffineMap, PoincareSimilarity};
use lightcone::{Event64, Result as CoreResult};
use serde::{Deserialize, Serialize};

pub const DEFAULT_DIMENSION: usize = 4;

fn default_dimension() -> usize {
    DEFAULT_DIMENSION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub input: Event64,
    pub output: Event64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRows {
    pub rows: Vec<TableRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapSpec {
    Affine(AffineMap<f64>),
    Similarity(PoincareSimilarity<f64>),
    Degenerate(DegenerateSpec<f64>),
    Table(TableRows),
}

impl MapSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            MapSpec::Affine(_) => "affine",
            MapSpec::Similarity(_) => "similarity",
            MapSpec::Degenerate(_) => "degenerate",
            MapSpec::Table(_) => "table",
        }
    }

    fn dims(&self) -> Vec<usize> {
        match self {
            MapSpec::Affine(m) => vec![m.linear.dim(), m.b.dim()],
            MapSpec::Similarity(s) => vec![s.q.dim(), s.a.dim()],
            MapSpec::Degenerate(d) => vec![d.dim()],
            MapSpec::Table(t) => t
                .rows
                .iter()
                .flat_map(|r| [r.input.dim(), r.output.dim()])
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapFile {
    #[serde(default = "default_dimension")]
    pub dimension: usize,
    #[serde(flatten)]
    pub map: MapSpec,
}

#[derive(Debug, thiserror::Error)]
pub enum SchemaError {
    #[error("malformed map spec: {0}")]
    Json(#[from] serde_json::Error),
    #[error("payload has dimension {found}, file declares {declared}")]
    Dimension { declared: usize, found: usize },
    #[error("table has no rows")]
    EmptyTable,
    #[error(transparent)]
    Core(#[from] lightcone::Error),
}

impl MapFile {
    pub fn new(map: MapSpec) -> Self {
        let dimension = map.dims().first().copied().unwrap_or(DEFAULT_DIMENSION);
        Self { dimension, map }
    }

    pub fn parse(text: &str) -> Result<Self, SchemaError> {
        let file: MapFile = serde_json::from_str(text)?;
        if let MapSpec::Table(t) = &file.map {
            if t.rows.is_empty() {
                return Err(SchemaError::EmptyTable);
            }
        }
        if let Some(&found) = file.map.dims().iter().find(|&&d| d != file.dimension) {
            return Err(SchemaError::Dimension {
                declared: file.dimension,
                found,
            });
        }
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("map specs always serialize")
    }

    pub fn load(&self) -> Result<LoadedMap, SchemaError> {
        Ok(match &self.map {
            MapSpec::Affine(m) => LoadedMap::Affine(*m),
            MapSpec::Similarity(s) => LoadedMap::Similarity(*s),
            MapSpec::Degenerate(d) => LoadedMap::Degenerate(d.clone()),
            MapSpec::Table(t) => LoadedMap::Table(TableMap::new(
                t.rows.iter().map(|r| (r.input, r.output)).collect(),
            )?),
        })
    }
}

/// A map-spec file ready for evaluation.
#[derive(Debug, Clone)]
pub enum LoadedMap {
    Affine(AffineMap<f64>),
    Similarity(PoincareSimilarity<f64>),
    Degenerate(DegenerateSpec<f64>),
    Table(TableMap<f64>),
}

impl LoadedMap {
    fn inner(&self) -> &dyn BlackBoxMap<f64> {
        match self {
            LoadedMap::Affine(m) => m,
            LoadedMap::Similarity(m) => m,
            LoadedMap::Degenerate(m) => m,
            LoadedMap::Table(m) => m,
        }
    }
}

impl BlackBoxMap<f64> for LoadedMap {
    fn dim(&self) -> usize {
        self.inner().dim()
    }

    fn eval(&self, r: &Event64) -> CoreResult<Event64> {
        self.inner().eval(r)
    }

    fn finite_domain(&self) -> Option<&[Event64]> {
        self.inner().finite_domain()
    }
}
