//! The point-cloud value type and its errors.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from cloud construction, parsing and spatial queries.
#[derive(Debug, Error)]
pub enum CloudError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error{}{}: {message}", location(.line, "line"), location(.byte, "byte"))]
    Parse {
        line: Option<usize>,
        byte: Option<u64>,
        message: String,
    },
    #[error("empty cloud")]
    EmptyCloud,
    #[error("point coordinates must be finite")]
    NonFinite,
    #[error("invalid parameter: {0}")]
    Parameter(String),
}

fn location(v: &Option<impl std::fmt::Display>, what: &str) -> String {
    match v {
        Some(v) => format!(" at {what} {v}"),
        None => String::new(),
    }
}

impl CloudError {
    pub(crate) fn parse_line(line: usize, message: impl Into<String>) -> Self {
        CloudError::Parse {
            line: Some(line),
            byte: None,
            message: message.into(),
        }
    }

    pub(crate) fn parse_byte(byte: u64, message: impl Into<String>) -> Self {
        CloudError::Parse {
            line: None,
            byte: Some(byte),
            message: message.into(),
        }
    }

    pub(crate) fn parse(message: impl Into<String>) -> Self {
        CloudError::Parse {
            line: None,
            byte: None,
            message: message.into(),
        }
    }
}

/// Ground-truth tag used by the benchmark harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointLabel {
    Real,
    Noise,
}

/// An ordered set of n-dimensional points, optionally labelled.
///
/// Coordinates are stored flat (`dim` values per point). The cloud is a
/// plain value: queries never mutate it, and the spatial index copies what
/// it needs.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
    labels: Option<Vec<PointLabel>>,
}

impl PointCloud {
    /// Builds a cloud from flat coordinates, `dim` values per point.
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self, CloudError> {
        if dim == 0 {
            return Err(CloudError::Parameter("dimension must be positive".into()));
        }
        if coords.len() % dim != 0 {
            return Err(CloudError::Parameter(format!(
                "coordinate count {} is not a multiple of dim {}",
                coords.len(),
                dim
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(CloudError::NonFinite);
        }
        Ok(Self {
            dim,
            coords,
            labels: None,
        })
    }

    /// Builds a 3-D cloud from point triples.
    pub fn from_points3(points: &[[f64; 3]]) -> Result<Self, CloudError> {
        Self::new(3, points.iter().flatten().copied().collect())
    }

    /// Attaches per-point ground-truth labels.
    pub fn with_labels(mut self, labels: Vec<PointLabel>) -> Result<Self, CloudError> {
        if labels.len() != self.len() {
            return Err(CloudError::Parameter(format!(
                "label count {} does not match point count {}",
                labels.len(),
                self.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn labels(&self) -> Option<&[PointLabel]> {
        self.labels.as_deref()
    }

    /// Axis-aligned bounding box as (min, max) per axis. Errors on empty.
    pub fn bounding_box(&self) -> Result<(Vec<f64>, Vec<f64>), CloudError> {
        if self.is_empty() {
            return Err(CloudError::EmptyCloud);
        }
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for p in self.points() {
            for (a, &c) in p.iter().enumerate() {
                lo[a] = lo[a].min(c);
                hi[a] = hi[a].max(c);
            }
        }
        Ok((lo, hi))
    }

    /// Appends points (with a label when the cloud is labelled).
    pub(crate) fn push_point(&mut self, coords: &[f64], label: Option<PointLabel>) {
        debug_assert_eq!(coords.len(), self.dim);
        self.coords.extend_from_slice(coords);
        if let Some(labels) = self.labels.as_mut() {
            labels.push(label.expect("labelled cloud needs a label per point"));
        }
    }

    pub(crate) fn ensure_labels(&mut self, default: PointLabel) {
        if self.labels.is_none() {
            self.labels = Some(vec![default; self.len()]);
        }
    }

    /// The sub-cloud of the given indices, in the given order. Labels follow.
    pub fn subset(&self, indices: &[usize]) -> Result<Self, CloudError> {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        let mut labels = self.labels.as_ref().map(|_| Vec::with_capacity(indices.len()));
        for &i in indices {
            if i >= self.len() {
                return Err(CloudError::Parameter(format!(
                    "index {i} out of bounds for cloud of {}",
                    self.len()
                )));
            }
            coords.extend_from_slice(self.point(i));
            if let (Some(out), Some(src)) = (labels.as_mut(), self.labels.as_ref()) {
                out.push(src[i]);
            }
        }
        Ok(Self {
            dim: self.dim,
            coords,
            labels,
        })
    }

    /// Applies `point -> R·point + t` to every point.
    pub fn transformed(&self, rotation: &nalgebra::DMatrix<f64>, translation: &[f64]) -> Self {
        let dim = self.dim;
        let mut coords = Vec::with_capacity(self.coords.len());
        for p in self.points() {
            for i in 0..dim {
                let mut v = translation[i];
                for j in 0..dim {
                    v += rotation[(i, j)] * p[j];
                }
                coords.push(v);
            }
        }
        Self {
            dim,
            coords,
            labels: self.labels.clone(),
        }
    }

    /// Uniformly scales every coordinate.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            coords: self.coords.iter().map(|c| c * factor).collect(),
            labels: self.labels.clone(),
        }
    }
}
