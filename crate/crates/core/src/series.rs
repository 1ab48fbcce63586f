use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A sequence of equally sized vectors stored contiguously: states over the
/// nodes of a time grid, or controls over its steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    dim: usize,
    data: Vec<f64>,
}

impl Series {
    pub fn zeros(len: usize, dim: usize) -> Self {
        Series {
            dim,
            data: vec![0.0; len * dim],
        }
    }

    /// `len` copies of `value`.
    pub fn constant(len: usize, value: &[f64]) -> Self {
        let mut data = Vec::with_capacity(len * value.len());
        for _ in 0..len {
            data.extend_from_slice(value);
        }
        Series { dim: value.len(), data }
    }

    pub fn from_flat(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 || data.len() % dim != 0 {
            return Err(Error::Dimension {
                step: data.len() / dim.max(1),
                detail: format!("flat length {} is not a multiple of dimension {dim}", data.len()),
            });
        }
        Ok(Series { dim, data })
    }

    /// Build from rows that must all share one length; the first offending
    /// row index is reported.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * dim);
        for (k, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::Dimension {
                    step: k,
                    detail: format!("row has length {}, expected {dim}", row.len()),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Series { dim, data })
    }

    /// Scalar series.
    pub fn from_scalars(values: Vec<f64>) -> Self {
        Series { dim: 1, data: values }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.data.len() / self.dim
        }
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn node(&self, k: usize) -> &[f64] {
        &self.data[k * self.dim..(k + 1) * self.dim]
    }

    pub fn node_mut(&mut self, k: usize) -> &mut [f64] {
        &mut self.data[k * self.dim..(k + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.dim.max(1))
    }

    /// First coordinate of every node; convenient for scalar series.
    pub fn first_coordinates(&self) -> Vec<f64> {
        self.iter().map(|v| v[0]).collect()
    }

    /// Concatenate along the time axis.
    pub fn concat(&self, other: &Series) -> Result<Series> {
        if self.dim != other.dim && !self.is_empty() && !other.is_empty() {
            return Err(Error::Dimension {
                step: self.len(),
                detail: format!("dimension {} vs {}", self.dim, other.dim),
            });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Series {
            dim: self.dim.max(other.dim),
            data,
        })
    }

    pub fn max_abs_diff(&self, other: &Series) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}
