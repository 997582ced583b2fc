use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A row-major collection of points in ℝᵈ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Points {
    dim: usize,
    data: Vec<f64>,
}

impl Points {
    pub fn new(dim: usize) -> Self {
        Points {
            dim,
            data: Vec::new(),
        }
    }

    pub fn from_flat(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("points must have dimension >= 1"));
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Error::invalid(format!(
                "flat buffer of length {} is not a multiple of dimension {dim}",
                data.len()
            )));
        }
        Ok(Points { dim, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::invalid("cannot infer dimension from zero rows"))?;
        let mut pts = Points::new(dim);
        for r in rows {
            pts.push(r)?;
        }
        Ok(pts)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn push(&mut self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::invalid(format!(
                "point of dimension {} pushed into {}-dimensional set",
                x.len(),
                self.dim
            )));
        }
        self.data.extend_from_slice(x);
        Ok(())
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim.max(1))
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }
}

/// An axis-aligned box `[lo_i, hi_i]` per dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl DomainBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::invalid("domain bounds must be nonempty and equal length"));
        }
        for (l, u) in lower.iter().zip(&upper) {
            if !(l.is_finite() && u.is_finite() && l <= u) {
                return Err(Error::invalid(format!("bad interval [{l}, {u}]")));
            }
        }
        Ok(DomainBox { lower, upper })
    }

    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        DomainBox::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| *v >= *l && *v <= *u)
    }

    /// Maps a point of the unit cube into the box.
    pub fn from_unit(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(t, (l, h))| (l + t * (h - l)).clamp(*l, *h))
            .collect()
    }
}

/// How a candidate set was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CandidateScheme {
    Grid,
    Uniform,
    LowDiscrepancy,
    Explicit,
}

impl CandidateScheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            CandidateScheme::Grid => "grid",
            CandidateScheme::Uniform => "uniform",
            CandidateScheme::LowDiscrepancy => "low-discrepancy",
            CandidateScheme::Explicit => "explicit",
        }
    }
}

/// The finite search domain: `D >= 2` distinct in-box points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateSet {
    points: Points,
    domain: DomainBox,
    scheme: CandidateScheme,
}

impl CandidateSet {
    pub fn new(points: Points, domain: DomainBox, scheme: CandidateScheme) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::invalid(format!(
                "candidate set needs at least 2 points, got {}",
                points.len()
            )));
        }
        if points.dim() != domain.dim() {
            return Err(Error::invalid("candidate dimension does not match domain"));
        }
        let mut seen = HashSet::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            if !domain.contains(p) {
                return Err(Error::invalid(format!("candidate {i} lies outside the domain")));
            }
            if !seen.insert(point_key(p)) {
                return Err(Error::invalid(format!("candidate {i} duplicates an earlier point")));
            }
        }
        Ok(CandidateSet {
            points,
            domain,
            scheme,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    pub fn get(&self, i: usize) -> &[f64] {
        self.points.get(i)
    }

    pub fn points(&self) -> &Points {
        &self.points
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    pub fn scheme(&self) -> CandidateScheme {
        self.scheme
    }

    /// Index of the candidate exactly equal to `x`, if any.
    pub fn index_of(&self, x: &[f64]) -> Option<usize> {
        self.points.iter().position(|p| p == x)
    }
}

/// Bitwise key of a point, for exact-membership lookups.
pub(crate) fn point_key(x: &[f64]) -> Vec<u64> {
    // +0.0 and -0.0 compare equal as floats; normalize them.
    x.iter().map(|v| if *v == 0.0 { 0 } else { v.to_bits() }).collect()
}
