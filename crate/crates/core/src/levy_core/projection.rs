//! Coordinate projections `π_J`: coordinates outside `J` are zeroed.

use nalgebra::DMatrix;

use super::types::{
    BrownianSpec, GammaRay, JumpAtom, SubordinatorSpec, ThorinAtom, ThorinAtomicMeasure,
};
use crate::error::{Error, Result};

/// A nonempty set of 0-based coordinate indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn new(mut idx: Vec<usize>, dim: usize) -> Result<Self> {
        if idx.is_empty() {
            return Err(Error::invalid("index set must be nonempty"));
        }
        idx.sort_unstable();
        idx.dedup();
        if let Some(bad) = idx.iter().find(|&&i| i >= dim) {
            return Err(Error::invalid(format!("index {bad} out of range for dimension {dim}")));
        }
        Ok(IndexSet(idx))
    }

    pub fn full(dim: usize) -> Self {
        IndexSet((0..dim).collect())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn intersect(&self, other: &IndexSet) -> Option<IndexSet> {
        let v: Vec<usize> = self.0.iter().cloned().filter(|i| other.contains(*i)).collect();
        (!v.is_empty()).then_some(IndexSet(v))
    }

    /// All nonempty subsets of `{0, …, dim−1}`.
    pub fn all_nonempty(dim: usize) -> Vec<IndexSet> {
        (1u32..(1 << dim))
            .map(|mask| IndexSet((0..dim).filter(|i| mask & (1 << i) != 0).collect()))
            .collect()
    }

    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        x.iter().enumerate().map(|(i, v)| if self.contains(i) { *v } else { 0.0 }).collect()
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        match self.0.last() {
            Some(&m) if m < dim => Ok(()),
            _ => Err(Error::invalid(format!("index set out of range for dimension {dim}"))),
        }
    }
}

/// Model objects that can be pushed through a coordinate projection.
pub trait Project: Sized {
    fn project(&self, j: &IndexSet) -> Result<Self>;
}

fn nonzero(x: &[f64]) -> bool {
    x.iter().any(|v| *v != 0.0)
}

impl Project for BrownianSpec {
    fn project(&self, j: &IndexSet) -> Result<Self> {
        j.check_dim(self.dim())?;
        let n = self.dim();
        let s = self.sigma();
        let sigma = DMatrix::from_fn(n, n, |r, c| {
            if j.contains(r) && j.contains(c) {
                s[(r, c)]
            } else {
                0.0
            }
        });
        BrownianSpec::new(j.project(self.mu()), sigma)
    }
}

impl Project for SubordinatorSpec {
    fn project(&self, j: &IndexSet) -> Result<Self> {
        j.check_dim(self.dim())?;
        let mut rays = Vec::new();
        for r in self.rays() {
            let dir = j.project(r.direction());
            if nonzero(&dir) {
                rays.push(GammaRay::new(dir, r.shape(), r.rate())?);
            }
        }
        let mut atoms = Vec::new();
        for a in self.atoms() {
            let p = j.project(a.point());
            if nonzero(&p) {
                atoms.push(JumpAtom::new(p, a.intensity())?);
            }
        }
        SubordinatorSpec::new(j.project(self.drift()), rays, atoms)
    }
}

impl Project for ThorinAtomicMeasure {
    fn project(&self, j: &IndexSet) -> Result<Self> {
        j.check_dim(self.dim())?;
        let mut atoms = Vec::new();
        for a in self.atoms() {
            let loc = j.project(a.location());
            if nonzero(&loc) {
                atoms.push(ThorinAtom::new(loc, a.weight())?);
            }
        }
        ThorinAtomicMeasure::new(self.dim(), atoms)
    }
}

/// Projects `model` onto the coordinates in `j`.
pub fn project_spec<M: Project>(j: &IndexSet, model: &M) -> Result<M> {
    model.project(j)
}
