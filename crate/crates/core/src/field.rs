//! Nodal fields: sphere-valued maps and their scalar liftings.

use rand::Rng;
use serde::{Deserialize, Serialize};

/// Coordinate axis of the target space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    E1,
    E2,
    E3,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::E1 => 0,
            Axis::E2 => 1,
            Axis::E3 => 2,
        }
    }
}

/// One vector of `R³` per mesh node; unit length after every projection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereField(Vec<[f64; 3]>);

impl SphereField {
    /// Wraps raw vectors without normalizing them.
    pub fn from_vectors(v: Vec<[f64; 3]>) -> Self {
        Self(v)
    }

    pub fn constant(n: usize, v: [f64; 3]) -> Self {
        Self(vec![normalized(v); n])
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize) -> [f64; 3]) -> Self {
        Self((0..n).map(f).collect())
    }

    /// Independent uniform samples of `S²` (normalized Gaussian triples).
    pub fn random_uniform<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self::from_fn(n, |_| random_unit_vector(rng))
    }

    /// `(sin φ, 0, cos φ)` at every node.
    pub fn from_phase(phase: &PhaseField) -> Self {
        Self(phase.0.iter().map(|&p| [p.sin(), 0.0, p.cos()]).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[[f64; 3]] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [[f64; 3]] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<[f64; 3]> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, [f64; 3]> {
        self.0.iter()
    }

    pub fn component(&self, axis: Axis) -> Vec<f64> {
        self.0.iter().map(|m| m[axis.index()]).collect()
    }

    pub fn normalize(&mut self) {
        for m in &mut self.0 {
            *m = normalized(*m);
        }
    }

    /// `max_k | |m_k| - 1 |`.
    pub fn max_norm_deviation(&self) -> f64 {
        self.0.iter().map(|m| (norm(*m) - 1.0).abs()).fold(0.0, f64::max)
    }
}

impl std::ops::Index<usize> for SphereField {
    type Output = [f64; 3];
    fn index(&self, k: usize) -> &[f64; 3] {
        &self.0[k]
    }
}

impl std::ops::IndexMut<usize> for SphereField {
    fn index_mut(&mut self, k: usize) -> &mut [f64; 3] {
        &mut self.0[k]
    }
}

/// One angle (radians) per node. No range is imposed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseField(Vec<f64>);

impl PhaseField {
    pub fn from_values(v: Vec<f64>) -> Self {
        Self(v)
    }

    pub fn constant(n: usize, value: f64) -> Self {
        Self(vec![value; n])
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize) -> f64) -> Self {
        Self((0..n).map(f).collect())
    }

    /// Meridian angle `atan2(m₁, m₃)` of each node; exact inverse of
    /// [`SphereField::from_phase`] on `(-π, π]` when `m₂ = 0`.
    pub fn lift(field: &SphereField) -> Self {
        Self(field.iter().map(|m| m[0].atan2(m[2])).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

impl std::ops::Index<usize> for PhaseField {
    type Output = f64;
    fn index(&self, k: usize) -> &f64 {
        &self.0[k]
    }
}

pub(crate) fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn normalized(a: [f64; 3]) -> [f64; 3] {
    let n = norm(a);
    [a[0] / n, a[1] / n, a[2] / n]
}

pub(crate) fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let v = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let n2 = dot(v, v);
        // rejection from the unit ball gives an isotropic direction
        if n2 > 1e-6 && n2 <= 1.0 {
            return normalized(v);
        }
    }
}
