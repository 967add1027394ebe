//! The symmetry group `O(3, e₃)` of the energy and the folding maps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Axis, SphereField};

/// An isometry of `R³` mapping `e₃` to `±e₃`.
///
/// Acts as `v ↦ Z · R(angle) · Y v` where `Y` is the reflection `v₂ ↦ −v₂`
/// (if `in_plane_reflection`), `R` the rotation about `e₃`, and `Z` the
/// reflection `v₃ ↦ −v₃` (if `axis_reflection`). Every element of the group
/// has exactly one such representation with `angle ∈ (−π, π]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Symmetry {
    pub angle: f64,
    pub in_plane_reflection: bool,
    pub axis_reflection: bool,
}

const ORTHO_TOL: f64 = 1e-10;

impl Symmetry {
    pub fn identity() -> Self {
        Self { angle: 0.0, in_plane_reflection: false, axis_reflection: false }
    }

    pub fn rotation(angle: f64) -> Self {
        Self { angle: wrap_angle(angle), ..Self::identity() }
    }

    /// Reflection through the plane orthogonal to `e₃`.
    pub fn axis_reflection() -> Self {
        Self { axis_reflection: true, ..Self::identity() }
    }

    pub fn is_identity(&self) -> bool {
        self.angle == 0.0 && !self.in_plane_reflection && !self.axis_reflection
    }

    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let y = if self.in_plane_reflection { -v[1] } else { v[1] };
        let (s, c) = self.angle.sin_cos();
        let z = if self.axis_reflection { -v[2] } else { v[2] };
        [c * v[0] - s * y, s * v[0] + c * y, z]
    }

    pub fn matrix(&self) -> [[f64; 3]; 3] {
        let cols = [self.apply([1.0, 0.0, 0.0]), self.apply([0.0, 1.0, 0.0]), self.apply([0.0, 0.0, 1.0])];
        let mut m = [[0.0; 3]; 3];
        for (j, col) in cols.iter().enumerate() {
            for i in 0..3 {
                m[i][j] = col[i];
            }
        }
        m
    }

    /// Decomposes an orthogonal matrix that preserves the `e₃` axis.
    pub fn from_matrix(m: [[f64; 3]; 3]) -> Result<Self> {
        for i in 0..3 {
            for j in 0..3 {
                let g: f64 = (0..3).map(|k| m[k][i] * m[k][j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                if (g - target).abs() > ORTHO_TOL {
                    return Err(Error::InvalidParameter("matrix is not orthogonal".into()));
                }
            }
        }
        if m[0][2].abs() > ORTHO_TOL || m[1][2].abs() > ORTHO_TOL || (m[2][2].abs() - 1.0).abs() > ORTHO_TOL {
            return Err(Error::InvalidParameter("matrix does not map e3 to +e3 or -e3".into()));
        }
        let det2 = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        Ok(Self {
            angle: m[1][0].atan2(m[0][0]),
            in_plane_reflection: det2 < 0.0,
            axis_reflection: m[2][2] < 0.0,
        })
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Symmetry) -> Self {
        let (a, b) = (self.matrix(), other.matrix());
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
            }
        }
        Self::from_matrix(m).expect("group is closed under composition")
    }

    pub fn inverse(&self) -> Self {
        let a = self.matrix();
        let mut t = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                t[i][j] = a[j][i];
            }
        }
        Self::from_matrix(t).expect("group is closed under inversion")
    }
}

pub(crate) fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(2.0 * std::f64::consts::PI);
    if w > std::f64::consts::PI {
        w - 2.0 * std::f64::consts::PI
    } else {
        w
    }
}

/// Pointwise `σ ∘ m`.
pub fn apply_symmetry(field: &SphereField, sigma: &Symmetry) -> SphereField {
    SphereField::from_vectors(field.iter().map(|&m| sigma.apply(m)).collect())
}

/// Replaces the `axis` component by its absolute value at every node.
pub fn fold_positive(field: &SphereField, axis: Axis) -> SphereField {
    let i = axis.index();
    SphereField::from_vectors(
        field
            .iter()
            .map(|&m| {
                let mut v = m;
                v[i] = v[i].abs();
                v
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn close(a: [f64; 3], b: [f64; 3]) -> bool {
        (0..3).all(|i| (a[i] - b[i]).abs() < 1e-14)
    }

    #[test]
    fn quarter_turn_maps_e1_to_e2() {
        let f = SphereField::constant(5, [1.0, 0.0, 0.0]);
        let g = apply_symmetry(&f, &Symmetry::rotation(FRAC_PI_2));
        assert!(g.iter().all(|&v| close(v, [0.0, 1.0, 0.0])));
    }

    #[test]
    fn identity_is_neutral() {
        let f = SphereField::from_fn(4, |k| [0.0, (k as f64).sin(), (k as f64).cos()]);
        assert_eq!(apply_symmetry(&f, &Symmetry::identity()), f);
    }

    #[test]
    fn fold_makes_component_nonnegative() {
        let f = SphereField::from_fn(10, |k| {
            let t = k as f64;
            crate::field::normalized([t.sin(), t.cos(), (2.0 * t).sin()])
        });
        let g = fold_positive(&f, Axis::E3);
        assert!(g.iter().all(|v| v[2] >= 0.0));
        assert!(g.max_norm_deviation() < 1e-15);
    }

    #[test]
    fn matrix_round_trip_and_inverse() {
        for &(angle, ipr, ar) in &[(0.3, false, false), (-2.0, true, false), (1.1, true, true), (3.0, false, true)] {
            let s = Symmetry { angle, in_plane_reflection: ipr, axis_reflection: ar };
            let back = Symmetry::from_matrix(s.matrix()).unwrap();
            assert!((back.angle - angle).abs() < 1e-14);
            assert_eq!((back.in_plane_reflection, back.axis_reflection), (ipr, ar));
            let id = s.compose(&s.inverse());
            assert!(close(id.apply([0.3, -0.4, 0.5]), [0.3, -0.4, 0.5]));
        }
    }

    #[test]
    fn rejects_matrices_outside_group() {
        // rotation about e1 moves e3
        let (s, c) = 0.4f64.sin_cos();
        let rot_x = [[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]];
        assert!(Symmetry::from_matrix(rot_x).is_err());
        let scaled = [[2.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert!(Symmetry::from_matrix(scaled).is_err());
    }
}
