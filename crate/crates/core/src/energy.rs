//! Discrete penalized energy, its phase reduction, and Euler–Lagrange residuals.
//!
//! For a sphere field `m` on a [`Mesh`] the discrete energy is
//!
//! ```text
//! E(m) = Σ_edges w_ab |m_a − m_b|²  +  κ² Σ_k A_k (m_k · e₃)²  +  γ⁻² Σ_{k ∈ ∂Ω} L_k (m_k,1² + m_k,2²)
//! ```
//!
//! and the phase energy uses the chord `|m_a − m_b|² = 4 sin²((φ_a − φ_b)/2)`
//! for the gradient term, so that the two evaluators agree exactly on meridian
//! fields `m = (sin φ, 0, cos φ)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{dot, PhaseField, SphereField};
use crate::mesh::Mesh;
use crate::sum::pairwise_sum;

/// Tolerance used to decide whether a boundary trace equals ±e₃ (or φ ∈ πℤ).
pub const DIRICHLET_TOLERANCE: f64 = 1e-9;

/// Physical parameters. `gamma == 0` selects the Dirichlet problem with trace ±e₃.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub kappa: f64,
    pub gamma: f64,
    /// Space dimension used by the radial reduction; mesh solves are planar.
    pub dimension: usize,
    /// Drops the boundary integral entirely (natural boundary conditions).
    /// Only meant for testing the interior integrands.
    #[serde(default)]
    pub free_boundary: bool,
}

/// How the boundary enters the energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryMode {
    /// `γ > 0`: boundary integral weighted by `1/γ²`.
    Penalized { inv_gamma2: f64 },
    /// `γ = 0`: trace fixed to ±e₃ (φ = 0 in the phase problem).
    Dirichlet,
    /// No boundary term.
    Free,
}

impl Params {
    pub fn new(kappa: f64, gamma: f64) -> Result<Self> {
        let p = Self { kappa, gamma, dimension: 2, free_boundary: false };
        p.validate()?;
        Ok(p)
    }

    /// Parameters from `κ²` instead of `κ`.
    pub fn with_kappa2(kappa2: f64, gamma: f64) -> Result<Self> {
        if !(kappa2 >= 0.0) {
            return Err(Error::InvalidParameter(format!("kappa^2 must be >= 0 (got {kappa2})")));
        }
        Self::new(kappa2.sqrt(), gamma)
    }

    pub fn with_dimension(mut self, dimension: usize) -> Result<Self> {
        self.dimension = dimension;
        self.validate()?;
        Ok(self)
    }

    pub fn without_boundary_term(mut self) -> Self {
        self.free_boundary = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return Err(Error::InvalidParameter(format!("kappa must be finite and >= 0 (got {})", self.kappa)));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!("gamma must be finite and >= 0 (got {})", self.gamma)));
        }
        if self.dimension == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        Ok(())
    }

    pub fn kappa2(&self) -> f64 {
        self.kappa * self.kappa
    }

    pub fn boundary_mode(&self) -> BoundaryMode {
        if self.free_boundary {
            BoundaryMode::Free
        } else if self.gamma == 0.0 {
            BoundaryMode::Dirichlet
        } else {
            BoundaryMode::Penalized { inv_gamma2: 1.0 / (self.gamma * self.gamma) }
        }
    }

    pub fn is_dirichlet(&self) -> bool {
        self.boundary_mode() == BoundaryMode::Dirichlet
    }

    /// Weight of the boundary integral; zero in Dirichlet and free modes.
    pub(crate) fn boundary_weight(&self) -> f64 {
        match self.boundary_mode() {
            BoundaryMode::Penalized { inv_gamma2 } => inv_gamma2,
            _ => 0.0,
        }
    }
}

/// The three energy contributions and their sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub dirichlet: f64,
    pub anisotropy: f64,
    pub boundary: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    pub fn new(dirichlet: f64, anisotropy: f64, boundary: f64) -> Self {
        Self { dirichlet, anisotropy, boundary, total: dirichlet + anisotropy + boundary }
    }

    pub fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }
}

impl std::ops::Add for EnergyBreakdown {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.dirichlet + rhs.dirichlet, self.anisotropy + rhs.anisotropy, self.boundary + rhs.boundary)
    }
}

/// Energies of the universal constant states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantStateEnergies {
    /// `κ² |Ω|`, the energy of ±e₃.
    pub out_of_plane: f64,
    /// `|∂Ω| / γ²`, the energy of any constant in-plane field; `None` in Dirichlet mode.
    pub in_plane: Option<f64>,
}

/// L² norms of the strong Euler–Lagrange residuals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElResidual {
    pub interior: f64,
    pub boundary: f64,
}

pub(crate) fn check_len(mesh: &Mesh, n: usize) -> Result<()> {
    if mesh.len() != n {
        return Err(Error::FieldSize { expected: mesh.len(), found: n });
    }
    Ok(())
}

/// Sign `s` such that the boundary trace is `s e₃`, or the first offending node.
pub(crate) fn dirichlet_sign(mesh: &Mesh, field: &SphereField) -> Result<f64> {
    let mut sign = 0.0;
    for &k in mesh.boundary_nodes() {
        let m = field[k];
        let s = if sign == 0.0 { if m[2] >= 0.0 { 1.0 } else { -1.0 } } else { sign };
        let dev = (m[0] * m[0] + m[1] * m[1] + (m[2] - s) * (m[2] - s)).sqrt();
        if dev > DIRICHLET_TOLERANCE {
            return Err(Error::DirichletViolation { node: k, deviation: dev });
        }
        sign = s;
    }
    Ok(if sign == 0.0 { 1.0 } else { sign })
}

fn check_phase_dirichlet(mesh: &Mesh, phase: &PhaseField) -> Result<()> {
    for &k in mesh.boundary_nodes() {
        let dev = phase[k].sin().abs();
        if dev > DIRICHLET_TOLERANCE {
            return Err(Error::DirichletViolation { node: k, deviation: dev });
        }
    }
    Ok(())
}

/// Discrete penalized energy of a sphere field.
///
/// In Dirichlet mode a trace different from ±e₃ makes the energy infinite,
/// which is reported as [`Error::DirichletViolation`].
pub fn energy_sphere_field(mesh: &Mesh, field: &SphereField, params: &Params) -> Result<EnergyBreakdown> {
    params.validate()?;
    check_len(mesh, field.len())?;
    if params.is_dirichlet() {
        dirichlet_sign(mesh, field)?;
    }
    Ok(sphere_breakdown(mesh, field.as_slice(), params))
}

pub(crate) fn sphere_breakdown(mesh: &Mesh, m: &[[f64; 3]], params: &Params) -> EnergyBreakdown {
    let dirichlet = pairwise_sum(mesh.edges().iter().map(|e| {
        let (a, b) = (m[e.a], m[e.b]);
        let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
        e.weight * dot(d, d)
    }));
    let area = mesh.area_weights();
    let anisotropy = params.kappa2() * pairwise_sum(area.iter().zip(m).map(|(w, v)| w * v[2] * v[2]));
    let bw = params.boundary_weight();
    let boundary = if bw > 0.0 {
        // |m × e₃|² = m₁² + m₂²
        bw * mesh.integrate_boundary(|k| m[k][0] * m[k][0] + m[k][1] * m[k][1])
    } else {
        0.0
    };
    EnergyBreakdown::new(dirichlet, anisotropy, boundary)
}

/// `∂E/∂m_k` for every node (Euclidean gradient in the nodal values).
pub(crate) fn sphere_gradient(mesh: &Mesh, m: &[[f64; 3]], params: &Params, grad: &mut [[f64; 3]]) {
    let k2 = params.kappa2();
    for (g, (w, v)) in grad.iter_mut().zip(mesh.area_weights().iter().zip(m)) {
        *g = [0.0, 0.0, 2.0 * k2 * w * v[2]];
    }
    for e in mesh.edges() {
        let (a, b) = (m[e.a], m[e.b]);
        for c in 0..3 {
            let f = 2.0 * e.weight * (a[c] - b[c]);
            grad[e.a][c] += f;
            grad[e.b][c] -= f;
        }
    }
    let bw = params.boundary_weight();
    if bw > 0.0 {
        let arc = mesh.arc_weights();
        for &k in mesh.boundary_nodes() {
            grad[k][0] += 2.0 * bw * arc[k] * m[k][0];
            grad[k][1] += 2.0 * bw * arc[k] * m[k][1];
        }
    }
}

/// Nodal gradient of [`energy_sphere_field`] with respect to the nodal vectors,
/// as used by the minimizer before projection onto the tangent planes.
pub fn energy_gradient(mesh: &Mesh, field: &SphereField, params: &Params) -> Result<Vec<[f64; 3]>> {
    params.validate()?;
    check_len(mesh, field.len())?;
    let mut grad = vec![[0.0; 3]; mesh.len()];
    sphere_gradient(mesh, field.as_slice(), params, &mut grad);
    Ok(grad)
}

/// `E(new) − E(old)` evaluated term by term as products of differences, which
/// keeps full relative accuracy when the two fields are close.
pub(crate) fn sphere_energy_delta(mesh: &Mesh, old: &[[f64; 3]], new: &[[f64; 3]], params: &Params) -> f64 {
    let dirichlet = pairwise_sum(mesh.edges().iter().map(|e| {
        let mut s = 0.0;
        for c in 0..3 {
            // node changes first, so the rounding error scales with the step
            let change = (new[e.a][c] - old[e.a][c]) - (new[e.b][c] - old[e.b][c]);
            let sum = (new[e.a][c] - new[e.b][c]) + (old[e.a][c] - old[e.b][c]);
            s += change * sum;
        }
        e.weight * s
    }));
    let anisotropy = params.kappa2()
        * pairwise_sum(
            mesh.area_weights()
                .iter()
                .zip(old.iter().zip(new))
                .map(|(w, (o, n))| w * (n[2] - o[2]) * (n[2] + o[2])),
        );
    let bw = params.boundary_weight();
    let boundary = if bw > 0.0 {
        bw * mesh.integrate_boundary(|k| {
            let (o, n) = (old[k], new[k]);
            (n[0] - o[0]) * (n[0] + o[0]) + (n[1] - o[1]) * (n[1] + o[1])
        })
    } else {
        0.0
    };
    dirichlet + anisotropy + boundary
}

/// Discrete phase energy `Σ w 4 sin²(Δφ/2) + κ² Σ A cos²φ + γ⁻² Σ_∂ L sin²φ`.
pub fn energy_phase(mesh: &Mesh, phase: &PhaseField, params: &Params) -> Result<EnergyBreakdown> {
    params.validate()?;
    check_len(mesh, phase.len())?;
    if params.is_dirichlet() {
        check_phase_dirichlet(mesh, phase)?;
    }
    let all = vec![true; mesh.len()];
    Ok(phase_breakdown(mesh, phase.as_slice(), params, &all))
}

fn phase_breakdown(mesh: &Mesh, phi: &[f64], params: &Params, mask: &[bool]) -> EnergyBreakdown {
    // an edge with one endpoint in the region contributes half its weight
    let dirichlet = pairwise_sum(mesh.edges().iter().map(|e| {
        let share = 0.5 * (mask[e.a] as u8 + mask[e.b] as u8) as f64;
        if share == 0.0 {
            return 0.0;
        }
        let s = (0.5 * (phi[e.a] - phi[e.b])).sin();
        share * e.weight * 4.0 * s * s
    }));
    let area = mesh.area_weights();
    let anisotropy = params.kappa2()
        * pairwise_sum((0..mesh.len()).filter(|&k| mask[k]).map(|k| {
            let c = phi[k].cos();
            area[k] * c * c
        }));
    let bw = params.boundary_weight();
    let boundary = if bw > 0.0 {
        bw * mesh.integrate_boundary(|k| {
            if mask[k] {
                let s = phi[k].sin();
                s * s
            } else {
                0.0
            }
        })
    } else {
        0.0
    };
    EnergyBreakdown::new(dirichlet, anisotropy, boundary)
}

pub(crate) fn phase_gradient(mesh: &Mesh, phi: &[f64], params: &Params, grad: &mut [f64]) {
    let k2 = params.kappa2();
    for (g, (w, p)) in grad.iter_mut().zip(mesh.area_weights().iter().zip(phi)) {
        *g = -k2 * w * (2.0 * p).sin();
    }
    for e in mesh.edges() {
        let f = 2.0 * e.weight * (phi[e.a] - phi[e.b]).sin();
        grad[e.a] += f;
        grad[e.b] -= f;
    }
    let bw = params.boundary_weight();
    if bw > 0.0 {
        let arc = mesh.arc_weights();
        for &k in mesh.boundary_nodes() {
            grad[k] += bw * arc[k] * (2.0 * phi[k]).sin();
        }
    }
}

pub(crate) fn phase_energy_delta(mesh: &Mesh, old: &[f64], new: &[f64], params: &Params) -> f64 {
    // sin²a − sin²b = sin(a − b) sin(a + b), with a − b formed from node changes
    let change: Vec<f64> = new.iter().zip(old).map(|(n, o)| n - o).collect();
    let dirichlet = pairwise_sum(mesh.edges().iter().map(|e| {
        let diff = 0.5 * (change[e.a] - change[e.b]);
        let sum = 0.5 * ((new[e.a] - new[e.b]) + (old[e.a] - old[e.b]));
        4.0 * e.weight * diff.sin() * sum.sin()
    }));
    let anisotropy = -params.kappa2()
        * pairwise_sum(
            mesh.area_weights().iter().enumerate().map(|(k, w)| w * change[k].sin() * (new[k] + old[k]).sin()),
        );
    let bw = params.boundary_weight();
    let boundary = if bw > 0.0 {
        bw * mesh.integrate_boundary(|k| change[k].sin() * (new[k] + old[k]).sin())
    } else {
        0.0
    };
    dirichlet + anisotropy + boundary
}

/// Energy of `phase` restricted to a node set `O`: the area and boundary sums
/// run over nodes in `O`, and each edge counts half per endpoint in `O`.
///
/// Complementary regions add up to [`energy_phase`]. With `γ = 0` the boundary
/// integral is absent, as in the Dirichlet localized functional.
pub fn localized_energy_phase(
    mesh: &Mesh,
    phase: &PhaseField,
    params: &Params,
    region: &[bool],
) -> Result<EnergyBreakdown> {
    params.validate()?;
    check_len(mesh, phase.len())?;
    check_len(mesh, region.len())?;
    Ok(phase_breakdown(mesh, phase.as_slice(), params, region))
}

/// `(κ² |Ω|, |∂Ω| / γ²)` from the analytic area and perimeter.
pub fn constant_state_energies(mesh: &Mesh, params: &Params) -> Result<ConstantStateEnergies> {
    params.validate()?;
    let domain = mesh.domain();
    let in_plane = match params.boundary_mode() {
        BoundaryMode::Penalized { inv_gamma2 } => Some(domain.perimeter() * inv_gamma2),
        BoundaryMode::Free => Some(0.0),
        BoundaryMode::Dirichlet => None,
    };
    Ok(ConstantStateEnergies { out_of_plane: params.kappa2() * domain.area(), in_plane })
}

/// Tangential part `v − (v·m) m`.
pub(crate) fn tangential(v: [f64; 3], m: [f64; 3]) -> [f64; 3] {
    let s = dot(v, m);
    [v[0] - s * m[0], v[1] - s * m[1], v[2] - s * m[2]]
}

/// Discrete L² norms of the strong Euler–Lagrange residuals.
///
/// Interior: `−Δm + κ²(m·e₃)e₃ − (|∇m|² + κ²(m·e₃)²) m`, obtained as the
/// tangential part of the nodal gradient divided by `2 A_k`. Boundary (γ > 0):
/// `∂ₙm − γ⁻²[(m·e₃)e₃ − (m·e₃)² m]`, the tangential nodal gradient divided by
/// `2 L_k`. Boundary (γ = 0): `m − s e₃` with `s` the sign of the mean trace.
pub fn el_residual(mesh: &Mesh, field: &SphereField, params: &Params) -> Result<ElResidual> {
    params.validate()?;
    check_len(mesh, field.len())?;
    let m = field.as_slice();
    let mut grad = vec![[0.0; 3]; mesh.len()];
    sphere_gradient(mesh, m, params, &mut grad);
    let area = mesh.area_weights();
    let arc = mesh.arc_weights();

    let interior = pairwise_sum(mesh.interior_nodes().iter().map(|&k| {
        let r = tangential(grad[k], m[k]);
        dot(r, r) / (4.0 * area[k])
    }))
    .sqrt();

    let boundary = if params.is_dirichlet() {
        let mean = mesh.integrate_boundary(|k| m[k][2]);
        let s = if mean < 0.0 { -1.0 } else { 1.0 };
        mesh.integrate_boundary(|k| m[k][0] * m[k][0] + m[k][1] * m[k][1] + (m[k][2] - s) * (m[k][2] - s))
            .sqrt()
    } else {
        pairwise_sum(mesh.boundary_nodes().iter().map(|&k| {
            let r = tangential(grad[k], m[k]);
            dot(r, r) / (4.0 * arc[k])
        }))
        .sqrt()
    };
    Ok(ElResidual { interior, boundary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_disk_mesh, build_rectangle_mesh};
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn e3_on_unit_disk() {
        let mesh = build_disk_mesh(16, 32, 1.0).unwrap();
        let f = SphereField::constant(mesh.len(), [0.0, 0.0, 1.0]);
        let e = energy_sphere_field(&mesh, &f, &Params::new(2.0, 1.0).unwrap()).unwrap();
        assert!(rel(e.total, 4.0 * PI) < 1e-12);
        assert_eq!(e.dirichlet, 0.0);
        assert_eq!(e.boundary, 0.0);
    }

    #[test]
    fn in_plane_on_unit_disk() {
        let mesh = build_disk_mesh(16, 32, 1.0).unwrap();
        let f = SphereField::constant(mesh.len(), [1.0, 0.0, 0.0]);
        let e = energy_sphere_field(&mesh, &f, &Params::new(2.0, 0.5).unwrap()).unwrap();
        assert!(rel(e.total, 8.0 * PI) < 1e-12);
        assert_eq!(e.dirichlet, 0.0);
        assert_eq!(e.anisotropy, 0.0);
    }

    #[test]
    fn dirichlet_mode_rejects_bad_trace() {
        let mesh = build_disk_mesh(8, 16, 1.0).unwrap();
        let p = Params::new(1.0, 0.0).unwrap();
        let f = SphereField::constant(mesh.len(), [1.0, 0.0, 0.0]);
        assert!(matches!(energy_sphere_field(&mesh, &f, &p), Err(Error::DirichletViolation { .. })));
        let down = SphereField::constant(mesh.len(), [0.0, 0.0, -1.0]);
        assert!(energy_sphere_field(&mesh, &down, &p).is_ok());
        // mixed signs on the boundary are not an H¹₀ perturbation of either
        let mut mixed = down.clone();
        let first = mesh.boundary_nodes()[0];
        mixed[first] = [0.0, 0.0, 1.0];
        assert!(energy_sphere_field(&mesh, &mixed, &p).is_err());
        let phase = PhaseField::constant(mesh.len(), 0.3);
        assert!(energy_phase(&mesh, &phase, &p).is_err());
    }

    #[test]
    fn phase_constants() {
        let mesh = build_disk_mesh(16, 32, 1.0).unwrap();
        let e = energy_phase(&mesh, &PhaseField::constant(mesh.len(), 0.0), &Params::new(1.0, 1.0).unwrap()).unwrap();
        assert!(rel(e.total, PI) < 1e-12);
        let e = energy_phase(&mesh, &PhaseField::constant(mesh.len(), PI / 2.0), &Params::new(3.0, 0.5).unwrap())
            .unwrap();
        assert!(rel(e.total, 8.0 * PI) < 1e-12);
    }

    #[test]
    fn linear_phase_free_boundary() {
        // chord form: 4 sin²(h/2)/h² = 1 − h²/12 + O(h⁴)
        let mesh = build_rectangle_mesh(200, 200, 1.0, 1.0).unwrap();
        let phase = PhaseField::from_fn(mesh.len(), |k| mesh.nodes()[k][0]);
        let p = Params::new(0.0, 1.0).unwrap().without_boundary_term();
        let e = energy_phase(&mesh, &phase, &p).unwrap();
        assert!((e.dirichlet - 1.0).abs() < 1e-5, "{}", e.dirichlet);
        assert_eq!(e.boundary, 0.0);
        assert_eq!(e.anisotropy, 0.0);
    }

    #[test]
    fn meridian_field_matches_phase() {
        let mesh = build_disk_mesh(12, 24, 1.0).unwrap();
        let phase = PhaseField::from_fn(mesh.len(), |k| {
            let [x, y] = mesh.nodes()[k];
            0.7 * (1.0 - x * x - y * y) + 0.3 * (2.0 * x).sin() * y
        });
        let p = Params::with_kappa2(5.0, 0.1).unwrap();
        let a = energy_sphere_field(&mesh, &SphereField::from_phase(&phase), &p).unwrap();
        let b = energy_phase(&mesh, &phase, &p).unwrap();
        assert!(rel(a.total, b.total) < 1e-10);
        assert!(rel(a.dirichlet, b.dirichlet) < 1e-10);
    }

    #[test]
    fn localized_energy_extremes_and_additivity() {
        let mesh = build_disk_mesh(10, 20, 1.0).unwrap();
        let phase = PhaseField::from_fn(mesh.len(), |k| mesh.nodes()[k][0] * 0.8 + 0.2);
        let p = Params::new(1.5, 0.4).unwrap();
        let all = vec![true; mesh.len()];
        let none = vec![false; mesh.len()];
        let full = energy_phase(&mesh, &phase, &p).unwrap();
        assert!(rel(localized_energy_phase(&mesh, &phase, &p, &all).unwrap().total, full.total) < 1e-15);
        assert_eq!(localized_energy_phase(&mesh, &phase, &p, &none).unwrap(), EnergyBreakdown::zero());
        let left: Vec<bool> = mesh.nodes().iter().map(|q| q[0] < 0.1).collect();
        let right: Vec<bool> = left.iter().map(|b| !b).collect();
        let sum = localized_energy_phase(&mesh, &phase, &p, &left).unwrap()
            + localized_energy_phase(&mesh, &phase, &p, &right).unwrap();
        assert!((sum.total - full.total).abs() < 1e-12);
        assert!((sum.dirichlet - full.dirichlet).abs() < 1e-12);
        assert!((sum.boundary - full.boundary).abs() < 1e-12);
    }

    #[test]
    fn constant_state_energy_table() {
        let disk = build_disk_mesh(8, 16, 1.0).unwrap();
        let c = constant_state_energies(&disk, &Params::new(2.0, 1.0).unwrap()).unwrap();
        assert!(rel(c.out_of_plane, 4.0 * PI) < 1e-15 && rel(c.in_plane.unwrap(), 2.0 * PI) < 1e-15);
        let c = constant_state_energies(&disk, &Params::new(0.0, 0.1).unwrap()).unwrap();
        assert_eq!(c.out_of_plane, 0.0);
        assert!(rel(c.in_plane.unwrap(), 200.0 * PI) < 1e-12);
        let sq = build_rectangle_mesh(4, 4, 1.0, 1.0).unwrap();
        let c = constant_state_energies(&sq, &Params::new(1.0, 2.0).unwrap()).unwrap();
        assert_eq!((c.out_of_plane, c.in_plane.unwrap()), (1.0, 1.0));
        assert_eq!(constant_state_energies(&sq, &Params::new(1.0, 0.0).unwrap()).unwrap().in_plane, None);
    }

    #[test]
    fn residual_vanishes_on_universal_states() {
        let mesh = build_disk_mesh(8, 16, 1.0).unwrap();
        let p = Params::new(1.7, 0.3).unwrap();
        for v in [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.6, 0.8, 0.0]] {
            let r = el_residual(&mesh, &SphereField::constant(mesh.len(), v), &p).unwrap();
            assert!(r.interior < 1e-12 && r.boundary < 1e-12, "{v:?}: {r:?}");
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(Params::new(-1.0, 1.0).is_err());
        assert!(Params::new(1.0, -0.1).is_err());
        assert!(Params::new(f64::NAN, 1.0).is_err());
        assert!(Params::with_kappa2(-5.0, 1.0).is_err());
        assert!(Params::new(1.0, 1.0).unwrap().with_dimension(0).is_err());
    }
}
