//! Structured finite-volume discretizations of a rectangle and of a disk.
//!
//! Each node owns a control cell. The cell areas are the interior quadrature
//! weights, boundary nodes additionally carry an arc-length weight, and the
//! Dirichlet form of a nodal function `u` is
//!
//! ```text
//! D(u) = sum over edges (a, b) of  weight_ab * (u_a - u_b)^2
//! ```
//!
//! where `weight_ab` is the length of the cell face shared by `a` and `b`
//! divided by the distance between the nodes. This is the five-point
//! Laplacian on rectangles and its conservative polar counterpart on disks;
//! at the disk center it reduces to `4 (mean(ring 1) - center) / dr^2`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SymmetricSparse;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeshKind {
    Rectangle,
    DiskPolar,
}

/// Analytic description of the discretized domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum Domain {
    Rectangle { lx: f64, ly: f64 },
    Disk { radius: f64 },
}

impl Domain {
    pub fn area(&self) -> f64 {
        match *self {
            Domain::Rectangle { lx, ly } => lx * ly,
            Domain::Disk { radius } => PI * radius * radius,
        }
    }

    pub fn perimeter(&self) -> f64 {
        match *self {
            Domain::Rectangle { lx, ly } => 2.0 * (lx + ly),
            Domain::Disk { radius } => 2.0 * PI * radius,
        }
    }

    pub fn diameter(&self) -> f64 {
        match *self {
            Domain::Rectangle { lx, ly } => lx.hypot(ly),
            Domain::Disk { radius } => 2.0 * radius,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "grid", rename_all = "kebab-case")]
pub enum Spacing {
    Cartesian { nx: usize, ny: usize, hx: f64, hy: f64 },
    Polar { nr: usize, ntheta: usize, dr: f64, dtheta: f64 },
}

/// Dirichlet-form coupling between two nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
}

#[derive(Debug, Clone)]
pub struct Mesh {
    domain: Domain,
    spacing: Spacing,
    nodes: Vec<[f64; 2]>,
    area: Vec<f64>,
    arc: Vec<f64>,
    normal: Vec<[f64; 2]>,
    is_boundary: Vec<bool>,
    interior: Vec<usize>,
    boundary: Vec<usize>,
    edges: Vec<Edge>,
}

/// Compact description of a mesh, exported as JSON by the CLI.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeshSummary {
    pub kind: MeshKind,
    pub domain: Domain,
    pub spacing: Spacing,
    pub nodes: usize,
    pub interior_nodes: usize,
    pub boundary_nodes: usize,
    pub area: f64,
    pub perimeter: f64,
}

/// Cartesian grid of `(nx + 1) * (ny + 1)` nodes on `[0, lx] x [0, ly]`.
///
/// Trapezoidal weights: edge cells are halved, corner cells quartered. Corner
/// normals are the normalized average of the two adjacent edge normals.
pub fn build_rectangle_mesh(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Mesh> {
    if nx < 3 || ny < 3 {
        return Err(Error::InvalidMesh(format!(
            "rectangle needs nx, ny >= 3 (got {nx} x {ny})"
        )));
    }
    if !(lx > 0.0 && ly > 0.0 && lx.is_finite() && ly.is_finite()) {
        return Err(Error::InvalidMesh(format!("side lengths must be positive (got {lx} x {ly})")));
    }
    let (hx, hy) = (lx / nx as f64, ly / ny as f64);
    let n = (nx + 1) * (ny + 1);
    let idx = |i: usize, j: usize| j * (nx + 1) + i;
    let half = |k: usize, last: usize| if k == 0 || k == last { 0.5 } else { 1.0 };

    let mut nodes = Vec::with_capacity(n);
    let mut area = Vec::with_capacity(n);
    let mut arc = vec![0.0; n];
    let mut normal = vec![[0.0; 2]; n];
    let mut is_boundary = vec![false; n];

    for j in 0..=ny {
        for i in 0..=nx {
            let k = idx(i, j);
            nodes.push([i as f64 * hx, j as f64 * hy]);
            area.push(half(i, nx) * hx * half(j, ny) * hy);

            let mut nrm = [0.0f64; 2];
            let mut len = 0.0;
            if i == 0 {
                nrm[0] -= 1.0;
                len += 0.5 * hy * if j == 0 || j == ny { 1.0 } else { 2.0 };
            }
            if i == nx {
                nrm[0] += 1.0;
                len += 0.5 * hy * if j == 0 || j == ny { 1.0 } else { 2.0 };
            }
            if j == 0 {
                nrm[1] -= 1.0;
                len += 0.5 * hx * if i == 0 || i == nx { 1.0 } else { 2.0 };
            }
            if j == ny {
                nrm[1] += 1.0;
                len += 0.5 * hx * if i == 0 || i == nx { 1.0 } else { 2.0 };
            }
            if len > 0.0 {
                let norm = nrm[0].hypot(nrm[1]);
                normal[k] = [nrm[0] / norm, nrm[1] / norm];
                arc[k] = len;
                is_boundary[k] = true;
            }
        }
    }

    let mut edges = Vec::with_capacity(2 * n);
    for j in 0..=ny {
        for i in 0..=nx {
            if i < nx {
                edges.push(Edge { a: idx(i, j), b: idx(i + 1, j), weight: half(j, ny) * hy / hx });
            }
            if j < ny {
                edges.push(Edge { a: idx(i, j), b: idx(i, j + 1), weight: half(i, nx) * hx / hy });
            }
        }
    }

    Ok(Mesh::assemble(
        Domain::Rectangle { lx, ly },
        Spacing::Cartesian { nx, ny, hx, hy },
        nodes,
        area,
        arc,
        normal,
        is_boundary,
        edges,
    ))
}

/// Polar grid on the disk of radius `radius` centered at the origin.
///
/// Node 0 is the center; ring `i >= 1` holds `ntheta` nodes at radius `i dr`.
/// Cells are annular sectors between the mid-radii, so the center owns the disk
/// of radius `dr / 2` and the outer ring the half annulus `[R - dr/2, R]`; the
/// weights therefore integrate 1 exactly.
pub fn build_disk_mesh(nr: usize, ntheta: usize, radius: f64) -> Result<Mesh> {
    if nr < 3 {
        return Err(Error::InvalidMesh(format!("disk needs nr >= 3 (got {nr})")));
    }
    if ntheta < 8 {
        return Err(Error::InvalidMesh(format!("disk needs ntheta >= 8 (got {ntheta})")));
    }
    if ntheta % 2 != 0 {
        return Err(Error::InvalidMesh(format!(
            "ntheta must be even so that the grid is closed under theta -> -theta (got {ntheta})"
        )));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidMesh(format!("radius must be positive (got {radius})")));
    }
    let dr = radius / nr as f64;
    let dtheta = 2.0 * PI / ntheta as f64;
    let n = 1 + nr * ntheta;
    let idx = |i: usize, j: usize| 1 + (i - 1) * ntheta + (j % ntheta);

    let mut nodes = vec![[0.0, 0.0]];
    let mut area = vec![PI * dr * dr / 4.0];
    let mut arc = vec![0.0; n];
    let mut normal = vec![[0.0; 2]; n];
    let mut is_boundary = vec![false; n];

    for i in 1..=nr {
        let r = i as f64 * dr;
        for j in 0..ntheta {
            let theta = j as f64 * dtheta;
            let (s, c) = theta.sin_cos();
            nodes.push([r * c, r * s]);
            if i < nr {
                area.push(r * dr * dtheta);
            } else {
                // sector of the annulus [R - dr/2, R]
                area.push(dtheta * (radius * dr / 2.0 - dr * dr / 8.0));
                let k = idx(i, j);
                arc[k] = radius * dtheta;
                normal[k] = [c, s];
                is_boundary[k] = true;
            }
        }
    }

    let mut edges = Vec::with_capacity(2 * n);
    for j in 0..ntheta {
        edges.push(Edge { a: 0, b: idx(1, j), weight: dtheta / 2.0 });
    }
    for i in 1..=nr {
        let r = i as f64 * dr;
        let radial_extent = if i == nr { dr / 2.0 } else { dr };
        for j in 0..ntheta {
            edges.push(Edge { a: idx(i, j), b: idx(i, j + 1), weight: radial_extent / (r * dtheta) });
            if i < nr {
                edges.push(Edge { a: idx(i, j), b: idx(i + 1, j), weight: (r + dr / 2.0) * dtheta / dr });
            }
        }
    }

    Ok(Mesh::assemble(
        Domain::Disk { radius },
        Spacing::Polar { nr, ntheta, dr, dtheta },
        nodes,
        area,
        arc,
        normal,
        is_boundary,
        edges,
    ))
}

/// Analytic diameter of the domain (`2R` or the rectangle diagonal).
pub fn mesh_diameter(mesh: &Mesh) -> f64 {
    mesh.domain.diameter()
}

impl Mesh {
    #[allow(clippy::too_many_arguments)]
    fn assemble(
        domain: Domain,
        spacing: Spacing,
        nodes: Vec<[f64; 2]>,
        area: Vec<f64>,
        arc: Vec<f64>,
        normal: Vec<[f64; 2]>,
        is_boundary: Vec<bool>,
        edges: Vec<Edge>,
    ) -> Self {
        let interior = (0..nodes.len()).filter(|&k| !is_boundary[k]).collect();
        let boundary = (0..nodes.len()).filter(|&k| is_boundary[k]).collect();
        Self { domain, spacing, nodes, area, arc, normal, is_boundary, interior, boundary, edges }
    }

    pub fn kind(&self) -> MeshKind {
        match self.domain {
            Domain::Rectangle { .. } => MeshKind::Rectangle,
            Domain::Disk { .. } => MeshKind::DiskPolar,
        }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    /// Control-cell areas.
    pub fn area_weights(&self) -> &[f64] {
        &self.area
    }

    /// Arc-length weights, zero at interior nodes.
    pub fn arc_weights(&self) -> &[f64] {
        &self.arc
    }

    /// Outward unit normal at boundary node `k` (zero vector at interior nodes).
    pub fn normal(&self, k: usize) -> [f64; 2] {
        self.normal[k]
    }

    pub fn is_boundary(&self, k: usize) -> bool {
        self.is_boundary[k]
    }

    pub fn interior_nodes(&self) -> &[usize] {
        &self.interior
    }

    pub fn boundary_nodes(&self) -> &[usize] {
        &self.boundary
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Largest grid spacing; on disks the outer-ring arc spacing `R dtheta` counts.
    pub fn max_spacing(&self) -> f64 {
        match (self.spacing, self.domain) {
            (Spacing::Cartesian { hx, hy, .. }, _) => hx.max(hy),
            (Spacing::Polar { dr, dtheta, .. }, Domain::Disk { radius }) => dr.max(radius * dtheta),
            (Spacing::Polar { dr, .. }, _) => dr,
        }
    }

    /// Polar coordinates `(ring, ray)` of a node on a disk mesh; the center is `(0, 0)`.
    pub fn polar_index(&self, k: usize) -> Option<(usize, usize)> {
        match self.spacing {
            Spacing::Polar { ntheta, .. } if k == 0 => {
                let _ = ntheta;
                Some((0, 0))
            }
            Spacing::Polar { ntheta, .. } => Some((1 + (k - 1) / ntheta, (k - 1) % ntheta)),
            Spacing::Cartesian { .. } => None,
        }
    }

    /// Node index of ring `i`, ray `j` on a disk mesh.
    pub fn polar_node(&self, i: usize, j: usize) -> Option<usize> {
        match self.spacing {
            Spacing::Polar { nr, ntheta, .. } if i <= nr => {
                Some(if i == 0 { 0 } else { 1 + (i - 1) * ntheta + (j % ntheta) })
            }
            _ => None,
        }
    }

    pub fn bandwidth(&self) -> usize {
        self.edges.iter().map(|e| e.a.abs_diff(e.b)).max().unwrap_or(0)
    }

    /// Quadrature of a nodal function over the domain.
    pub fn integrate(&self, values: impl Fn(usize) -> f64) -> f64 {
        crate::sum::pairwise_sum(self.area.iter().enumerate().map(|(k, w)| w * values(k)))
    }

    /// Quadrature of a nodal function over the boundary.
    pub fn integrate_boundary(&self, values: impl Fn(usize) -> f64) -> f64 {
        crate::sum::pairwise_sum(self.boundary.iter().map(|&k| self.arc[k] * values(k)))
    }

    /// Discrete Dirichlet form `sum weight_ab (u_a - u_b)^2`.
    pub fn dirichlet_form(&self, u: &[f64]) -> f64 {
        crate::sum::pairwise_sum(self.edges.iter().map(|e| {
            let d = u[e.a] - u[e.b];
            e.weight * d * d
        }))
    }

    /// Stiffness matrix of [`Mesh::dirichlet_form`] (no factor 2).
    pub fn stiffness(&self) -> SymmetricSparse {
        let mut k = SymmetricSparse::new(self.len());
        for e in &self.edges {
            k.add_edge(e.a, e.b, e.weight);
        }
        k
    }

    pub fn summary(&self) -> MeshSummary {
        MeshSummary {
            kind: self.kind(),
            domain: self.domain,
            spacing: self.spacing,
            nodes: self.len(),
            interior_nodes: self.interior.len(),
            boundary_nodes: self.boundary.len(),
            area: crate::sum::pairwise_sum(self.area.iter().copied()),
            perimeter: crate::sum::pairwise_sum(self.arc.iter().copied()),
        }
    }
}
