//! Executable checks of the structural properties of minimizers.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{ball_trace_constant, estimate_trace_constant, gamma_threshold, kappa_threshold};
use crate::energy::{energy_sphere_field, Params};
use crate::error::{Error, Result};
use crate::field::{Axis, PhaseField, SphereField};
use crate::mesh::{Mesh, MeshKind};
use crate::minimize::{canonicalize, minimize_sphere_field, Classification, InitKind, SolveOptions, StopReason};
use crate::radial::{check_monotone, solve_radial_bvp, sphere_area, RadialOptions, RadialProfile};
use crate::symmetry::{apply_symmetry, Symmetry};

/// Below this in-plane L² norm a field counts as constant ±e₃.
const IN_PLANE_FLOOR: f64 = 1e-12;

/// Relative L² size of `m₂` in the canonicalized field; 0 for fields with no in-plane part.
pub fn meridian_deviation(field: &SphereField, mesh: &Mesh) -> Result<f64> {
    let (c, _) = canonicalize(mesh, field)?;
    let off = mesh.integrate(|k| c[k][1] * c[k][1]).sqrt();
    let in_plane = mesh.integrate(|k| c[k][0] * c[k][0] + c[k][1] * c[k][1]).sqrt();
    Ok(if in_plane < IN_PLANE_FLOOR { 0.0 } else { off / in_plane })
}

/// Components below this are treated as zero in [`sign_consistency`].
pub const ZERO_COMPONENT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignVerdict {
    /// One strict sign on all interior nodes, or identically (numerically) zero.
    pub constant_sign: bool,
    pub identically_zero: bool,
    /// Minimal interior `|component|` in the strict-sign case, 0 otherwise.
    pub min_abs: f64,
}

pub fn sign_consistency(field: &SphereField, axis: Axis, mesh: &Mesh) -> Result<SignVerdict> {
    crate::energy::check_len(mesh, field.len())?;
    let i = axis.index();
    let values: Vec<f64> = mesh.interior_nodes().iter().map(|&k| field[k][i]).collect();
    if values.iter().all(|v| v.abs() <= ZERO_COMPONENT) {
        return Ok(SignVerdict { constant_sign: true, identically_zero: true, min_abs: 0.0 });
    }
    let positive = values.iter().all(|&v| v > 0.0);
    let negative = values.iter().all(|&v| v < 0.0);
    let min_abs = values.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    Ok(if positive || negative {
        SignVerdict { constant_sign: true, identically_zero: false, min_abs }
    } else {
        SignVerdict { constant_sign: false, identically_zero: false, min_abs: 0.0 }
    })
}

/// Square root of the area-weighted mean over rings of the angular variance
/// of `φ`, divided by the range of `φ` (0 if the range is below 1e-12).
pub fn radial_deviation(mesh: &Mesh, phase: &PhaseField) -> Result<f64> {
    if mesh.kind() != MeshKind::DiskPolar {
        return Err(Error::UnsupportedDomain);
    }
    crate::energy::check_len(mesh, phase.len())?;
    let range = phase.max() - phase.min();
    if range < 1e-12 {
        return Ok(0.0);
    }
    let (nr, ntheta) = match mesh.spacing() {
        crate::mesh::Spacing::Polar { nr, ntheta, .. } => (nr, ntheta),
        _ => unreachable!(),
    };
    let area = mesh.area_weights();
    let mut weighted = 0.0;
    for i in 1..=nr {
        let ring: Vec<usize> = (0..ntheta).map(|j| mesh.polar_node(i, j).unwrap()).collect();
        let mean = ring.iter().map(|&k| phase[k]).sum::<f64>() / ntheta as f64;
        let var = ring.iter().map(|&k| (phase[k] - mean).powi(2)).sum::<f64>() / ntheta as f64;
        weighted += var * ring.iter().map(|&k| area[k]).sum::<f64>();
    }
    let total: f64 = area.iter().sum();
    Ok((weighted / total).sqrt() / range)
}

/// Max over nodes of `|φ(x) − u(|x|)/2|` for a disk mesh and a radial profile.
pub fn profile_deviation(mesh: &Mesh, phase: &PhaseField, profile: &RadialProfile) -> Result<f64> {
    if mesh.kind() != MeshKind::DiskPolar {
        return Err(Error::UnsupportedDomain);
    }
    crate::energy::check_len(mesh, phase.len())?;
    Ok((0..mesh.len())
        .map(|k| {
            let [x, y] = mesh.nodes()[k];
            (phase[k] - 0.5 * profile.u_at(x.hypot(y))).abs()
        })
        .fold(0.0, f64::max))
}

fn l2_distance(mesh: &Mesh, a: &SphereField, b: &SphereField) -> f64 {
    mesh.integrate(|k| (0..3).map(|c| (a[k][c] - b[k][c]).powi(2)).sum()).sqrt()
}

/// Element `σ ∈ O(3, e₃)` minimizing `‖a − σ b‖_{L²}` and the minimal distance.
///
/// For each of the four reflection classes the best rotation angle is found in
/// closed form: `∫ a·R_θ b = C cos θ + S sin θ + const` is maximal at `θ = atan2(S, C)`.
pub fn align(mesh: &Mesh, a: &SphereField, b: &SphereField) -> Result<(Symmetry, f64)> {
    crate::energy::check_len(mesh, a.len())?;
    crate::energy::check_len(mesh, b.len())?;
    let mut best = (Symmetry::identity(), f64::INFINITY);
    for in_plane_reflection in [false, true] {
        for axis_reflection in [false, true] {
            let pre = Symmetry { angle: 0.0, in_plane_reflection, axis_reflection };
            let bb = apply_symmetry(b, &pre);
            let c = mesh.integrate(|k| a[k][0] * bb[k][0] + a[k][1] * bb[k][1]);
            let s = mesh.integrate(|k| a[k][1] * bb[k][0] - a[k][0] * bb[k][1]);
            let sigma = Symmetry::rotation(s.atan2(c)).compose(&pre);
            let d = l2_distance(mesh, a, &apply_symmetry(b, &sigma));
            if d < best.1 {
                best = (sigma, d);
            }
        }
    }
    Ok(best)
}

/// Largest pairwise L² distance after canonicalization and optimal alignment.
pub fn uniqueness_check(fields: &[SphereField], mesh: &Mesh) -> Result<f64> {
    if fields.len() < 2 {
        return Err(Error::InvalidParameter("uniqueness check needs at least two fields".into()));
    }
    let canon: Vec<SphereField> = fields.iter().map(|f| canonicalize(mesh, f).map(|c| c.0)).collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for i in 0..canon.len() {
        for j in i + 1..canon.len() {
            worst = worst.max(align(mesh, &canon[i], &canon[j])?.1);
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ordering {
    /// Both phases vanish identically.
    Equal0,
    /// Both phases equal π/2 identically.
    EqualPi,
    Strict,
    Violated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub ordering: Ordering,
    /// `min (φ₂ − φ₁)` over samples with `r < R`.
    pub min_margin: f64,
    /// `φ₂(R) − φ₁(R)`.
    pub boundary_margin: f64,
}

/// Margins above this count as strict.
pub const STRICT_MARGIN: f64 = 1e-9;

/// Orders two radial solutions whose parameters satisfy `κ₁ ≤ κ₂`, `γ₁ ≤ γ₂`.
pub fn compare_solutions(p1: &RadialProfile, p2: &RadialProfile) -> Result<Comparison> {
    let (a, b) = (&p1.params, &p2.params);
    if !(a.kappa <= b.kappa && a.gamma <= b.gamma) || (a.kappa == b.kappa && a.gamma == b.gamma) {
        return Err(Error::Precondition(format!(
            "need kappa1 <= kappa2, gamma1 <= gamma2, not both equal (got ({}, {}) vs ({}, {}))",
            a.kappa, a.gamma, b.kappa, b.gamma
        )));
    }
    if p1.len() != p2.len() || p1.radius != p2.radius || p1.dimension != p2.dimension {
        return Err(Error::Precondition("profiles live on different grids".into()));
    }
    let n = p1.len() - 1;
    let margins: Vec<f64> = (0..=n).map(|k| 0.5 * (p2.u[k] - p1.u[k])).collect();
    let min_margin = margins[..n].iter().copied().fold(f64::INFINITY, f64::min);
    let boundary_margin = margins[n];
    let identically = |p: &RadialProfile, v: f64| p.u.iter().all(|&u| (u - v).abs() <= 1e-12);
    let ordering = if identically(p1, 0.0) && identically(p2, 0.0) {
        Ordering::Equal0
    } else if identically(p1, std::f64::consts::PI) && identically(p2, std::f64::consts::PI) {
        Ordering::EqualPi
    } else if min_margin > STRICT_MARGIN && (b.gamma == 0.0 || boundary_margin > STRICT_MARGIN) {
        Ordering::Strict
    } else {
        Ordering::Violated
    };
    Ok(Comparison { ordering, min_margin, boundary_margin })
}

/// Where a sweep solves.
#[derive(Debug, Clone, Copy)]
pub enum SweepDomain<'a> {
    /// 2D solves on the given mesh.
    Mesh(&'a Mesh),
    /// Radial shooting on the ball `B_R ⊂ ℝᴺ`.
    Ball { radius: f64, dimension: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub kappas: Vec<f64>,
    pub gammas: Vec<f64>,
    /// Random-init seeds per cell (2D mode).
    pub seeds: Vec<u64>,
    /// Also start one solve from [`InitKind::RadialSeed`] (2D mode). White-noise
    /// starts can stall in boundary-wall states when γ is small.
    pub radial_seed: bool,
    pub solve: SolveOptions,
    pub radial: RadialOptions,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            kappas: vec![0.25, 0.5, 1.0, 2.0, 3.0, 4.0],
            gammas: vec![0.0, 0.1, 0.3, 1.0, 2.0, 4.0],
            seeds: vec![0, 1, 2],
            radial_seed: true,
            solve: SolveOptions::default(),
            radial: RadialOptions::default(),
        }
    }
}

/// Diagnostics of the least-energy field of a 2D cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellDiagnostics {
    pub meridian_deviation: f64,
    pub radial_deviation: Option<f64>,
    pub m1_sign: SignVerdict,
    pub m3_sign: SignVerdict,
    /// Range of the lifted phase of the canonicalized field.
    pub phase_min: f64,
    pub phase_max: f64,
}

/// One converged 2D solve of a sweep cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRun {
    /// `seed N` or `radial seed`.
    pub start: String,
    pub energy: f64,
    pub classification: Classification,
    pub iterations: usize,
    pub stop: StopReason,
    pub diagnostics: Option<CellDiagnostics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub kappa: f64,
    pub gamma: f64,
    pub classification: Classification,
    pub energy_min: f64,
    pub energy_e3: f64,
    /// `None` in Dirichlet mode.
    pub energy_in_plane: Option<f64>,
    pub kappa_gamma: f64,
    /// `None` for `κ = 0`.
    pub gamma_kappa: Option<f64>,
    /// Converged runs (2D seeds or the radial solve).
    pub converged_runs: usize,
    pub failures: Vec<String>,
    /// Converged 2D solves in start order.
    pub runs: Vec<SweepRun>,
    pub diagnostics: Option<CellDiagnostics>,
    /// Monotonicity of the selected radial profile (ball mode).
    pub monotone: Option<bool>,
    #[serde(skip)]
    pub field: Option<SphereField>,
    #[serde(skip)]
    pub profile: Option<RadialProfile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseDiagram {
    pub kappas: Vec<f64>,
    pub gammas: Vec<f64>,
    pub c_trace: f64,
    /// Row-major: `cells[i * gammas.len() + j]` belongs to `(kappas[i], gammas[j])`.
    pub cells: Vec<SweepCell>,
    /// Cells inside `κ ≤ 0.8 κ_γ` not labelled constant-e3, or inside
    /// `γ ≥ 1.25 γ_κ` not labelled constant-inplane.
    pub soundness_violations: Vec<String>,
}

impl SweepCell {
    /// Converged runs whose energy is within `rel_tol` of the cell minimum.
    pub fn minimizing_runs(&self, rel_tol: f64) -> impl Iterator<Item = &SweepRun> {
        let cutoff = self.energy_min + rel_tol * self.energy_min.abs();
        self.runs.iter().filter(move |r| r.energy <= cutoff)
    }
}

impl PhaseDiagram {
    pub fn cell(&self, i: usize, j: usize) -> &SweepCell {
        &self.cells[i * self.gammas.len() + j]
    }
}

/// Energies within this relative margin of the incumbent do not replace it.
const ENERGY_TIE: f64 = 1e-12;

/// Labels every `(κ, γ)` cell by the least-energy state found.
///
/// 2D mode: candidates are the exact constant states (±e₃ always, in-plane
/// for `γ > 0`) and one converged solve per seed from a random start. Ball
/// mode: the least-energy root of the shooting problem. Failed runs are
/// recorded in the cell.
pub fn phase_diagram_sweep(domain: SweepDomain<'_>, opts: &SweepOptions) -> Result<PhaseDiagram> {
    if opts.kappas.is_empty() || opts.gammas.is_empty() {
        return Err(Error::InvalidParameter("sweep grids must be nonempty".into()));
    }
    let params: Vec<Params> = opts
        .kappas
        .iter()
        .flat_map(|&k| opts.gammas.iter().map(move |&g| Params::new(k, g)))
        .collect::<Result<_>>()?;

    let (c_trace, c_omega, area, perimeter) = match domain {
        SweepDomain::Mesh(mesh) => {
            let d = mesh.domain();
            (estimate_trace_constant(mesh)?.c_trace, 2.0 / d.diameter(), d.area(), d.perimeter())
        }
        SweepDomain::Ball { radius, dimension } => {
            let s = sphere_area(dimension);
            let n = dimension as f64;
            let c = ball_trace_constant(radius, dimension, radius * 1e-3)?;
            (c, n / (2.0 * radius), s * radius.powf(n) / n, s * radius.powf(n - 1.0))
        }
    };

    let cells: Vec<SweepCell> = params
        .par_iter()
        .map(|p| {
            let kappa_gamma = match domain {
                SweepDomain::Mesh(mesh) => kappa_threshold(p.gamma, mesh).map(|t| t.kappa_gamma).unwrap_or(f64::NAN),
                SweepDomain::Ball { .. } => {
                    if p.gamma == 0.0 {
                        c_omega
                    } else {
                        let d = (c_omega / 2.0).min(1.0 / (p.gamma * p.gamma));
                        (d * (c_omega - d)).sqrt()
                    }
                }
            };
            let gamma_kappa = gamma_threshold(p.kappa, c_trace).ok();
            let energy_e3 = p.kappa2() * area;
            let energy_in_plane = if p.gamma > 0.0 { Some(perimeter / (p.gamma * p.gamma)) } else { None };
            let mut cell = SweepCell {
                kappa: p.kappa,
                gamma: p.gamma,
                classification: Classification::ConstantE3,
                energy_min: energy_e3,
                energy_e3,
                energy_in_plane,
                kappa_gamma,
                gamma_kappa,
                converged_runs: 0,
                failures: Vec::new(),
                runs: Vec::new(),
                diagnostics: None,
                monotone: None,
                field: None,
                profile: None,
            };
            match domain {
                SweepDomain::Mesh(mesh) => sweep_cell_2d(mesh, p, opts, &mut cell),
                SweepDomain::Ball { radius, dimension } => {
                    let p = p.with_dimension(dimension).expect("dimension >= 1");
                    match solve_radial_bvp(&p, radius, &opts.radial) {
                        Ok(sol) => {
                            cell.converged_runs = 1;
                            cell.classification = sol.classification;
                            cell.energy_min = sol.energy.total;
                            cell.monotone = Some(check_monotone(&sol.profile).is_monotone);
                            cell.profile = Some(sol.profile);
                        }
                        Err(e) => cell.failures.push(e.to_string()),
                    }
                }
            }
            cell
        })
        .collect();

    let mut soundness_violations = Vec::new();
    for c in &cells {
        if c.kappa <= 0.8 * c.kappa_gamma && c.classification != Classification::ConstantE3 {
            soundness_violations.push(format!(
                "kappa={} gamma={}: kappa <= 0.8 kappa_gamma but class {}",
                c.kappa, c.gamma, c.classification
            ));
        }
        if let Some(gk) = c.gamma_kappa {
            if c.gamma >= 1.25 * gk && c.classification != Classification::ConstantInPlane {
                soundness_violations.push(format!(
                    "kappa={} gamma={}: gamma >= 1.25 gamma_kappa but class {}",
                    c.kappa, c.gamma, c.classification
                ));
            }
        }
    }
    Ok(PhaseDiagram {
        kappas: opts.kappas.clone(),
        gammas: opts.gammas.clone(),
        c_trace,
        cells,
        soundness_violations,
    })
}

fn sweep_cell_2d(mesh: &Mesh, p: &Params, opts: &SweepOptions, cell: &mut SweepCell) {
    let n = mesh.len();
    let e3 = SphereField::constant(n, [0.0, 0.0, 1.0]);
    let mut best_energy = energy_sphere_field(mesh, &e3, p).map(|e| e.total).unwrap_or(f64::INFINITY);
    let mut best = (e3, Classification::ConstantE3);
    if p.gamma > 0.0 {
        let ip = SphereField::constant(n, [1.0, 0.0, 0.0]);
        if let Ok(e) = energy_sphere_field(mesh, &ip, p) {
            if e.total < best_energy {
                best_energy = e.total;
                best = (ip, Classification::ConstantInPlane);
            }
        }
    }
    let mut starts: Vec<(String, SolveOptions)> = opts
        .seeds
        .iter()
        .map(|&seed| (format!("seed {seed}"), opts.solve.clone().with_seed(seed).with_init(InitKind::RandomUniform)))
        .collect();
    if opts.radial_seed {
        starts.push(("radial seed".into(), opts.solve.clone().with_init(InitKind::RadialSeed)));
    }
    for (label, so) in starts {
        match minimize_sphere_field(mesh, p, &so) {
            Ok((field, report)) if report.converged => {
                cell.converged_runs += 1;
                let e = report.energy.total;
                cell.runs.push(SweepRun {
                    start: label,
                    energy: e,
                    classification: report.classification,
                    iterations: report.iterations,
                    stop: report.stop,
                    diagnostics: field_diagnostics(mesh, &field).ok(),
                });
                if e < best_energy - ENERGY_TIE * best_energy.abs() {
                    best_energy = e;
                    best = (field, report.classification);
                }
            }
            Ok((_, report)) => cell.failures.push(format!(
                "{label}: not converged after {} iterations (gradient norm {:.3e})",
                report.iterations, report.gradient_norm
            )),
            Err(e) => cell.failures.push(format!("{label}: {e}")),
        }
    }
    let (field, class) = best;
    cell.classification = class;
    cell.energy_min = best_energy;
    cell.diagnostics = field_diagnostics(mesh, &field).ok();
    cell.field = Some(field);
}

/// Meridian, sign, range and (on disks) radial diagnostics of a field.
pub fn field_diagnostics(mesh: &Mesh, field: &SphereField) -> Result<CellDiagnostics> {
    let (canon, _) = canonicalize(mesh, field)?;
    let phase = PhaseField::lift(&canon);
    let radial = if mesh.kind() == MeshKind::DiskPolar { Some(radial_deviation(mesh, &phase)?) } else { None };
    Ok(CellDiagnostics {
        meridian_deviation: meridian_deviation(field, mesh)?,
        radial_deviation: radial,
        m1_sign: sign_consistency(&canon, Axis::E1, mesh)?,
        m3_sign: sign_consistency(&canon, Axis::E3, mesh)?,
        phase_min: phase.min(),
        phase_max: phase.max(),
    })
}
