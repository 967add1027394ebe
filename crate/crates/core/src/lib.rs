//! Numerical laboratory for sphere-valued maps minimizing
//!
//! ```text
//! E(m) = ∫_Ω |∇m|² + κ² ∫_Ω (m·e₃)² + γ⁻² ∫_∂Ω |m × e₃|²
//! ```
//!
//! over `m : Ω → S²`, together with its lifted phase problem, the radial ODE
//! reduction on balls, the functional-inequality constants behind the
//! constant-state thresholds, and executable checks of the structural
//! properties of minimizers (meridian range, uniqueness up to `O(3, e₃)`,
//! comparison, radial symmetry and monotonicity).
//!
//! ```
//! use spherelab::{build_disk_mesh, energy_sphere_field, Params, SphereField};
//!
//! let mesh = build_disk_mesh(8, 16, 1.0)?;
//! let e3 = SphereField::constant(mesh.len(), [0.0, 0.0, 1.0]);
//! let params = Params::new(2.0, 1.0)?;
//! let e = energy_sphere_field(&mesh, &e3, &params)?;
//! assert!((e.total - 4.0 * std::f64::consts::PI).abs() < 1e-12);
//! # Ok::<(), spherelab::Error>(())
//! ```

pub mod constants;
pub mod energy;
pub mod error;
pub mod field;
pub mod io;
pub mod linalg;
pub mod mesh;
pub mod minimize;
pub mod radial;
pub mod sum;
pub mod symmetry;
pub mod verify;

/// Version of this library.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use constants::{
    estimate_trace_constant, gamma_threshold, kappa_threshold, threshold_report, verify_poincare_inequality,
    KappaThreshold, PoincareSample, ThresholdReport, TraceEstimate,
};
pub use energy::{
    constant_state_energies, el_residual, energy_gradient, energy_phase, energy_sphere_field, localized_energy_phase,
    BoundaryMode, ConstantStateEnergies, ElResidual, EnergyBreakdown, Params,
};
pub use error::{Error, Result};
pub use field::{Axis, PhaseField, SphereField};
pub use mesh::{build_disk_mesh, build_rectangle_mesh, mesh_diameter, Domain, Mesh, MeshKind, MeshSummary};
pub use minimize::{
    canonicalize, minimize_phase, minimize_sphere_field, stability_gap, Classification, InitKind, SolveOptions,
    SolveReport, StopReason,
};
pub use radial::{
    check_monotone, radial_energy, shoot, solve_radial_bvp, MonotoneCheck, RadialOptions, RadialProfile,
    RadialSolution,
};
pub use symmetry::{apply_symmetry, fold_positive, Symmetry};
pub use verify::{
    align, compare_solutions, field_diagnostics, meridian_deviation, phase_diagram_sweep, profile_deviation,
    radial_deviation, sign_consistency, uniqueness_check, CellDiagnostics, Comparison, Ordering, PhaseDiagram,
    SignVerdict, SweepCell, SweepDomain, SweepOptions, SweepRun,
};
