//! Energy minimization over sphere fields and over phase fields.
//!
//! Both solvers are projected descent methods with Armijo backtracking. The
//! search direction is the tangential gradient preconditioned by the inverse
//! of the constant-coefficient operator `K + (κ² + diam⁻²) A + γ⁻² L` (stiffness
//! plus area and boundary masses), applied componentwise and projected back
//! onto the tangent planes. Because the preconditioner is symmetric positive
//! definite, the projected direction `d` satisfies `⟨∇E, d⟩ = −⟨g, K⁻¹g⟩ < 0`
//! and is always a descent direction. After each step every node vector is
//! renormalized. Every line search starts from the unit step, which is the
//! natural scale of the preconditioned direction; growing the step instead
//! drives the stiff modes to the edge of stability, where they oscillate.
//!
//! The line search evaluates `E(new) − E(old)` directly from the node changes
//! (products of sums and differences), so its rounding error scales with the
//! step rather than with `|E|`. Renormalization leaves the node vectors off
//! the sphere by `O(ε)`; since `∇E` has a large normal component there, that
//! drift is removed to first order with the multiplier `½ ∇E·m`. If the
//! backtracking still cannot certify a decrease while the predicted decrease
//! of a full step is below `ε·|E|`, the solve stops at the precision floor
//! ([`StopReason::PrecisionFloor`]).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::energy::{
    check_len, el_residual, phase_energy_delta, phase_gradient, sphere_breakdown, sphere_energy_delta,
    sphere_gradient, tangential, ElResidual, EnergyBreakdown, Params,
};
use crate::error::{Error, Result};
use crate::field::{dot, normalized, PhaseField, SphereField};
use crate::linalg::{BandedCholesky, SymmetricSparse};
use crate::mesh::{Domain, Mesh};
use crate::symmetry::{apply_symmetry, Symmetry};

/// Starting configuration of a solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitKind {
    ConstantE3,
    ConstantInPlane,
    /// Independent uniform samples of S² at every node (seeded).
    RandomUniform,
    /// Seeded smooth field: a uniform random direction plus a random quadratic
    /// perturbation of each component, normalized.
    RandomSmooth,
    /// Smooth radially decreasing tilt `φ = (π/4)(1 − ρ²)` about the domain center.
    RadialSeed,
    /// Explicit starting field, e.g. loaded from disk.
    Field(SphereField),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub max_iterations: usize,
    /// Stop once the projected-gradient norm falls below this fraction of its initial value...
    pub gradient_tolerance: f64,
    /// ...or below this absolute floor, whichever is larger.
    pub absolute_tolerance: f64,
    pub initial_step: f64,
    /// Step reduction factor of the backtracking line search, in (0, 1).
    pub backtracking: f64,
    /// Sufficient-decrease constant of the Armijo test.
    pub armijo: f64,
    pub rng_seed: u64,
    pub init: InitKind,
}


impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_iterations: 20_000,
            gradient_tolerance: 1e-8,
            absolute_tolerance: 1e-10,
            initial_step: 1.0,
            backtracking: 0.5,
            armijo: 1e-4,
            rng_seed: 0,
            init: InitKind::RandomUniform,
        }
    }
}

impl SolveOptions {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn with_init(mut self, init: InitKind) -> Self {
        self.init = init;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gradient_tolerance > 0.0) || !(self.absolute_tolerance > 0.0) {
            return Err(Error::InvalidParameter("tolerances must be > 0".into()));
        }
        if !(self.backtracking > 0.0 && self.backtracking < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "backtracking factor must lie in (0, 1) (got {})",
                self.backtracking
            )));
        }
        if !(self.initial_step > 0.0) || !(self.armijo > 0.0 && self.armijo < 1.0) {
            return Err(Error::InvalidParameter("initial step must be > 0 and armijo in (0, 1)".into()));
        }
        Ok(())
    }
}

/// Which branch a converged field belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    ConstantE3,
    ConstantInPlane,
    Nonconstant,
    NonConverged,
}

impl Classification {
    /// `min |m₃| ≥ 0.999` → ±e₃, `max |m₃| ≤ 1e-3` → in-plane, otherwise nonconstant.
    pub fn of_field(field: &SphereField) -> Self {
        let (lo, hi) = field
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), m| (lo.min(m[2].abs()), hi.max(m[2].abs())));
        if lo >= 0.999 {
            Classification::ConstantE3
        } else if hi <= 1e-3 {
            Classification::ConstantInPlane
        } else {
            Classification::Nonconstant
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::ConstantE3 => "constant-e3",
            Classification::ConstantInPlane => "constant-inplane",
            Classification::Nonconstant => "nonconstant",
            Classification::NonConverged => "non-converged",
        }
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Why a solve ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    /// Projected-gradient norm reached the target.
    GradientTolerance,
    /// Predicted decrease of a full step fell below `ε·|E|`, the resolution of
    /// the energy in floating point; the step would be lost in rounding.
    PrecisionFloor,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub iterations: usize,
    /// True for [`StopReason::GradientTolerance`] and [`StopReason::PrecisionFloor`].
    pub converged: bool,
    pub stop: StopReason,
    pub energy: EnergyBreakdown,
    pub initial_gradient_norm: f64,
    pub gradient_norm: f64,
    /// Total energy after each accepted step, starting with the initial field.
    pub energy_trace: Vec<f64>,
    pub classification: Classification,
    pub residual: ElResidual,
}

impl SolveReport {
    pub fn trace_is_nonincreasing(&self) -> bool {
        self.energy_trace.windows(2).all(|w| w[1] <= w[0])
    }
}

/// Componentwise preconditioner with pinned (Dirichlet) nodes removed.
struct Preconditioner {
    chol: BandedCholesky,
    pinned: Vec<bool>,
}

impl Preconditioner {
    fn new(mesh: &Mesh, params: &Params, pinned: Vec<bool>) -> Result<Self> {
        let shift = params.kappa2() + 1.0 / mesh.domain().diameter().powi(2);
        let bw = params.boundary_weight();
        let mut a = SymmetricSparse::new(mesh.len());
        for e in mesh.edges() {
            match (pinned[e.a], pinned[e.b]) {
                (false, false) => a.add_edge(e.a, e.b, e.weight),
                (false, true) => a.diag[e.a] += e.weight,
                (true, false) => a.diag[e.b] += e.weight,
                (true, true) => {}
            }
        }
        for k in 0..mesh.len() {
            if pinned[k] {
                a.diag[k] = 1.0;
            } else {
                a.diag[k] += shift * mesh.area_weights()[k] + bw * mesh.arc_weights()[k];
            }
        }
        Ok(Self { chol: BandedCholesky::factor(&a)?, pinned })
    }

    /// `x ← ½ A⁻¹ x` on free nodes, zero on pinned ones.
    fn apply(&self, x: &mut [f64]) {
        for (v, &p) in x.iter_mut().zip(&self.pinned) {
            if p {
                *v = 0.0;
            }
        }
        self.chol.solve_in_place(x);
        for (v, &p) in x.iter_mut().zip(&self.pinned) {
            *v = if p { 0.0 } else { 0.5 * *v };
        }
    }
}

fn pinned_nodes(mesh: &Mesh, params: &Params) -> Vec<bool> {
    if params.is_dirichlet() {
        (0..mesh.len()).map(|k| mesh.is_boundary(k)).collect()
    } else {
        vec![false; mesh.len()]
    }
}

fn domain_center(mesh: &Mesh) -> ([f64; 2], f64) {
    match mesh.domain() {
        Domain::Disk { radius } => ([0.0, 0.0], radius),
        Domain::Rectangle { lx, ly } => ([lx / 2.0, ly / 2.0], 0.5 * lx.hypot(ly)),
    }
}

fn random_smooth_field(mesh: &Mesh, seed: u64) -> SphereField {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = crate::field::random_unit_vector(&mut rng);
    let coeffs: [[f64; 6]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(-0.5..0.5)));
    let (c, rho) = domain_center(mesh);
    SphereField::from_fn(mesh.len(), |k| {
        let [x, y] = mesh.nodes()[k];
        let (s, t) = ((x - c[0]) / rho, (y - c[1]) / rho);
        let basis = [1.0, s, t, s * s, s * t, t * t];
        let v: [f64; 3] = std::array::from_fn(|i| base[i] + coeffs[i].iter().zip(basis).map(|(a, b)| a * b).sum::<f64>());
        normalized(v)
    })
}

fn initial_field(mesh: &Mesh, params: &Params, opts: &SolveOptions) -> Result<SphereField> {
    let n = mesh.len();
    let mut field = match &opts.init {
        InitKind::ConstantE3 => SphereField::constant(n, [0.0, 0.0, 1.0]),
        InitKind::ConstantInPlane => SphereField::constant(n, [1.0, 0.0, 0.0]),
        InitKind::RandomUniform => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.rng_seed);
            SphereField::random_uniform(n, &mut rng)
        }
        InitKind::RandomSmooth => random_smooth_field(mesh, opts.rng_seed),
        InitKind::RadialSeed => {
            let (c, rho) = domain_center(mesh);
            SphereField::from_fn(n, |k| {
                let [x, y] = mesh.nodes()[k];
                let s = ((x - c[0]).powi(2) + (y - c[1]).powi(2)) / (rho * rho);
                let phi = std::f64::consts::FRAC_PI_4 * (1.0 - s).max(0.0);
                [phi.sin(), 0.0, phi.cos()]
            })
        }
        InitKind::Field(f) => {
            check_len(mesh, f.len())?;
            let mut f = f.clone();
            f.normalize();
            f
        }
    };
    if params.is_dirichlet() {
        for &k in mesh.boundary_nodes() {
            field[k] = [0.0, 0.0, 1.0];
        }
    }
    Ok(field)
}

/// `|new|² − |old|²` as a product of sums and differences.
fn norm_change(old: [f64; 3], new: [f64; 3]) -> f64 {
    (0..3).map(|c| (new[c] - old[c]) * (new[c] + old[c])).sum()
}

fn weighted_norm(mesh: &Mesh, g: impl Iterator<Item = (usize, f64)>) -> f64 {
    // ‖G‖ with G = g/A the L² representative of the nodal gradient g
    let area = mesh.area_weights();
    crate::sum::pairwise_sum(g.map(|(k, s)| s / area[k])).sqrt()
}

/// Minimizes the penalized energy over sphere fields.
///
/// Stops at the gradient target or at the precision floor (see [`StopReason`]).
/// In Dirichlet mode (γ = 0) boundary nodes are pinned to `+e₃`. Returns the
/// final field even when the iteration budget runs out; the report is then
/// flagged `converged = false` / `NonConverged`.
pub fn minimize_sphere_field(mesh: &Mesh, params: &Params, opts: &SolveOptions) -> Result<(SphereField, SolveReport)> {
    params.validate()?;
    opts.validate()?;
    let pinned = pinned_nodes(mesh, params);
    let precond = Preconditioner::new(mesh, params, pinned.clone())?;
    let n = mesh.len();

    let mut field = initial_field(mesh, params, opts)?;
    let mut grad = vec![[0.0; 3]; n];
    let mut dir = vec![[0.0; 3]; n];
    let mut z = vec![[0.0; 3]; n];
    let mut comp = vec![0.0; n];
    let mut trial = vec![[0.0; 3]; n];
    let mut radial = vec![0.0; n];

    let mut energy = sphere_breakdown(mesh, field.as_slice(), params).total;
    let mut trace = vec![energy];
    let mut initial_norm = None;
    let mut norm;
    let mut iterations = 0;
    let mut stop = StopReason::MaxIterations;

    loop {
        sphere_gradient(mesh, field.as_slice(), params, &mut grad);
        for k in 0..n {
            radial[k] = if pinned[k] { 0.0 } else { 0.5 * dot(grad[k], field[k]) };
            grad[k] = if pinned[k] { [0.0; 3] } else { tangential(grad[k], field[k]) };
        }
        norm = weighted_norm(mesh, (0..n).map(|k| (k, dot(grad[k], grad[k]))));
        let target = opts.absolute_tolerance.max(opts.gradient_tolerance * *initial_norm.get_or_insert(norm));
        if norm <= target {
            stop = StopReason::GradientTolerance;
            break;
        }
        if iterations >= opts.max_iterations {
            break;
        }

        for c in 0..3 {
            for k in 0..n {
                comp[k] = grad[k][c];
            }
            precond.apply(&mut comp);
            for k in 0..n {
                z[k][c] = comp[k];
            }
        }
        for k in 0..n {
            z[k] = tangential(z[k], field[k]);
        }
        let mut slope = 0.0;
        for k in 0..n {
            dir[k] = [-z[k][0], -z[k][1], -z[k][2]];
            slope += dot(grad[k], dir[k]);
        }
        if !(slope < 0.0) {
            return Err(Error::Stagnation { iterations, step: 0.0 });
        }
        let mut step = opts.initial_step;
        let delta = loop {
            for k in 0..n {
                let m = field[k];
                let d = dir[k];
                trial[k] = normalized([m[0] + step * d[0], m[1] + step * d[1], m[2] + step * d[2]]);
            }
            // rounding in the normalization moves nodes off the sphere by O(ε); the
            // multiplier term removes its first-order effect on the energy
            let drift = crate::sum::pairwise_sum(
                (0..n).map(|k| radial[k] * norm_change(field[k], trial[k])),
            );
            let delta = sphere_energy_delta(mesh, field.as_slice(), &trial, params) - drift;
            if delta < 0.0 && delta <= opts.armijo * step * slope {
                break Some(delta);
            }
            step *= opts.backtracking;
            if step < 1e-16 * opts.initial_step {
                if -slope * opts.initial_step <= f64::EPSILON * energy.abs() {
                    break None;
                }
                return Err(Error::Stagnation { iterations, step });
            }
        };
        let Some(delta) = delta else {
            stop = StopReason::PrecisionFloor;
            break;
        };
        field.as_mut_slice().copy_from_slice(&trial);
        energy += delta;
        trace.push(energy);
        iterations += 1;
    }

    let breakdown = sphere_breakdown(mesh, field.as_slice(), params);
    let residual = el_residual(mesh, &field, params)?;
    let converged = stop != StopReason::MaxIterations;
    let classification = if converged { Classification::of_field(&field) } else { Classification::NonConverged };
    let report = SolveReport {
        iterations,
        converged,
        stop,
        energy: breakdown,
        initial_gradient_norm: initial_norm.unwrap_or(norm),
        gradient_norm: norm,
        energy_trace: trace,
        classification,
        residual,
    };
    Ok((field, report))
}

fn initial_phase(mesh: &Mesh, params: &Params, opts: &SolveOptions) -> Result<PhaseField> {
    let n = mesh.len();
    let mut phase = match &opts.init {
        InitKind::ConstantE3 => PhaseField::constant(n, 0.0),
        InitKind::ConstantInPlane => PhaseField::constant(n, std::f64::consts::FRAC_PI_2),
        InitKind::RandomSmooth => PhaseField::lift(&random_smooth_field(mesh, opts.rng_seed)),
        InitKind::RandomUniform => {
            use rand::Rng;
            let mut rng = ChaCha8Rng::seed_from_u64(opts.rng_seed);
            PhaseField::from_fn(n, |_| rng.gen_range(0.0..std::f64::consts::FRAC_PI_2))
        }
        InitKind::RadialSeed => {
            let (c, rho) = domain_center(mesh);
            PhaseField::from_fn(n, |k| {
                let [x, y] = mesh.nodes()[k];
                let s = ((x - c[0]).powi(2) + (y - c[1]).powi(2)) / (rho * rho);
                std::f64::consts::FRAC_PI_4 * (1.0 - s).max(0.0)
            })
        }
        InitKind::Field(f) => {
            check_len(mesh, f.len())?;
            PhaseField::lift(f)
        }
    };
    if params.is_dirichlet() {
        for &k in mesh.boundary_nodes() {
            phase.as_mut_slice()[k] = 0.0;
        }
    }
    Ok(phase)
}

/// Discrete Euler–Lagrange residual of the phase problem, split into interior
/// (`Δ(2φ) + κ² sin 2φ` up to the chord discretization) and boundary parts.
pub fn phase_residual(mesh: &Mesh, phase: &PhaseField, params: &Params) -> Result<ElResidual> {
    check_len(mesh, phase.len())?;
    let mut g = vec![0.0; mesh.len()];
    phase_gradient(mesh, phase.as_slice(), params, &mut g);
    let (area, arc) = (mesh.area_weights(), mesh.arc_weights());
    let interior =
        crate::sum::pairwise_sum(mesh.interior_nodes().iter().map(|&k| g[k] * g[k] / area[k])).sqrt();
    let boundary = if params.is_dirichlet() {
        mesh.integrate_boundary(|k| phase[k].sin().powi(2)).sqrt()
    } else {
        crate::sum::pairwise_sum(mesh.boundary_nodes().iter().map(|&k| g[k] * g[k] / arc[k])).sqrt()
    };
    Ok(ElResidual { interior, boundary })
}

/// Minimizes the phase functional `∫|∇ψ|² + κ²∫cos²ψ + γ⁻²∫_∂ sin²ψ`.
///
/// The phase is not clamped; in Dirichlet mode boundary values are pinned to 0.
/// The report's classification uses the sphere field `(sin φ, 0, cos φ)`.
pub fn minimize_phase(mesh: &Mesh, params: &Params, opts: &SolveOptions) -> Result<(PhaseField, SolveReport)> {
    params.validate()?;
    opts.validate()?;
    let pinned = pinned_nodes(mesh, params);
    let precond = Preconditioner::new(mesh, params, pinned.clone())?;
    let n = mesh.len();

    let mut phase = initial_phase(mesh, params, opts)?;
    let mut grad = vec![0.0; n];
    let mut dir = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut energy = crate::energy::energy_phase(mesh, &phase, params)?.total;
    let mut trace = vec![energy];
    let mut initial_norm = None;
    let mut norm;
    let mut iterations = 0;
    let mut stop = StopReason::MaxIterations;

    loop {
        phase_gradient(mesh, phase.as_slice(), params, &mut grad);
        for k in 0..n {
            if pinned[k] {
                grad[k] = 0.0;
            }
        }
        norm = weighted_norm(mesh, grad.iter().enumerate().map(|(k, g)| (k, g * g)));
        let target = opts.absolute_tolerance.max(opts.gradient_tolerance * *initial_norm.get_or_insert(norm));
        if norm <= target {
            stop = StopReason::GradientTolerance;
            break;
        }
        if iterations >= opts.max_iterations {
            break;
        }
        z.copy_from_slice(&grad);
        precond.apply(&mut z);
        let mut slope = 0.0;
        for k in 0..n {
            dir[k] = -z[k];
            slope += grad[k] * dir[k];
        }
        if !(slope < 0.0) {
            return Err(Error::Stagnation { iterations, step: 0.0 });
        }
        let mut step = opts.initial_step;
        let delta = loop {
            for k in 0..n {
                trial[k] = phase[k] + step * dir[k];
            }
            let delta = phase_energy_delta(mesh, phase.as_slice(), &trial, params);
            if delta < 0.0 && delta <= opts.armijo * step * slope {
                break Some(delta);
            }
            step *= opts.backtracking;
            if step < 1e-16 * opts.initial_step {
                if -slope * opts.initial_step <= f64::EPSILON * energy.abs() {
                    break None;
                }
                return Err(Error::Stagnation { iterations, step });
            }
        };
        let Some(delta) = delta else {
            stop = StopReason::PrecisionFloor;
            break;
        };
        phase.as_mut_slice().copy_from_slice(&trial);
        energy += delta;
        trace.push(energy);
        iterations += 1;
    }

    let breakdown = crate::energy::energy_phase(mesh, &phase, params)?;
    let residual = phase_residual(mesh, &phase, params)?;
    let converged = stop != StopReason::MaxIterations;
    let classification = if converged {
        Classification::of_field(&SphereField::from_phase(&phase))
    } else {
        Classification::NonConverged
    };
    let report = SolveReport {
        iterations,
        converged,
        stop,
        energy: breakdown,
        initial_gradient_norm: initial_norm.unwrap_or(norm),
        gradient_norm: norm,
        energy_trace: trace,
        classification,
        residual,
    };
    Ok((phase, report))
}

/// Below this length the area-weighted mean in-plane vector is treated as zero.
pub const MEAN_DIRECTION_FLOOR: f64 = 1e-12;

/// Picks a representative of the `O(3, e₃)` orbit of `field`.
///
/// Applies the `e₃` reflection if the area-weighted mean of `m₃` is negative,
/// then rotates about `e₃` so that the mean in-plane vector points along
/// `+e₁`. Returns the canonical field and the symmetry `σ` with
/// `canonical = σ ∘ field`. Needs node weights, hence the mesh.
pub fn canonicalize(mesh: &Mesh, field: &SphereField) -> Result<(SphereField, Symmetry)> {
    check_len(mesh, field.len())?;
    let mean = |c: usize| mesh.integrate(|k| field[k][c]);
    let reflect = mean(2) < 0.0;
    let (m1, m2) = (mean(0), mean(1));
    let len = m1.hypot(m2);
    // an already aligned mean keeps the identity despite round-off in the integrals
    let angle = if len < MEAN_DIRECTION_FLOOR || (m1 > 0.0 && m2.abs() <= 1e-12 * len) { 0.0 } else { -m2.atan2(m1) };
    let sigma = Symmetry { angle, in_plane_reflection: false, axis_reflection: reflect };
    Ok((apply_symmetry(field, &sigma), sigma))
}

/// Numerical check of the second-order lower bound for boundary-fixed
/// perturbations of a critical point `base` with `m₁ > 0` in the interior:
///
/// ```text
/// gap = [E_κ(other) − E_κ(base)] − [∫ m₁² |∇(v/m₁)|² + κ² ∫ (v·e₃)²],   v = other − base
/// ```
///
/// `E_κ` has no boundary term. The weighted gradient term is discretized per
/// edge as `w_ab m₁(a) m₁(b) |v_a/m₁(a) − v_b/m₁(b)|²`, expanded so that
/// nodes with `v = 0` (the boundary) contribute nothing even where `m₁ = 0`.
pub fn stability_gap(mesh: &Mesh, base: &SphereField, other: &SphereField, params: &Params) -> Result<f64> {
    params.validate()?;
    check_len(mesh, base.len())?;
    check_len(mesh, other.len())?;
    for &k in mesh.boundary_nodes() {
        let d = (0..3).map(|c| (base[k][c] - other[k][c]).abs()).fold(0.0, f64::max);
        if d > 1e-12 {
            return Err(Error::Precondition(format!("fields differ on boundary node {k}")));
        }
    }
    for &k in mesh.interior_nodes() {
        if !(base[k][0] > 0.0) {
            return Err(Error::Precondition(format!("m1 <= 0 at interior node {k}")));
        }
    }
    let free = params.without_boundary_term();
    let increase = sphere_energy_delta(mesh, base.as_slice(), other.as_slice(), &free);

    let v: Vec<[f64; 3]> = (0..mesh.len())
        .map(|k| [other[k][0] - base[k][0], other[k][1] - base[k][1], other[k][2] - base[k][2]])
        .collect();
    let m1: Vec<f64> = base.iter().map(|m| m[0]).collect();
    let weighted = crate::sum::pairwise_sum(mesh.edges().iter().map(|e| {
        let (a, b) = (e.a, e.b);
        let (va, vb) = (dot(v[a], v[a]), dot(v[b], v[b]));
        let mut s = -2.0 * dot(v[a], v[b]);
        if va > 0.0 {
            s += m1[b] / m1[a] * va;
        }
        if vb > 0.0 {
            s += m1[a] / m1[b] * vb;
        }
        e.weight * s
    }));
    let anisotropy = params.kappa2() * mesh.integrate(|k| v[k][2] * v[k][2]);
    Ok(increase - (weighted + anisotropy))
}
