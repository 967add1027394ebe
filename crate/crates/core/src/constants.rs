//! Threshold formulas for the constant states and the functional-inequality
//! constants behind them.
//!
//! With `c_Ω = N / diam(Ω)`:
//!
//! ```text
//! δ_γ = min(c_Ω / 2, 1/γ²),   κ_γ = sqrt(δ_γ (c_Ω − δ_γ)),   γ_κ = 1 / (c_∂Ω · min(1, κ))
//! ```
//!
//! where `c_∂Ω` is the best constant in `c_∂Ω ‖u‖_{L²(∂Ω)} ≤ ‖u‖_{H¹(Ω)}`, with
//! `‖u‖²_{H¹} = ∫|∇u|² + ∫u²`. It is estimated from the smallest eigenvalue of
//! `(K + M) x = λ B x` (stiffness, area mass, boundary mass of the mesh).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::BandedCholesky;
use crate::mesh::{Domain, Mesh, MeshSummary};

/// Planar meshes only.
const DIMENSION: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaThreshold {
    pub c_omega: f64,
    pub delta_gamma: f64,
    pub kappa_gamma: f64,
}

/// `c_Ω`, `δ_γ` and `κ_γ` for the mesh's analytic domain. For `γ = 0` the
/// threshold is `κ_0 = c_Ω`.
pub fn kappa_threshold(gamma: f64, mesh: &Mesh) -> Result<KappaThreshold> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!("gamma must be finite and >= 0 (got {gamma})")));
    }
    let c_omega = DIMENSION / mesh.domain().diameter();
    if gamma == 0.0 {
        return Ok(KappaThreshold { c_omega, delta_gamma: c_omega / 2.0, kappa_gamma: c_omega });
    }
    let delta_gamma = (c_omega / 2.0).min(1.0 / (gamma * gamma));
    Ok(KappaThreshold { c_omega, delta_gamma, kappa_gamma: (delta_gamma * (c_omega - delta_gamma)).sqrt() })
}

/// `γ_κ = 1 / (c_trace · min(1, κ))`, defined for `κ > 0`.
pub fn gamma_threshold(kappa: f64, c_trace: f64) -> Result<f64> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::InvalidParameter(format!("gamma threshold needs kappa > 0 (got {kappa})")));
    }
    if !(c_trace > 0.0) || !c_trace.is_finite() {
        return Err(Error::InvalidParameter(format!("c_trace must be > 0 (got {c_trace})")));
    }
    Ok(1.0 / (c_trace * kappa.min(1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEstimate {
    pub c_trace: f64,
    /// `c_trace²`, the smallest generalized eigenvalue.
    pub eigenvalue: f64,
    pub iterations: usize,
}

pub const TRACE_MAX_ITERATIONS: usize = 10_000;
pub const TRACE_TOLERANCE: f64 = 1e-10;

/// `(∫|∇u|² + ∫u²) / ∫_∂ u²` for a nodal function; infinite if `u` vanishes on the boundary.
pub fn trace_quotient(mesh: &Mesh, u: &[f64]) -> f64 {
    let num = mesh.dirichlet_form(u) + mesh.integrate(|k| u[k] * u[k]);
    num / mesh.integrate_boundary(|k| u[k] * u[k])
}

/// Inverse iteration `(K + M) x_{k+1} = B x_k` from a slightly tilted constant,
/// stopped once the Rayleigh quotient changes by less than 1e-10 relative.
pub fn estimate_trace_constant(mesh: &Mesh) -> Result<TraceEstimate> {
    let mut op = mesh.stiffness();
    for (d, a) in op.diag.iter_mut().zip(mesh.area_weights()) {
        *d += a;
    }
    let chol = BandedCholesky::factor(&op)?;
    let arc = mesh.arc_weights();
    // Positive start with a small tilt so no eigenvector is missed by symmetry.
    let span = mesh.domain().diameter();
    let mut x: Vec<f64> = mesh.nodes().iter().map(|p| 1.0 + 0.1 * (p[0] + 0.5 * p[1]) / span).collect();
    let mut last = trace_quotient(mesh, &x);
    for it in 1..=TRACE_MAX_ITERATIONS {
        let mut y: Vec<f64> = x.iter().zip(arc).map(|(v, l)| v * l).collect();
        chol.solve_in_place(&mut y);
        let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        x = y.into_iter().map(|v| v / scale).collect();
        let q = trace_quotient(mesh, &x);
        if (q - last).abs() <= TRACE_TOLERANCE * q.abs() {
            return Ok(TraceEstimate { c_trace: q.sqrt(), eigenvalue: q, iterations: it });
        }
        last = q;
    }
    Err(Error::NoConvergence { iterations: TRACE_MAX_ITERATIONS, last })
}

/// Trace constant of the ball `B_R ⊂ ℝᴺ` from its radial eigenfunction: `c² = w'(R)/w(R)`
/// where `w'' + (N−1)/r w' = w`, `w(0) = 1`, `w'(0) = 0` (RK4 after a series launch).
pub fn ball_trace_constant(radius: f64, dimension: usize, dr: f64) -> Result<f64> {
    if !(radius > 0.0) || dimension == 0 || !(dr > 0.0) || dr > radius / 10.0 {
        return Err(Error::InvalidParameter("need radius > 0, dimension >= 1, 0 < dr <= R/10".into()));
    }
    let n = (radius / dr).ceil() as usize;
    let h = radius / n as f64;
    let nf = dimension as f64;
    let r0 = h;
    let (mut w, mut v) = (
        1.0 + r0 * r0 / (2.0 * nf) + r0.powi(4) / (8.0 * nf * (nf + 2.0)),
        r0 / nf + r0.powi(3) / (2.0 * nf * (nf + 2.0)),
    );
    let rhs = |r: f64, w: f64, v: f64| (v, w - (nf - 1.0) / r * v);
    for k in 1..n {
        let r = k as f64 * h;
        let (a1, b1) = rhs(r, w, v);
        let (a2, b2) = rhs(r + 0.5 * h, w + 0.5 * h * a1, v + 0.5 * h * b1);
        let (a3, b3) = rhs(r + 0.5 * h, w + 0.5 * h * a2, v + 0.5 * h * b2);
        let (a4, b4) = rhs(r + h, w + h * a3, v + h * b3);
        w += h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
        v += h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
    }
    Ok((v / w).sqrt())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub gamma: f64,
    pub kappa: Option<f64>,
    pub c_omega: f64,
    pub delta_gamma: f64,
    pub kappa_gamma: f64,
    pub c_trace: f64,
    /// Undefined (None) without a positive `κ`.
    pub gamma_kappa: Option<f64>,
    pub mesh: MeshSummary,
}

pub fn threshold_report(mesh: &Mesh, gamma: f64, kappa: Option<f64>) -> Result<ThresholdReport> {
    let k = kappa_threshold(gamma, mesh)?;
    let trace = estimate_trace_constant(mesh)?;
    let gamma_kappa = match kappa {
        Some(kappa) if kappa > 0.0 => Some(gamma_threshold(kappa, trace.c_trace)?),
        Some(kappa) if !(kappa == 0.0) => {
            return Err(Error::InvalidParameter(format!("kappa must be >= 0 (got {kappa})")))
        }
        _ => None,
    };
    Ok(ThresholdReport {
        gamma,
        kappa,
        c_omega: k.c_omega,
        delta_gamma: k.delta_gamma,
        kappa_gamma: k.kappa_gamma,
        c_trace: trace.c_trace,
        gamma_kappa,
        mesh: mesh.summary(),
    })
}

/// `∫|∇u|² + δ ∫_∂ u² − δ(c_Ω − δ) ∫ u²` with the mesh quadrature.
pub fn poincare_slack(mesh: &Mesh, delta: f64, u: &[f64]) -> f64 {
    let c_omega = DIMENSION / mesh.domain().diameter();
    mesh.dirichlet_form(u) + delta * mesh.integrate_boundary(|k| u[k] * u[k])
        - delta * (c_omega - delta) * mesh.integrate(|k| u[k] * u[k])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoincareSample {
    pub delta: f64,
    pub trials: usize,
    pub min_slack: f64,
}

/// Samples the Poincaré-with-boundary inequality on random smooth functions:
/// a cubic polynomial in the centered, scaled coordinates plus three plane
/// waves with random wave vectors (up to 3 periods across the domain).
pub fn verify_poincare_inequality(mesh: &Mesh, delta: f64, trials: usize, rng_seed: u64) -> Result<PoincareSample> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidParameter(format!("delta must be > 0 (got {delta})")));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("need at least one trial".into()));
    }
    let (center, scale) = match mesh.domain() {
        Domain::Disk { radius } => ([0.0, 0.0], radius),
        Domain::Rectangle { lx, ly } => ([lx / 2.0, ly / 2.0], 0.5 * lx.hypot(ly)),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut u = vec![0.0; mesh.len()];
    let mut min_slack = f64::INFINITY;
    for _ in 0..trials {
        let poly: [f64; 10] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let waves: [(f64, f64, f64, f64); 3] = std::array::from_fn(|_| {
            let k = rng.gen_range(0.0..3.0) * std::f64::consts::PI / scale;
            let dir = rng.gen_range(0.0..std::f64::consts::TAU);
            (rng.gen_range(-1.0..1.0), k * dir.cos(), k * dir.sin(), rng.gen_range(0.0..std::f64::consts::TAU))
        });
        for (k, value) in u.iter_mut().enumerate() {
            let [x, y] = mesh.nodes()[k];
            let (s, t) = ((x - center[0]) / scale, (y - center[1]) / scale);
            let monomials = [1.0, s, t, s * s, s * t, t * t, s * s * s, s * s * t, s * t * t, t * t * t];
            let mut v: f64 = poly.iter().zip(monomials).map(|(c, m)| c * m).sum();
            for &(a, kx, ky, phase) in &waves {
                v += a * (kx * x + ky * y + phase).cos();
            }
            *value = v;
        }
        min_slack = min_slack.min(poincare_slack(mesh, delta, &u));
    }
    Ok(PoincareSample { delta, trials, min_slack })
}
