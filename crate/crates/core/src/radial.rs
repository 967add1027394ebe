//! Radial reduction on balls.
//!
//! Radially symmetric critical points are written `φ(x) = u(|x|)/2`, where
//! `u : [0, R] → [0, π]` solves
//!
//! ```text
//! u'' + (N−1)/r · u' + κ² sin u = 0,    u'(0) = 0,
//! u(R) = 0                      (γ = 0),
//! u'(R) + γ⁻² sin u(R) = 0       (γ > 0).
//! ```
//!
//! Solutions are found by shooting in the launch value `u0 = u(0)`. Near the
//! singular origin the trajectory is taken from the series
//! `u = u0 + a r² + b r⁴` with `a = −κ² sin(u0)/(2N)` and
//! `b = −κ² cos(u0) a / (4(N+2))`; from `r_cut = 10·dr` on it is integrated
//! with classical RK4.

use serde::{Deserialize, Serialize};

use crate::energy::{BoundaryMode, EnergyBreakdown, Params};
use crate::error::{Error, Result};
use crate::minimize::Classification;
use std::f64::consts::PI;

/// Samples of `u` and `u'` on the uniform grid `r_k = k·dr`, `k = 0..=n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub radius: f64,
    pub dimension: usize,
    pub dr: f64,
    pub u0: f64,
    pub r: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    pub params: Params,
}

impl RadialProfile {
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn u_at_boundary(&self) -> f64 {
        *self.u.last().expect("profile has samples")
    }

    pub fn du_at_boundary(&self) -> f64 {
        *self.du.last().expect("profile has samples")
    }

    /// `φ = u/2` at every sample.
    pub fn phi(&self) -> Vec<f64> {
        self.u.iter().map(|u| 0.5 * u).collect()
    }

    /// `u(r)` by cubic Hermite interpolation of `(u, u')`; `r` is clamped to `[0, R]`.
    pub fn u_at(&self, r: f64) -> f64 {
        let n = self.len() - 1;
        let s = (r / self.dr).clamp(0.0, n as f64);
        let k = (s.floor() as usize).min(n.saturating_sub(1));
        if n == 0 {
            return self.u[0];
        }
        let t = s - k as f64;
        let (h00, h10) = (2.0 * t.powi(3) - 3.0 * t * t + 1.0, t.powi(3) - 2.0 * t * t + t);
        let (h01, h11) = (-2.0 * t.powi(3) + 3.0 * t * t, t.powi(3) - t * t);
        h00 * self.u[k] + h10 * self.dr * self.du[k] + h01 * self.u[k + 1] + h11 * self.dr * self.du[k + 1]
    }

    /// Closure defect: `u(R)` in Dirichlet mode, `u'(R) + γ⁻² sin u(R)` otherwise.
    pub fn closure(&self) -> f64 {
        closure(&self.params, self.u_at_boundary(), self.du_at_boundary())
    }

    /// Max of `|u'' + (N−1)/r u' + κ² sin u|` over samples with `r ≥ r_min`, with
    /// `u''` from a sixth-order central difference of the `u'` samples.
    pub fn ode_residual(&self, r_min: f64) -> f64 {
        let n = self.len();
        let h = self.dr;
        let k2 = self.params.kappa2();
        let nm1 = (self.dimension - 1) as f64;
        let mut worst: f64 = 0.0;
        for k in 3..n.saturating_sub(3) {
            let r = self.r[k];
            if r < r_min {
                continue;
            }
            let d = &self.du;
            let upp = (-d[k - 3] + 9.0 * d[k - 2] - 45.0 * d[k - 1] + 45.0 * d[k + 1] - 9.0 * d[k + 2] + d[k + 3])
                / (60.0 * h);
            worst = worst.max((upp + nm1 / r * d[k] + k2 * self.u[k].sin()).abs());
        }
        worst
    }
}

fn closure(params: &Params, u: f64, du: f64) -> f64 {
    match params.boundary_mode() {
        BoundaryMode::Dirichlet => u,
        BoundaryMode::Penalized { inv_gamma2 } => du + inv_gamma2 * u.sin(),
        BoundaryMode::Free => du,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialOptions {
    /// Requested step; the actual step is `R / ceil(R/dr)`.
    pub dr: f64,
    /// Number of equispaced launch values scanned in `[0, π]`.
    pub scan_points: usize,
    /// Bisection stops once `|closure| ≤ root_tolerance`.
    pub root_tolerance: f64,
}

impl Default for RadialOptions {
    fn default() -> Self {
        Self { dr: 1e-3, scan_points: 200, root_tolerance: 1e-10 }
    }
}

/// Number of steps covered by the series launch.
pub const SERIES_STEPS: usize = 10;

fn steps_for(radius: f64, dr: f64) -> Result<(usize, f64)> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidParameter(format!("radius must be > 0 (got {radius})")));
    }
    if !(dr > 0.0) || dr > radius / 100.0 * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!("dr must lie in (0, R/100] (got {dr})")));
    }
    let n = (radius / dr - 1e-9).ceil() as usize;
    Ok((n, radius / n as f64))
}

/// Integrates the initial value problem from `u(0) = u0`, `u'(0) = 0`.
///
/// The launch values `0` and `π` (and any `u0` when `κ = 0`) are equilibria
/// and return exactly constant trajectories.
pub fn shoot(u0: f64, params: &Params, radius: f64, dr: f64) -> Result<RadialProfile> {
    params.validate()?;
    if !(-1e-12..=PI + 1e-12).contains(&u0) {
        return Err(Error::InvalidParameter(format!("u0 must lie in [0, pi] (got {u0})")));
    }
    let (n, h) = steps_for(radius, dr)?;
    let dim = params.dimension;
    let nf = dim as f64;
    let k2 = params.kappa2();
    let r: Vec<f64> = (0..=n).map(|k| if k == n { radius } else { k as f64 * h }).collect();
    let make = |u: Vec<f64>, du: Vec<f64>| RadialProfile {
        radius,
        dimension: dim,
        dr: h,
        u0,
        r: r.clone(),
        u,
        du,
        params: *params,
    };

    let (s0, c0) = u0.sin_cos();
    if s0 == 0.0 || u0 == PI || k2 == 0.0 {
        return Ok(make(vec![u0; n + 1], vec![0.0; n + 1]));
    }

    let mut u = Vec::with_capacity(n + 1);
    let mut du = Vec::with_capacity(n + 1);
    let a = -k2 * s0 / (2.0 * nf);
    let b = -k2 * c0 * a / (4.0 * (nf + 2.0));
    let cut = SERIES_STEPS.min(n);
    for &rk in &r[..=cut] {
        let r2 = rk * rk;
        u.push(u0 + a * r2 + b * r2 * r2);
        du.push(2.0 * a * rk + 4.0 * b * r2 * rk);
    }

    let rhs = |r: f64, y: f64, v: f64| -> (f64, f64) { (v, -(nf - 1.0) / r * v - k2 * y.sin()) };
    let (mut y, mut v) = (u[cut], du[cut]);
    for k in cut..n {
        let rk = r[k];
        let hk = r[k + 1] - rk;
        let (k1y, k1v) = rhs(rk, y, v);
        let (k2y, k2v) = rhs(rk + 0.5 * hk, y + 0.5 * hk * k1y, v + 0.5 * hk * k1v);
        let (k3y, k3v) = rhs(rk + 0.5 * hk, y + 0.5 * hk * k2y, v + 0.5 * hk * k2v);
        let (k4y, k4v) = rhs(rk + hk, y + hk * k3y, v + hk * k3v);
        y += hk / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        v += hk / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        if !(-PI..=2.0 * PI).contains(&y) {
            return Err(Error::Divergence { radius: r[k + 1] });
        }
        u.push(y);
        du.push(v);
    }
    Ok(make(u, du))
}

/// `|S^{N−1}|`: 2, 2π, 4π, 2π², ...
pub fn sphere_area(dimension: usize) -> f64 {
    match dimension {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        n => 2.0 * PI / (n - 2) as f64 * sphere_area(n - 2),
    }
}

/// Composite Simpson on uniform samples; an odd number of intervals ends with a 3/8 panel.
fn simpson(f: &[f64], h: f64) -> f64 {
    let n = f.len().saturating_sub(1);
    match n {
        0 => 0.0,
        1 => 0.5 * h * (f[0] + f[1]),
        _ => {
            let (even_end, tail) = if n % 2 == 0 { (n, 0.0) } else if n >= 3 {
                let k = n - 3;
                (k, 3.0 * h / 8.0 * (f[k] + 3.0 * f[k + 1] + 3.0 * f[k + 2] + f[k + 3]))
            } else {
                unreachable!()
            };
            let mut s = 0.0;
            let mut i = 0;
            while i + 2 <= even_end {
                s += f[i] + 4.0 * f[i + 1] + f[i + 2];
                i += 2;
            }
            s * h / 3.0 + tail
        }
    }
}

/// Reduced energy of the radial extension `φ(x) = u(|x|)/2` under `params`.
///
/// The boundary term is `σ R^{N−1} γ⁻² sin²(u(R)/2)` and vanishes in Dirichlet
/// and free-boundary mode.
pub fn radial_energy(profile: &RadialProfile, params: &Params) -> EnergyBreakdown {
    let sigma = sphere_area(profile.dimension);
    let w = |k: usize| profile.r[k].powi(profile.dimension as i32 - 1);
    let grad: Vec<f64> = (0..profile.len()).map(|k| 0.25 * profile.du[k].powi(2) * w(k)).collect();
    let aniso: Vec<f64> = (0..profile.len()).map(|k| (0.5 * profile.u[k]).cos().powi(2) * w(k)).collect();
    let dirichlet = sigma * simpson(&grad, profile.dr);
    let anisotropy = sigma * params.kappa2() * simpson(&aniso, profile.dr);
    let boundary = match params.boundary_mode() {
        BoundaryMode::Penalized { inv_gamma2 } => {
            sigma
                * profile.radius.powi(profile.dimension as i32 - 1)
                * inv_gamma2
                * (0.5 * profile.u_at_boundary()).sin().powi(2)
        }
        _ => 0.0,
    };
    EnergyBreakdown::new(dirichlet, anisotropy, boundary)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialRoot {
    pub u0: f64,
    pub closure: f64,
    pub energy: f64,
}

/// Least-energy closure root together with every root found.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSolution {
    pub profile: RadialProfile,
    pub energy: EnergyBreakdown,
    /// Sorted by launch value.
    pub roots: Vec<RadialRoot>,
    pub classification: Classification,
}

/// Finds all closure roots on a launch-value scan and returns the one of least energy.
///
/// The trivial launch `u0 = 0` is always a root, and `u0 = π` is one whenever
/// `γ > 0`. Bracketed roots are refined by bisection.
/// Bisected roots closer than this to π are identified with the constant root.
const TRIVIAL_SNAP: f64 = 1e-6;

pub fn solve_radial_bvp(params: &Params, radius: f64, opts: &RadialOptions) -> Result<RadialSolution> {
    params.validate()?;
    if opts.scan_points < 2 || !(opts.root_tolerance > 0.0) {
        return Err(Error::InvalidParameter("need scan_points >= 2 and root_tolerance > 0".into()));
    }
    steps_for(radius, opts.dr)?;
    let g = |u0: f64| -> Result<f64> { Ok(shoot(u0, params, radius, opts.dr)?.closure()) };

    let m = opts.scan_points;
    let grid: Vec<f64> = (0..m).map(|i| if i + 1 == m { PI } else { PI * i as f64 / (m - 1) as f64 }).collect();
    let values: Vec<f64> = {
        use rayon::prelude::*;
        grid.par_iter().map(|&u0| g(u0)).collect::<Result<_>>()?
    };

    let mut launches = Vec::new();
    // sin(π) rounds to 1.2e-16, so the constant in-plane root shows up as a
    // tiny closure at π and a spurious sign change just below it.
    let pi_is_root = values[m - 1].abs() <= opts.root_tolerance;
    for i in 0..m {
        if values[i] == 0.0 && i + 1 < m {
            launches.push(grid[i]);
        }
        if i + 1 < m && values[i] * values[i + 1] < 0.0 {
            let root = bisect(&g, grid[i], grid[i + 1], values[i], opts.root_tolerance)?;
            if !(pi_is_root && PI - root < TRIVIAL_SNAP) {
                launches.push(root);
            }
        }
    }
    if !launches.contains(&0.0) {
        launches.insert(0, 0.0);
    }
    if pi_is_root {
        launches.push(PI);
    }

    let mut roots = Vec::new();
    let mut best: Option<(RadialProfile, EnergyBreakdown)> = None;
    for u0 in launches {
        let p = shoot(u0, params, radius, opts.dr)?;
        let e = radial_energy(&p, params);
        roots.push(RadialRoot { u0, closure: p.closure(), energy: e.total });
        if best.as_ref().map_or(true, |(_, b)| e.total < b.total) {
            best = Some((p, e));
        }
    }
    roots.sort_by(|a, b| a.u0.total_cmp(&b.u0));
    let (profile, energy) = best.expect("trivial root always present");
    let classification = if profile.u0 == 0.0 {
        Classification::ConstantE3
    } else if profile.u0 == PI {
        Classification::ConstantInPlane
    } else {
        Classification::Nonconstant
    };
    Ok(RadialSolution { profile, energy, roots, classification })
}

fn bisect(g: &impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64, mut glo: f64, tol: f64) -> Result<f64> {
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let gm = g(mid)?;
        if gm.abs() <= tol || hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(1.0) {
            return Ok(mid);
        }
        if gm * glo < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            glo = gm;
        }
    }
    Ok(mid)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotoneCheck {
    pub is_monotone: bool,
    pub max_violation: f64,
}

/// Largest increase `u(r_{k+1}) − u(r_k)` between consecutive samples; monotone iff ≤ 1e-9.
pub fn check_monotone(profile: &RadialProfile) -> MonotoneCheck {
    let max_violation = profile.u.windows(2).map(|w| (w[1] - w[0]).max(0.0)).fold(0.0, f64::max);
    MonotoneCheck { is_monotone: max_violation <= 1e-9, max_violation }
}
