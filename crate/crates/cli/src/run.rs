//! Subcommand execution and artifact emission.

use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use spherelab::io::{
    read_field_binary, read_field_csv, write_field_csv, write_phase_csv, write_phase_diagram_csv, write_profile_csv,
};
use spherelab::{
    canonicalize, constant_state_energies, el_residual, energy_sphere_field, field_diagnostics, minimize_sphere_field,
    phase_diagram_sweep, solve_radial_bvp, threshold_report, verify_poincare_inequality, check_monotone, InitKind,
    Mesh, PhaseDiagram, PhaseField, RadialProfile, SphereField, SweepDomain, SweepOptions,
};

use crate::config::{DomainSpec, Format, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Subcommand {
    Solve2d,
    Radial,
    Sweep,
    Constants,
    Verify,
}

/// Failure classes, mapped to exit codes by `main`.
#[derive(Debug)]
pub enum Failure {
    /// Invalid configuration or input; nothing has been written.
    Config(String),
    /// A solver did not converge; artifacts and manifest were written.
    NonConvergence(String),
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            Failure::NonConvergence(_) => 3,
            Failure::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "configuration error: {m}"),
            Failure::NonConvergence(m) => write!(f, "solver did not converge: {m}"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

fn config_err(e: impl ToString) -> Failure {
    Failure::Config(e.to_string())
}

/// Library errors from a solve: validation problems are configuration errors,
/// everything else is a solver failure.
fn solver_err(e: spherelab::Error) -> Failure {
    use spherelab::Error::*;
    match e {
        InvalidMesh(_) | InvalidParameter(_) | FieldSize { .. } | DirichletViolation { .. } | Precondition(_)
        | UnsupportedDomain | Format(_) => Failure::Config(e.to_string()),
        _ => Failure::NonConvergence(e.to_string()),
    }
}

/// Files produced by a run, kept in memory until everything succeeded.
#[derive(Default)]
struct Artifacts {
    files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    fn add(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    fn json(&mut self, name: &str, value: &impl Serialize) {
        let mut bytes = serde_json::to_vec_pretty(value).expect("serializable");
        bytes.push(b'\n');
        self.add(name, bytes);
    }

    fn csv(&mut self, name: &str, write: impl FnOnce(&mut Vec<u8>) -> spherelab::Result<()>) {
        let mut bytes = Vec::new();
        write(&mut bytes).expect("writing to memory");
        self.add(name, bytes);
    }
}

pub struct RunResult {
    pub written: Vec<String>,
    pub failure: Option<Failure>,
}

/// Column-oriented JSON form of a field table.
fn field_json(mesh: &Mesh, field: &SphereField) -> Value {
    let col = |f: &dyn Fn(usize) -> f64| (0..mesh.len()).map(f).collect::<Vec<f64>>();
    json!({
        "x": col(&|k| mesh.nodes()[k][0]),
        "y": col(&|k| mesh.nodes()[k][1]),
        "m1": col(&|k| field[k][0]),
        "m2": col(&|k| field[k][1]),
        "m3": col(&|k| field[k][2]),
    })
}

fn phase_json(mesh: &Mesh, phase: &PhaseField) -> Value {
    json!({
        "x": mesh.nodes().iter().map(|p| p[0]).collect::<Vec<_>>(),
        "y": mesh.nodes().iter().map(|p| p[1]).collect::<Vec<_>>(),
        "phi": phase.iter().copied().collect::<Vec<_>>(),
    })
}

fn profile_json(p: &RadialProfile) -> Value {
    let phi: Vec<f64> = p.u.iter().map(|u| 0.5 * u).collect();
    json!({
        "r": p.r,
        "u": p.u,
        "u_prime": p.du,
        "phi": phi,
        "m1": phi.iter().map(|f| f.sin()).collect::<Vec<_>>(),
        "m3": phi.iter().map(|f| f.cos()).collect::<Vec<_>>(),
    })
}

fn load_field(path: &Path) -> Result<SphereField, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    let field = if path.extension().is_some_and(|e| e == "bin") {
        read_field_binary(&mut bytes.as_slice())
    } else {
        read_field_csv(&mut bytes.as_slice())
    };
    field.map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn mesh(cfg: &RunConfig) -> Result<Mesh, Failure> {
    cfg.domain.build().map_err(Failure::Config)
}

fn solve_options(cfg: &RunConfig) -> Result<spherelab::SolveOptions, Failure> {
    let mut opts = cfg.solve.clone();
    if matches!(opts.init, InitKind::Field(_)) {
        let path = cfg.init_file.as_ref().ok_or_else(|| config_err("init file missing"))?;
        opts.init = InitKind::Field(load_field(path)?);
    }
    Ok(opts)
}

fn solve2d(cfg: &RunConfig, out: &mut Artifacts) -> Result<Option<Failure>, Failure> {
    let params = cfg.params().map_err(Failure::Config)?;
    let mesh = mesh(cfg)?;
    let opts = solve_options(cfg)?;
    let (field, report) = minimize_sphere_field(&mesh, &params, &opts).map_err(solver_err)?;
    let (canon, sigma) = canonicalize(&mesh, &field).map_err(solver_err)?;
    let phase = PhaseField::lift(&canon);
    match cfg.format {
        Format::Csv => {
            out.csv("field.csv", |w| write_field_csv(w, &mesh, &field));
            out.csv("phase.csv", |w| write_phase_csv(w, &mesh, &phase));
        }
        Format::Json => {
            out.json("field.json", &field_json(&mesh, &field));
            out.json("phase.json", &phase_json(&mesh, &phase));
        }
    }
    out.json(
        "solve.json",
        &json!({
            "mesh": mesh.summary(),
            "params": params,
            "report": report,
            "constant_states": constant_state_energies(&mesh, &params).map_err(solver_err)?,
            "canonical_symmetry": sigma,
            "diagnostics": field_diagnostics(&mesh, &field).ok(),
        }),
    );
    Ok((!report.converged).then(|| {
        Failure::NonConvergence(format!(
            "{} iterations, gradient norm {:.3e}",
            report.iterations, report.gradient_norm
        ))
    }))
}

fn ball_radius(cfg: &RunConfig) -> Result<f64, Failure> {
    match cfg.domain {
        DomainSpec::Disk { radius, .. } => Ok(radius),
        DomainSpec::Rectangle { .. } => Err(config_err("radial solves need a disk/ball domain")),
    }
}

fn radial(cfg: &RunConfig, out: &mut Artifacts) -> Result<Option<Failure>, Failure> {
    let params = cfg.params().map_err(Failure::Config)?;
    let radius = ball_radius(cfg)?;
    let sol = solve_radial_bvp(&params, radius, &cfg.radial).map_err(solver_err)?;
    match cfg.format {
        Format::Csv => out.csv("profile.csv", |w| write_profile_csv(w, &sol.profile)),
        Format::Json => out.json("profile.json", &profile_json(&sol.profile)),
    }
    out.json(
        "radial.json",
        &json!({
            "params": params,
            "radius": radius,
            "dr": sol.profile.dr,
            "classification": sol.classification,
            "u0": sol.profile.u0,
            "u_boundary": sol.profile.u_at_boundary(),
            "closure": sol.profile.closure(),
            "energy": sol.energy,
            "roots": sol.roots,
            "monotone": check_monotone(&sol.profile),
        }),
    );
    Ok(None)
}

fn sweep(cfg: &RunConfig, out: &mut Artifacts) -> Result<Option<Failure>, Failure> {
    let opts = SweepOptions {
        kappas: cfg.kappas.clone(),
        gammas: cfg.gammas.clone(),
        seeds: cfg.seeds.clone(),
        radial_seed: cfg.radial_seed,
        solve: solve_options(cfg)?,
        radial: cfg.radial.clone(),
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build().map_err(config_err)?;
    let diagram: PhaseDiagram = if cfg.sweep_mode == "ball" {
        let domain = SweepDomain::Ball { radius: ball_radius(cfg)?, dimension: cfg.dimension };
        pool.install(|| phase_diagram_sweep(domain, &opts))
    } else {
        let mesh = mesh(cfg)?;
        pool.install(|| phase_diagram_sweep(SweepDomain::Mesh(&mesh), &opts))
    }
    .map_err(solver_err)?;
    match cfg.format {
        Format::Csv => out.csv("phase_diagram.csv", |w| write_phase_diagram_csv(w, &diagram)),
        Format::Json => {
            let rows: Vec<Value> = diagram
                .cells
                .iter()
                .map(|c| {
                    json!({
                        "kappa": c.kappa, "gamma": c.gamma, "class": c.classification,
                        "E_min": c.energy_min, "E_e3": c.energy_e3, "E_inplane": c.energy_in_plane,
                        "kappa_gamma": c.kappa_gamma, "gamma_kappa": c.gamma_kappa,
                    })
                })
                .collect();
            out.json("phase_diagram.json", &rows);
        }
    }
    out.json("sweep.json", &diagram);
    let failed: Vec<String> = diagram
        .cells
        .iter()
        .filter(|c| !c.failures.is_empty())
        .map(|c| format!("(kappa {}, gamma {}): {}", c.kappa, c.gamma, c.failures.join("; ")))
        .collect();
    Ok((!failed.is_empty()).then(|| Failure::NonConvergence(failed.join("\n"))))
}

fn constants(cfg: &RunConfig, out: &mut Artifacts) -> Result<Option<Failure>, Failure> {
    let gamma = cfg.gamma.ok_or_else(|| config_err("gamma is required"))?;
    let mesh = mesh(cfg)?;
    let report = threshold_report(&mesh, gamma, cfg.kappa).map_err(solver_err)?;
    out.json("constants.json", &report);
    Ok(None)
}

fn verify(cfg: &RunConfig, out: &mut Artifacts) -> Result<Option<Failure>, Failure> {
    let params = cfg.params().map_err(Failure::Config)?;
    let mesh = mesh(cfg)?;
    let (field, source) = match &cfg.field {
        Some(path) => (load_field(path)?, path.display().to_string()),
        None => (minimize_sphere_field(&mesh, &params, &solve_options(cfg)?).map_err(solver_err)?.0, "solve".into()),
    };
    if field.len() != mesh.len() {
        return Err(config_err(format!("field has {} nodes but the mesh has {}", field.len(), mesh.len())));
    }
    let poincare: Vec<_> = cfg
        .deltas
        .iter()
        .enumerate()
        .map(|(i, &d)| verify_poincare_inequality(&mesh, d, cfg.trials, cfg.seed.wrapping_add(i as u64)))
        .collect::<spherelab::Result<_>>()
        .map_err(solver_err)?;
    out.json(
        "verify.json",
        &json!({
            "field": source,
            "mesh": mesh.summary(),
            "params": params,
            "energy": energy_sphere_field(&mesh, &field, &params).map_err(solver_err)?,
            "el_residual": el_residual(&mesh, &field, &params).map_err(solver_err)?,
            "diagnostics": field_diagnostics(&mesh, &field).map_err(solver_err)?,
            "poincare": poincare,
        }),
    );
    Ok(None)
}

fn write_all(dir: &Path, files: &[(String, Vec<u8>)]) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::Config(format!("cannot create {}: {e}", dir.display())))?;
    for (name, bytes) in files {
        let path = dir.join(name);
        fs::write(&path, bytes).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

pub fn run(sub: Subcommand, cfg: &RunConfig) -> RunResult {
    let start = Instant::now();
    let mut out = Artifacts::default();
    let result = match sub {
        Subcommand::Solve2d => solve2d(cfg, &mut out),
        Subcommand::Radial => radial(cfg, &mut out),
        Subcommand::Sweep => sweep(cfg, &mut out),
        Subcommand::Constants => constants(cfg, &mut out),
        Subcommand::Verify => verify(cfg, &mut out),
    };
    let failure = match result {
        Ok(f) => f,
        Err(f) => return RunResult { written: Vec::new(), failure: Some(f) },
    };
    let artifacts: Vec<Value> = out
        .files
        .iter()
        .map(|(name, bytes)| json!({ "path": name, "bytes": bytes.len(), "sha256": format!("{:x}", Sha256::digest(bytes)) }))
        .collect();
    let manifest = json!({
        "tool": "spherelab",
        "version": env!("CARGO_PKG_VERSION"),
        "library_version": spherelab::VERSION,
        "subcommand": sub,
        "config": cfg,
        "seed": cfg.seed,
        "jobs": cfg.jobs,
        "wall_time_seconds": start.elapsed().as_secs_f64(),
        "status": failure.as_ref().map_or("ok".to_string(), |f| f.to_string()),
        "artifacts": artifacts,
    });
    out.json("manifest.json", &manifest);
    let written = out.files.iter().map(|(n, _)| n.clone()).collect();
    if let Err(e) = write_all(&cfg.out, &out.files) {
        return RunResult { written: Vec::new(), failure: Some(e) };
    }
    RunResult { written, failure }
}
