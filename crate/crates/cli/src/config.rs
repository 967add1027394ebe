//! Run configuration: defaults, then the TOML file, then command-line flags.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use spherelab::{InitKind, Mesh, Params, RadialOptions, SolveOptions, SweepOptions};

/// A layer of settings. Every field is optional so that layers can be merged;
/// the TOML file and the flags both produce one.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layer {
    #[serde(default)]
    pub domain: DomainLayer,
    #[serde(default)]
    pub params: ParamsLayer,
    #[serde(default)]
    pub solve: SolveLayer,
    #[serde(default)]
    pub output: OutputLayer,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainLayer {
    /// `disk` or `rectangle`.
    pub shape: Option<String>,
    pub radius: Option<f64>,
    pub lx: Option<f64>,
    pub ly: Option<f64>,
    pub nr: Option<usize>,
    pub ntheta: Option<usize>,
    pub nx: Option<usize>,
    pub ny: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsLayer {
    pub kappa: Option<f64>,
    pub kappa2: Option<f64>,
    pub gamma: Option<f64>,
    pub dimension: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveLayer {
    pub seed: Option<u64>,
    pub seeds: Option<Vec<u64>>,
    pub max_iterations: Option<usize>,
    pub gradient_tolerance: Option<f64>,
    pub absolute_tolerance: Option<f64>,
    /// `constant-e3`, `constant-inplane`, `random-uniform`, `random-smooth`,
    /// `radial-seed` or `file`.
    pub init: Option<String>,
    pub init_file: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub kappas: Option<Vec<f64>>,
    pub gammas: Option<Vec<f64>>,
    /// Sweep on the mesh (`2d`) or by radial shooting on the ball (`ball`).
    pub sweep_mode: Option<String>,
    pub radial_seed: Option<bool>,
    pub dr: Option<f64>,
    pub scan_points: Option<usize>,
    pub deltas: Option<Vec<f64>>,
    pub trials: Option<usize>,
    /// Field to check in `verify`; solved from the config when absent.
    pub field: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputLayer {
    pub dir: Option<PathBuf>,
    /// `csv` or `json`.
    pub format: Option<String>,
}

macro_rules! merge_fields {
    ($top:expr, $low:expr; $($f:ident),*) => {
        $( if $top.$f.is_none() { $top.$f = $low.$f.clone(); } )*
    };
}

impl Layer {
    /// Fills every unset field of `self` from `lower`.
    pub fn over(mut self, lower: &Layer) -> Layer {
        merge_fields!(self.domain, lower.domain; shape, radius, lx, ly, nr, ntheta, nx, ny);
        merge_fields!(self.params, lower.params; kappa, kappa2, gamma, dimension);
        merge_fields!(self.solve, lower.solve; seed, seeds, max_iterations, gradient_tolerance, absolute_tolerance,
            init, init_file, jobs, kappas, gammas, sweep_mode, radial_seed, dr, scan_points, deltas, trials, field);
        merge_fields!(self.output, lower.output; dir, format);
        self
    }

    pub fn from_toml(text: &str) -> Result<Layer, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum DomainSpec {
    Disk { radius: f64, nr: usize, ntheta: usize },
    Rectangle { lx: f64, ly: f64, nx: usize, ny: usize },
}

impl DomainSpec {
    pub fn build(&self) -> Result<Mesh, String> {
        match *self {
            DomainSpec::Disk { radius, nr, ntheta } => spherelab::build_disk_mesh(nr, ntheta, radius),
            DomainSpec::Rectangle { lx, ly, nx, ny } => spherelab::build_rectangle_mesh(nx, ny, lx, ly),
        }
        .map_err(|e| e.to_string())
    }
}

/// Fully resolved and validated settings.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub domain: DomainSpec,
    /// `None` when neither κ nor κ² was given.
    pub kappa: Option<f64>,
    pub gamma: Option<f64>,
    pub dimension: usize,
    pub seed: u64,
    pub seeds: Vec<u64>,
    pub solve: SolveOptions,
    pub radial: RadialOptions,
    pub kappas: Vec<f64>,
    pub gammas: Vec<f64>,
    pub sweep_mode: String,
    pub radial_seed: bool,
    pub deltas: Vec<f64>,
    pub trials: usize,
    pub field: Option<PathBuf>,
    pub init_file: Option<PathBuf>,
    pub jobs: usize,
    pub out: PathBuf,
    pub format: Format,
    #[serde(skip)]
    pub warnings: Vec<String>,
}

fn positive(name: &str, v: f64) -> Result<f64, String> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{name} must be a positive finite number (got {v})"))
    }
}

fn parse_init(name: &str) -> Result<InitKind, String> {
    Ok(match name {
        "constant-e3" => InitKind::ConstantE3,
        "constant-inplane" => InitKind::ConstantInPlane,
        "random-uniform" => InitKind::RandomUniform,
        "random-smooth" => InitKind::RandomSmooth,
        "radial-seed" => InitKind::RadialSeed,
        // placeholder, replaced by the loaded field
        "file" => InitKind::Field(spherelab::SphereField::from_vectors(Vec::new())),
        other => return Err(format!("unknown init kind {other:?}")),
    })
}

impl RunConfig {
    pub fn resolve(layer: &Layer) -> Result<RunConfig, String> {
        let mut warnings = Vec::new();
        let d = &layer.domain;
        let domain = match d.shape.as_deref().unwrap_or("disk") {
            "disk" => DomainSpec::Disk {
                radius: positive("radius", d.radius.unwrap_or(1.0))?,
                nr: d.nr.unwrap_or(48),
                ntheta: d.ntheta.unwrap_or(96),
            },
            "rectangle" => DomainSpec::Rectangle {
                lx: positive("lx", d.lx.unwrap_or(1.0))?,
                ly: positive("ly", d.ly.unwrap_or(1.0))?,
                nx: d.nx.unwrap_or(33),
                ny: d.ny.unwrap_or(33),
            },
            other => return Err(format!("unknown domain shape {other:?} (expected disk or rectangle)")),
        };

        let p = &layer.params;
        let kappa = match (p.kappa, p.kappa2) {
            (Some(k), Some(k2)) => {
                warnings.push(format!("both kappa = {k} and kappa2 = {k2} given; using kappa2"));
                Some(k2)
            }
            (None, Some(k2)) => Some(k2),
            (Some(k), None) => {
                if !(k >= 0.0) {
                    return Err(format!("kappa must be >= 0 (got {k})"));
                }
                Some(k * k)
            }
            (None, None) => None,
        }
        .map(|k2| if k2 >= 0.0 && k2.is_finite() { Ok(k2.sqrt()) } else { Err(format!("kappa2 must be >= 0 (got {k2})")) })
        .transpose()?;
        let gamma = p.gamma;
        if let Some(g) = gamma {
            if !(g >= 0.0 && g.is_finite()) {
                return Err(format!("gamma must be >= 0 (got {g})"));
            }
        }
        let dimension = p.dimension.unwrap_or(2);
        if dimension == 0 {
            return Err("dimension must be >= 1".into());
        }

        let s = &layer.solve;
        let seed = s.seed.unwrap_or(0);
        let seeds = s.seeds.clone().unwrap_or_else(|| (0..3).map(|i| seed.wrapping_add(i)).collect());
        let defaults = SolveOptions::default();
        let init_name = s.init.clone().unwrap_or_else(|| if s.init_file.is_some() { "file".into() } else { "random-uniform".into() });
        let init = parse_init(&init_name)?;
        if matches!(init, InitKind::Field(_)) && s.init_file.is_none() {
            return Err("init = \"file\" needs init_file".into());
        }
        let solve = SolveOptions {
            max_iterations: s.max_iterations.unwrap_or(defaults.max_iterations),
            gradient_tolerance: s.gradient_tolerance.unwrap_or(defaults.gradient_tolerance),
            absolute_tolerance: s.absolute_tolerance.unwrap_or(defaults.absolute_tolerance),
            rng_seed: seed,
            init,
            ..defaults
        };
        solve.validate().map_err(|e| e.to_string())?;
        let mut radial = RadialOptions::default();
        if let Some(dr) = s.dr {
            radial.dr = positive("dr", dr)?;
        }
        if let Some(n) = s.scan_points {
            radial.scan_points = n;
        }
        let sweep_defaults = SweepOptions::default();
        let kappas = s.kappas.clone().unwrap_or(sweep_defaults.kappas);
        let gammas = s.gammas.clone().unwrap_or(sweep_defaults.gammas);
        if kappas.is_empty() || gammas.is_empty() {
            return Err("sweep grids must be nonempty".into());
        }
        let sweep_mode = s.sweep_mode.clone().unwrap_or_else(|| "2d".into());
        if sweep_mode != "2d" && sweep_mode != "ball" {
            return Err(format!("unknown sweep mode {sweep_mode:?} (expected 2d or ball)"));
        }
        let jobs = s.jobs.unwrap_or(1);
        if jobs == 0 {
            return Err("jobs must be >= 1".into());
        }
        let format = match layer.output.format.as_deref().unwrap_or("csv") {
            "csv" => Format::Csv,
            "json" => Format::Json,
            other => return Err(format!("unknown format {other:?} (expected csv or json)")),
        };
        Ok(RunConfig {
            domain,
            kappa,
            gamma,
            dimension,
            seed,
            seeds,
            solve,
            radial,
            kappas,
            gammas,
            sweep_mode,
            radial_seed: s.radial_seed.unwrap_or(true),
            deltas: s.deltas.clone().unwrap_or_else(|| vec![0.1, 0.5, 0.9]),
            trials: s.trials.unwrap_or(1000),
            field: s.field.clone(),
            init_file: s.init_file.clone(),
            jobs,
            out: layer.output.dir.clone().unwrap_or_else(|| PathBuf::from("out")),
            format,
            warnings,
        })
    }

    /// Physical parameters; κ and γ are required here.
    pub fn params(&self) -> Result<Params, String> {
        let kappa = self.kappa.ok_or("kappa (or kappa2) is required")?;
        let gamma = self.gamma.ok_or("gamma is required")?;
        Params::new(kappa, gamma).and_then(|p| p.with_dimension(self.dimension)).map_err(|e| e.to_string())
    }
}
