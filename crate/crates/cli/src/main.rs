//! `spherelab` command-line front end.
//!
//! Settings come from built-in defaults, then `--config <file.toml>`, then
//! flags. Exit status: 0 success, 2 configuration error (nothing written),
//! 3 solver non-convergence (artifacts still written), 1 other I/O failure.

mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use config::{Layer, RunConfig};
use run::{run, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "spherelab", version, about = "Minimizers of a penalized sphere-valued energy")]
struct Cli {
    #[arg(value_enum)]
    command: Subcommand,

    /// TOML file with [domain], [params], [solve] and [output] tables.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated seeds for sweep cells (default: seed, seed+1, seed+2).
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Worker threads for sweeps.
    #[arg(long)]
    jobs: Option<usize>,

    /// Unit-free shorthand for a disk of radius R.
    #[arg(long, value_name = "R")]
    disk: Option<f64>,
    /// Rectangle `LX,LY`.
    #[arg(long, value_delimiter = ',', num_args = 2, value_name = "LX,LY")]
    rectangle: Option<Vec<f64>>,
    #[arg(long, value_parser = ["disk", "rectangle"])]
    shape: Option<String>,
    #[arg(long, alias = "R")]
    radius: Option<f64>,
    #[arg(long)]
    lx: Option<f64>,
    #[arg(long)]
    ly: Option<f64>,
    #[arg(long)]
    nr: Option<usize>,
    #[arg(long)]
    ntheta: Option<usize>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,

    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<f64>,
    /// κ²; takes precedence over --kappa.
    #[arg(long, allow_hyphen_values = true)]
    kappa2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    /// Ball dimension for radial solves.
    #[arg(long, alias = "N")]
    dimension: Option<usize>,

    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(long)]
    gradient_tolerance: Option<f64>,
    #[arg(long)]
    absolute_tolerance: Option<f64>,
    #[arg(long)]
    init: Option<String>,
    #[arg(long)]
    init_file: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    kappas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    gammas: Option<Vec<f64>>,
    #[arg(long, value_parser = ["2d", "ball"])]
    sweep_mode: Option<String>,
    #[arg(long)]
    radial_seed: Option<bool>,
    #[arg(long)]
    dr: Option<f64>,
    #[arg(long)]
    scan_points: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    deltas: Option<Vec<f64>>,
    #[arg(long)]
    trials: Option<usize>,
    /// Field file (CSV or .bin) for `verify`.
    #[arg(long)]
    field: Option<PathBuf>,
}

impl Cli {
    fn layer(&self) -> Layer {
        let mut l = Layer::default();
        let d = &mut l.domain;
        d.shape = self.shape.clone();
        d.radius = self.radius;
        (d.lx, d.ly) = (self.lx, self.ly);
        (d.nr, d.ntheta, d.nx, d.ny) = (self.nr, self.ntheta, self.nx, self.ny);
        if let Some(r) = self.disk {
            d.shape = Some("disk".into());
            d.radius = d.radius.or(Some(r));
        }
        if let Some(v) = &self.rectangle {
            d.shape = Some("rectangle".into());
            d.lx = d.lx.or(Some(v[0]));
            d.ly = d.ly.or(Some(v[1]));
        }
        let p = &mut l.params;
        (p.kappa, p.kappa2, p.gamma, p.dimension) = (self.kappa, self.kappa2, self.gamma, self.dimension);
        let s = &mut l.solve;
        s.seed = self.seed;
        s.seeds = self.seeds.clone();
        s.max_iterations = self.max_iterations;
        s.gradient_tolerance = self.gradient_tolerance;
        s.absolute_tolerance = self.absolute_tolerance;
        s.init = self.init.clone();
        s.init_file = self.init_file.clone();
        s.jobs = self.jobs;
        s.kappas = self.kappas.clone();
        s.gammas = self.gammas.clone();
        s.sweep_mode = self.sweep_mode.clone();
        s.radial_seed = self.radial_seed;
        s.dr = self.dr;
        s.scan_points = self.scan_points;
        s.deltas = self.deltas.clone();
        s.trials = self.trials;
        s.field = self.field.clone();
        l.output.dir = self.out.clone();
        l.output.format = self.format.clone();
        l
    }
}

fn resolve(cli: &Cli) -> Result<RunConfig, String> {
    let file = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            Layer::from_toml(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => Layer::default(),
    };
    RunConfig::resolve(&cli.layer().over(&file))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match resolve(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("spherelab: configuration error: {e}");
            return ExitCode::from(2);
        }
    };
    for w in &cfg.warnings {
        eprintln!("spherelab: warning: {w}");
    }
    let result = run(cli.command, &cfg);
    for name in &result.written {
        println!("{}", cfg.out.join(name).display());
    }
    match result.failure {
        None => ExitCode::SUCCESS,
        Some(f) => {
            eprintln!("spherelab: {f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
