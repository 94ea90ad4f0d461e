//! `pilotbox` — command-line frontend for the square-well pilot-wave simulator.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 numerical or
//! runtime error.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::json;

use pilotbox::{Error as CoreError, Grid1D, WaveFunction, WellSpec};

use config::FileConfig;
use output::{Cell, Format, Table};

#[derive(Debug, Parser)]
#[command(name = "pilotbox", version, about = "1-D pilot-wave dynamics in an infinite square well")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a well eigenstate as a table of x, re, im, density.
    Eigenstate(EigenstateArgs),
    /// Write the quantum potential of an eigenstate with its U = E error.
    Qpotential(QpotentialArgs),
    /// Evolve a superposition with Crank-Nicolson and write the frames.
    Evolve(EvolveArgs),
    /// Integrate a Bohmian trajectory ensemble and write particle paths.
    Trajectories(TrajectoriesArgs),
    /// Kolmogorov-Smirnov equivariance check of an ensemble against |psi|^2.
    Equivariance(TrajectoriesArgs),
    /// Uncertainty-principle scale estimate for a confined quark.
    Quark(QuarkArgs),
}

#[derive(Debug, Args, Clone)]
struct CommonArgs {
    /// Wall separation L.
    #[arg(long)]
    length: Option<f64>,
    /// Particle mass.
    #[arg(long)]
    mass: Option<f64>,
    /// Reduced Planck constant.
    #[arg(long)]
    hbar: Option<f64>,
    /// Grid points including both walls.
    #[arg(long)]
    points: Option<usize>,
    /// Output file; when absent only the summary JSON goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Table format: csv or json.
    #[arg(long)]
    format: Option<String>,
    /// JSON config file merged underneath explicit flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EigenstateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Standard mode number m (psi_m ~ sin(m pi x / L)).
    #[arg(long, conflicts_with = "paper_n")]
    mode: Option<u32>,
    /// Mode in the sin(2 pi n x / L) labelling; maps to m = 2n.
    #[arg(long)]
    paper_n: Option<u32>,
}

#[derive(Debug, Args)]
struct QpotentialArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, conflicts_with = "paper_n")]
    mode: Option<u32>,
    #[arg(long)]
    paper_n: Option<u32>,
    /// Use a constant-amplitude synthetic field instead of an eigenstate.
    #[arg(long)]
    synthetic_uniform: bool,
}

#[derive(Debug, Args)]
struct EvolveArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Superposition terms as "m1:re,im;m2:re,im".
    #[arg(long)]
    terms: Option<String>,
    /// Time step.
    #[arg(long)]
    dt: Option<f64>,
    /// Number of steps.
    #[arg(long)]
    steps: Option<usize>,
    /// Store every k-th frame.
    #[arg(long)]
    stride: Option<usize>,
}

#[derive(Debug, Args)]
struct TrajectoriesArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    terms: Option<String>,
    #[arg(long, conflicts_with = "terms")]
    mode: Option<u32>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    stride: Option<usize>,
    /// Ensemble size.
    #[arg(long)]
    count: Option<usize>,
    /// RNG seed for the Born-rule initial positions.
    #[arg(long)]
    seed: Option<u64>,
    /// Trajectory integration step.
    #[arg(long)]
    dt_traj: Option<f64>,
    /// Keep every k-th integration step per particle.
    #[arg(long)]
    record_stride: Option<usize>,
    /// Comma-separated times for KS equivariance checks.
    #[arg(long)]
    ks_times: Option<String>,
}

#[derive(Debug, Args)]
struct QuarkArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Confinement radius (fm).
    #[arg(long)]
    radius: Option<f64>,
    /// Current quark mass (MeV).
    #[arg(long)]
    current_mass: Option<f64>,
    /// Constituent quark mass (MeV).
    #[arg(long)]
    constituent_mass: Option<f64>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }

    fn runtime(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        let code = match e {
            CoreError::Domain(_) | CoreError::Config(_) => 1,
            _ => 2,
        };
        Self { code, message: e.to_string() }
    }
}

/// Flag value, then config file value, then default.
fn pick<T: Clone>(flag: &Option<T>, file: &Option<T>, default: T) -> T {
    flag.clone().or_else(|| file.clone()).unwrap_or(default)
}

struct Resolved {
    spec: WellSpec,
    grid: Grid1D,
    out: Option<PathBuf>,
    format: Format,
    file: FileConfig,
}

fn resolve_common(common: &CommonArgs, default_format: Format) -> Result<Resolved, Failure> {
    let file = match &common.config {
        Some(path) => config::load(path).map_err(Failure::usage)?,
        None => FileConfig::default(),
    };
    let length = pick(&common.length, &file.length, 1.0);
    let mass = pick(&common.mass, &file.mass, 1.0);
    let hbar = pick(&common.hbar, &file.hbar, 1.0);
    let points = pick(&common.points, &file.points, 2049);
    let spec = WellSpec::new(length, mass, hbar)?;
    let grid = Grid1D::new(length, points)?;
    let format = match (&common.format, &file.format) {
        (Some(s), _) | (None, Some(s)) => Format::parse(s).map_err(Failure::usage)?,
        (None, None) => default_format,
    };
    Ok(Resolved { spec, grid, out: common.out.clone(), format, file })
}

fn resolve_mode(
    mode: Option<u32>,
    paper_n: Option<u32>,
    file: &FileConfig,
) -> Result<u32, Failure> {
    match (mode.or(file.mode), paper_n.or(file.paper_n)) {
        (Some(_), Some(_)) => Err(Failure::usage("give either --mode or --paper-n, not both")),
        (Some(m), None) => {
            if m == 0 {
                Err(Failure::usage("--mode must be >= 1"))
            } else {
                Ok(m)
            }
        }
        (None, Some(n)) => Ok(pilotbox::paper_mode_to_standard(n)?),
        (None, None) => Ok(1),
    }
}

fn parse_terms(text: &str) -> Result<Vec<(Complex64, u32)>, Failure> {
    let mut out = Vec::new();
    for part in text.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (mode_s, coeff_s) = part
            .split_once(':')
            .ok_or_else(|| Failure::usage(format!("bad term '{part}', expected m:re,im")))?;
        let mode: u32 = mode_s
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("bad mode in term '{part}'")))?;
        let (re_s, im_s) = coeff_s
            .split_once(',')
            .ok_or_else(|| Failure::usage(format!("bad coefficient in term '{part}'")))?;
        let re: f64 = re_s.trim().parse().map_err(|_| Failure::usage(format!("bad re in '{part}'")))?;
        let im: f64 = im_s.trim().parse().map_err(|_| Failure::usage(format!("bad im in '{part}'")))?;
        out.push((Complex64::new(re, im), mode));
    }
    if out.is_empty() {
        return Err(Failure::usage("--terms parsed to an empty superposition"));
    }
    Ok(out)
}

fn parse_ks_times(text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Failure::usage(format!("bad KS time '{s}'")))
        })
        .collect()
}

fn emit(resolved: &Resolved, table: &Table, summary: serde_json::Value) -> Result<(), Failure> {
    if let Some(path) = &resolved.out {
        output::write_file(path, &table.render(resolved.format)).map_err(Failure::runtime)?;
    }
    println!("{summary:#}");
    Ok(())
}

fn cmd_eigenstate(args: &EigenstateArgs) -> Result<(), Failure> {
    let resolved = resolve_common(&args.common, Format::Csv)?;
    let mode = resolve_mode(args.mode, args.paper_n, &resolved.file)?;
    let psi = pilotbox::eigenstate(resolved.spec, mode, &resolved.grid)?;
    let energy = pilotbox::eigenenergy(resolved.spec, mode)?;
    let mut table = Table::new(vec!["x", "re", "im", "density"]);
    for (i, v) in psi.values.iter().enumerate() {
        table.push(vec![
            Cell::Float(resolved.grid.position(i)),
            Cell::Float(v.re),
            Cell::Float(v.im),
            Cell::Float(v.norm_sqr()),
        ]);
    }
    let summary = json!({
        "command": "eigenstate",
        "mode": mode,
        "energy": energy,
        "norm": psi.norm(),
        "points": resolved.grid.n_points(),
    });
    emit(&resolved, &table, summary)
}

fn cmd_qpotential(args: &QpotentialArgs) -> Result<(), Failure> {
    let resolved = resolve_common(&args.common, Format::Csv)?;
    let (psi, energy, mode): (WaveFunction, f64, u32) = if args.synthetic_uniform {
        let n = resolved.grid.n_points();
        let psi = WaveFunction {
            grid: resolved.grid.clone(),
            spec: resolved.spec,
            values: vec![Complex64::new(1.0, 0.0); n],
        };
        (psi, 0.0, 0)
    } else {
        let mode = resolve_mode(args.mode, args.paper_n, &resolved.file)?;
        let psi = pilotbox::eigenstate(resolved.spec, mode, &resolved.grid)?;
        let energy = pilotbox::eigenenergy(resolved.spec, mode)?;
        (psi, energy, mode)
    };
    let q = pilotbox::quantum_potential(&psi)?;
    let mut table = Table::new(vec!["x", "R", "Q", "E_m", "rel_err"]);
    let mut max_rel_err = 0.0f64;
    for i in 0..resolved.grid.n_points() {
        if !q.valid[i] {
            continue;
        }
        let rel_err = if energy != 0.0 { (q.values[i] / energy - 1.0).abs() } else { q.values[i].abs() };
        max_rel_err = max_rel_err.max(rel_err);
        table.push(vec![
            Cell::Float(resolved.grid.position(i)),
            Cell::Float(psi.values[i].norm()),
            Cell::Float(q.values[i]),
            Cell::Float(energy),
            Cell::Float(rel_err),
        ]);
    }
    let summary = json!({
        "command": "qpotential",
        "mode": mode,
        "energy": energy,
        "max_rel_err": max_rel_err,
        "masked_fraction": q.masked_fraction,
    });
    emit(&resolved, &table, summary)
}

fn build_initial(
    terms: &Option<String>,
    mode: Option<u32>,
    resolved: &Resolved,
) -> Result<WaveFunction, Failure> {
    let terms = terms.clone().or_else(|| resolved.file.terms.clone());
    match (terms, mode.or(resolved.file.mode)) {
        (Some(t), None) => {
            let parsed = parse_terms(&t)?;
            Ok(pilotbox::superpose(&parsed, resolved.spec, &resolved.grid)?)
        }
        (None, Some(m)) => Ok(pilotbox::eigenstate(resolved.spec, m, &resolved.grid)?),
        (None, None) => Ok(pilotbox::eigenstate(resolved.spec, 1, &resolved.grid)?),
        (Some(_), Some(_)) => Err(Failure::usage("give either --terms or --mode, not both")),
    }
}

fn cmd_evolve(args: &EvolveArgs) -> Result<(), Failure> {
    let resolved = resolve_common(&args.common, Format::Json)?;
    let psi0 = build_initial(&args.terms, None, &resolved)?;
    let dt = pick(&args.dt, &resolved.file.dt, 1e-4);
    let steps = pick(&args.steps, &resolved.file.steps, 1000);
    let stride = pick(&args.stride, &resolved.file.stride, 10);
    let plan = pilotbox::EvolutionPlan::new(dt, steps, stride)?;
    let series = pilotbox::evolve(&psi0, &plan)?;
    let norms: Vec<f64> = series.frames.iter().map(|f| f.norm()).collect();

    if let Some(path) = &resolved.out {
        match resolved.format {
            Format::Json => {
                let frames: Vec<serde_json::Value> = series
                    .frames
                    .iter()
                    .zip(&series.times)
                    .zip(&norms)
                    .map(|((f, &t), &norm)| {
                        json!({
                            "t": t,
                            "norm": norm,
                            "re": f.values.iter().map(|v| v.re).collect::<Vec<_>>(),
                            "im": f.values.iter().map(|v| v.im).collect::<Vec<_>>(),
                        })
                    })
                    .collect();
                let doc = json!({
                    "x": resolved.grid.positions().collect::<Vec<_>>(),
                    "frames": frames,
                });
                output::write_file(path, &format!("{doc:#}\n")).map_err(Failure::runtime)?;
            }
            Format::Csv => {
                // one CSV per stored frame next to the requested path
                let stem = path.with_extension("");
                for (k, (frame, &t)) in series.frames.iter().zip(&series.times).enumerate() {
                    let mut table = Table::new(vec!["x", "t", "re", "im", "density"]);
                    for (i, v) in frame.values.iter().enumerate() {
                        table.push(vec![
                            Cell::Float(resolved.grid.position(i)),
                            Cell::Float(t),
                            Cell::Float(v.re),
                            Cell::Float(v.im),
                            Cell::Float(v.norm_sqr()),
                        ]);
                    }
                    let frame_path = PathBuf::from(format!("{}_{k:04}.csv", stem.display()));
                    output::write_file(&frame_path, &table.to_csv()).map_err(Failure::runtime)?;
                }
            }
        }
    }
    let summary = json!({
        "command": "evolve",
        "frames": series.frames.len(),
        "t_final": series.times.last().unwrap(),
        "times": series.times,
        "norms": norms,
    });
    println!("{summary:#}");
    Ok(())
}

fn run_ensemble_command(args: &TrajectoriesArgs, ks_only: bool) -> Result<(), Failure> {
    let resolved = resolve_common(&args.common, Format::Csv)?;
    let psi0 = build_initial(&args.terms, args.mode, &resolved)?;
    let dt = pick(&args.dt, &resolved.file.dt, 1e-4);
    let steps = pick(&args.steps, &resolved.file.steps, 1000);
    let stride = pick(&args.stride, &resolved.file.stride, 10);
    let count = pick(&args.count, &resolved.file.count, 1000);
    let seed = pick(&args.seed, &resolved.file.seed, 0);
    let dt_traj = pick(&args.dt_traj, &resolved.file.dt_traj, 1e-3);
    let record_stride = pick(&args.record_stride, &resolved.file.record_stride, 1);
    let ks_times = match args.ks_times.clone().or_else(|| resolved.file.ks_times.clone()) {
        Some(text) => parse_ks_times(&text)?,
        None => Vec::new(),
    };

    let plan = pilotbox::EvolutionPlan::new(dt, steps, stride)?;
    let series = pilotbox::evolve(&psi0, &plan)?;
    let ensemble =
        pilotbox::run_ensemble_recorded(&psi0, &series, count, seed, dt_traj, record_stride)?;

    let mut ks_rows = Vec::new();
    for &t in &ks_times {
        let ks = pilotbox::equivariance_test(&ensemble, &series, t)?;
        ks_rows.push(json!({
            "time": ks.time,
            "statistic": ks.statistic,
            "sample_count": ks.sample_count,
        }));
    }

    let table = if ks_only {
        let mut table = Table::new(vec!["time", "statistic", "sample_count"]);
        for row in &ks_rows {
            table.push(vec![
                Cell::Float(row["time"].as_f64().unwrap()),
                Cell::Float(row["statistic"].as_f64().unwrap()),
                Cell::Int(row["sample_count"].as_u64().unwrap()),
            ]);
        }
        table
    } else {
        let mut table = Table::new(vec!["particle_id", "t", "x"]);
        for (p, positions) in ensemble.positions.iter().enumerate() {
            for (k, &x) in positions.iter().enumerate() {
                table.push(vec![
                    Cell::Int(p as u64),
                    Cell::Float(ensemble.times[k]),
                    Cell::Float(x),
                ]);
            }
        }
        table
    };

    let max_displacement = ensemble
        .positions
        .iter()
        .map(|p| p.iter().map(|x| (x - p[0]).abs()).fold(0.0f64, f64::max))
        .fold(0.0f64, f64::max);
    let summary = json!({
        "command": if ks_only { "equivariance" } else { "trajectories" },
        "count": count,
        "seed": seed,
        "t_final": ensemble.times.last().unwrap(),
        "max_displacement": max_displacement,
        "ks": ks_rows,
    });
    emit(&resolved, &table, summary)
}

fn cmd_quark(args: &QuarkArgs) -> Result<(), Failure> {
    let resolved = resolve_common(&args.common, Format::Json)?;
    let radius = pick(&args.radius, &resolved.file.radius, 1.0);
    let current = pick(&args.current_mass, &resolved.file.current_mass, 10.0);
    let constituent = pick(&args.constituent_mass, &resolved.file.constituent_mass, 300.0);
    let report = pilotbox::quark_report(radius, current, constituent)?;
    let doc = serde_json::to_value(&report).map_err(|e| Failure::runtime(e.to_string()))?;
    if let Some(path) = &resolved.out {
        output::write_file(path, &format!("{doc:#}\n")).map_err(Failure::runtime)?;
    }
    println!("{doc:#}");
    Ok(())
}

fn setup_threads() -> Result<(), Failure> {
    if let Ok(value) = std::env::var("PILOTBOX_THREADS") {
        let threads: usize = value
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Failure::usage(format!("PILOTBOX_THREADS must be a positive integer, got '{value}'")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::runtime(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn run() -> Result<(), Failure> {
    let cli = Cli::try_parse().map_err(|e| {
        // let clap print its own help/version output with code 0
        if e.use_stderr() {
            Failure::usage(e.to_string())
        } else {
            e.print().ok();
            std::process::exit(0);
        }
    })?;
    setup_threads()?;
    match &cli.command {
        Command::Eigenstate(args) => cmd_eigenstate(args),
        Command::Qpotential(args) => cmd_qpotential(args),
        Command::Evolve(args) => cmd_evolve(args),
        Command::Trajectories(args) => run_ensemble_command(args, false),
        Command::Equivariance(args) => run_ensemble_command(args, true),
        Command::Quark(args) => cmd_quark(args),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("pilotbox: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
