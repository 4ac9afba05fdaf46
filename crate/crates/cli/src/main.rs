//! Command-line front end: sweeps, convergence reports, plot scripts and the
//! Monte Carlo consistency check.

mod config;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use liftdiff::mc::SimConfig;
use liftdiff::report::{self, PlotStyle, SweepConfig};
use liftdiff::{Error, Result};

use config::{parse_list, ConfigFile};

const EXIT_USAGE: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "liftdiff", version, about = "Diffusion coefficient of the lifted Bernoulli-shift map")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate estimators on a uniform h grid and write a CSV table.
    Sweep(SweepArgs),
    /// Measure estimators against the exact series on a grid.
    Compare(CompareArgs),
    /// Write a gnuplot script for a sweep table.
    PlotScript(PlotArgs),
    /// Check the Monte Carlo estimate against the exact series.
    McCheck(McArgs),
}

/// Sweep options; each overrides the matching key of `--config`.
#[derive(Debug, Args)]
struct GridArgs {
    /// File of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    h_min: Option<f64>,
    #[arg(long)]
    h_max: Option<f64>,
    #[arg(long)]
    n_points: Option<usize>,
    /// Comma-separated list such as `crw:0-3,prw:1-2,markov:1-3,exact,mc`.
    #[arg(long)]
    methods: Option<String>,
    /// System sizes for the Markov extrapolation, e.g. `8,16,32,64`.
    #[arg(long)]
    l_list: Option<String>,
    #[arg(long)]
    exact_tol: Option<f64>,
    #[arg(long)]
    solver_tol: Option<f64>,
    #[arg(long)]
    prw2_tol: Option<f64>,
    #[arg(long)]
    prw2_max_terms: Option<usize>,
    #[arg(long)]
    particles: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    fit_window: Option<f64>,
    /// Largest denominator for exact rational evaluation of grid points (0 disables).
    #[arg(long)]
    rational_max_den: Option<u64>,
    /// Record per-row wall time (the CSV is then no longer reproducible).
    #[arg(long)]
    timing: bool,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    grid: GridArgs,
    /// Output CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run manifest; defaults to the CSV path with a `.json` extension.
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    grid: GridArgs,
    /// Output CSV of per-(method, order) error statistics.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the underlying sweep table.
    #[arg(long)]
    table: Option<PathBuf>,
    /// Write the text summary here as well as to stdout.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PlotArgs {
    /// Sweep CSV to plot.
    #[arg(long)]
    table: PathBuf,
    /// Layout: crw, prw or markov.
    #[arg(long, default_value = "crw")]
    style: String,
    /// Magnified h window of the markov layout, `lo,hi`.
    #[arg(long)]
    zoom: Option<String>,
    /// Script path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct McArgs {
    /// Comma-separated h values.
    #[arg(long, default_value = "0.2,0.5,0.8,1")]
    h: String,
    #[arg(long, default_value_t = 100_000)]
    particles: usize,
    #[arg(long, default_value_t = 1_000)]
    steps: usize,
    #[arg(long, default_value_t = 20241015)]
    seed: u64,
    #[arg(long, default_value_t = liftdiff::mc::DEFAULT_FIT_WINDOW)]
    fit_window: f64,
}

/// Sweep configuration plus output paths from the file and flags.
struct Resolved {
    sweep: SweepConfig,
    out: Option<PathBuf>,
    manifest: Option<PathBuf>,
}

fn resolve(g: &GridArgs) -> Result<Resolved> {
    let file = match &g.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let mut cfg = SweepConfig::default();
    macro_rules! take {
        ($flag:expr, $key:literal) => {
            match $flag {
                Some(v) => Some(v),
                None => file.get($key)?,
            }
        };
    }
    if let Some(v) = take!(g.h_min, "h_min") {
        cfg.h_min = v;
    }
    if let Some(v) = take!(g.h_max, "h_max") {
        cfg.h_max = v;
    }
    if let Some(v) = take!(g.n_points, "n_points") {
        cfg.n_points = v;
    }
    if let Some(m) = g.methods.as_deref().or(file.raw("methods")) {
        cfg.methods = report::parse_methods(m)?;
    }
    if let Some(l) = g.l_list.as_deref().or(file.raw("l_list")) {
        cfg.l_list = parse_list(l, "l_list")?;
    }
    if let Some(v) = take!(g.exact_tol, "exact_tol") {
        cfg.exact_tol = v;
    }
    if let Some(v) = take!(g.solver_tol, "solver_tol") {
        cfg.solver_tol = v;
    }
    if let Some(v) = take!(g.prw2_tol, "prw2_tol") {
        cfg.prw2_tol = v;
    }
    if let Some(v) = take!(g.prw2_max_terms, "prw2_max_terms") {
        cfg.prw2_max_terms = v;
    }
    if let Some(v) = take!(g.particles, "particles") {
        cfg.mc.n_particles = v;
    }
    if let Some(v) = take!(g.steps, "steps") {
        cfg.mc.n_steps = v;
    }
    if let Some(v) = take!(g.seed, "seed") {
        cfg.mc.seed = v;
    }
    if let Some(v) = take!(g.fit_window, "fit_window") {
        cfg.mc.fit_window = v;
    }
    if let Some(v) = take!(g.rational_max_den, "rational_max_den") {
        cfg.rational_max_den = v;
    }
    cfg.record_timing = g.timing || file.get("timing")?.unwrap_or(false);
    cfg.validate()?;
    Ok(Resolved {
        sweep: cfg,
        out: file.raw("out").map(PathBuf::from),
        manifest: file.raw("manifest").map(PathBuf::from),
    })
}

/// Outcome of a command that ran to completion.
enum Outcome {
    Clean,
    NumericalFailures,
}

fn sweep(args: SweepArgs) -> Result<Outcome> {
    let resolved = resolve(&args.grid)?;
    let out = args
        .out
        .or(resolved.out)
        .ok_or_else(|| Error::InvalidParameter("no output path: pass --out or set `out`".into()))?;
    let manifest = args
        .manifest
        .or(resolved.manifest)
        .unwrap_or_else(|| out.with_extension("json"));
    let table = report::run_sweep(&resolved.sweep)?;
    report::write_csv(&out, &table.rows)?;
    report::write_manifest(&manifest, "sweep", &resolved.sweep, &table, &[out.clone()])?;
    for f in &table.failures {
        eprintln!("h = {}: {} order {} failed: {}", f.h, f.method, f.order, f.message);
    }
    eprintln!("wrote {} rows to {}", table.rows.len(), out.display());
    Ok(if table.failures.is_empty() { Outcome::Clean } else { Outcome::NumericalFailures })
}

fn compare(args: CompareArgs) -> Result<Outcome> {
    let resolved = resolve(&args.grid)?;
    let report = report::run_compare(&resolved.sweep)?;
    let summary = report::compare_summary(&report.rows);
    print!("{summary}");
    let out = args.out.or(resolved.out);
    let mut outputs = Vec::new();
    if let Some(path) = &out {
        report::write_compare_csv(path, &report.rows)?;
        outputs.push(path.clone());
    }
    if let Some(path) = &args.table {
        report::write_csv(path, &report.table.rows)?;
        outputs.push(path.clone());
    }
    if let Some(path) = &args.summary {
        fs::write(path, &summary).map_err(|e| Error::io(path, e))?;
        outputs.push(path.clone());
    }
    if let Some(path) = &resolved.manifest {
        report::write_manifest(path, "compare", &resolved.sweep, &report.table, &outputs)?;
    }
    for f in &report.table.failures {
        eprintln!("h = {}: {} order {} failed: {}", f.h, f.method, f.order, f.message);
    }
    let violations: usize = report.rows.iter().filter_map(|r| r.bound_violations).sum();
    if violations > 0 {
        eprintln!("{violations} grid points exceed the crw truncation bound");
    }
    Ok(if report.table.failures.is_empty() && violations == 0 {
        Outcome::Clean
    } else {
        Outcome::NumericalFailures
    })
}

fn plot_script(args: PlotArgs) -> Result<Outcome> {
    let style: PlotStyle = args.style.parse()?;
    let zoom = match &args.zoom {
        None => report::DEFAULT_ZOOM,
        Some(z) => match parse_list::<f64>(z, "zoom")?.as_slice() {
            &[lo, hi] if lo < hi => (lo, hi),
            _ => return Err(Error::InvalidParameter(format!("zoom must be `lo,hi` with lo < hi, got `{z}`"))),
        },
    };
    let script = report::emit_plot_script(&args.table, style, zoom)?;
    match &args.out {
        Some(path) => fs::write(path, script).map_err(|e| Error::io(path, e))?,
        None => std::io::stdout()
            .write_all(script.as_bytes())
            .map_err(|e| Error::io(Path::new("<stdout>"), e))?,
    }
    Ok(Outcome::Clean)
}

fn mc_check(args: McArgs) -> Result<Outcome> {
    let hs: Vec<f64> = parse_list(&args.h, "h")?;
    let cfg = SimConfig {
        n_particles: args.particles,
        n_steps: args.steps,
        seed: args.seed,
        fit_window: args.fit_window,
    };
    let rows = report::mc_check(&hs, &cfg)?;
    println!("{:>6} {:>10} {:>10} {:>10} {:>7} {:>10}  result", "h", "D_hat", "std_err", "D_exact", "z", "<dx>");
    for r in &rows {
        println!(
            "{:>6} {:>10.6} {:>10.6} {:>10.6} {:>7.2} {:>10.2e}  {}",
            r.h,
            r.d_hat,
            r.std_err,
            r.d_exact,
            (r.d_hat - r.d_exact) / r.std_err,
            r.mean_displacement,
            if r.passed { "PASS" } else { "FAIL" }
        );
    }
    Ok(if rows.iter().all(|r| r.passed) { Outcome::Clean } else { Outcome::NumericalFailures })
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } | Error::Format { .. } => EXIT_IO,
        e if e.is_numerical() => EXIT_NUMERICAL,
        _ => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Sweep(a) => sweep(a),
        Command::Compare(a) => compare(a),
        Command::PlotScript(a) => plot_script(a),
        Command::McCheck(a) => mc_check(a),
    };
    match result {
        Ok(Outcome::Clean) => ExitCode::SUCCESS,
        Ok(Outcome::NumericalFailures) => ExitCode::from(EXIT_NUMERICAL),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
