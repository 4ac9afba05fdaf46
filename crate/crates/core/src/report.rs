//! Parameter sweeps, convergence reports and plot scripts.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::crw;
use crate::error::{Error, Result};
use crate::estimate::{DiffusionEstimate, Method};
use crate::linalg;
use crate::map::MapParams;
use crate::markov;
use crate::mc::{self, SimConfig};
use crate::prw;

pub const CSV_HEADER: [&str; 7] = ["h", "method", "order", "value", "error_bound", "exact", "wall_time_ms"];
/// Tolerance of the reference values used by [`run_compare`].
pub const REFERENCE_TOL: f64 = 1e-14;

/// One `(method, order)` pair to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MethodSpec {
    pub method: Method,
    pub order: usize,
}

impl MethodSpec {
    pub fn new(method: Method, order: usize) -> Result<Self> {
        let ok = match method {
            Method::Prw => order <= 2,
            Method::Exact | Method::Mc => order == 0,
            Method::Crw | Method::Markov => order <= 64,
        };
        if !ok {
            return Err(Error::InvalidParameter(format!("{method} does not support order {order}")));
        }
        Ok(Self { method, order })
    }
}

/// Parses lists such as `crw:0-3,prw:1-2,markov:2,exact,mc`.
pub fn parse_methods(s: &str) -> Result<Vec<MethodSpec>> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (name, orders) = match item.split_once(':') {
            Some((n, o)) => (n, Some(o)),
            None => (item, None),
        };
        let method = Method::from_str(name)?;
        let range = match orders {
            None => 0..=0,
            Some(o) => {
                let parse = |t: &str| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::InvalidParameter(format!("bad order `{t}` in `{item}`")))
                };
                match o.split_once('-') {
                    Some((a, b)) => parse(a)?..=parse(b)?,
                    None => {
                        let n = parse(o)?;
                        n..=n
                    }
                }
            }
        };
        if range.is_empty() {
            return Err(Error::InvalidParameter(format!("empty order range in `{item}`")));
        }
        for order in range {
            let spec = MethodSpec::new(method, order)?;
            if !out.contains(&spec) {
                out.push(spec);
            }
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidParameter("no methods requested".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub h_min: f64,
    pub h_max: f64,
    pub n_points: usize,
    pub methods: Vec<MethodSpec>,
    pub l_list: Vec<usize>,
    pub exact_tol: f64,
    pub solver_tol: f64,
    pub prw2_tol: f64,
    pub prw2_max_terms: usize,
    pub mc: SimConfig,
    /// Grid values equal to a fraction with at most this denominator are
    /// evaluated in exact rational arithmetic (0 disables).
    pub rational_max_den: u64,
    /// Record per-row wall time; off keeps the CSV byte-reproducible.
    pub record_timing: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            h_min: 0.0,
            h_max: 1.0,
            n_points: 401,
            methods: vec![MethodSpec { method: Method::Crw, order: 0 }],
            l_list: markov::DEFAULT_L_LIST.to_vec(),
            exact_tol: 1e-15,
            solver_tol: linalg::DEFAULT_TOL,
            prw2_tol: prw::DEFAULT_PRW2_TOL,
            prw2_max_terms: prw::DEFAULT_PRW2_MAX_TERMS,
            mc: SimConfig { n_particles: 10_000, ..SimConfig::default() },
            rational_max_den: 10_000,
            record_timing: false,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 <= self.h_min && self.h_min < self.h_max && self.h_max <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "need 0 <= h_min < h_max <= 1, got [{}, {}]",
                self.h_min, self.h_max
            )));
        }
        if self.n_points < 2 {
            return Err(Error::InvalidParameter("n_points must be at least 2".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidParameter("no methods requested".into()));
        }
        if self.methods.iter().any(|m| m.method == Method::Markov)
            && (self.l_list.len() < 3 || self.l_list.windows(2).any(|w| w[1] <= w[0]) || self.l_list[0] < 3)
        {
            return Err(Error::InvalidParameter(format!(
                "L list needs at least 3 strictly increasing sizes >= 3, got {:?}",
                self.l_list
            )));
        }
        for (name, tol) in [("exact_tol", self.exact_tol), ("solver_tol", self.solver_tol), ("prw2_tol", self.prw2_tol)] {
            if !(tol > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive")));
            }
        }
        if self.methods.iter().any(|m| m.method == Method::Mc) {
            self.mc.validate()?;
        }
        Ok(())
    }

    /// Uniform grid with both endpoints included.
    pub fn grid(&self) -> Vec<f64> {
        let span = self.h_max - self.h_min;
        let last = self.n_points - 1;
        (0..self.n_points)
            .map(|i| {
                if i == last {
                    self.h_max
                } else {
                    self.h_min + span * i as f64 / last as f64
                }
            })
            .collect()
    }

    fn params(&self, h: f64) -> Result<MapParams> {
        if self.rational_max_den > 0 {
            MapParams::detect_rational(h, self.rational_max_den)
        } else {
            MapParams::new(h)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRow {
    pub h: f64,
    pub method: Method,
    pub order: usize,
    /// `None` marks a failed evaluation.
    pub value: Option<f64>,
    pub error_bound: Option<f64>,
    pub exact: bool,
    pub wall_time_ms: f64,
}

impl OutputRow {
    pub fn failed(&self) -> bool {
        self.value.is_none()
    }

    pub fn spec(&self) -> MethodSpec {
        MethodSpec { method: self.method, order: self.order }
    }
}

/// A failed grid evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub h: f64,
    pub method: Method,
    pub order: usize,
    pub message: String,
    pub numerical: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<OutputRow>,
    pub failures: Vec<Failure>,
    pub elapsed_ms: f64,
}

/// Evaluates one estimator at one parameter value.
pub fn evaluate(spec: MethodSpec, p: &MapParams, cfg: &SweepConfig) -> Result<DiffusionEstimate> {
    match spec.method {
        Method::Crw => crw::crw_diffusion(p, spec.order),
        Method::Prw => match spec.order {
            0 => Ok(prw::d_prw0(p)),
            1 => prw::d_prw1(p),
            _ => prw::d_prw2(p, cfg.prw2_tol, cfg.prw2_max_terms),
        },
        Method::Markov => markov::d_markov(p, spec.order, &cfg.l_list, cfg.solver_tol),
        Method::Exact => crw::exact_diffusion(p, cfg.exact_tol),
        Method::Mc => Ok(mc::simulate_msd(p, &cfg.mc)?.estimate(p.h())),
    }
}

/// Evaluates every requested estimator on the grid. Rows come out in grid
/// order, then in the order the methods were requested.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepTable> {
    cfg.validate()?;
    let start = Instant::now();
    let grid = cfg.grid();
    let per_point: Vec<Vec<(OutputRow, Option<Failure>)>> = grid
        .par_iter()
        .map(|&h| -> Result<Vec<(OutputRow, Option<Failure>)>> {
            let p = cfg.params(h)?;
            Ok(cfg
                .methods
                .iter()
                .map(|&spec| {
                    let t0 = Instant::now();
                    let result = evaluate(spec, &p, cfg);
                    let wall = if cfg.record_timing { t0.elapsed().as_secs_f64() * 1e3 } else { 0.0 };
                    match result {
                        Ok(est) => (
                            OutputRow {
                                h,
                                method: spec.method,
                                order: spec.order,
                                value: Some(est.value),
                                error_bound: est.error_bound,
                                exact: est.exact,
                                wall_time_ms: wall,
                            },
                            None,
                        ),
                        Err(e) => (
                            OutputRow {
                                h,
                                method: spec.method,
                                order: spec.order,
                                value: None,
                                error_bound: None,
                                exact: false,
                                wall_time_ms: wall,
                            },
                            Some(Failure {
                                h,
                                method: spec.method,
                                order: spec.order,
                                message: e.to_string(),
                                numerical: e.is_numerical(),
                            }),
                        ),
                    }
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (row, failure) in per_point.into_iter().flatten() {
        rows.push(row);
        failures.extend(failure);
    }
    Ok(SweepTable {
        rows,
        failures,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Shortest decimal that parses back to the same `f64`.
pub fn format_number(x: f64) -> String {
    format!("{x:?}")
}

fn parse_number(s: &str, path: &Path, line: u64) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| Error::Format {
        path: path.to_path_buf(),
        message: format!("line {line}: `{s}` is not a number"),
    })
}

/// Writes rows as CSV. Failed rows leave `value` and `error_bound` empty and
/// put `error` in the `exact` column.
pub fn write_csv(path: &Path, rows: &[OutputRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(CSV_HEADER).map_err(|e| csv_error(path, e))?;
    for r in rows {
        let exact = if r.failed() { "error".to_string() } else { r.exact.to_string() };
        w.write_record([
            format_number(r.h),
            r.method.to_string(),
            r.order.to_string(),
            r.value.map(format_number).unwrap_or_default(),
            r.error_bound.map(format_number).unwrap_or_default(),
            exact,
            format_number(r.wall_time_ms),
        ])
        .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            _ => unreachable!("checked to be an I/O error"),
        }
    } else {
        Error::Format {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    }
}

pub fn read_csv(path: &Path) -> Result<Vec<OutputRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let header = r.headers().map_err(|e| csv_error(path, e))?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: format!("unexpected header {:?}", header.iter().collect::<Vec<_>>()),
        });
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |message: String| Error::Format { path: path.to_path_buf(), message: format!("line {line}: {message}") };
        let opt = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                parse_number(s, path, line).map(Some)
            }
        };
        let (exact, failed) = match &rec[5] {
            "true" => (true, false),
            "false" => (false, false),
            "error" => (false, true),
            other => return Err(bad(format!("bad exact flag `{other}`"))),
        };
        let value = opt(&rec[3])?;
        if failed != value.is_none() {
            return Err(bad("value column disagrees with the error marker".into()));
        }
        rows.push(OutputRow {
            h: parse_number(&rec[0], path, line)?,
            method: Method::from_str(&rec[1]).map_err(|e| bad(e.to_string()))?,
            order: rec[2].parse().map_err(|_| bad(format!("bad order `{}`", &rec[2])))?,
            value,
            error_bound: opt(&rec[4])?,
            exact,
            wall_time_ms: parse_number(&rec[6], path, line)?,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: &'a SweepConfig,
    rows: usize,
    failures: &'a [Failure],
    total_time_ms: f64,
    outputs: Vec<PathBuf>,
}

/// JSON run manifest: configuration echo, version, failures and timing.
pub fn write_manifest(
    path: &Path,
    command: &str,
    cfg: &SweepConfig,
    table: &SweepTable,
    outputs: &[PathBuf],
) -> Result<()> {
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        config: cfg,
        rows: table.rows.len(),
        failures: &table.failures,
        total_time_ms: table.elapsed_ms,
        outputs: outputs.to_vec(),
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

/// Error statistics of one `(method, order)` pair against the reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub method: Method,
    pub order: usize,
    pub n_points: usize,
    pub n_failed: usize,
    pub max_abs_error: f64,
    pub mean_abs_error: f64,
    /// For crw only: grid points where the truncation bound is exceeded.
    pub bound_violations: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub rows: Vec<CompareRow>,
    pub table: SweepTable,
    /// `(h, D_exact)` on the grid.
    pub reference: Vec<(f64, f64)>,
}

/// Runs the sweep and measures each estimator against `D_exact` at tolerance 1e-14.
pub fn run_compare(cfg: &SweepConfig) -> Result<CompareReport> {
    let table = run_sweep(cfg)?;
    let reference: Vec<(f64, f64)> = cfg
        .grid()
        .par_iter()
        .map(|&h| Ok((h, crw::exact_diffusion(&cfg.params(h)?, REFERENCE_TOL)?.value)))
        .collect::<Result<_>>()?;
    let rows = compare_rows(&table.rows, &reference);
    Ok(CompareReport { rows, table, reference })
}

/// Error statistics of `rows` against `reference`, one entry per `(method, order)`
/// in first-appearance order.
pub fn compare_rows(rows: &[OutputRow], reference: &[(f64, f64)]) -> Vec<CompareRow> {
    let lookup = |h: f64| reference.iter().find(|r| r.0 == h).map(|r| r.1);
    let mut specs: Vec<MethodSpec> = Vec::new();
    for r in rows {
        if !specs.contains(&r.spec()) {
            specs.push(r.spec());
        }
    }
    specs
        .into_iter()
        .map(|spec| {
            let mine: Vec<&OutputRow> = rows.iter().filter(|r| r.spec() == spec).collect();
            let mut errors = Vec::new();
            let mut violations = 0;
            for r in &mine {
                if let (Some(v), Some(exact)) = (r.value, lookup(r.h)) {
                    let err = (v - exact).abs();
                    errors.push(err);
                    if spec.method == Method::Crw {
                        let bound = crw_bound(r.h, spec.order);
                        if err > bound + REFERENCE_TOL {
                            violations += 1;
                        }
                    }
                }
            }
            let n = errors.len();
            CompareRow {
                method: spec.method,
                order: spec.order,
                n_points: mine.len(),
                n_failed: mine.iter().filter(|r| r.failed()).count(),
                max_abs_error: errors.iter().fold(0.0, |m: f64, e| m.max(*e)),
                mean_abs_error: if n == 0 { f64::NAN } else { errors.iter().sum::<f64>() / n as f64 },
                bound_violations: (spec.method == Method::Crw).then_some(violations),
            }
        })
        .collect()
}

fn crw_bound(h: f64, n: usize) -> f64 {
    if n == 0 {
        1.5 * h
    } else {
        h * 0.5f64.powi(n as i32 - 1)
    }
}

pub fn write_compare_csv(path: &Path, rows: &[CompareRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(["method", "order", "n_points", "n_failed", "max_abs_error", "mean_abs_error", "bound_violations"])
        .map_err(|e| csv_error(path, e))?;
    for r in rows {
        w.write_record([
            r.method.to_string(),
            r.order.to_string(),
            r.n_points.to_string(),
            r.n_failed.to_string(),
            format_number(r.max_abs_error),
            format_number(r.mean_abs_error),
            r.bound_violations.map(|v| v.to_string()).unwrap_or_default(),
        ])
        .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Plain-text table of a comparison, with the convergence trend per method.
pub fn compare_summary(rows: &[CompareRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<8} {:>5} {:>14} {:>14} {:>7} {:>10}", "method", "order", "max |err|", "mean |err|", "failed", "bound viol");
    for r in rows {
        let viol = r.bound_violations.map_or("-".to_string(), |v| v.to_string());
        let _ = writeln!(
            out,
            "{:<8} {:>5} {:>14.6e} {:>14.6e} {:>7} {:>10}",
            r.method.as_str(),
            r.order,
            r.max_abs_error,
            r.mean_abs_error,
            r.n_failed,
            viol
        );
    }
    for method in [Method::Crw, Method::Prw, Method::Markov] {
        let mut series: Vec<&CompareRow> = rows.iter().filter(|r| r.method == method).collect();
        if series.len() < 2 {
            continue;
        }
        series.sort_by_key(|r| r.order);
        let decreasing = series.windows(2).all(|w| w[1].mean_abs_error < w[0].mean_abs_error);
        let _ = writeln!(
            out,
            "{method}: mean error {} with order",
            if decreasing { "strictly decreases" } else { "does not decrease monotonically" }
        );
    }
    out
}

/// Figure layouts for [`emit_plot_script`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlotStyle {
    /// Truncated series orders 0-3 on a 2x2 grid.
    Crw,
    /// Persistent walk orders 1-2 side by side.
    Prw,
    /// Markov orders 1-3 plus a magnified view of order 3.
    Markov,
}

impl FromStr for PlotStyle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "crw" => Ok(PlotStyle::Crw),
            "prw" => Ok(PlotStyle::Prw),
            "markov" => Ok(PlotStyle::Markov),
            other => Err(Error::InvalidParameter(format!("unknown plot style `{other}`"))),
        }
    }
}

struct Panel {
    method: Method,
    order: usize,
    xrange: Option<(f64, f64)>,
}

/// Default magnified window of the Markov layout.
pub const DEFAULT_ZOOM: (f64, f64) = (0.3, 0.5);

/// A gnuplot script overlaying approximation curves from `table_path` on the
/// exact curve (rows with method `exact`, when present).
pub fn emit_plot_script(table_path: &Path, style: PlotStyle, zoom: (f64, f64)) -> Result<String> {
    let rows = read_csv(table_path)?;
    let has_exact = rows.iter().any(|r| r.method == Method::Exact && !r.failed());
    let panels: Vec<Panel> = match style {
        PlotStyle::Crw => (0..4).map(|order| Panel { method: Method::Crw, order, xrange: None }).collect(),
        PlotStyle::Prw => (1..3).map(|order| Panel { method: Method::Prw, order, xrange: None }).collect(),
        PlotStyle::Markov => {
            let mut p: Vec<Panel> = (1..4).map(|order| Panel { method: Method::Markov, order, xrange: None }).collect();
            p.push(Panel { method: Method::Markov, order: 3, xrange: Some(zoom) });
            p
        }
    };
    let (rows_n, cols_n) = if panels.len() == 2 { (1, 2) } else { (2, 2) };
    let file = table_path.display().to_string().replace('\'', "''");

    let mut s = String::new();
    let _ = writeln!(s, "# generated from {file}");
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set terminal pngcairo size {},{} enhanced", 520 * cols_n, 420 * rows_n);
    let _ = writeln!(s, "set output '{}-{}.png'", file.trim_end_matches(".csv"), style_name(style));
    let _ = writeln!(s, "set key top left");
    let _ = writeln!(s, "set xlabel 'h'");
    let _ = writeln!(s, "set ylabel 'D(h)'");
    let _ = writeln!(s, "sel(m, n) = (strcol(2) eq m && column(3) == n) ? column(4) : 1/0");
    let _ = writeln!(s, "set multiplot layout {rows_n},{cols_n}");
    for (i, panel) in panels.iter().enumerate() {
        let label = (b'a' + i as u8) as char;
        let present = rows.iter().any(|r| r.method == panel.method && r.order == panel.order);
        if !present {
            let _ = writeln!(s, "# no rows for {} order {} in the table", panel.method, panel.order);
        }
        match panel.xrange {
            Some((lo, hi)) => {
                let _ = writeln!(s, "set xrange [{}:{}]", format_number(lo), format_number(hi));
                let _ = writeln!(s, "set title '({label}) {} order {}, magnified'", panel.method, panel.order);
            }
            None => {
                let _ = writeln!(s, "set xrange [0:1]");
                let _ = writeln!(s, "set title '({label}) {} order {}'", panel.method, panel.order);
            }
        }
        let mut plot = format!(
            "plot '{file}' using 1:(sel('{}', {})) with lines lw 2 lc rgb '#c0392b' title '{} {}'",
            panel.method, panel.order, panel.method, panel.order
        );
        if has_exact {
            plot.push_str(&format!(
                ", '' using 1:(sel('exact', 0)) with lines lw 1 lc rgb '#1f3a93' title 'exact'"
            ));
        }
        let _ = writeln!(s, "{plot}");
    }
    let _ = writeln!(s, "unset multiplot");
    Ok(s)
}

fn style_name(style: PlotStyle) -> &'static str {
    match style {
        PlotStyle::Crw => "crw",
        PlotStyle::Prw => "prw",
        PlotStyle::Markov => "markov",
    }
}

/// One line of the Monte Carlo consistency check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McCheckRow {
    pub h: f64,
    pub d_hat: f64,
    pub std_err: f64,
    pub d_exact: f64,
    pub mean_displacement: f64,
    pub mean_displacement_err: f64,
    pub passed: bool,
}

/// Default parameters of the Monte Carlo consistency check.
pub const MC_CHECK_H: [f64; 4] = [0.2, 0.5, 0.8, 1.0];

/// Compares the Monte Carlo estimate with `D_exact` at each `h`; a point passes
/// when both `|D_hat - D_exact|` and the final mean displacement lie within
/// three standard errors.
pub fn mc_check(hs: &[f64], cfg: &SimConfig) -> Result<Vec<McCheckRow>> {
    cfg.validate()?;
    hs.iter()
        .map(|&h| {
            let p = MapParams::new(h)?;
            let s = mc::simulate_msd(&p, cfg)?;
            let d_exact = crw::exact_diffusion(&p, REFERENCE_TOL)?.value;
            let passed = (s.d_hat - d_exact).abs() <= 3.0 * s.std_err
                && s.mean_displacement.abs() <= 3.0 * s.mean_displacement_err.max(f64::MIN_POSITIVE);
            Ok(McCheckRow {
                h,
                d_hat: s.d_hat,
                std_err: s.std_err,
                d_exact,
                mean_displacement: s.mean_displacement,
                mean_displacement_err: s.mean_displacement_err,
                passed,
            })
        })
        .collect()
}
