//! Subcommand bodies. Each returns what goes to stdout and the exit code;
//! files go to the output directory when one is given.

use std::path::{Path, PathBuf};

use pairanneal::model::{bits_to_string, DriverKind};
use pairanneal::verify::{run_suite, SuiteConfig};
use serde::Serialize;

use crate::config::Scenario;
use crate::error::{CliError, Result};
use crate::experiment::{convergence, simulate, spectrum, RunRecord};
use crate::output::{csv_string, heatmap, line_plot, num, opt, write_file};
use crate::sweep::{run_sweep, SweepResult, SweepSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug)]
pub struct Options {
    pub out: Option<PathBuf>,
    pub parallel: usize,
    pub format: Format,
}

impl Default for Options {
    fn default() -> Self {
        Self { out: None, parallel: 1, format: Format::Csv }
    }
}

pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

fn out_dir(opts: &Options) -> Result<Option<&Path>> {
    match &opts.out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            Ok(Some(dir.as_path()))
        }
        None => Ok(None),
    }
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable output");
    s.push('\n');
    s
}

pub fn cmd_spectrum(s: &Scenario, points: usize, opts: &Options) -> Result<Outcome> {
    let r = s.resolve()?;
    let table = spectrum(&r, points)?;
    let text = match opts.format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = table.rows.iter().map(|row| row.iter().map(|&x| num(x)).collect()).collect();
            csv_string(&table.header, &rows)
        }
        Format::Json => json(&serde_json::json!({ "columns": table.header, "rows": table.rows })),
    };
    if let Some(dir) = out_dir(opts)? {
        let ext = if opts.format == Format::Csv { "csv" } else { "json" };
        write_file(&dir.join(format!("spectrum.{ext}")), &text)?;
        let ts: Vec<f64> = table.rows.iter().map(|r| r[0]).collect();
        let series: Vec<(String, Vec<f64>)> = (1..table.header.len())
            .map(|k| (table.header[k].clone(), table.rows.iter().map(|r| r[k]).collect()))
            .collect();
        let svg = line_plot("Instantaneous spectrum", "t (ns)", "energy (rad/ns)", &ts, &series);
        write_file(&dir.join("spectrum.svg"), &svg)?;
    }
    Ok(Outcome { stdout: text, code: 0 })
}

fn run_header(n_vars: usize) -> Vec<String> {
    let mut h: Vec<String> = [
        "driver",
        "c",
        "ground_bits",
        "p_ground",
        "max_trace_deviation",
        "min_eigenvalue",
        "max_hermiticity",
        "min_gap",
        "adiabaticity",
        "dt",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    h.extend((0..1usize << n_vars).map(|k| format!("p_{}", bits_to_string(&pairanneal::model::index_bits(k, n_vars)))));
    h
}

fn run_row(rec: &RunRecord) -> Vec<String> {
    let mut row = vec![
        rec.driver.clone(),
        opt(rec.c),
        rec.ground_bits.clone(),
        num(rec.p_ground),
        num(rec.max_trace_deviation),
        num(rec.min_eigenvalue),
        num(rec.max_hermiticity),
        num(rec.min_gap),
        num(rec.adiabaticity),
        num(rec.dt),
    ];
    row.extend(rec.distribution.iter().map(|&p| num(p)));
    row
}

pub fn cmd_run(s: &Scenario, opts: &Options) -> Result<Outcome> {
    let r = s.resolve()?;
    let n = r.instance.n_vars();
    let (rec, traj) = simulate(&r)?;
    let text = match opts.format {
        Format::Csv => csv_string(&run_header(n), &[run_row(&rec)]),
        Format::Json => json(&rec),
    };
    if let Some(dir) = out_dir(opts)? {
        let ext = if opts.format == Format::Csv { "csv" } else { "json" };
        write_file(&dir.join(format!("run.{ext}")), &text)?;
        let probs = traj.physical_probabilities(n)?;
        let labels: Vec<String> =
            (0..1usize << n).map(|k| bits_to_string(&pairanneal::model::index_bits(k, n))).collect();
        let mut header = vec!["t".to_string()];
        header.extend(labels.iter().map(|l| format!("p_{l}")));
        header.extend(["trace_deviation", "min_eigenvalue", "hermiticity"].map(String::from));
        let rows: Vec<Vec<String>> = traj
            .times
            .iter()
            .zip(&probs)
            .zip(&traj.monitors)
            .map(|((&t, p), m)| {
                let mut row = vec![num(t)];
                row.extend(p.iter().map(|&x| num(x)));
                row.extend([num(m.norm_deviation), num(m.min_eigenvalue), num(m.hermiticity)]);
                row
            })
            .collect();
        write_file(&dir.join("run_series.csv"), &csv_string(&header, &rows))?;
        let series: Vec<(String, Vec<f64>)> =
            labels.iter().enumerate().map(|(k, l)| (l.clone(), probs.iter().map(|p| p[k]).collect())).collect();
        let svg = line_plot("Bitstring probabilities", "t (ns)", "probability", &traj.times, &series);
        write_file(&dir.join("run_series.svg"), &svg)?;
    }
    Ok(Outcome { stdout: text, code: 0 })
}

fn sweep_table(res: &SweepResult) -> (Vec<String>, Vec<Vec<String>>) {
    let header: Vec<String> =
        ["c", "gz", "gx", "g", "theta", "p_ancilla", "p_conventional", "difference", "status"]
            .iter()
            .map(|s| s.to_string())
            .collect();
    let rows = res
        .rows
        .iter()
        .map(|r| {
            vec![
                num(r.point.c),
                num(r.point.gz),
                num(r.point.gx),
                num(r.point.g()),
                num(r.point.theta()),
                opt(r.p_ancilla),
                opt(r.p_conventional),
                opt(r.difference),
                r.status.clone(),
            ]
        })
        .collect();
    (header, rows)
}

pub fn cmd_sweep(s: &Scenario, spec: &SweepSpec, opts: &Options) -> Result<Outcome> {
    let dir = out_dir(opts)?;
    let res = run_sweep(s, spec, dir, opts.parallel)?;
    let (header, rows) = sweep_table(&res);
    let text = match opts.format {
        Format::Csv => csv_string(&header, &rows),
        Format::Json => json(&res.rows),
    };
    if let Some(dir) = dir {
        let ext = if opts.format == Format::Csv { "csv" } else { "json" };
        write_file(&dir.join(format!("sweep.{ext}")), &text)?;
        let xs = spec.axis1.values();
        let ys = spec.axis2.values();
        let cell = |f: &dyn Fn(&crate::sweep::SweepRow) -> Option<f64>| -> Vec<Vec<Option<f64>>> {
            let mut grid = vec![vec![None; ys.len()]; xs.len()];
            for r in &res.rows {
                grid[r.i1][r.i2] = f(r);
            }
            grid
        };
        let (xl, yl) = (spec.axis1.param.name(), spec.axis2.param.name());
        let diff = heatmap("P(ancilla) - P(conventional)", xl, yl, &xs, &ys, &cell(&|r| r.difference));
        write_file(&dir.join("sweep_difference.svg"), &diff)?;
        let pa = heatmap("P(ancilla)", xl, yl, &xs, &ys, &cell(&|r| r.p_ancilla));
        write_file(&dir.join("sweep_ancilla.svg"), &pa)?;
    }
    let code = if res.failures > 0 { 3 } else { 0 };
    Ok(Outcome { stdout: text, code })
}

pub fn cmd_verify(s: &Scenario, quick: bool, opts: &Options) -> Result<Outcome> {
    let c = match s.driver {
        DriverKind::Ancilla { c } => c,
        DriverKind::Conventional => -0.5,
    };
    let cfg = SuiteConfig {
        schedule: s.anneal_schedule()?,
        instance: s.problem_instance()?,
        c,
        integrator_checks: !quick,
        oracle_dt: s.run.dt,
        ..SuiteConfig::reference()
    };
    let report = run_suite(&cfg);
    let text = json(&report);
    if let Some(dir) = out_dir(opts)? {
        write_file(&dir.join("verify.json"), &text)?;
    }
    Ok(Outcome { stdout: text, code: if report.passed { 0 } else { 1 } })
}

#[derive(Serialize)]
struct ConvergenceReport {
    mode: &'static str,
    dt: f64,
    half_dt: f64,
    discrepancy: f64,
    tolerance: f64,
    passed: bool,
}

pub fn cmd_convergence(s: &Scenario, closed: bool, tol: Option<f64>, opts: &Options) -> Result<Outcome> {
    let r = s.resolve()?;
    let discrepancy = convergence(&r, closed)?;
    let tolerance = tol.unwrap_or(if closed { 1e-7 } else { 1e-5 });
    let rep = ConvergenceReport {
        mode: if closed { "closed" } else { "open" },
        dt: r.dt,
        half_dt: 0.5 * r.dt,
        discrepancy,
        tolerance,
        passed: discrepancy < tolerance,
    };
    let text = match opts.format {
        Format::Csv => csv_string(
            &["mode", "dt", "half_dt", "discrepancy", "tolerance", "passed"].map(String::from),
            &[vec![
                rep.mode.into(),
                num(rep.dt),
                num(rep.half_dt),
                num(rep.discrepancy),
                num(rep.tolerance),
                rep.passed.to_string(),
            ]],
        ),
        Format::Json => json(&rep),
    };
    if let Some(dir) = out_dir(opts)? {
        let ext = if opts.format == Format::Csv { "csv" } else { "json" };
        write_file(&dir.join(format!("convergence.{ext}")), &text)?;
    }
    Ok(Outcome { stdout: text, code: if rep.passed { 0 } else { 1 } })
}
