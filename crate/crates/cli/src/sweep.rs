//! Two-axis parameter sweeps comparing the ancilla and conventional drivers.
//!
//! Every grid point needs one ancilla run; conventional runs do not depend
//! on `c` and are shared between points with equal couplings. Each finished
//! run is stored as its own JSON file so an interrupted sweep picks up where
//! it stopped.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use pairanneal::model::DriverKind;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Scenario;
use crate::error::{CliError, Result};
use crate::experiment::{simulate, RunRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    C,
    Gz,
    Gx,
    Theta,
    G,
}

impl Param {
    pub fn name(self) -> &'static str {
        match self {
            Param::C => "c",
            Param::Gz => "gz",
            Param::Gx => "gx",
            Param::Theta => "theta",
            Param::G => "g",
        }
    }

    /// Default range for this parameter.
    pub fn default_axis(self) -> Axis {
        let (start, stop, points) = match self {
            Param::C => (-2.0, -0.1, 20),
            Param::Gz => (0.0, 0.2, 11),
            Param::Gx => (0.0, 0.1, 11),
            Param::Theta => (0.0, FRAC_PI_2, 11),
            Param::G => (0.0, 0.2, 11),
        };
        Axis { param: self, start, stop, points }
    }

    fn polar(self) -> bool {
        matches!(self, Param::Theta | Param::G)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub param: Param,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.points - 1) as f64;
        (0..self.points)
            .map(|k| if k == self.points - 1 { self.stop } else { self.start + step * k as f64 })
            .collect()
    }

    fn validate(&self) -> Result<()> {
        let name = self.param.name();
        if self.points == 0 {
            return Err(CliError::Config(format!("sweep axis {name} needs at least one point")));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(CliError::Config(format!("sweep axis {name} has a non-finite bound")));
        }
        let (lo, hi) = (self.start.min(self.stop), self.start.max(self.stop));
        match self.param {
            Param::Theta if lo < 0.0 || hi > FRAC_PI_2 => {
                Err(CliError::Config(format!("theta must lie in [0, pi/2], got [{lo}, {hi}]")))
            }
            Param::G if lo < 0.0 => Err(CliError::Config(format!("g must be nonnegative, got {lo}"))),
            Param::C if hi >= 0.0 => Err(CliError::Config(format!("c must be negative, got {hi}"))),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis1: Axis,
    pub axis2: Axis,
}

impl SweepSpec {
    pub fn new(p1: Param, p2: Param) -> Self {
        Self { axis1: p1.default_axis(), axis2: p2.default_axis() }
    }

    /// Named axis pairs: `longitudinal` (c × gz), `angle` (theta × g) and
    /// `transversal` (c × gx).
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "longitudinal" => Ok(Self::new(Param::C, Param::Gz)),
            "angle" => Ok(Self::new(Param::Theta, Param::G)),
            "transversal" => Ok(Self::new(Param::C, Param::Gx)),
            other => Err(CliError::Config(format!(
                "unknown sweep preset {other:?} (expected longitudinal, angle or transversal)"
            ))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.axis1.validate()?;
        self.axis2.validate()?;
        let (a, b) = (self.axis1.param, self.axis2.param);
        if a == b {
            return Err(CliError::Config(format!("both sweep axes are {}", a.name())));
        }
        let cartesian = |p: Param| matches!(p, Param::Gz | Param::Gx);
        if (a.polar() && cartesian(b)) || (b.polar() && cartesian(a)) {
            return Err(CliError::Config(
                "cannot sweep theta or g together with gz or gx".into(),
            ));
        }
        Ok(())
    }
}

/// Parameters of one grid point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub c: f64,
    pub gz: f64,
    pub gx: f64,
}

impl Point {
    pub fn g(&self) -> f64 {
        self.gz.hypot(self.gx)
    }

    pub fn theta(&self) -> f64 {
        self.gx.atan2(self.gz)
    }
}

/// Baseline `c`, `gz`, `gx` taken from a template scenario. Couplings must
/// be uniform.
pub fn baseline(template: &Scenario) -> Result<Point> {
    use crate::config::Couplings;
    let c = match template.driver {
        DriverKind::Ancilla { c } => c,
        DriverKind::Conventional => -0.5,
    };
    let uniform = |g: &Couplings, what: &str| match g {
        Couplings::Uniform(v) => Ok(*v),
        Couplings::PerQubit(_) => Err(CliError::Config(format!("sweeps need a uniform bath.{what}"))),
    };
    Ok(Point { c, gz: uniform(&template.bath.gz, "gz")?, gx: uniform(&template.bath.gx, "gx")? })
}

/// Grid in row-major order: axis 1 outer, axis 2 inner.
pub fn grid(spec: &SweepSpec, base: Point) -> Vec<(usize, usize, Point)> {
    let (v1, v2) = (spec.axis1.values(), spec.axis2.values());
    let mut out = Vec::with_capacity(v1.len() * v2.len());
    for (i, &x) in v1.iter().enumerate() {
        for (j, &y) in v2.iter().enumerate() {
            let mut p = base;
            let (mut g, mut theta) = (base.g(), base.theta());
            let mut polar = false;
            for (param, v) in [(spec.axis1.param, x), (spec.axis2.param, y)] {
                match param {
                    Param::C => p.c = v,
                    Param::Gz => p.gz = v,
                    Param::Gx => p.gx = v,
                    Param::G => {
                        g = v;
                        polar = true;
                    }
                    Param::Theta => {
                        theta = v;
                        polar = true;
                    }
                }
            }
            if polar {
                p.gz = g * theta.cos();
                p.gx = g * theta.sin();
                // cos(pi/2) is not exactly zero
                if theta == FRAC_PI_2 {
                    p.gz = 0.0;
                }
            }
            out.push((i, j, p));
        }
    }
    out
}

/// One simulation needed by the sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Job {
    Ancilla(Point),
    Conventional { gz: f64, gx: f64 },
}

impl Job {
    /// Stable file-name key built from the exact parameter values.
    fn key(&self) -> String {
        match *self {
            Job::Ancilla(p) => format!("ancilla_c{:e}_gz{:e}_gx{:e}", p.c, p.gz, p.gx),
            Job::Conventional { gz, gx } => format!("conventional_gz{gz:e}_gx{gx:e}"),
        }
    }

    fn scenario(&self, template: &Scenario) -> Scenario {
        match *self {
            Job::Ancilla(p) => template.with_point(DriverKind::Ancilla { c: p.c }, p.gz, p.gx),
            Job::Conventional { gz, gx } => template.with_point(DriverKind::Conventional, gz, gx),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub i1: usize,
    pub i2: usize,
    pub point: Point,
    pub p_ancilla: Option<f64>,
    pub p_conventional: Option<f64>,
    pub difference: Option<f64>,
    /// `ok` or the failure message.
    pub status: String,
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
    /// Worst monitors over every successful run.
    pub max_trace_deviation: f64,
    pub min_eigenvalue: f64,
    pub max_hermiticity: f64,
    pub failures: usize,
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    template: Scenario,
    spec: SweepSpec,
}

fn cache_path(dir: &Path, job: &Job) -> PathBuf {
    dir.join(format!("{}.json", job.key()))
}

fn run_job(job: &Job, template: &Scenario, cache: Option<&Path>) -> Result<RunRecord, String> {
    if let Some(dir) = cache {
        if let Ok(text) = std::fs::read_to_string(cache_path(dir, job)) {
            if let Ok(rec) = serde_json::from_str::<RunRecord>(&text) {
                return Ok(rec);
            }
        }
    }
    let scenario = job.scenario(template);
    let resolved = scenario.resolve().map_err(|e| e.to_string())?;
    let (rec, _) = simulate(&resolved).map_err(|e| e.to_string())?;
    if let Some(dir) = cache {
        let text = serde_json::to_string_pretty(&rec).expect("record serializes");
        // a failed write only costs a rerun
        let _ = std::fs::write(cache_path(dir, job), text);
    }
    Ok(rec)
}

/// Runs the sweep on a pool of `parallel` workers. With `out`, finished
/// runs are stored under `out/points` and reused on the next call.
pub fn run_sweep(template: &Scenario, spec: &SweepSpec, out: Option<&Path>, parallel: usize) -> Result<SweepResult> {
    spec.validate()?;
    template.resolve()?;
    let base = baseline(template)?;
    let points = grid(spec, base);
    for (_, _, p) in &points {
        if p.c >= 0.0 {
            return Err(CliError::Config(format!("sweep point has c = {} (must be negative)", p.c)));
        }
    }

    let cache = match out {
        Some(dir) => {
            let points_dir = dir.join("points");
            std::fs::create_dir_all(&points_dir).map_err(|e| CliError::io(&points_dir, e))?;
            let manifest_path = dir.join("sweep_manifest.json");
            let manifest = Manifest { template: Scenario { sweep: None, ..template.clone() }, spec: spec.clone() };
            let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
            match std::fs::read_to_string(&manifest_path) {
                Ok(existing) if existing != text => {
                    return Err(CliError::Config(format!(
                        "{} belongs to a different sweep; use a fresh output directory",
                        dir.display()
                    )));
                }
                Ok(_) => {}
                Err(_) => std::fs::write(&manifest_path, text).map_err(|e| CliError::io(&manifest_path, e))?,
            }
            Some(points_dir)
        }
        None => None,
    };

    let mut jobs: BTreeMap<String, Job> = BTreeMap::new();
    for (_, _, p) in &points {
        for job in [Job::Ancilla(*p), Job::Conventional { gz: p.gz, gx: p.gx }] {
            jobs.entry(job.key()).or_insert(job);
        }
    }
    let jobs: Vec<(String, Job)> = jobs.into_iter().collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallel.max(1))
        .build()
        .map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
    let results: BTreeMap<String, Result<RunRecord, String>> = pool.install(|| {
        jobs.par_iter()
            .map(|(key, job)| (key.clone(), run_job(job, template, cache.as_deref())))
            .collect::<Vec<_>>()
            .into_iter()
            .collect()
    });

    let mut rows = Vec::with_capacity(points.len());
    for (i1, i2, p) in points {
        let anc = &results[&Job::Ancilla(p).key()];
        let conv = &results[&Job::Conventional { gz: p.gz, gx: p.gx }.key()];
        let pa = anc.as_ref().ok().map(|r| r.p_ground);
        let pc = conv.as_ref().ok().map(|r| r.p_ground);
        let status = match (anc, conv) {
            (Ok(_), Ok(_)) => "ok".to_string(),
            (Err(e), _) => format!("ancilla: {e}"),
            (_, Err(e)) => format!("conventional: {e}"),
        };
        rows.push(SweepRow {
            i1,
            i2,
            point: p,
            p_ancilla: pa,
            p_conventional: pc,
            difference: pa.zip(pc).map(|(a, c)| a - c),
            status,
        });
    }
    let ok: Vec<&RunRecord> = results.values().filter_map(|r| r.as_ref().ok()).collect();
    Ok(SweepResult {
        spec: spec.clone(),
        failures: rows.iter().filter(|r| r.status != "ok").count(),
        max_trace_deviation: ok.iter().map(|r| r.max_trace_deviation).fold(0.0, f64::max),
        min_eigenvalue: ok.iter().map(|r| r.min_eigenvalue).fold(f64::INFINITY, f64::min),
        max_hermiticity: ok.iter().map(|r| r.max_hermiticity).fold(0.0, f64::max),
        rows,
    })
}
