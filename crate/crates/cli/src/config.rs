//! JSON scenario documents.
//!
//! ```json
//! {
//!   "instance": { "h": [1.0, 0.25], "J": [[1, 2, 0.125]] },
//!   "schedule": { "form": "linear-standard", "a": 10.0 },
//!   "driver": { "kind": "ancilla", "c": -0.5 },
//!   "bath": { "gz": 0.1, "gx": 0.0 },
//!   "run": { "dt": 0.01, "gap_tol": 1e-8, "snapshots": 201, "T": 1000.0 }
//! }
//! ```
//!
//! `J` entries are 1-based `[i, j, value]`. Couplings are either one number
//! applied to every register qubit or a per-qubit list.

use std::path::Path;

use pairanneal::bath::{BathConfig, REFERENCE_CUTOFF, REFERENCE_ETA, REFERENCE_TEMPERATURE};
use pairanneal::model::{AnnealSchedule, Coupling, DriverKind, ProblemInstance, ScheduleForm};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::sweep::SweepSpec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub instance: InstanceSpec,
    #[serde(default)]
    pub schedule: ScheduleSpec,
    pub driver: DriverKind,
    #[serde(default)]
    pub bath: BathSpec,
    #[serde(default)]
    pub run: RunSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub h: Vec<f64>,
    #[serde(rename = "J", default)]
    pub j: Vec<(usize, usize, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    #[serde(default = "default_form")]
    pub form: ScheduleForm,
    /// rad/ns
    #[serde(default = "default_a")]
    pub a: f64,
}

fn default_form() -> ScheduleForm {
    ScheduleForm::LinearStandard
}

fn default_a() -> f64 {
    10.0
}

impl Default for ScheduleSpec {
    fn default() -> Self {
        Self { form: default_form(), a: default_a() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Couplings {
    Uniform(f64),
    PerQubit(Vec<f64>),
}

impl Couplings {
    fn expand(&self, n_qubits: usize, what: &str) -> Result<Vec<f64>> {
        match self {
            Couplings::Uniform(g) => Ok(vec![*g; n_qubits]),
            Couplings::PerQubit(v) if v.len() == n_qubits => Ok(v.clone()),
            Couplings::PerQubit(v) => Err(CliError::Config(format!(
                "bath.{what} lists {} couplings but the register has {n_qubits} qubits",
                v.len()
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathSpec {
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default = "default_cutoff")]
    pub omega_c: f64,
    #[serde(default = "zero_coupling")]
    pub gz: Couplings,
    #[serde(default = "zero_coupling")]
    pub gx: Couplings,
}

fn default_beta() -> f64 {
    1.0 / REFERENCE_TEMPERATURE
}

fn default_eta() -> f64 {
    REFERENCE_ETA
}

fn default_cutoff() -> f64 {
    REFERENCE_CUTOFF
}

fn zero_coupling() -> Couplings {
    Couplings::Uniform(0.0)
}

impl Default for BathSpec {
    fn default() -> Self {
        Self {
            beta: default_beta(),
            eta: default_eta(),
            omega_c: default_cutoff(),
            gz: zero_coupling(),
            gx: zero_coupling(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    /// ns
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_gap_tol")]
    pub gap_tol: f64,
    #[serde(default = "default_snapshots")]
    pub snapshots: usize,
    /// Anneal time, ns.
    #[serde(rename = "T", default = "default_total")]
    pub total_time: f64,
}

fn default_dt() -> f64 {
    pairanneal::propagate::DEFAULT_DT
}

fn default_gap_tol() -> f64 {
    pairanneal::eigen::DEFAULT_GAP_TOL
}

fn default_snapshots() -> usize {
    pairanneal::propagate::DEFAULT_SNAPSHOTS
}

fn default_total() -> f64 {
    1000.0
}

impl Default for RunSpec {
    fn default() -> Self {
        Self {
            dt: default_dt(),
            gap_tol: default_gap_tol(),
            snapshots: default_snapshots(),
            total_time: default_total(),
        }
    }
}

/// Scenario with every component validated and built.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub instance: ProblemInstance,
    pub schedule: AnnealSchedule,
    pub driver: DriverKind,
    pub bath: BathConfig,
    pub dt: f64,
    pub gap_tol: f64,
    pub snapshots: usize,
}

impl Scenario {
    /// Two-variable benchmark, ancilla driver at `c = -1/2`, `gz = 0.1`.
    pub fn reference() -> Self {
        Self {
            instance: InstanceSpec { h: vec![1.0, 0.25], j: vec![(1, 2, 0.125)] },
            schedule: ScheduleSpec::default(),
            driver: DriverKind::Ancilla { c: -0.5 },
            bath: BathSpec { gz: Couplings::Uniform(0.1), ..BathSpec::default() },
            run: RunSpec::default(),
            sweep: None,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn problem_instance(&self) -> Result<ProblemInstance> {
        let couplings = self
            .instance
            .j
            .iter()
            .map(|&(i, j, value)| {
                if i == 0 || j == 0 {
                    return Err(CliError::Config(format!("instance.J indices are 1-based, got ({i}, {j})")));
                }
                Ok(Coupling { i: i - 1, j: j - 1, value })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ProblemInstance::new(self.instance.h.clone(), couplings)?)
    }

    pub fn anneal_schedule(&self) -> Result<AnnealSchedule> {
        Ok(AnnealSchedule::new(self.schedule.a, self.run.total_time, self.schedule.form)?)
    }

    /// Bath on the register of `driver`.
    pub fn bath_for(&self, driver: DriverKind, n_vars: usize) -> Result<BathConfig> {
        let nq = driver.register_qubits(n_vars);
        Ok(BathConfig::new(
            self.bath.beta,
            self.bath.eta,
            self.bath.omega_c,
            self.bath.gz.expand(nq, "gz")?,
            self.bath.gx.expand(nq, "gx")?,
        )?)
    }

    /// Builds every component; the sign of `c` is not checked here.
    pub fn resolve(&self) -> Result<Resolved> {
        let instance = self.problem_instance()?;
        let schedule = self.anneal_schedule()?;
        let bath = self.bath_for(self.driver, instance.n_vars())?;
        let run = &self.run;
        if !(run.dt > 0.0 && run.dt.is_finite()) {
            return Err(CliError::Config(format!("run.dt must be positive, got {}", run.dt)));
        }
        if !(run.gap_tol > 0.0 && run.gap_tol.is_finite()) {
            return Err(CliError::Config(format!("run.gap_tol must be positive, got {}", run.gap_tol)));
        }
        if run.snapshots < 2 {
            return Err(CliError::Config(format!("run.snapshots must be at least 2, got {}", run.snapshots)));
        }
        if let Some(sweep) = &self.sweep {
            sweep.validate()?;
        }
        Ok(Resolved {
            instance,
            schedule,
            driver: self.driver,
            bath,
            dt: run.dt,
            gap_tol: run.gap_tol,
            snapshots: run.snapshots,
        })
    }

    /// Copy with the driver and uniform couplings replaced.
    pub fn with_point(&self, driver: DriverKind, gz: f64, gx: f64) -> Self {
        let mut s = self.clone();
        s.driver = driver;
        s.bath.gz = Couplings::Uniform(gz);
        s.bath.gx = Couplings::Uniform(gx);
        s.sweep = None;
        s
    }
}
