//! Single-scenario experiments: one annealing run, a spectrum table and a
//! step-size convergence check.

use pairanneal::eigen::{hermitian_eigensystem, DEFAULT_GAP_TOL};
use pairanneal::master::Liouvillian;
use pairanneal::model::{
    bits_to_string, ground_state, AnnealingHamiltonian, DensityMatrix, DriverKind, Hamiltonian,
    SectorLabel,
};
use pairanneal::propagate::{convergence_check, integrate_closed, integrate_open, Trajectory};
use serde::{Deserialize, Serialize};

use crate::config::Resolved;
use crate::error::{CliError, Result};

/// Summary of one open-system anneal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub driver: String,
    pub c: Option<f64>,
    pub ground_bits: String,
    /// Probability of reading the problem ground state at `T`.
    pub p_ground: f64,
    /// Physical-register distribution at `T`, big-endian bit order.
    pub distribution: Vec<f64>,
    pub max_trace_deviation: f64,
    pub min_eigenvalue: f64,
    pub max_hermiticity: f64,
    /// Smallest gap above the ground level over the anneal, in the sector
    /// the state lives in for the ancilla driver.
    pub min_gap: f64,
    /// `min_gap × T`.
    pub adiabaticity: f64,
    pub dt: f64,
}

/// Hamiltonian whose ground-state gap controls adiabaticity: `H̃_1` for the
/// ancilla driver, the full `H` otherwise.
fn relevant_hamiltonian(r: &Resolved) -> Result<AnnealingHamiltonian> {
    Ok(match r.driver {
        DriverKind::Ancilla { c } => AnnealingHamiltonian::sector(
            r.schedule,
            &r.instance,
            c,
            &SectorLabel::all_ones(r.instance.n_vars()),
        )?,
        DriverKind::Conventional => AnnealingHamiltonian::new(r.schedule, &r.instance, r.driver)?,
    })
}

/// Minimum ground gap over `samples` evenly spaced times.
pub fn min_gap(r: &Resolved, samples: usize) -> Result<f64> {
    let h = relevant_hamiltonian(r)?;
    let total = r.schedule.total_time;
    let mut worst = f64::INFINITY;
    for k in 0..samples {
        let t = total * k as f64 / (samples - 1).max(1) as f64;
        worst = worst.min(hermitian_eigensystem(&h.at(t), DEFAULT_GAP_TOL)?.ground_gap());
    }
    Ok(worst)
}

/// Open-system run from the ground state of `H(0)`.
pub fn simulate(r: &Resolved) -> Result<(RunRecord, Trajectory<DensityMatrix>)> {
    r.driver.validate()?;
    r.schedule.check_ordering()?;
    let ground = r
        .instance
        .ground_bits()
        .ok_or_else(|| CliError::Config("problem instance has a degenerate ground state".into()))?;
    let generator = Liouvillian::full(r.schedule, &r.instance, r.driver, &r.bath, r.gap_tol)?;
    let rho0 = ground_state(&generator.hamiltonian().at(0.0))?.projector();
    let traj = integrate_open(&rho0, &generator, r.schedule.total_time, r.dt, r.snapshots)?;
    let rho = traj.last();
    let n = r.instance.n_vars();
    let distribution = pairanneal::model::physical_distribution(rho, n)?;
    let p_ground = pairanneal::model::physical_marginal(rho, &ground)?;
    let gap = min_gap(r, 1001)?;
    let record = RunRecord {
        driver: r.driver.name().into(),
        c: match r.driver {
            DriverKind::Ancilla { c } => Some(c),
            DriverKind::Conventional => None,
        },
        ground_bits: bits_to_string(&ground),
        p_ground,
        distribution,
        max_trace_deviation: traj.worst_norm_deviation(),
        min_eigenvalue: traj.min_eigenvalue(),
        max_hermiticity: traj.worst_hermiticity(),
        min_gap: gap,
        adiabaticity: gap * r.schedule.total_time,
        dt: traj.dt,
    };
    Ok((record, traj))
}

/// Sorted eigenvalues of `H(t)` and, for the ancilla driver, of `H̃_1(t)`.
pub struct SpectrumTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn spectrum(r: &Resolved, points: usize) -> Result<SpectrumTable> {
    if points < 2 {
        return Err(CliError::Config(format!("need at least 2 time points, got {points}")));
    }
    let full = AnnealingHamiltonian::new(r.schedule, &r.instance, r.driver)?;
    let sector = match r.driver {
        DriverKind::Ancilla { .. } => Some(relevant_hamiltonian(r)?),
        DriverKind::Conventional => None,
    };
    let mut header = vec!["t".to_string()];
    header.extend((0..full.dim()).map(|k| format!("full_{k}")));
    if let Some(s) = &sector {
        header.extend((0..s.dim()).map(|k| format!("sector_{k}")));
    }
    let total = r.schedule.total_time;
    let mut rows = Vec::with_capacity(points);
    for k in 0..points {
        let t = if k == points - 1 { total } else { total * k as f64 / (points - 1) as f64 };
        let mut row = vec![t];
        row.extend(hermitian_eigensystem(&full.at(t), DEFAULT_GAP_TOL)?.values);
        if let Some(s) = &sector {
            row.extend(hermitian_eigensystem(&s.at(t), DEFAULT_GAP_TOL)?.values);
        }
        rows.push(row);
    }
    Ok(SpectrumTable { header, rows })
}

/// Bitstring-probability discrepancy between `dt` and `dt/2`.
pub fn convergence(r: &Resolved, closed: bool) -> Result<f64> {
    r.driver.validate()?;
    let n = r.instance.n_vars();
    let total = r.schedule.total_time;
    let generator = Liouvillian::full(r.schedule, &r.instance, r.driver, &r.bath, r.gap_tol)?;
    let psi0 = ground_state(&generator.hamiltonian().at(0.0))?;
    let value = if closed {
        convergence_check(r.dt, |dt| {
            integrate_closed(&psi0, generator.hamiltonian(), total, dt, r.snapshots)?.physical_probabilities(n)
        })?
    } else {
        let rho0 = psi0.projector();
        convergence_check(r.dt, |dt| {
            integrate_open(&rho0, &generator, total, dt, r.snapshots)?.physical_probabilities(n)
        })?
    };
    Ok(value)
}
