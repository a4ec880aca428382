//! Fixed-step RK4 integration of closed and open dynamics.
//!
//! States are never renormalised; drift is recorded in the per-snapshot
//! monitors and aborts the run once it exceeds the limits below.

use crate::eigen::{hermitian_eigensystem, DEFAULT_GAP_TOL};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::master::{GeneratorFrame, Liouvillian};
use crate::model::{physical_distribution, DensityMatrix, Hamiltonian, StateVector};

pub const DEFAULT_DT: f64 = 0.01;
pub const DEFAULT_SNAPSHOTS: usize = 201;

/// Abort thresholds.
pub const NORM_DRIFT_LIMIT: f64 = 1e-5;
pub const TRACE_DRIFT_LIMIT: f64 = 1e-5;
pub const NEGATIVITY_LIMIT: f64 = -1e-5;

/// Conservation diagnostics at one snapshot.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Monitor {
    pub t: f64,
    /// `|‖ψ‖ - 1|` for pure states, `|Tr ρ - 1|` for density matrices.
    pub norm_deviation: f64,
    pub min_eigenvalue: f64,
    /// Max entrywise `|ρ - ρ†|`.
    pub hermiticity: f64,
}

#[derive(Clone, Debug)]
pub struct Trajectory<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
    pub monitors: Vec<Monitor>,
    /// Step actually used (the requested step shrunk to divide the window).
    pub dt: f64,
}

impl<S> Trajectory<S> {
    pub fn last(&self) -> &S {
        self.states.last().expect("trajectory has at least one snapshot")
    }

    pub fn worst_norm_deviation(&self) -> f64 {
        self.monitors.iter().map(|m| m.norm_deviation).fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.monitors.iter().map(|m| m.min_eigenvalue).fold(f64::INFINITY, f64::min)
    }

    pub fn worst_hermiticity(&self) -> f64 {
        self.monitors.iter().map(|m| m.hermiticity).fold(0.0, f64::max)
    }
}

impl Trajectory<StateVector> {
    /// Physical-bitstring probabilities at every snapshot.
    pub fn physical_probabilities(&self, n_vars: usize) -> Result<Vec<Vec<f64>>> {
        self.states.iter().map(|s| physical_distribution(&s.projector(), n_vars)).collect()
    }
}

impl Trajectory<DensityMatrix> {
    pub fn physical_probabilities(&self, n_vars: usize) -> Result<Vec<Vec<f64>>> {
        self.states.iter().map(|s| physical_distribution(s, n_vars)).collect()
    }
}

/// Uniform step grid over `[0, total]` with snapshot positions.
#[derive(Clone, Debug, PartialEq)]
pub struct StepGrid {
    pub steps: usize,
    pub dt: f64,
    pub total: f64,
    /// Step indices at which snapshots are stored (first 0, last `steps`).
    pub snapshot_steps: Vec<usize>,
}

impl StepGrid {
    pub fn new(total: f64, dt: f64, n_snapshots: usize) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidIntegration(format!("dt must be positive, got {dt}")));
        }
        if !(total >= 0.0 && total.is_finite()) {
            return Err(Error::InvalidIntegration(format!("bad integration window {total}")));
        }
        if n_snapshots < 2 {
            return Err(Error::InvalidIntegration("need at least 2 snapshots".into()));
        }
        let steps = ((total / dt).ceil() as usize).max(n_snapshots - 1);
        let dt = total / steps as f64;
        let intervals = n_snapshots - 1;
        let snapshot_steps = (0..n_snapshots)
            .map(|k| ((k as f64) * steps as f64 / intervals as f64).round() as usize)
            .collect();
        Ok(Self { steps, dt, total, snapshot_steps })
    }

    pub fn time(&self, step: usize) -> f64 {
        if step == self.steps {
            self.total
        } else {
            step as f64 * self.dt
        }
    }
}

fn axpy(y: &[C64], a: f64, x: &[C64]) -> Vec<C64> {
    y.iter().zip(x).map(|(&yi, &xi)| yi + xi * a).collect()
}

/// `-i (H - shift) ψ`
fn schrodinger(h: &ComplexMatrix, shift: f64, psi: &[C64]) -> Vec<C64> {
    h.apply(psi)
        .into_iter()
        .zip(psi)
        .map(|(z, &p)| {
            let z = z - p * shift;
            C64::new(z.im, -z.re)
        })
        .collect()
}

fn pure_monitor(t: f64, psi: &[C64]) -> Monitor {
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    Monitor { t, norm_deviation: (norm - 1.0).abs(), min_eigenvalue: 0.0, hermiticity: 0.0 }
}

/// RK4 on `dψ/dt = -i H(t) ψ` over `[0, total]`.
///
/// Each step runs with `H - ⟨H⟩` (expectation taken at the step start), which
/// only changes the global phase but keeps the absolute energy scale out of
/// the RK4 amplitude error. Stored states are therefore defined up to a
/// global phase.
pub fn integrate_closed<H: Hamiltonian + ?Sized>(
    psi0: &StateVector,
    hamiltonian: &H,
    total: f64,
    dt: f64,
    n_snapshots: usize,
) -> Result<Trajectory<StateVector>> {
    if psi0.0.len() != hamiltonian.dim() {
        return Err(Error::InvalidState(format!(
            "state has {} amplitudes, Hamiltonian dimension is {}",
            psi0.0.len(),
            hamiltonian.dim()
        )));
    }
    if (psi0.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidState(format!("initial state norm {} is not 1", psi0.norm())));
    }
    let grid = StepGrid::new(total, dt, n_snapshots)?;
    let h_dt = grid.dt;
    let mut psi = psi0.0.clone();
    let mut traj = Trajectory { times: vec![], states: vec![], monitors: vec![], dt: h_dt };
    let mut next_snap = 0;
    let mut h_start = hamiltonian.at(0.0);
    for step in 0..=grid.steps {
        let t = grid.time(step);
        while next_snap < grid.snapshot_steps.len() && grid.snapshot_steps[next_snap] == step {
            traj.times.push(t);
            traj.states.push(StateVector(psi.clone()));
            traj.monitors.push(pure_monitor(t, &psi));
            next_snap += 1;
        }
        if step == grid.steps {
            break;
        }
        let h_mid = hamiltonian.at(t + 0.5 * h_dt);
        let h_end = hamiltonian.at(grid.time(step + 1));
        let shift = h_start.expectation(&psi).re / psi.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let k1 = schrodinger(&h_start, shift, &psi);
        let k2 = schrodinger(&h_mid, shift, &axpy(&psi, 0.5 * h_dt, &k1));
        let k3 = schrodinger(&h_mid, shift, &axpy(&psi, 0.5 * h_dt, &k2));
        let k4 = schrodinger(&h_end, shift, &axpy(&psi, h_dt, &k3));
        for i in 0..psi.len() {
            psi[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h_dt / 6.0);
        }
        let drift = (psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() - 1.0).abs();
        if drift > NORM_DRIFT_LIMIT {
            return Err(Error::NormDrift { drift, t: grid.time(step + 1), dt: h_dt });
        }
        h_start = h_end;
    }
    Ok(traj)
}

fn mixed_monitor(t: f64, rho: &ComplexMatrix) -> Result<Monitor> {
    let trace_dev = (rho.trace() - C64::new(1.0, 0.0)).norm();
    let herm = rho.hermiticity_defect();
    let sym = (rho.clone() + rho.adjoint()).scale_real(0.5);
    let min_eig = hermitian_eigensystem(&sym, DEFAULT_GAP_TOL)?.values[0];
    Ok(Monitor { t, norm_deviation: trace_dev, min_eigenvalue: min_eig, hermiticity: herm })
}

fn rk4_open_step(
    rho: &ComplexMatrix,
    start: &GeneratorFrame,
    mid: &GeneratorFrame,
    end: &GeneratorFrame,
    dt: f64,
) -> ComplexMatrix {
    let half = C64::new(0.5 * dt, 0.0);
    let k1 = start.apply(rho);
    let mut tmp = rho.clone();
    tmp.add_scaled(half, &k1);
    let k2 = mid.apply(&tmp);
    let mut tmp = rho.clone();
    tmp.add_scaled(half, &k2);
    let k3 = mid.apply(&tmp);
    let mut tmp = rho.clone();
    tmp.add_scaled(C64::new(dt, 0.0), &k3);
    let k4 = end.apply(&tmp);
    let mut out = rho.clone();
    out.add_scaled(C64::new(dt / 6.0, 0.0), &k1);
    out.add_scaled(C64::new(dt / 3.0, 0.0), &k2);
    out.add_scaled(C64::new(dt / 3.0, 0.0), &k3);
    out.add_scaled(C64::new(dt / 6.0, 0.0), &k4);
    out
}

/// RK4 on the Lindblad generator over `[0, total]`.
pub fn integrate_open<H: Hamiltonian>(
    rho0: &DensityMatrix,
    generator: &Liouvillian<H>,
    total: f64,
    dt: f64,
    n_snapshots: usize,
) -> Result<Trajectory<DensityMatrix>> {
    crate::master::check_state(rho0, generator.dim())?;
    let grid = StepGrid::new(total, dt, n_snapshots)?;
    let h_dt = grid.dt;
    let mut rho = rho0.clone();
    let mut traj = Trajectory { times: vec![], states: vec![], monitors: vec![], dt: h_dt };
    let mut next_snap = 0;
    let mut start = generator.frame(0.0)?;
    for step in 0..=grid.steps {
        let t = grid.time(step);
        while next_snap < grid.snapshot_steps.len() && grid.snapshot_steps[next_snap] == step {
            let m = mixed_monitor(t, &rho)?;
            if m.norm_deviation > TRACE_DRIFT_LIMIT || m.min_eigenvalue < NEGATIVITY_LIMIT {
                return Err(Error::StateViolation {
                    t,
                    trace_dev: m.norm_deviation,
                    min_eig: m.min_eigenvalue,
                    dt: h_dt,
                });
            }
            traj.times.push(t);
            traj.states.push(rho.clone());
            traj.monitors.push(m);
            next_snap += 1;
        }
        if step == grid.steps {
            break;
        }
        let mid = generator.frame(t + 0.5 * h_dt)?;
        let end = generator.frame(grid.time(step + 1))?;
        rho = rk4_open_step(&rho, &start, &mid, &end, h_dt);
        start = end;
    }
    Ok(traj)
}

/// Largest difference between two probability series sampled on the same
/// snapshot grid.
pub fn max_discrepancy(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    assert_eq!(a.len(), b.len(), "snapshot counts differ");
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs()))
        .fold(0.0, f64::max)
}

/// Runs `probabilities(dt)` and `probabilities(dt / 2)` and returns the
/// largest bitstring-probability discrepancy over snapshots.
pub fn convergence_check<F>(dt: f64, mut probabilities: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<Vec<Vec<f64>>>,
{
    let coarse = probabilities(dt)?;
    let fine = probabilities(0.5 * dt)?;
    Ok(max_discrepancy(&coarse, &fine))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::BathConfig;
    use crate::linalg::Axis;
    use crate::master::CouplingChannel;

    fn plus() -> StateVector {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        StateVector(vec![C64::new(r, 0.0), C64::new(r, 0.0)])
    }

    #[test]
    fn grid_hits_endpoints() {
        let g = StepGrid::new(1000.0, 0.01, 201).unwrap();
        assert_eq!(g.steps, 100_000);
        assert_eq!(g.snapshot_steps[0], 0);
        assert_eq!(*g.snapshot_steps.last().unwrap(), 100_000);
        assert_eq!(g.time(g.steps), 1000.0);
        let small = StepGrid::new(1.0, 0.5, 11).unwrap();
        assert_eq!(small.steps, 10);
        assert!(StepGrid::new(1.0, 0.0, 5).is_err());
        assert!(StepGrid::new(1.0, 0.1, 1).is_err());
    }

    #[test]
    fn larmor_precession() {
        // H = σz, |+⟩: ⟨σx⟩(t) = cos 2t
        let h = ComplexMatrix::pauli(Axis::Z);
        let total = std::f64::consts::FRAC_PI_2;
        let traj = integrate_closed(&plus(), &h, total, 0.001, 11).unwrap();
        let sx = ComplexMatrix::pauli(Axis::X);
        for (t, s) in traj.times.iter().zip(&traj.states) {
            let ex = sx.expectation(s.amplitudes()).re;
            assert!((ex - (2.0 * t).cos()).abs() < 1e-8, "t = {t}");
            let p = s.probabilities();
            assert!((p[0] - 0.5).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_hamiltonian_is_identity() {
        let h = ComplexMatrix::zeros(2);
        let traj = integrate_closed(&plus(), &h, 5.0, 0.1, 3).unwrap();
        assert_eq!(traj.last(), &plus());
    }

    #[test]
    fn closed_rejects_bad_inputs() {
        let h = ComplexMatrix::zeros(4);
        assert!(integrate_closed(&plus(), &h, 1.0, 0.1, 3).is_err());
        let unnormalised = StateVector(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]);
        assert!(integrate_closed(&unnormalised, &ComplexMatrix::zeros(2), 1.0, 0.1, 3).is_err());
    }

    #[test]
    fn closed_aborts_on_norm_drift() {
        // dt·‖H‖ = 5 is far outside the RK4 stability region
        let h = ComplexMatrix::pauli(Axis::Z).scale_real(50.0);
        let err = integrate_closed(&plus(), &h, 10.0, 0.1, 3).unwrap_err();
        assert!(matches!(err, Error::NormDrift { .. }));
    }

    #[test]
    fn pure_dephasing_of_a_single_qubit() {
        let omega = 1.3;
        let h = ComplexMatrix::from_diagonal(&[omega / 2.0, -omega / 2.0]);
        let bath = BathConfig::uniform(1, 0.3, 0.0).unwrap();
        let l = Liouvillian::new(
            h,
            vec![CouplingChannel { axis: Axis::Z, operator: ComplexMatrix::pauli(Axis::Z).scale_real(0.3) }],
            bath.spectrum(),
            DEFAULT_GAP_TOL,
        )
        .unwrap();
        let rho0 = plus().projector();
        let traj = integrate_open(&rho0, &l, 20.0, 0.01, 21).unwrap();
        // dephasing rate: A = g σz in the ω = 0 bin, coherence decays as exp(-2 γ(0) g² t)
        let rate = 2.0 * bath.gamma(0.0) * 0.09;
        let mut prev = f64::INFINITY;
        for (t, rho) in traj.times.iter().zip(&traj.states) {
            assert!((rho[(0, 0)].re - 0.5).abs() < 1e-12);
            let coh = rho[(0, 1)].norm();
            assert!(coh <= prev + 1e-15);
            assert!((coh - 0.5 * (-rate * t).exp()).abs() < 1e-9, "t = {t}");
            prev = coh;
        }
    }

    #[test]
    fn open_matches_closed_without_coupling() {
        use crate::model::{initial_state, AnnealSchedule, AnnealingHamiltonian, DriverKind, ProblemInstance};
        let sched = AnnealSchedule::standard(10.0, 20.0).unwrap();
        let inst = ProblemInstance::benchmark();
        let driver = DriverKind::Conventional;
        let bath = BathConfig::uniform(2, 0.0, 0.0).unwrap();
        let l = Liouvillian::full(sched, &inst, driver, &bath, DEFAULT_GAP_TOL).unwrap();
        let psi0 = initial_state(driver, 2).unwrap();
        let open = integrate_open(&psi0.projector(), &l, 20.0, 0.01, 11).unwrap();
        let ham = AnnealingHamiltonian::new(sched, &inst, driver).unwrap();
        let closed = integrate_closed(&psi0, &ham, 20.0, 0.01, 11).unwrap();
        for (r, s) in open.states.iter().zip(&closed.states) {
            assert!(r.max_abs_diff(&s.projector()) < 1e-8);
        }
    }

    #[test]
    fn convergence_of_trivial_run_is_exact() {
        let h = ComplexMatrix::zeros(2);
        let d = convergence_check(0.1, |dt| {
            integrate_closed(&plus(), &h, 1.0, dt, 5).map(|t| t.states.iter().map(|s| s.probabilities()).collect())
        })
        .unwrap();
        assert_eq!(d, 0.0);
    }
}
