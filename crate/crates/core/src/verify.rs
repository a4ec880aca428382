//! Brute-force checks of the structural identities behind the ancilla-pair
//! construction, plus two integrator cross-checks.
//!
//! Structural thresholds are fixed: the identities are exact algebra and
//! should hold to roundoff.

use serde::Serialize;

use crate::bath::{weighted_sum, BathConfig, OhmicSpectrum};
use crate::eigen::{hermitian_eigensystem, DEFAULT_GAP_TOL};
use crate::error::{Error, Result};
use crate::linalg::{kron, pauli_on, pauli_string, Axis, ComplexMatrix, C64};
use crate::model::{
    ancilla_index, ancillas_first_permutation, assemble_block_diagonal, block_hamiltonian,
    build_w, ground_state, pair_cnot, physical_index, problem_hamiltonian, AnnealSchedule,
    AnnealingHamiltonian, DriverKind, Hamiltonian, Placement, ProblemInstance, SectorLabel,
    StateVector,
};
use crate::propagate::integrate_closed;

pub const SYMMETRY_TOL: f64 = 1e-12;
pub const BLOCK_TOL: f64 = 1e-12;
pub const EMBEDDING_TOL: f64 = 1e-9;
pub const CANCELLATION_TOL: f64 = 1e-12;
pub const EXACT_TOL: f64 = 1e-14;
pub const RATE_TOL: f64 = 1e-12;
pub const INITIAL_STATE_TOL: f64 = 1e-9;
pub const ORACLE_AGREEMENT_TOL: f64 = 1e-4;
pub const ORDER_WINDOW: (f64, f64) = (3.5, 4.5);

/// `n` evenly spaced times on `[0, T]`, endpoints included.
pub fn sample_times(sched: &AnnealSchedule, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![0.0],
        _ => (0..n)
            .map(|k| if k == n - 1 { sched.total_time } else { sched.total_time * k as f64 / (n - 1) as f64 })
            .collect(),
    }
}

/// `max_{i,t} ‖[H(t), σ^z_{2i-1} σ^z_{2i}]‖_F` for any Hamiltonian on a
/// `2N`-qubit register.
pub fn pair_parity_commutator<H: Hamiltonian + ?Sized>(h: &H, n_vars: usize, times: &[f64]) -> Result<f64> {
    let nq = 2 * n_vars;
    let parities = (1..=n_vars)
        .map(|i| pauli_string(&[(2 * i - 1, Axis::Z), (2 * i, Axis::Z)], nq))
        .collect::<Result<Vec<_>>>()?;
    let mut worst = 0.0f64;
    for &t in times {
        let ht = h.at(t);
        for p in &parities {
            worst = worst.max(ht.commutator(p).frobenius_norm());
        }
    }
    Ok(worst)
}

/// Constants of motion of the ancilla Hamiltonian at the sampled times.
pub fn check_constants_of_motion(
    times: &[f64],
    sched: &AnnealSchedule,
    inst: &ProblemInstance,
    c: f64,
) -> Result<f64> {
    for &t in times {
        sched.check_time(t)?;
    }
    let h = AnnealingHamiltonian::new(*sched, inst, DriverKind::Ancilla { c })?;
    pair_parity_commutator(&h, inst.n_vars(), times)
}

/// Ancilla Hamiltonian whose driver is `c Σ σ^x_{2i-1}` instead of the pair
/// form. It does not conserve the pair parities.
pub fn broken_ancilla_hamiltonian(
    sched: &AnnealSchedule,
    inst: &ProblemInstance,
    c: f64,
) -> Result<AnnealingHamiltonian> {
    let n = inst.n_vars();
    let mut driver = ComplexMatrix::zeros(1 << (2 * n));
    for i in 1..=n {
        driver.add_scaled(C64::new(c, 0.0), &pauli_on(2 * i - 1, Axis::X, 2 * n)?);
    }
    Ok(AnnealingHamiltonian { driver, problem: problem_hamiltonian(inst, Placement::Ancilla), schedule: *sched })
}

/// `W·W = I` and `W† (σ^z σ^z) W = σ^z ⊗ I` on every pair, entrywise.
pub fn check_w_identities(n_vars: usize) -> Result<f64> {
    let cnot = pair_cnot();
    let z = ComplexMatrix::pauli(Axis::Z);
    let id = ComplexMatrix::identity(2);
    let mut worst = cnot.matmul(&cnot).max_abs_diff(&ComplexMatrix::identity(4));
    let zz = kron(&z, &z)?;
    worst = worst.max(cnot.adjoint().matmul(&zz.matmul(&cnot)).max_abs_diff(&kron(&z, &id)?));
    // Control is the physical qubit: |a p⟩ → |a⊕p, p⟩.
    for a in 0..2 {
        for p in 0..2 {
            let col = (a << 1) | p;
            let row = ((a ^ p) << 1) | p;
            worst = worst.max((cnot[(row, col)] - C64::new(1.0, 0.0)).norm());
        }
    }
    let w = build_w(n_vars)?;
    let nq = 2 * n_vars;
    worst = worst.max(w.matmul(&w).max_abs_diff(&ComplexMatrix::identity(1 << nq)));
    for i in 1..=n_vars {
        let zz = pauli_string(&[(2 * i - 1, Axis::Z), (2 * i, Axis::Z)], nq)?;
        let za = pauli_on(2 * i - 1, Axis::Z, nq)?;
        worst = worst.max(w.adjoint().matmul(&zz.matmul(&w)).max_abs_diff(&za));
    }
    Ok(worst)
}

/// Largest entry of `W† H(t) W` (reordered ancillas first) minus the direct
/// sum of the sector blocks.
pub fn check_block_diagonal(
    times: &[f64],
    sched: &AnnealSchedule,
    inst: &ProblemInstance,
    c: f64,
) -> Result<f64> {
    let n = inst.n_vars();
    let w = build_w(n)?;
    let perm = ancillas_first_permutation(n);
    let h = AnnealingHamiltonian::new(*sched, inst, DriverKind::Ancilla { c })?;
    let mut worst = 0.0f64;
    for &t in times {
        let framed = w.adjoint().matmul(&h.evaluate(t)?.matmul(&w)).permute_basis(&perm);
        worst = worst.max(framed.max_abs_diff(&assemble_block_diagonal(t, sched, inst, c)?));
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct EmbeddingMismatch {
    /// Sorted spectrum of `H(t)` against the sorted union of sector spectra.
    pub spectrum: f64,
    /// `max ‖H x - ε x‖_∞` over lifted sector eigenpairs `x = W(|λ⟩⊗|v⟩)`.
    pub eigenvectors: f64,
}

impl EmbeddingMismatch {
    pub fn max(&self) -> f64 {
        self.spectrum.max(self.eigenvectors)
    }
}

pub fn check_spectrum_embedding(
    times: &[f64],
    sched: &AnnealSchedule,
    inst: &ProblemInstance,
    c: f64,
) -> Result<EmbeddingMismatch> {
    let n = inst.n_vars();
    let dim = 1usize << (2 * n);
    let w = build_w(n)?;
    let h = AnnealingHamiltonian::new(*sched, inst, DriverKind::Ancilla { c })?;
    let mut out = EmbeddingMismatch::default();
    for &t in times {
        let ht = h.evaluate(t)?;
        let full = hermitian_eigensystem(&ht, DEFAULT_GAP_TOL)?;
        let mut union = Vec::with_capacity(dim);
        for lambda in 0..1usize << n {
            let block = block_hamiltonian(t, sched, inst, c, &SectorLabel::from_index(lambda, n))?;
            let es = hermitian_eigensystem(&block, DEFAULT_GAP_TOL)?;
            for (k, &eps) in es.values.iter().enumerate() {
                union.push(eps);
                let v = es.vector(k);
                let mut x = vec![C64::new(0.0, 0.0); dim];
                for (idx, xi) in x.iter_mut().enumerate() {
                    if ancilla_index(idx, n) == lambda {
                        *xi = v[physical_index(idx, n)];
                    }
                }
                let y = w.apply(&x);
                let hy = ht.apply(&y);
                let res = hy.iter().zip(&y).map(|(a, b)| (a - b * eps).norm()).fold(0.0, f64::max);
                out.eigenvectors = out.eigenvectors.max(res);
            }
        }
        union.sort_by(f64::total_cmp);
        for (a, b) in full.values.iter().zip(&union) {
            out.spectrum = out.spectrum.max((a - b).abs());
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Cancellation {
    /// Frobenius norm of the all-ones block of `W† C_z W`; zero for
    /// pairwise-equal couplings.
    pub sector_coupling: f64,
    /// Mismatch between that block and `Σ_i (g_{2i} - g_{2i-1}) σ^z_i`.
    pub effective_mismatch: f64,
    /// `Σ_i |g_{2i} - g_{2i-1}|`.
    pub predicted_coupling: f64,
}

impl Cancellation {
    pub fn passed(&self) -> bool {
        self.effective_mismatch < CANCELLATION_TOL
            && (self.predicted_coupling != 0.0 || self.sector_coupling < CANCELLATION_TOL)
    }
}

/// Longitudinal coupling seen by the all-ones sector of an `N`-pair register.
pub fn check_cancellation(bath: &BathConfig, n_vars: usize) -> Result<Cancellation> {
    let nq = 2 * n_vars;
    let cz = weighted_sum(Axis::Z, &bath.gz, nq)?;
    let w = build_w(n_vars)?;
    let framed = w.adjoint().matmul(&cz.matmul(&w)).permute_basis(&ancillas_first_permutation(n_vars));
    let base = ((1usize << n_vars) - 1) << n_vars;
    let idx: Vec<usize> = (0..1usize << n_vars).map(|p| base | p).collect();
    let block = framed.submatrix(&idx);
    let diffs: Vec<f64> = (0..n_vars).map(|i| bath.gz[2 * i + 1] - bath.gz[2 * i]).collect();
    let expected = weighted_sum(Axis::Z, &diffs, n_vars)?;
    Ok(Cancellation {
        sector_coupling: block.frobenius_norm(),
        effective_mismatch: (block - expected).frobenius_norm(),
        predicted_coupling: diffs.iter().map(|d| d.abs()).sum(),
    })
}

/// `|γ(0) - η/β|` and the worst relative detailed-balance defect
/// `|γ(-ω) - e^{-βω} γ(ω)| / γ(ω)` over `grid`.
pub fn check_spectral_function(spectrum: &OhmicSpectrum, grid: &[f64]) -> (f64, f64) {
    let zero = (spectrum.gamma(0.0) - spectrum.eta / spectrum.beta).abs();
    let balance = grid
        .iter()
        .map(|&w| {
            let up = spectrum.gamma(w.abs());
            let down = spectrum.gamma(-w.abs());
            (down - (-spectrum.beta * w.abs()).exp() * up).abs() / up
        })
        .fold(0.0, f64::max);
    (zero, balance)
}

/// `1 - |⟨g|ψ_0⟩|²` between the ground state of `H(0)` and the pair state
/// `⊗(|01⟩ + |10⟩)/√2`. Small only for `c < 0`.
pub fn check_initial_state(sched: &AnnealSchedule, inst: &ProblemInstance, c: f64) -> Result<f64> {
    let h0 = AnnealingHamiltonian::new(*sched, inst, DriverKind::Ancilla { c })?.evaluate(0.0)?;
    let g = ground_state(&h0)?;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let pair = [0.0, r, r, 0.0];
    let amps: Vec<C64> = (0..h0.dim())
        .map(|idx| {
            let mut a = 1.0;
            for i in 0..inst.n_vars() {
                a *= pair[(idx >> (2 * (inst.n_vars() - 1 - i))) & 0b11];
            }
            C64::new(a, 0.0)
        })
        .collect();
    let overlap: C64 = g.0.iter().zip(&amps).map(|(a, b)| a.conj() * b).sum();
    Ok((1.0 - overlap.norm_sqr()).max(0.0))
}

/// Propagates with the exact exponential of `H` at the midpoint of each of
/// `slices` uniform slices of `[0, total]`.
pub fn oracle_propagate_closed<H: Hamiltonian + ?Sized>(
    psi0: &StateVector,
    hamiltonian: &H,
    total: f64,
    slices: usize,
) -> Result<StateVector> {
    if slices == 0 || !(total >= 0.0 && total.is_finite()) {
        return Err(Error::InvalidIntegration(format!("need slices > 0 and finite total, got {slices}, {total}")));
    }
    if psi0.0.len() != hamiltonian.dim() {
        return Err(Error::InvalidState(format!(
            "state has {} amplitudes, Hamiltonian dimension is {}",
            psi0.0.len(),
            hamiltonian.dim()
        )));
    }
    let tau = total / slices as f64;
    let n = psi0.0.len();
    let mut psi = psi0.0.clone();
    for k in 0..slices {
        let es = hermitian_eigensystem(&hamiltonian.at((k as f64 + 0.5) * tau), DEFAULT_GAP_TOL)?;
        // coefficients in the eigenbasis, phase-rotated, mapped back
        let mut coeff = vec![C64::new(0.0, 0.0); n];
        for (j, cj) in coeff.iter_mut().enumerate() {
            let mut s = C64::new(0.0, 0.0);
            for i in 0..n {
                s += es.vectors[(i, j)].conj() * psi[i];
            }
            *cj = s * C64::from_polar(1.0, -es.values[j] * tau);
        }
        for (i, p) in psi.iter_mut().enumerate() {
            *p = (0..n).map(|j| es.vectors[(i, j)] * coeff[j]).sum();
        }
    }
    Ok(StateVector(psi))
}

/// `‖a - e^{iφ} b‖` with the global phase `φ` chosen optimally.
pub fn phase_aligned_distance(a: &StateVector, b: &StateVector) -> f64 {
    let overlap: C64 = b.0.iter().zip(&a.0).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { C64::new(1.0, 0.0) };
    a.0.iter().zip(&b.0).map(|(x, y)| (x - y * phase).norm_sqr()).sum::<f64>().sqrt()
}

/// Least-squares slope of `log err` against `log dt`.
pub fn fitted_order(dts: &[f64], errors: &[f64]) -> f64 {
    let xs: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// One-qubit sweep used to calibrate the RK4 order: `a = 1 rad/ns`,
/// `T = 10 ns`, `h = 1`.
pub fn calibration_scenario() -> Result<(AnnealingHamiltonian, StateVector)> {
    let inst = ProblemInstance::new(vec![1.0], vec![])?;
    let sched = AnnealSchedule::standard(1.0, 10.0)?;
    let h = AnnealingHamiltonian::new(sched, &inst, DriverKind::Conventional)?;
    let psi0 = ground_state(&h.at(0.0))?;
    Ok((h, psi0))
}

/// Fitted exponent of the final-state error against a `dt/8` reference.
pub fn rk4_order_exponent(dts: &[f64]) -> Result<f64> {
    let (h, psi0) = calibration_scenario()?;
    let total = h.schedule.total_time;
    let finest = dts.iter().cloned().fold(f64::INFINITY, f64::min);
    let reference = integrate_closed(&psi0, &h, total, finest / 8.0, 2)?;
    let errors = dts
        .iter()
        .map(|&dt| {
            let traj = integrate_closed(&psi0, &h, total, dt, 2)?;
            Ok(phase_aligned_distance(traj.last(), reference.last()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(fitted_order(dts, &errors))
}

/// Largest difference between the RK4 and exponential-slice physical
/// distributions at `T` for the closed ancilla run from the ground state.
pub fn closed_oracle_agreement(
    sched: &AnnealSchedule,
    inst: &ProblemInstance,
    c: f64,
    dt: f64,
    slices: usize,
) -> Result<f64> {
    let h = AnnealingHamiltonian::new(*sched, inst, DriverKind::Ancilla { c })?;
    let psi0 = ground_state(&h.at(0.0))?;
    let rk = integrate_closed(&psi0, &h, sched.total_time, dt, 2)?;
    let oracle = oracle_propagate_closed(&psi0, &h, sched.total_time, slices)?;
    let n = inst.n_vars();
    let marginals = |psi: &StateVector| {
        let mut p = vec![0.0; 1 << n];
        for (idx, z) in psi.0.iter().enumerate() {
            p[physical_index(idx, n)] += z.norm_sqr();
        }
        p
    };
    let (a, b) = (marginals(rk.last()), marginals(&oracle));
    Ok(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckOutcome {
    fn below(name: &str, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, threshold, passed: value < threshold, note: None }
    }

    fn above(name: &str, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, threshold, passed: value > threshold, note: None }
    }

    fn failed(name: &str, threshold: f64, err: Error) -> Self {
        Self { name: name.into(), value: f64::NAN, threshold, passed: false, note: Some(err.to_string()) }
    }

    fn with_note(mut self, note: String) -> Self {
        self.note = Some(note);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
}

/// What the suite runs on.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub schedule: AnnealSchedule,
    pub instance: ProblemInstance,
    pub c: f64,
    pub n_times: usize,
    /// Also run the RK4 order fit and the exponential-slice comparison.
    pub integrator_checks: bool,
    pub oracle_dt: f64,
    pub oracle_slices: usize,
}

impl SuiteConfig {
    pub fn reference() -> Self {
        Self {
            schedule: AnnealSchedule::standard(10.0, 1000.0).expect("valid reference schedule"),
            instance: ProblemInstance::benchmark(),
            c: -0.5,
            n_times: 11,
            integrator_checks: true,
            oracle_dt: 0.01,
            oracle_slices: 100_000,
        }
    }
}

fn outcome<T>(name: &str, threshold: f64, r: Result<T>, f: impl FnOnce(T) -> CheckOutcome) -> CheckOutcome {
    match r {
        Ok(v) => f(v),
        Err(e) => CheckOutcome::failed(name, threshold, e),
    }
}

/// Runs every check on `cfg`, each on its own thread.
pub fn run_suite(cfg: &SuiteConfig) -> VerifyReport {
    let sched = &cfg.schedule;
    let inst = &cfg.instance;
    let c = cfg.c;
    let n = inst.n_vars();
    let times = sample_times(sched, cfg.n_times);
    let times = &times;

    type Job<'a> = Box<dyn FnOnce() -> CheckOutcome + Send + 'a>;
    let mut jobs: Vec<Job> = vec![
        Box::new(move || {
            let r = sched.check_ordering();
            CheckOutcome {
                name: "schedule_ordering".into(),
                value: if r.is_ok() { 0.0 } else { 1.0 },
                threshold: 0.5,
                passed: r.is_ok(),
                note: r.err().map(|e| e.to_string()),
            }
        }),
        Box::new(move || {
            outcome("initial_state", INITIAL_STATE_TOL, check_initial_state(sched, inst, c), |v| {
                CheckOutcome::below("initial_state", v, INITIAL_STATE_TOL)
            })
        }),
        Box::new(move || {
            outcome("w_identities", EXACT_TOL, check_w_identities(n), |v| {
                CheckOutcome::below("w_identities", v, EXACT_TOL)
            })
        }),
        Box::new(move || {
            outcome("constants_of_motion", SYMMETRY_TOL, check_constants_of_motion(times, sched, inst, c), |v| {
                CheckOutcome::below("constants_of_motion", v, SYMMETRY_TOL)
            })
        }),
        Box::new(move || {
            let r = broken_ancilla_hamiltonian(sched, inst, c)
                .and_then(|h| pair_parity_commutator(&h, n, times));
            outcome("broken_driver_detected", 1e-6, r, |v| {
                CheckOutcome::above("broken_driver_detected", v, 1e-6)
            })
        }),
        Box::new(move || {
            outcome("block_diagonal", BLOCK_TOL, check_block_diagonal(times, sched, inst, c), |v| {
                CheckOutcome::below("block_diagonal", v, BLOCK_TOL)
            })
        }),
        Box::new(move || {
            outcome("spectrum_embedding", EMBEDDING_TOL, check_spectrum_embedding(times, sched, inst, c), |m| {
                CheckOutcome::below("spectrum_embedding", m.max(), EMBEDDING_TOL).with_note(format!(
                    "spectrum {:.3e}, eigenvectors {:.3e}",
                    m.spectrum, m.eigenvectors
                ))
            })
        }),
        Box::new(move || {
            let r = BathConfig::uniform(2 * n, 0.1, 0.0).and_then(|b| check_cancellation(&b, n));
            outcome("cancellation_uniform", CANCELLATION_TOL, r, |v| {
                CheckOutcome::below("cancellation_uniform", v.sector_coupling.max(v.effective_mismatch), CANCELLATION_TOL)
            })
        }),
        Box::new(move || {
            let gz: Vec<f64> = (0..2 * n).map(|q| if q % 2 == 0 { 0.1 } else { 0.12 }).collect();
            let bath = BathConfig::uniform(2 * n, 0.0, 0.0)
                .and_then(|b| BathConfig::new(b.beta, b.eta, b.omega_c, gz, vec![0.0; 2 * n]));
            let r = bath.and_then(|b| check_cancellation(&b, n));
            outcome("cancellation_asymmetric", CANCELLATION_TOL, r, |v| {
                CheckOutcome::below("cancellation_asymmetric", v.effective_mismatch, CANCELLATION_TOL)
                    .with_note(format!("effective coupling {:.6}", v.predicted_coupling))
            })
        }),
        Box::new(move || {
            let spectrum = BathConfig::uniform(1, 0.0, 0.0).expect("reference bath").spectrum();
            let grid: Vec<f64> = (1..=20).map(|k| 0.5 * k as f64).collect();
            let (zero, balance) = check_spectral_function(&spectrum, &grid);
            CheckOutcome::below("spectral_function", zero.max(balance), RATE_TOL)
                .with_note(format!("gamma(0) = {:.12}", spectrum.gamma(0.0)))
        }),
    ];
    if cfg.integrator_checks {
        let (dt, slices) = (cfg.oracle_dt, cfg.oracle_slices);
        jobs.push(Box::new(move || {
            let r = rk4_order_exponent(&[0.2, 0.1, 0.05]);
            outcome("rk4_order", ORDER_WINDOW.1, r, |p| CheckOutcome {
                name: "rk4_order".into(),
                value: p,
                threshold: ORDER_WINDOW.1,
                passed: (ORDER_WINDOW.0..=ORDER_WINDOW.1).contains(&p),
                note: Some(format!("window [{}, {}]", ORDER_WINDOW.0, ORDER_WINDOW.1)),
            })
        }));
        jobs.push(Box::new(move || {
            outcome("exponential_oracle", ORACLE_AGREEMENT_TOL, closed_oracle_agreement(sched, inst, c, dt, slices), |v| {
                CheckOutcome::below("exponential_oracle", v, ORACLE_AGREEMENT_TOL)
            })
        }));
    }
    let checks: Vec<CheckOutcome> = std::thread::scope(|s| {
        let handles: Vec<_> = jobs.into_iter().map(|job| s.spawn(job)).collect();
        handles.into_iter().map(|h| h.join().expect("check thread panicked")).collect()
    });
    VerifyReport { passed: checks.iter().all(|c| c.passed), checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Coupling, ScheduleForm};

    fn sched() -> AnnealSchedule {
        AnnealSchedule::standard(10.0, 1000.0).unwrap()
    }

    #[test]
    fn sample_times_cover_window() {
        let t = sample_times(&sched(), 11);
        assert_eq!(t.len(), 11);
        assert_eq!(t[0], 0.0);
        assert_eq!(t[10], 1000.0);
        assert_eq!(t[5], 500.0);
    }

    #[test]
    fn pair_parities_commute_with_ancilla_hamiltonian() {
        let inst = ProblemInstance::benchmark();
        let times = sample_times(&sched(), 3);
        assert!(check_constants_of_motion(&times, &sched(), &inst, -0.5).unwrap() < SYMMETRY_TOL);
        let trivial = ProblemInstance::new(vec![0.0], vec![]).unwrap();
        assert!(check_constants_of_motion(&times, &sched(), &trivial, -0.5).unwrap() < EXACT_TOL);
    }

    #[test]
    fn broken_driver_breaks_the_symmetry() {
        let inst = ProblemInstance::benchmark();
        let h = broken_ancilla_hamiltonian(&sched(), &inst, -0.5).unwrap();
        let v = pair_parity_commutator(&h, 2, &[0.0, 500.0]).unwrap();
        assert!(v > 1.0, "{v}");
    }

    #[test]
    fn w_identities_hold_exactly() {
        for n in 1..=3 {
            assert!(check_w_identities(n).unwrap() < EXACT_TOL);
        }
    }

    #[test]
    fn block_diagonal_form_matches() {
        let inst = ProblemInstance::benchmark();
        let times = sample_times(&sched(), 5);
        assert!(check_block_diagonal(&times, &sched(), &inst, -0.5).unwrap() < BLOCK_TOL);
    }

    #[test]
    fn embedding_holds_for_benchmark_and_single_variable() {
        let inst = ProblemInstance::benchmark();
        let times = sample_times(&sched(), 11);
        let m = check_spectrum_embedding(&times, &sched(), &inst, -0.5).unwrap();
        assert!(m.max() < EMBEDDING_TOL, "{m:?}");
        let single = ProblemInstance::new(vec![0.37], vec![]).unwrap();
        let m = check_spectrum_embedding(&times, &sched(), &single, -1.3).unwrap();
        assert!(m.max() < 1e-10, "{m:?}");
    }

    #[test]
    fn cancellation_uniform_asymmetric_and_zero() {
        let b = BathConfig::uniform(4, 0.1, 0.0).unwrap();
        let r = check_cancellation(&b, 2).unwrap();
        assert!(r.sector_coupling < CANCELLATION_TOL && r.passed());
        assert_eq!(r.predicted_coupling, 0.0);

        let asym = BathConfig::new(b.beta, b.eta, b.omega_c, vec![0.1, 0.12], vec![0.0; 2]).unwrap();
        let r = check_cancellation(&asym, 1).unwrap();
        assert!((r.predicted_coupling - 0.02).abs() < 1e-15);
        assert!(r.effective_mismatch < CANCELLATION_TOL);
        assert!((r.sector_coupling - 0.02 * 2f64.sqrt()).abs() < 1e-15);

        let zero = BathConfig::uniform(2, 0.0, 0.0).unwrap();
        let r = check_cancellation(&zero, 1).unwrap();
        assert_eq!(r.sector_coupling, 0.0);
    }

    #[test]
    fn initial_state_requires_negative_c() {
        let inst = ProblemInstance::benchmark();
        assert!(check_initial_state(&sched(), &inst, -0.5).unwrap() < INITIAL_STATE_TOL);
        assert!(check_initial_state(&sched(), &inst, 0.5).unwrap() > 0.5);
    }

    #[test]
    fn oracle_is_exact_for_constant_hamiltonian() {
        let h = ComplexMatrix::pauli(Axis::Z);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let plus = StateVector(vec![C64::new(r, 0.0), C64::new(r, 0.0)]);
        let t = 0.7;
        let expected = StateVector(vec![C64::from_polar(r, -t), C64::from_polar(r, t)]);
        for m in [1, 3, 10] {
            let psi = oracle_propagate_closed(&plus, &h, t, m).unwrap();
            assert!(phase_aligned_distance(&psi, &expected) < 1e-14);
        }
    }

    #[test]
    fn oracle_self_consistency_shrinks_with_slices() {
        let (h, psi0) = calibration_scenario().unwrap();
        let total = h.schedule.total_time;
        let p = |m| oracle_propagate_closed(&psi0, &h, total, m).unwrap();
        let reference = p(6400);
        let e1 = phase_aligned_distance(&p(100), &reference);
        let e2 = phase_aligned_distance(&p(200), &reference);
        assert!(e2 < 0.5 * e1, "{e1} {e2}");
    }

    #[test]
    fn rk4_order_is_four() {
        let p = rk4_order_exponent(&[0.2, 0.1, 0.05]).unwrap();
        assert!((ORDER_WINDOW.0..=ORDER_WINDOW.1).contains(&p), "{p}");
    }

    #[test]
    fn fitted_order_recovers_power_law() {
        let dts = [0.1, 0.05, 0.025];
        let errs: Vec<f64> = dts.iter().map(|d: &f64| 3.0 * d.powi(4)).collect();
        assert!((fitted_order(&dts, &errs) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn spectral_function_reference_values() {
        let s = BathConfig::uniform(1, 0.0, 0.0).unwrap().spectrum();
        let grid: Vec<f64> = (1..=20).map(|k| 0.5 * k as f64).collect();
        let (zero, balance) = check_spectral_function(&s, &grid);
        assert!(zero < RATE_TOL && balance < RATE_TOL);
    }

    #[test]
    fn quick_suite_passes_and_flags_bad_inputs() {
        let mut cfg = SuiteConfig::reference();
        cfg.integrator_checks = false;
        let report = run_suite(&cfg);
        assert!(report.passed, "{report:?}");

        let mut literal = cfg.clone();
        literal.schedule = AnnealSchedule::new(10.0, 1000.0, ScheduleForm::LinearPaperLiteral).unwrap();
        let report = run_suite(&literal);
        let ordering = report.checks.iter().find(|c| c.name == "schedule_ordering").unwrap();
        assert!(!ordering.passed && !report.passed);

        let mut positive = cfg.clone();
        positive.c = 0.5;
        let report = run_suite(&positive);
        let init = report.checks.iter().find(|c| c.name == "initial_state").unwrap();
        assert!(!init.passed);
    }

    #[test]
    fn report_serializes() {
        let report = VerifyReport { passed: true, checks: vec![CheckOutcome::below("x", 0.0, 1.0)] };
        let v: serde_json::Value = serde_json::to_value(&report).unwrap();
        assert_eq!(v["checks"][0]["name"], "x");
        assert_eq!(v["checks"][0]["passed"], true);
        assert!(v["checks"][0].get("note").is_none());
    }

    #[test]
    fn random_like_instance_embedding() {
        let inst = ProblemInstance::new(
            vec![0.3, -0.7, 0.2],
            vec![Coupling { i: 0, j: 2, value: 0.45 }, Coupling { i: 1, j: 2, value: -0.2 }],
        )
        .unwrap();
        let times = sample_times(&sched(), 4);
        assert!(check_block_diagonal(&times, &sched(), &inst, -0.8).unwrap() < BLOCK_TOL);
        assert!(check_spectrum_embedding(&times, &sched(), &inst, -0.8).unwrap().max() < EMBEDDING_TOL);
    }
}
