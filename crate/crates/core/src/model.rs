//! Annealing Hamiltonians: the conventional transverse-field driver, the
//! ancilla-pair driver, the CNOT frame change `W` that block-diagonalises the
//! latter, and the per-sector Hamiltonians it produces.
//!
//! Register convention: qubit 1 is the leftmost tensor factor. In an ancilla
//! register of `2N` qubits, odd qubits are ancillas and even qubits carry the
//! problem variables. Computational basis state `|0⟩` has `σ^z = +1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kron, pauli_on, pauli_string, Axis, ComplexMatrix, C64};

/// Largest number of problem variables (ancilla register of 12 qubits).
pub const MAX_VARS: usize = 6;

/// Ising coupling between variables `i < j` (0-based).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

/// Local fields and pair couplings of the Ising objective.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    h: Vec<f64>,
    couplings: Vec<Coupling>,
}

impl ProblemInstance {
    pub fn new(h: Vec<f64>, couplings: Vec<Coupling>) -> Result<Self> {
        let n = h.len();
        if n == 0 || n > MAX_VARS {
            return Err(Error::InvalidInstance(format!(
                "need 1..={MAX_VARS} variables, got {n}"
            )));
        }
        if let Some(x) = h.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidInstance(format!("non-finite field {x}")));
        }
        let mut seen = std::collections::BTreeSet::new();
        for c in &couplings {
            if !(c.i < c.j && c.j < n) {
                return Err(Error::InvalidInstance(format!(
                    "coupling ({}, {}) must satisfy i < j < {n}",
                    c.i, c.j
                )));
            }
            if !c.value.is_finite() {
                return Err(Error::InvalidInstance(format!("non-finite coupling {}", c.value)));
            }
            if !seen.insert((c.i, c.j)) {
                return Err(Error::InvalidInstance(format!(
                    "duplicate coupling ({}, {})",
                    c.i, c.j
                )));
            }
        }
        Ok(Self { h, couplings })
    }

    /// `h_1 = 1, h_2 = 1/4, J_12 = 1/8`: the two-variable benchmark whose
    /// unique ground state is `|11⟩`.
    pub fn benchmark() -> Self {
        Self::new(vec![1.0, 0.25], vec![Coupling { i: 0, j: 1, value: 0.125 }])
            .expect("benchmark instance is valid")
    }

    pub fn n_vars(&self) -> usize {
        self.h.len()
    }

    pub fn fields(&self) -> &[f64] {
        &self.h
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }

    /// Objective value of a bit assignment (`bits[i]` true ⇒ `σ^z_i = -1`).
    pub fn energy(&self, bits: &[bool]) -> f64 {
        let spin = |b: bool| if b { -1.0 } else { 1.0 };
        let field: f64 = self.h.iter().zip(bits).map(|(h, &b)| h * spin(b)).sum();
        let pair: f64 = self
            .couplings
            .iter()
            .map(|c| c.value * spin(bits[c.i]) * spin(bits[c.j]))
            .sum();
        field + pair
    }

    /// Objective over all `2^N` assignments, indexed big-endian (variable 1 is
    /// the most significant bit).
    pub fn energies(&self) -> Vec<f64> {
        let n = self.n_vars();
        (0..1usize << n).map(|idx| self.energy(&index_bits(idx, n))).collect()
    }

    /// Minimising assignment, or `None` if the minimum is degenerate.
    pub fn ground_bits(&self) -> Option<Vec<bool>> {
        let e = self.energies();
        let (best, &emin) = e
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty");
        let ties = e.iter().filter(|&&x| (x - emin).abs() <= 1e-12 * (1.0 + emin.abs())).count();
        (ties == 1).then(|| index_bits(best, self.n_vars()))
    }
}

/// Big-endian bits of `idx` over `n` positions.
pub fn index_bits(idx: usize, n: usize) -> Vec<bool> {
    (0..n).map(|k| (idx >> (n - 1 - k)) & 1 == 1).collect()
}

pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

pub fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|ch| match ch {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::InvalidState(format!("bad bit '{ch}' in \"{s}\""))),
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleForm {
    /// `A(t) = a(1 - t/T)`, `B(t) = a t/T`.
    LinearStandard,
    /// `A(t) = a t/T`, `B(t) = a - A(t)`: driver off at the start, which
    /// breaks the annealing ordering. Kept only for auditing.
    LinearPaperLiteral,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    /// Energy scale, rad/ns.
    pub a: f64,
    /// Anneal time, ns.
    pub total_time: f64,
    pub form: ScheduleForm,
}

impl AnnealSchedule {
    pub fn new(a: f64, total_time: f64, form: ScheduleForm) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidSchedule(format!("energy scale must be positive, got {a}")));
        }
        if !(total_time > 0.0 && total_time.is_finite()) {
            return Err(Error::InvalidSchedule(format!(
                "anneal time must be positive, got {total_time}"
            )));
        }
        Ok(Self { a, total_time, form })
    }

    pub fn standard(a: f64, total_time: f64) -> Result<Self> {
        Self::new(a, total_time, ScheduleForm::LinearStandard)
    }

    pub fn a_coeff(&self, t: f64) -> f64 {
        let s = t / self.total_time;
        match self.form {
            ScheduleForm::LinearStandard => self.a * (1.0 - s),
            ScheduleForm::LinearPaperLiteral => self.a * s,
        }
    }

    pub fn b_coeff(&self, t: f64) -> f64 {
        let s = t / self.total_time;
        match self.form {
            ScheduleForm::LinearStandard => self.a * s,
            ScheduleForm::LinearPaperLiteral => self.a - self.a * s,
        }
    }

    pub fn check_time(&self, t: f64) -> Result<()> {
        if t >= 0.0 && t <= self.total_time {
            Ok(())
        } else {
            Err(Error::TimeOutOfRange { t, total: self.total_time })
        }
    }

    /// Driver dominates at `t = 0`, problem dominates at `t = T`.
    pub fn check_ordering(&self) -> Result<()> {
        let t = self.total_time;
        let ok = self.a_coeff(0.0) > self.b_coeff(0.0) && self.a_coeff(t) < self.b_coeff(t);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSchedule(format!(
                "annealing ordering violated: A(0)={}, B(0)={}, A(T)={}, B(T)={}",
                self.a_coeff(0.0),
                self.b_coeff(0.0),
                self.a_coeff(t),
                self.b_coeff(t)
            )))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DriverKind {
    /// `-Σ σ^x_i` on `N` qubits.
    Conventional,
    /// `Σ (c σ^x_{2i-1} σ^x_{2i} - σ^y_{2i-1} σ^y_{2i})` on `2N` qubits.
    Ancilla { c: f64 },
}

impl DriverKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            DriverKind::Conventional => Ok(()),
            DriverKind::Ancilla { c } if c < 0.0 => Ok(()),
            DriverKind::Ancilla { c } => Err(Error::InvalidDriver(format!(
                "ancilla driver needs c < 0 so that the pair state (|01> + |10>)/sqrt2 is the initial ground state, got {c}"
            ))),
        }
    }

    pub fn register_qubits(&self, n_vars: usize) -> usize {
        match self {
            DriverKind::Conventional => n_vars,
            DriverKind::Ancilla { .. } => 2 * n_vars,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DriverKind::Conventional => "conventional",
            DriverKind::Ancilla { .. } => "ancilla",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Placement {
    /// Variable `i` on qubit `i` of an `N`-qubit register.
    Conventional,
    /// Variable `i` on qubit `2i` of a `2N`-qubit register.
    Ancilla,
}

/// Bits `λ` selecting a simultaneous eigenspace of the pair parities
/// `σ^z_{2i-1} σ^z_{2i}`; after the `W` frame change `λ_i` is the state of
/// ancilla `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SectorLabel(Vec<bool>);

impl SectorLabel {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn all_ones(n: usize) -> Self {
        Self(vec![true; n])
    }

    /// Big-endian: the first bit is the most significant.
    pub fn from_index(idx: usize, n: usize) -> Self {
        Self(index_bits(idx, n))
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Transverse-field factor `c + (1 - 2λ_i)` for pair `i`.
    pub fn transverse_factor(&self, c: f64, i: usize) -> f64 {
        c + if self.0[i] { -1.0 } else { 1.0 }
    }
}

/// Diagonal problem operator in the requested placement.
pub fn problem_hamiltonian(inst: &ProblemInstance, placement: Placement) -> ComplexMatrix {
    let n = inst.n_vars();
    let energies = inst.energies();
    match placement {
        Placement::Conventional => ComplexMatrix::from_diagonal(&energies),
        Placement::Ancilla => {
            let dim = 1usize << (2 * n);
            let diag: Vec<f64> = (0..dim).map(|idx| energies[physical_index(idx, n)]).collect();
            ComplexMatrix::from_diagonal(&diag)
        }
    }
}

/// Physical-variable index (big-endian over variables) of a `2N`-qubit basis
/// state: the bits on even qubits.
pub fn physical_index(idx: usize, n: usize) -> usize {
    let mut out = 0;
    for i in 0..n {
        // even qubit 2(i+1) sits at bit position 2N - 2(i+1)
        let bit = (idx >> (2 * n - 2 * (i + 1))) & 1;
        out = (out << 1) | bit;
    }
    out
}

/// Ancilla index (big-endian over pairs): the bits on odd qubits.
pub fn ancilla_index(idx: usize, n: usize) -> usize {
    let mut out = 0;
    for i in 0..n {
        let bit = (idx >> (2 * n - 2 * i - 1)) & 1;
        out = (out << 1) | bit;
    }
    out
}

/// Time-independent driver operator (without the `A(t)` envelope).
pub fn driver_operator(driver: DriverKind, n_vars: usize) -> Result<ComplexMatrix> {
    let nq = driver.register_qubits(n_vars);
    let mut out = ComplexMatrix::zeros(1 << nq);
    match driver {
        DriverKind::Conventional => {
            for i in 1..=n_vars {
                out.add_scaled(C64::new(-1.0, 0.0), &pauli_on(i, Axis::X, nq)?);
            }
        }
        DriverKind::Ancilla { c } => {
            for i in 1..=n_vars {
                let (anc, phys) = (2 * i - 1, 2 * i);
                let xx = pauli_string(&[(anc, Axis::X), (phys, Axis::X)], nq)?;
                let yy = pauli_string(&[(anc, Axis::Y), (phys, Axis::Y)], nq)?;
                out.add_scaled(C64::new(c, 0.0), &xx);
                out.add_scaled(C64::new(-1.0, 0.0), &yy);
            }
        }
    }
    Ok(out)
}

/// Operator-valued function of time that a propagator can sample.
pub trait Hamiltonian: Sync {
    fn dim(&self) -> usize;
    fn at(&self, t: f64) -> ComplexMatrix;
}

impl Hamiltonian for ComplexMatrix {
    fn dim(&self) -> usize {
        ComplexMatrix::dim(self)
    }
    fn at(&self, _t: f64) -> ComplexMatrix {
        self.clone()
    }
}

/// `A(t)·driver + B(t)·problem` with both parts precomputed.
#[derive(Clone, Debug)]
pub struct AnnealingHamiltonian {
    pub driver: ComplexMatrix,
    pub problem: ComplexMatrix,
    pub schedule: AnnealSchedule,
}

impl AnnealingHamiltonian {
    /// Full-register Hamiltonian for the given driver.
    pub fn new(sched: AnnealSchedule, inst: &ProblemInstance, driver: DriverKind) -> Result<Self> {
        let placement = match driver {
            DriverKind::Conventional => Placement::Conventional,
            DriverKind::Ancilla { .. } => Placement::Ancilla,
        };
        Ok(Self {
            driver: driver_operator(driver, inst.n_vars())?,
            problem: problem_hamiltonian(inst, placement),
            schedule: sched,
        })
    }

    /// Sector Hamiltonian `H̃_λ(t)` on the `N` physical qubits.
    pub fn sector(
        sched: AnnealSchedule,
        inst: &ProblemInstance,
        c: f64,
        label: &SectorLabel,
    ) -> Result<Self> {
        let n = inst.n_vars();
        if label.len() != n {
            return Err(Error::SectorLength { expected: n, got: label.len() });
        }
        let mut driver = ComplexMatrix::zeros(1 << n);
        for i in 0..n {
            driver.add_scaled(C64::new(label.transverse_factor(c, i), 0.0), &pauli_on(i + 1, Axis::X, n)?);
        }
        Ok(Self {
            driver,
            problem: problem_hamiltonian(inst, Placement::Conventional),
            schedule: sched,
        })
    }

    pub fn evaluate(&self, t: f64) -> Result<ComplexMatrix> {
        self.schedule.check_time(t)?;
        Ok(self.at(t))
    }
}

impl Hamiltonian for AnnealingHamiltonian {
    fn dim(&self) -> usize {
        self.driver.dim()
    }

    fn at(&self, t: f64) -> ComplexMatrix {
        let mut h = self.driver.scale_real(self.schedule.a_coeff(t));
        h.add_scaled(C64::new(self.schedule.b_coeff(t), 0.0), &self.problem);
        h
    }
}

/// `H(t)` for the chosen driver.
pub fn hamiltonian_at(
    t: f64,
    sched: &AnnealSchedule,
    inst: &ProblemInstance,
    driver: DriverKind,
) -> Result<ComplexMatrix> {
    AnnealingHamiltonian::new(*sched, inst, driver)?.evaluate(t)
}

/// The 4×4 CNOT with the physical qubit (second factor) as control and the
/// ancilla (first factor) as target.
pub fn pair_cnot() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, 0.0, 1.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
    ])
}

/// `W = ⊗_i C_{2i-1,2i}` on `2N` qubits.
pub fn build_w(n_vars: usize) -> Result<ComplexMatrix> {
    let c = pair_cnot();
    let mut w = ComplexMatrix::identity(1);
    for _ in 0..n_vars {
        w = kron(&w, &c)?;
    }
    Ok(w)
}

/// `H̃_λ(t)`, the sector-`λ` block of `W† H(t) W`, on `N` qubits.
pub fn block_hamiltonian(
    t: f64,
    sched: &AnnealSchedule,
    inst: &ProblemInstance,
    c: f64,
    label: &SectorLabel,
) -> Result<ComplexMatrix> {
    AnnealingHamiltonian::sector(*sched, inst, c, label)?.evaluate(t)
}

/// Basis permutation taking the interleaved register order
/// `(a_1, p_1, a_2, p_2, …)` to ancillas-first order `(a_1, …, a_N, p_1, …, p_N)`.
pub fn ancillas_first_permutation(n_vars: usize) -> Vec<usize> {
    (0..1usize << (2 * n_vars))
        .map(|idx| (ancilla_index(idx, n_vars) << n_vars) | physical_index(idx, n_vars))
        .collect()
}

/// `Σ_λ |λ⟩⟨λ| ⊗ H̃_λ(t)` as a direct sum with sectors in ascending binary
/// order. The basis is ancillas-first; use [`ancillas_first_permutation`] to
/// compare with interleaved-register operators.
pub fn assemble_block_diagonal(
    t: f64,
    sched: &AnnealSchedule,
    inst: &ProblemInstance,
    c: f64,
) -> Result<ComplexMatrix> {
    let n = inst.n_vars();
    let blocks = (0..1usize << n)
        .map(|k| block_hamiltonian(t, sched, inst, c, &SectorLabel::from_index(k, n)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ComplexMatrix::direct_sum(&blocks))
}

/// Unit-norm state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector(pub Vec<C64>);

impl StateVector {
    pub fn amplitudes(&self) -> &[C64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.0)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.0.iter().map(|z| z.norm_sqr()).collect()
    }
}

/// Density operator on the full register.
pub type DensityMatrix = ComplexMatrix;

/// Analytic starting state: `|+⟩^⊗N` for the conventional driver and
/// `⊗(|01⟩ + |10⟩)/√2` for the ancilla driver.
pub fn initial_state(driver: DriverKind, n_vars: usize) -> Result<StateVector> {
    driver.validate()?;
    if n_vars == 0 || n_vars > MAX_VARS {
        return Err(Error::InvalidInstance(format!("need 1..={MAX_VARS} variables, got {n_vars}")));
    }
    let factor: Vec<C64> = match driver {
        DriverKind::Conventional => vec![C64::new(1.0, 0.0); 2],
        DriverKind::Ancilla { .. } => vec![0.0, 1.0, 1.0, 0.0].into_iter().map(|x| C64::new(x, 0.0)).collect(),
    };
    let mut amps = vec![C64::new(1.0, 0.0)];
    for _ in 0..n_vars {
        amps = amps
            .iter()
            .flat_map(|&a| factor.iter().map(move |&f| a * f))
            .collect();
    }
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    Ok(StateVector(amps.into_iter().map(|z| z / norm).collect()))
}

/// Minimum spacing accepted between the two lowest levels of `H(0)`.
pub const GROUND_GAP_TOL: f64 = 1e-9;

/// Nondegenerate ground state of `h`.
pub fn ground_state(h: &ComplexMatrix) -> Result<StateVector> {
    let es = crate::eigen::hermitian_eigensystem(h, crate::eigen::DEFAULT_GAP_TOL)?;
    let gap = es.ground_gap();
    if gap <= GROUND_GAP_TOL * (1.0 + es.values[0].abs()) {
        return Err(Error::DegenerateGroundState { gap });
    }
    Ok(StateVector(es.vector(0)))
}

/// Probability of reading `bits` on the problem variables: the diagonal
/// element for an `N`-qubit register, or the sum over ancilla states for a
/// `2N`-qubit register.
pub fn physical_marginal(rho: &DensityMatrix, bits: &[bool]) -> Result<f64> {
    let n = bits.len();
    let tr = rho.trace();
    let deviation = (tr - C64::new(1.0, 0.0)).norm();
    if deviation > 1e-6 {
        return Err(Error::TraceDeviation { deviation });
    }
    let target = bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
    let dim = rho.dim();
    if dim == 1 << n {
        Ok(rho[(target, target)].re)
    } else if dim == 1 << (2 * n) {
        Ok((0..dim)
            .filter(|&idx| physical_index(idx, n) == target)
            .map(|idx| rho[(idx, idx)].re)
            .sum())
    } else {
        Err(Error::InvalidState(format!(
            "density matrix of dimension {dim} does not match {n} variables"
        )))
    }
}

/// All `2^N` physical marginals in big-endian order.
pub fn physical_distribution(rho: &DensityMatrix, n_vars: usize) -> Result<Vec<f64>> {
    (0..1usize << n_vars)
        .map(|k| physical_marginal(rho, &index_bits(k, n_vars)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    fn sched() -> AnnealSchedule {
        AnnealSchedule::standard(10.0, 1000.0).unwrap()
    }

    fn diag_re(m: &ComplexMatrix) -> Vec<f64> {
        m.diagonal().iter().map(|z| z.re).collect()
    }

    #[test]
    fn benchmark_problem_diagonal() {
        // enumeration: s=(+,+): 1+1/4+1/8; (+,-): 1-1/4-1/8; (-,+): -1+1/4-1/8; (-,-): -1-1/4+1/8
        let hp = problem_hamiltonian(&ProblemInstance::benchmark(), Placement::Conventional);
        assert_eq!(diag_re(&hp), vec![1.375, 0.625, -0.875, -1.125]);
        assert!(hp.is_self_adjoint(TOL));
    }

    #[test]
    fn ancilla_problem_diagonal_repeats_each_value_four_times() {
        let hp = problem_hamiltonian(&ProblemInstance::benchmark(), Placement::Ancilla);
        let d = diag_re(&hp);
        assert_eq!(d.len(), 16);
        for v in [1.375, 0.625, -0.875, -1.125] {
            assert_eq!(d.iter().filter(|&&x| x == v).count(), 4);
        }
        // qubits (a1, p2, a3, p4): index 0b0101 has both physical bits set
        assert_eq!(d[0b0101], -1.125);
        assert_eq!(d[0b1010], 1.375);
    }

    #[test]
    fn zero_instance_gives_zero_problem() {
        let inst = ProblemInstance::new(vec![0.0, 0.0], vec![]).unwrap();
        assert_eq!(problem_hamiltonian(&inst, Placement::Ancilla), ComplexMatrix::zeros(16));
    }

    #[test]
    fn instance_validation() {
        assert!(ProblemInstance::new(vec![], vec![]).is_err());
        assert!(ProblemInstance::new(vec![0.0; 7], vec![]).is_err());
        assert!(ProblemInstance::new(vec![1.0, 1.0], vec![Coupling { i: 1, j: 0, value: 1.0 }]).is_err());
        assert!(ProblemInstance::new(vec![1.0, 1.0], vec![Coupling { i: 0, j: 0, value: 1.0 }]).is_err());
        assert!(ProblemInstance::new(vec![f64::NAN], vec![]).is_err());
        let dup = vec![Coupling { i: 0, j: 1, value: 1.0 }, Coupling { i: 0, j: 1, value: 2.0 }];
        assert!(ProblemInstance::new(vec![1.0, 1.0], dup).is_err());
    }

    #[test]
    fn benchmark_ground_bits() {
        assert_eq!(ProblemInstance::benchmark().ground_bits(), Some(vec![true, true]));
        let flat = ProblemInstance::new(vec![0.0], vec![]).unwrap();
        assert_eq!(flat.ground_bits(), None);
    }

    #[test]
    fn schedule_endpoints_and_ordering() {
        let s = sched();
        assert_eq!(s.a_coeff(0.0), 10.0);
        assert_eq!(s.b_coeff(0.0), 0.0);
        assert_eq!(s.a_coeff(1000.0), 0.0);
        assert_eq!(s.b_coeff(1000.0), 10.0);
        assert!(s.check_ordering().is_ok());
        let lit = AnnealSchedule::new(10.0, 1000.0, ScheduleForm::LinearPaperLiteral).unwrap();
        assert!(lit.check_ordering().is_err());
        assert!(AnnealSchedule::standard(0.0, 1.0).is_err());
        assert!(AnnealSchedule::standard(1.0, -1.0).is_err());
    }

    #[test]
    fn ancilla_start_is_pair_driver_spectrum() {
        let inst = ProblemInstance::new(vec![0.3], vec![]).unwrap();
        let h = hamiltonian_at(0.0, &sched(), &inst, DriverKind::Ancilla { c: -0.5 }).unwrap();
        let es = crate::eigen::hermitian_eigensystem(&h, 1e-8).unwrap();
        for (v, e) in es.values.iter().zip([-15.0, -5.0, 5.0, 15.0]) {
            assert!((v - e).abs() < 1e-12);
        }
    }

    #[test]
    fn ancilla_end_is_problem_only() {
        let inst = ProblemInstance::benchmark();
        let h = hamiltonian_at(1000.0, &sched(), &inst, DriverKind::Ancilla { c: -0.5 }).unwrap();
        let expected = problem_hamiltonian(&inst, Placement::Ancilla).scale_real(10.0);
        assert_eq!(h, expected);
    }

    #[test]
    fn hamiltonian_rejects_time_outside_window() {
        let inst = ProblemInstance::benchmark();
        assert!(matches!(
            hamiltonian_at(1000.5, &sched(), &inst, DriverKind::Conventional),
            Err(Error::TimeOutOfRange { .. })
        ));
        assert!(hamiltonian_at(-1.0, &sched(), &inst, DriverKind::Conventional).is_err());
    }

    #[test]
    fn parities_are_conserved() {
        let inst = ProblemInstance::benchmark();
        for t in [0.0, 333.0, 1000.0] {
            let h = hamiltonian_at(t, &sched(), &inst, DriverKind::Ancilla { c: -0.5 }).unwrap();
            for i in 1..=2 {
                let zz = pauli_string(&[(2 * i - 1, Axis::Z), (2 * i, Axis::Z)], 4).unwrap();
                assert!(h.commutator(&zz).frobenius_norm() < TOL);
            }
        }
    }

    #[test]
    fn w_for_one_pair_matches_written_matrix() {
        let w = build_w(1).unwrap();
        assert_eq!(w, pair_cnot());
        // Operator form: σx ⊗ (I - σz)/2 + I ⊗ (I + σz)/2
        let x = ComplexMatrix::pauli(Axis::X);
        let z = ComplexMatrix::pauli(Axis::Z);
        let i2 = ComplexMatrix::identity(2);
        let lo = (i2.clone() - z.clone()).scale_real(0.5);
        let hi = (i2.clone() + z).scale_real(0.5);
        let formula = kron(&x, &lo).unwrap() + kron(&i2, &hi).unwrap();
        assert_eq!(w, formula);
    }

    #[test]
    fn w_is_involution_and_maps_parity_to_ancilla_z() {
        for n in 1..=3 {
            let w = build_w(n).unwrap();
            assert_eq!(w.matmul(&w), ComplexMatrix::identity(1 << (2 * n)));
            for i in 1..=n {
                let zz = pauli_string(&[(2 * i - 1, Axis::Z), (2 * i, Axis::Z)], 2 * n).unwrap();
                let za = pauli_on(2 * i - 1, Axis::Z, 2 * n).unwrap();
                let conj = w.adjoint().matmul(&zz.matmul(&w));
                assert_eq!(conj, za);
            }
        }
    }

    #[test]
    fn sector_transverse_factors() {
        let inst = ProblemInstance::new(vec![0.0, 0.0], vec![]).unwrap();
        let s = sched();
        let t = 250.0;
        let ones = block_hamiltonian(t, &s, &inst, -0.5, &SectorLabel::all_ones(2)).unwrap();
        let zeros = block_hamiltonian(t, &s, &inst, -0.5, &SectorLabel::from_index(0, 2)).unwrap();
        let a = s.a_coeff(t);
        let x1 = pauli_on(1, Axis::X, 2).unwrap();
        let x2 = pauli_on(2, Axis::X, 2).unwrap();
        let expect_ones = (x1.clone() + x2.clone()).scale_real(-1.5 * a);
        let expect_zeros = (x1 + x2).scale_real(0.5 * a);
        assert!(ones.max_abs_diff(&expect_ones) < TOL);
        assert!(zeros.max_abs_diff(&expect_zeros) < TOL);
    }

    #[test]
    fn sector_problem_part_ignores_label() {
        let inst = ProblemInstance::benchmark();
        let s = sched();
        let t = 1000.0;
        let a = block_hamiltonian(t, &s, &inst, -0.5, &SectorLabel::from_index(1, 2)).unwrap();
        let b = block_hamiltonian(t, &s, &inst, -0.5, &SectorLabel::from_index(2, 2)).unwrap();
        assert_eq!(a, b);
        assert!(block_hamiltonian(t, &s, &inst, -0.5, &SectorLabel::all_ones(3)).is_err());
    }

    #[test]
    fn block_assembly_matches_conjugated_hamiltonian() {
        let inst = ProblemInstance::benchmark();
        let s = sched();
        let w = build_w(2).unwrap();
        let perm = ancillas_first_permutation(2);
        for t in [0.0, 500.0, 1000.0] {
            let h = hamiltonian_at(t, &s, &inst, DriverKind::Ancilla { c: -0.5 }).unwrap();
            let conj = w.adjoint().matmul(&h.matmul(&w)).permute_basis(&perm);
            let blocks = assemble_block_diagonal(t, &s, &inst, -0.5).unwrap();
            assert!(conj.max_abs_diff(&blocks) < TOL, "t = {t}");
        }
    }

    #[test]
    fn block_assembly_single_pair_is_two_blocks() {
        let inst = ProblemInstance::new(vec![0.7], vec![]).unwrap();
        let s = sched();
        let m = assemble_block_diagonal(100.0, &s, &inst, -0.5).unwrap();
        let b0 = block_hamiltonian(100.0, &s, &inst, -0.5, &SectorLabel::from_index(0, 1)).unwrap();
        let b1 = block_hamiltonian(100.0, &s, &inst, -0.5, &SectorLabel::from_index(1, 1)).unwrap();
        assert_eq!(m.submatrix(&[0, 1]), b0);
        assert_eq!(m.submatrix(&[2, 3]), b1);
        assert_eq!(m[(0, 2)], C64::new(0.0, 0.0));
    }

    #[test]
    fn initial_states() {
        let conv = initial_state(DriverKind::Conventional, 2).unwrap();
        for z in conv.amplitudes() {
            assert!((z.re - 0.5).abs() < 1e-15 && z.im == 0.0);
        }
        let anc = initial_state(DriverKind::Ancilla { c: -0.5 }, 1).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let expected = [0.0, r, r, 0.0];
        for (z, e) in anc.amplitudes().iter().zip(expected) {
            assert!((z.re - e).abs() < 1e-15);
        }
        assert!(matches!(
            initial_state(DriverKind::Ancilla { c: 0.5 }, 1),
            Err(Error::InvalidDriver(_))
        ));
    }

    #[test]
    fn initial_energy_is_pair_ground_energy() {
        let s = sched();
        let c = -0.5;
        for n in 1..=2 {
            let inst = ProblemInstance::new(vec![0.4; n], vec![]).unwrap();
            let h = hamiltonian_at(0.0, &s, &inst, DriverKind::Ancilla { c }).unwrap();
            let psi = initial_state(DriverKind::Ancilla { c }, n).unwrap();
            let e = h.expectation(psi.amplitudes()).re;
            assert!((e - n as f64 * 10.0 * (c - 1.0)).abs() < 1e-12);
            let g = ground_state(&h).unwrap();
            let overlap: C64 = g.amplitudes().iter().zip(psi.amplitudes()).map(|(a, b)| a.conj() * b).sum();
            assert!((overlap.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_ground_state_is_refused() {
        // Literal schedule: H(0) is the problem diagonal, ancillas are free.
        let lit = AnnealSchedule::new(10.0, 1000.0, ScheduleForm::LinearPaperLiteral).unwrap();
        let h = hamiltonian_at(0.0, &lit, &ProblemInstance::benchmark(), DriverKind::Ancilla { c: -0.5 }).unwrap();
        assert!(matches!(ground_state(&h), Err(Error::DegenerateGroundState { .. })));
    }

    #[test]
    fn marginals() {
        // |10>: ancilla = 1, physical = 0
        let mut v = vec![C64::new(0.0, 0.0); 4];
        v[2] = C64::new(1.0, 0.0);
        let rho = ComplexMatrix::outer(&v);
        assert_eq!(physical_marginal(&rho, &[false]).unwrap(), 1.0);
        assert_eq!(physical_marginal(&rho, &[true]).unwrap(), 0.0);

        let psi = initial_state(DriverKind::Ancilla { c: -0.5 }, 1).unwrap();
        let rho = psi.projector();
        assert!((physical_marginal(&rho, &[false]).unwrap() - 0.5).abs() < 1e-15);
        assert!((physical_marginal(&rho, &[true]).unwrap() - 0.5).abs() < 1e-15);

        let psi2 = initial_state(DriverKind::Ancilla { c: -0.5 }, 2).unwrap();
        let dist = physical_distribution(&psi2.projector(), 2).unwrap();
        assert!((dist.iter().sum::<f64>() - 1.0).abs() < 1e-14);

        let bad = ComplexMatrix::identity(4);
        assert!(matches!(physical_marginal(&bad, &[false]), Err(Error::TraceDeviation { .. })));
    }

    #[test]
    fn bit_helpers() {
        assert_eq!(parse_bits("101").unwrap(), vec![true, false, true]);
        assert!(parse_bits("12").is_err());
        assert_eq!(bits_to_string(&[true, true]), "11");
        assert_eq!(physical_index(0b0101, 2), 0b11);
        assert_eq!(ancilla_index(0b1010, 2), 0b11);
    }
}
