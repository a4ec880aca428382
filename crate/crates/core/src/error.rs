use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("operator dimension {requested} exceeds cap {cap}")]
    DimensionCap { requested: usize, cap: usize },
    #[error("site {site} out of range for a {n_qubits}-qubit register")]
    SiteOutOfRange { site: usize, n_qubits: usize },
    #[error("matrix is not self-adjoint (max |M - M^dagger| = {defect:.3e})")]
    NotSelfAdjoint { defect: f64 },
    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off:.3e})")]
    EigenNoConvergence { sweeps: usize, off: f64 },
    #[error("invalid gap tolerance {0}")]
    InvalidGapTolerance(f64),
    #[error("invalid problem instance: {0}")]
    InvalidInstance(String),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("time {t} outside [0, {total}]")]
    TimeOutOfRange { t: f64, total: f64 },
    #[error("invalid driver: {0}")]
    InvalidDriver(String),
    #[error("ground state of the initial Hamiltonian is degenerate (gap {gap:.3e})")]
    DegenerateGroundState { gap: f64 },
    #[error("sector label has {got} bits, expected {expected}")]
    SectorLength { expected: usize, got: usize },
    #[error("coupling list has {got} entries, register has {expected} qubits")]
    CouplingLength { expected: usize, got: usize },
    #[error("invalid bath: {0}")]
    InvalidBath(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("trace deviates from 1 by {deviation:.3e}")]
    TraceDeviation { deviation: f64 },
    #[error("norm drift {drift:.3e} at t = {t} exceeds limit; reduce the step (dt = {dt})")]
    NormDrift { drift: f64, t: f64, dt: f64 },
    #[error("density matrix left the state space at t = {t}: trace deviation {trace_dev:.3e}, min eigenvalue {min_eig:.3e} (dt = {dt})")]
    StateViolation { t: f64, trace_dev: f64, min_eig: f64, dt: f64 },
    #[error("reduced sector dynamics requires zero transversal couplings")]
    TransversalInReduced,
    #[error("invalid integration settings: {0}")]
    InvalidIntegration(String),
}
