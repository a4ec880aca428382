//! Adiabatic Lindblad generator with jump operators built in the
//! instantaneous eigenbasis of `H(t)`.
//!
//! For each coupling axis α with collective operator `C_α = Σ_i g_i σ^α_i`
//! and each Bohr-frequency bin ω, the jump operator is
//! `A_{α,ω} = Σ_{E_b - E_a ∈ ω} P_a C_α P_b`, and
//!
//! ```text
//! dρ/dt = -i[H, ρ] + Σ_{α,ω} γ(ω) (A ρ A† - ½{A†A, ρ})
//! ```
//!
//! The collective form is the exact factorisation of the per-site double sum
//! for a shared reservoir. Cross-axis (x-z) terms are not included.

use crate::bath::{weighted_sum, BathConfig, OhmicSpectrum};
use crate::eigen::{hermitian_eigensystem, EigenSystem};
use crate::error::{Error, Result};
use crate::linalg::{Axis, ComplexMatrix, C64};
use crate::model::{
    ancillas_first_permutation, build_w, AnnealSchedule, AnnealingHamiltonian, DriverKind,
    Hamiltonian, ProblemInstance, SectorLabel,
};

/// Matrix elements below this magnitude are dropped from jump operators.
const PRUNE_TOL: f64 = 1e-14;
const STATE_TOL: f64 = 1e-6;

/// System operator through which the register talks to the bath.
#[derive(Clone, Debug)]
pub struct CouplingChannel {
    pub axis: Axis,
    pub operator: ComplexMatrix,
}

#[derive(Clone, Debug)]
pub struct LindbladEntry {
    pub axis: Axis,
    pub omega: f64,
    pub operator: ComplexMatrix,
    pub rate: f64,
}

/// Jump operators at one instant, in the computational basis.
#[derive(Clone, Debug)]
pub struct LindbladSet {
    pub t: f64,
    pub entries: Vec<LindbladEntry>,
}

impl LindbladSet {
    /// `Σ_ω A_{α,ω}`, which reproduces `C_α`.
    pub fn sum_for(&self, axis: Axis, dim: usize) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(dim);
        for e in self.entries.iter().filter(|e| e.axis == axis) {
            out = out + e.operator.clone();
        }
        out
    }

    pub fn find(&self, axis: Axis, omega: f64) -> Option<&LindbladEntry> {
        self.entries.iter().find(|e| e.axis == axis && e.omega == omega)
    }
}

/// Sparse jump operator in the eigenbasis; `span` indexes the frame's
/// entry list of `(a, b, ⟨a|C|b⟩)`.
#[derive(Clone, Debug)]
struct Jump {
    axis: Axis,
    omega: f64,
    rate: f64,
    span: std::ops::Range<usize>,
}

/// Everything the generator needs at a fixed time.
#[derive(Clone, Debug)]
pub struct GeneratorFrame {
    pub t: f64,
    pub eigen: EigenSystem,
    jumps: Vec<Jump>,
    entries: Vec<(usize, usize, C64)>,
    /// `-i diag(E) - ½ Σ γ A†A`, eigenbasis.
    effective: ComplexMatrix,
}

impl GeneratorFrame {
    pub fn dim(&self) -> usize {
        self.eigen.dim()
    }

    /// dρ/dt for a density matrix given in the computational basis.
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let rt = self.eigen.to_eigenbasis(rho);
        let out = self.apply_eigenbasis(&rt);
        self.eigen.from_eigenbasis(&out)
    }

    /// Dissipative part only, computational basis.
    pub fn dissipator(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let rt = self.eigen.to_eigenbasis(rho);
        let n = self.dim();
        let mut k = self.effective.clone();
        for i in 0..n {
            k[(i, i)] += C64::i() * self.eigen.values[i];
        }
        let mut out = k.matmul(&rt) + rt.matmul(&k.adjoint());
        self.add_jumps(&rt, &mut out);
        self.eigen.from_eigenbasis(&out)
    }

    fn apply_eigenbasis(&self, rt: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.effective.matmul(rt) + rt.matmul(&self.effective.adjoint());
        self.add_jumps(rt, &mut out);
        out
    }

    fn add_jumps(&self, rt: &ComplexMatrix, out: &mut ComplexMatrix) {
        for jump in &self.jumps {
            let entries = &self.entries[jump.span.clone()];
            for &(a, b, v1) in entries {
                let left = v1 * jump.rate;
                for &(c, d, v2) in entries {
                    out[(a, c)] += left * rt[(b, d)] * v2.conj();
                }
            }
        }
    }

    pub fn lindblad_set(&self) -> LindbladSet {
        let n = self.dim();
        let entries = self
            .jumps
            .iter()
            .map(|j| {
                let mut op = ComplexMatrix::zeros(n);
                for &(a, b, v) in &self.entries[j.span.clone()] {
                    op[(a, b)] = v;
                }
                LindbladEntry {
                    axis: j.axis,
                    omega: j.omega,
                    operator: self.eigen.from_eigenbasis(&op),
                    rate: j.rate,
                }
            })
            .collect();
        LindbladSet { t: self.t, entries }
    }
}

/// Time-dependent GKSL generator for a Hamiltonian and a set of bath channels.
#[derive(Clone, Debug)]
pub struct Liouvillian<H> {
    hamiltonian: H,
    channels: Vec<CouplingChannel>,
    spectrum: OhmicSpectrum,
    gap_tol: f64,
}

impl<H: Hamiltonian> Liouvillian<H> {
    /// Channels with an all-zero operator are dropped.
    pub fn new(
        hamiltonian: H,
        channels: Vec<CouplingChannel>,
        spectrum: OhmicSpectrum,
        gap_tol: f64,
    ) -> Result<Self> {
        if !(gap_tol > 0.0 && gap_tol.is_finite()) {
            return Err(Error::InvalidGapTolerance(gap_tol));
        }
        let dim = hamiltonian.dim();
        for ch in &channels {
            if ch.operator.dim() != dim {
                return Err(Error::CouplingLength { expected: dim, got: ch.operator.dim() });
            }
        }
        let channels = channels.into_iter().filter(|c| c.operator.max_abs() > 0.0).collect();
        Ok(Self { hamiltonian, channels, spectrum, gap_tol })
    }

    pub fn hamiltonian(&self) -> &H {
        &self.hamiltonian
    }

    pub fn channels(&self) -> &[CouplingChannel] {
        &self.channels
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    /// Eigendecomposition, bins and jump operators at time `t`.
    pub fn frame(&self, t: f64) -> Result<GeneratorFrame> {
        let h = self.hamiltonian.at(t);
        let eigen = hermitian_eigensystem(&h, self.gap_tol)?;
        let n = eigen.dim();
        let mut jumps = Vec::new();
        let mut entries = Vec::new();
        let mut tagged: Vec<(usize, usize, usize, C64)> = Vec::new();
        for ch in &self.channels {
            let ct = eigen.to_eigenbasis(&ch.operator);
            let cut = PRUNE_TOL * ch.operator.max_abs();
            tagged.clear();
            for a in 0..n {
                for (b, &v) in ct.row(a).iter().enumerate() {
                    if v.norm_sqr() > cut * cut {
                        tagged.push((eigen.bin_of(a, b), a, b, v));
                    }
                }
            }
            tagged.sort_unstable_by_key(|e| (e.0, e.1, e.2));
            for group in tagged.chunk_by(|x, y| x.0 == y.0) {
                let omega = eigen.bin_omegas()[group[0].0];
                let start = entries.len();
                entries.extend(group.iter().map(|e| (e.1, e.2, e.3)));
                jumps.push(Jump {
                    axis: ch.axis,
                    omega,
                    rate: self.spectrum.gamma(omega),
                    span: start..entries.len(),
                });
            }
        }
        let mut effective = ComplexMatrix::zeros(n);
        for i in 0..n {
            effective[(i, i)] = C64::new(0.0, -eigen.values[i]);
        }
        for jump in &jumps {
            // (A†A)_{bd} = Σ_a conj(A_ab) A_ad
            let group = &entries[jump.span.clone()];
            for &(a1, b, v1) in group {
                for &(a2, d, v2) in group {
                    if a1 == a2 {
                        effective[(b, d)] -= 0.5 * jump.rate * v1.conj() * v2;
                    }
                }
            }
        }
        Ok(GeneratorFrame { t, eigen, jumps, entries, effective })
    }

    pub fn lindblad_operators(&self, t: f64) -> Result<LindbladSet> {
        Ok(self.frame(t)?.lindblad_set())
    }

    /// dρ/dt with state preconditions checked.
    pub fn apply(&self, t: f64, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_state(rho, self.dim())?;
        Ok(self.frame(t)?.apply(rho))
    }
}

pub(crate) fn check_state(rho: &ComplexMatrix, dim: usize) -> Result<()> {
    if rho.dim() != dim {
        return Err(Error::InvalidState(format!(
            "density matrix has dimension {}, generator expects {dim}",
            rho.dim()
        )));
    }
    let defect = rho.hermiticity_defect();
    if defect > STATE_TOL {
        return Err(Error::InvalidState(format!("density matrix not self-adjoint ({defect:.3e})")));
    }
    let deviation = (rho.trace() - C64::new(1.0, 0.0)).norm();
    if deviation > STATE_TOL {
        return Err(Error::TraceDeviation { deviation });
    }
    Ok(())
}

fn bath_channels(bath: &BathConfig, n_qubits: usize) -> Result<Vec<CouplingChannel>> {
    [Axis::X, Axis::Z]
        .into_iter()
        .map(|axis| {
            Ok(CouplingChannel { axis, operator: weighted_sum(axis, bath.couplings(axis), n_qubits)? })
        })
        .collect()
}

impl Liouvillian<AnnealingHamiltonian> {
    /// Generator on the full register of the given driver.
    pub fn full(
        sched: AnnealSchedule,
        inst: &ProblemInstance,
        driver: DriverKind,
        bath: &BathConfig,
        gap_tol: f64,
    ) -> Result<Self> {
        let nq = driver.register_qubits(inst.n_vars());
        let channels = bath_channels(bath, nq)?;
        Self::new(AnnealingHamiltonian::new(sched, inst, driver)?, channels, bath.spectrum(), gap_tol)
    }

    /// Generator restricted to the all-ones sector, on the `N` physical
    /// qubits: Hamiltonian `H̃_1(t)` and collective operator
    /// `Σ_i (g^z_{2i} - g^z_{2i-1}) σ^z_i`. Only longitudinal coupling is
    /// supported.
    pub fn reduced(
        sched: AnnealSchedule,
        inst: &ProblemInstance,
        c: f64,
        bath: &BathConfig,
        gap_tol: f64,
    ) -> Result<Self> {
        let n = inst.n_vars();
        if bath.gz.len() != 2 * n {
            return Err(Error::CouplingLength { expected: 2 * n, got: bath.gz.len() });
        }
        if bath.gx.iter().any(|&g| g != 0.0) {
            return Err(Error::TransversalInReduced);
        }
        let effective: Vec<f64> = (0..n).map(|i| bath.gz[2 * i + 1] - bath.gz[2 * i]).collect();
        let channels = vec![CouplingChannel { axis: Axis::Z, operator: weighted_sum(Axis::Z, &effective, n)? }];
        let ham = AnnealingHamiltonian::sector(sched, inst, c, &SectorLabel::all_ones(n))?;
        Self::new(ham, channels, bath.spectrum(), gap_tol)
    }
}

/// Jump operators of the full-register generator at `t`.
pub fn lindblad_operators(
    t: f64,
    sched: &AnnealSchedule,
    inst: &ProblemInstance,
    driver: DriverKind,
    bath: &BathConfig,
    gap_tol: f64,
) -> Result<LindbladSet> {
    sched.check_time(t)?;
    Liouvillian::full(*sched, inst, driver, bath, gap_tol)?.lindblad_operators(t)
}

/// Full-register dρ/dt.
pub fn liouvillian_apply(
    t: f64,
    rho: &ComplexMatrix,
    sched: &AnnealSchedule,
    inst: &ProblemInstance,
    driver: DriverKind,
    bath: &BathConfig,
    gap_tol: f64,
) -> Result<ComplexMatrix> {
    sched.check_time(t)?;
    Liouvillian::full(*sched, inst, driver, bath, gap_tol)?.apply(t, rho)
}

/// All-ones-sector dρ/dt on the physical register.
pub fn reduced_liouvillian_apply(
    t: f64,
    rho: &ComplexMatrix,
    sched: &AnnealSchedule,
    inst: &ProblemInstance,
    c: f64,
    bath: &BathConfig,
    gap_tol: f64,
) -> Result<ComplexMatrix> {
    sched.check_time(t)?;
    Liouvillian::reduced(*sched, inst, c, bath, gap_tol)?.apply(t, rho)
}

/// Projector onto the all-ones sector (`σ^z_{2i-1} σ^z_{2i} = -1` for every
/// pair) of a `2N`-qubit register.
pub fn all_ones_sector_projector(n_vars: usize) -> ComplexMatrix {
    let dim = 1usize << (2 * n_vars);
    let diag: Vec<f64> = (0..dim)
        .map(|idx| {
            let odd_parity_everywhere = (0..n_vars).all(|i| {
                let pair = (idx >> (2 * (n_vars - 1 - i))) & 0b11;
                pair == 0b01 || pair == 0b10
            });
            if odd_parity_everywhere { 1.0 } else { 0.0 }
        })
        .collect();
    ComplexMatrix::from_diagonal(&diag)
}

/// Maps a physical-register state of the all-ones sector to the full
/// register: `W (|1…1⟩⟨1…1|_anc ⊗ ρ) W†`.
pub fn embed_all_ones(rho: &ComplexMatrix, n_vars: usize) -> Result<ComplexMatrix> {
    let w = build_w(n_vars)?;
    let perm = ancillas_first_permutation(n_vars);
    let dim = 1usize << (2 * n_vars);
    // ancillas-first index of (ancillas = 1…1, physical = p)
    let base = ((1usize << n_vars) - 1) << n_vars;
    let mut framed = ComplexMatrix::zeros(dim);
    for p in 0..rho.dim() {
        for q in 0..rho.dim() {
            framed[(base | p, base | q)] = rho[(p, q)];
        }
    }
    let mut inverse = vec![0; dim];
    for (i, &pi) in perm.iter().enumerate() {
        inverse[pi] = i;
    }
    let interleaved = framed.permute_basis(&inverse);
    Ok(w.matmul(&interleaved.matmul(&w.adjoint())))
}

/// Inverse of [`embed_all_ones`]: the all-ones block of `W† ρ W`.
pub fn extract_all_ones(rho: &ComplexMatrix, n_vars: usize) -> Result<ComplexMatrix> {
    let w = build_w(n_vars)?;
    let perm = ancillas_first_permutation(n_vars);
    let framed = w.adjoint().matmul(&rho.matmul(&w)).permute_basis(&perm);
    let base = ((1usize << n_vars) - 1) << n_vars;
    let idx: Vec<usize> = (0..1usize << n_vars).map(|p| base | p).collect();
    Ok(framed.submatrix(&idx))
}
