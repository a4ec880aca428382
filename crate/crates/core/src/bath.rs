//! Ohmic bath rates and the collective system operators through which the
//! register couples to a single shared reservoir.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{pauli_on, Axis, ComplexMatrix, C64};
use crate::model::DriverKind;

/// Thermal Ohmic spectral function without Lamb shift.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OhmicSpectrum {
    /// Inverse temperature, ns.
    pub beta: f64,
    /// Coupling strength, (rad/ns)^-2.
    pub eta: f64,
    /// High-frequency cutoff, rad/ns.
    pub omega_c: f64,
}

impl OhmicSpectrum {
    /// `γ(ω) = η|ω| e^{-|ω|/ω_c} / (1 - e^{-β|ω|})`, multiplied by
    /// `e^{-β|ω|}` for ω < 0; the ω → 0 limit is `η/β`.
    pub fn gamma(&self, omega: f64) -> f64 {
        let w = omega.abs();
        if w == 0.0 {
            return self.eta / self.beta;
        }
        let x = self.beta * w;
        // η w e^{-w/ω_c} / (1 - e^{-x}), with 1 - e^{-x} = -expm1(-x)
        let emission = self.eta * w * (-w / self.omega_c).exp() / -(-x).exp_m1();
        if omega > 0.0 {
            emission
        } else {
            emission * (-x).exp()
        }
    }
}

/// Reservoir parameters and per-qubit coupling weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BathConfig {
    pub beta: f64,
    pub eta: f64,
    pub omega_c: f64,
    /// Longitudinal (σ^z) couplings per register qubit, rad/ns.
    pub gz: Vec<f64>,
    /// Transversal (σ^x) couplings per register qubit, rad/ns.
    pub gx: Vec<f64>,
}

/// `1/β = 1.57`, `η = 0.2`, `ω_c = 8π`.
pub const REFERENCE_TEMPERATURE: f64 = 1.57;
pub const REFERENCE_ETA: f64 = 0.2;
pub const REFERENCE_CUTOFF: f64 = 8.0 * std::f64::consts::PI;

impl BathConfig {
    pub fn new(beta: f64, eta: f64, omega_c: f64, gz: Vec<f64>, gx: Vec<f64>) -> Result<Self> {
        for (name, v) in [("beta", beta), ("eta", eta), ("omega_c", omega_c)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidBath(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if gz.len() != gx.len() {
            return Err(Error::InvalidBath(format!(
                "gz has {} entries but gx has {}",
                gz.len(),
                gx.len()
            )));
        }
        if let Some(g) = gz.iter().chain(&gx).find(|g| !g.is_finite()) {
            return Err(Error::InvalidBath(format!("non-finite coupling {g}")));
        }
        Ok(Self { beta, eta, omega_c, gz, gx })
    }

    /// Reference reservoir with uniform couplings on `n_qubits` qubits.
    pub fn uniform(n_qubits: usize, gz: f64, gx: f64) -> Result<Self> {
        Self::new(
            1.0 / REFERENCE_TEMPERATURE,
            REFERENCE_ETA,
            REFERENCE_CUTOFF,
            vec![gz; n_qubits],
            vec![gx; n_qubits],
        )
    }

    pub fn spectrum(&self) -> OhmicSpectrum {
        OhmicSpectrum { beta: self.beta, eta: self.eta, omega_c: self.omega_c }
    }

    pub fn gamma(&self, omega: f64) -> f64 {
        self.spectrum().gamma(omega)
    }

    pub fn couplings(&self, axis: Axis) -> &[f64] {
        match axis {
            Axis::X => &self.gx,
            Axis::Z => &self.gz,
            Axis::Y => &[],
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.gz.len()
    }
}

/// Free-function form of [`OhmicSpectrum::gamma`].
pub fn gamma(omega: f64, bath: &BathConfig) -> f64 {
    bath.gamma(omega)
}

/// `Σ_i g^α_i σ^α_i` on the register implied by `driver` and `n_vars`.
pub fn collective_coupling(
    axis: Axis,
    bath: &BathConfig,
    driver: DriverKind,
    n_vars: usize,
) -> Result<ComplexMatrix> {
    let nq = driver.register_qubits(n_vars);
    weighted_sum(axis, bath.couplings(axis), nq)
}

/// `Σ_i w_i σ^α_i` over an `n_qubits` register.
pub fn weighted_sum(axis: Axis, weights: &[f64], n_qubits: usize) -> Result<ComplexMatrix> {
    if weights.len() != n_qubits {
        return Err(Error::CouplingLength { expected: n_qubits, got: weights.len() });
    }
    let mut out = ComplexMatrix::zeros(1 << n_qubits);
    for (i, &w) in weights.iter().enumerate() {
        if w != 0.0 {
            out.add_scaled(C64::new(w, 0.0), &pauli_on(i + 1, axis, n_qubits)?);
        }
    }
    Ok(out)
}
