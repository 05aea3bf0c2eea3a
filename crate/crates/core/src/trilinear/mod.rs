//! Pump/signal/idler dynamics under `H = ħχ·i(a b†c† − a† b c)` at four levels of approximation:
//! classical-pump (parametric), semiclassical pump depletion, the short-time quantum expansion
//! and direct numerical evolution in a truncated Fock space.

mod full;
mod parametric;
mod short_time;

pub use full::{build_interaction_hamiltonian, evolve_full, evolve_full_with, interaction_generator, outward_leak, Trajectory};
pub use parametric::{
    parametric_occupation, parametric_state, parametric_temperature, semiclassical_betas, semiclassical_occupation,
    semiclassical_pump, SemiclassicalCurve,
};
pub use short_time::{
    long_time_signal, short_time_coefficient, short_time_ln_normalization, short_time_reduced, short_time_state,
    short_time_weights, ShortTimeBranch, ShortTimeReduced, ShortTimeState,
};

use crate::fock::{coherent_state, FockError, HilbertSpec};
use crate::numerics::NumericsError;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrilinearError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("truncation leak {leak:.3e} in mode {mode} at tau = {tau}")]
    Truncation { mode: usize, leak: f64, tau: f64 },
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Mode frequencies, coupling and truncation for the three-mode problem.
#[derive(Debug, Clone, PartialEq)]
pub struct TrilinearParams {
    pub chi: f64,
    pub omega_a: f64,
    pub omega_b: f64,
    pub omega_c: f64,
    spec: HilbertSpec,
}

impl TrilinearParams {
    pub fn new(chi: f64, omega_a: f64, omega_b: f64, omega_c: f64, spec: HilbertSpec) -> Result<Self, TrilinearError> {
        if spec.modes() != 3 {
            return Err(TrilinearError::Domain(format!("need 3 modes, got {}", spec.modes())));
        }
        if !(chi > 0.0) || !(omega_b > 0.0) || !(omega_c > 0.0) {
            return Err(TrilinearError::Domain("coupling and frequencies must be positive".into()));
        }
        if (omega_a - omega_b - omega_c).abs() > 1e-12 * omega_a.abs() {
            return Err(TrilinearError::Domain(format!("omega_a = {omega_a} != omega_b + omega_c = {}", omega_b + omega_c)));
        }
        Ok(Self { chi, omega_a, omega_b, omega_c, spec })
    }

    /// Degenerate signal/idler, `ω_b = ω_c = ω_a / 2`.
    pub fn degenerate(chi: f64, omega_a: f64, spec: HilbertSpec) -> Result<Self, TrilinearError> {
        Self::new(chi, omega_a, omega_a / 2.0, omega_a / 2.0, spec)
    }

    pub fn spec(&self) -> &HilbertSpec {
        &self.spec
    }
}

/// Pump amplitudes `a_s` over Fock index `s`; signal and idler start in vacuum.
#[derive(Debug, Clone, PartialEq)]
pub struct PumpInitialState {
    coeffs: Vec<Complex64>,
}

impl PumpInitialState {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self, TrilinearError> {
        let norm: f64 = coeffs.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(TrilinearError::Domain(format!("pump probabilities sum to {norm}")));
        }
        Ok(Self { coeffs })
    }

    pub fn fock(s: usize) -> Self {
        let mut coeffs = vec![Complex64::default(); s + 1];
        coeffs[s] = Complex64::new(1.0, 0.0);
        Self { coeffs }
    }

    /// Truncated coherent pump with mean occupation `|α|²`.
    pub fn coherent(alpha: Complex64, dim: usize) -> Result<Self, TrilinearError> {
        let psi = coherent_state(alpha, dim)?;
        Ok(Self { coeffs: psi.amplitudes().to_vec() })
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.coeffs.iter().map(|z| z.norm_sqr()).collect()
    }

    /// Number of pump levels carried (highest `s` + 1).
    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn mean(&self) -> f64 {
        self.probabilities().iter().enumerate().map(|(s, p)| s as f64 * p).sum()
    }
}
