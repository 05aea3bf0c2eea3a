//! Entropy, fidelity, information content, effective dimension, mutual information and
//! quadrature squeezing of reduced Fock-space states.

use crate::constants::{BOLTZMANN, HBAR};
use crate::fock::{embed, expectation, ladder_ops, partial_trace, DensityMatrix, FockError, HilbertSpec, QuantumState, StateVector};
use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

const EIGEN_FLOOR: f64 = 1e-12;
const NEGATIVE_TOL: f64 = 1e-9;
const CLIP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InfoError {
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("dimension mismatch: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Fock(#[from] FockError),
}

/// Hermitian eigendecomposition `(values, vectors)`.
fn eigh(m: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let e = m.clone().symmetric_eigen();
    (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
}

fn checked_spectrum(rho: &DensityMatrix) -> Result<Vec<f64>, InfoError> {
    let ev = rho.eigenvalues();
    if let Some(&min) = ev.first() {
        if min < -NEGATIVE_TOL {
            return Err(InfoError::InvalidState(format!("eigenvalue {min:.3e} below zero")));
        }
    }
    Ok(ev)
}

/// `−Σ λ ln λ` in nats; eigenvalues below 1e-12 count as zero.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64, InfoError> {
    Ok(checked_spectrum(rho)?.iter().filter(|&&l| l > EIGEN_FLOOR).map(|&l| -l * l.ln()).sum())
}

/// Entropy of a thermal oscillator with mean occupation `n̄`: `(n̄+1) ln(n̄+1) − n̄ ln n̄`.
pub fn thermal_entropy(mean: f64) -> f64 {
    if mean <= 0.0 {
        return 0.0;
    }
    (mean + 1.0) * (mean + 1.0).ln() - mean * mean.ln()
}

/// Temperature at which a Bose occupation of `ω` equals `n̄`; zero for `n̄ ≤ 0`.
pub fn effective_temperature(mean: f64, omega: f64) -> f64 {
    if mean <= 0.0 {
        return 0.0;
    }
    HBAR * omega / (BOLTZMANN * (1.0 / mean).ln_1p())
}

/// Inverse purity of the thermal state with mean `n̄`, `2n̄ + 1`.
pub fn effective_dimension(mean: f64) -> f64 {
    2.0 * mean.max(0.0) + 1.0
}

/// Thermal comparison state for a single mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalReference {
    pub mean_occupation: f64,
    pub omega: f64,
    pub dim: usize,
}

impl ThermalReference {
    pub fn new(mean_occupation: f64, omega: f64, dim: usize) -> Result<Self, InfoError> {
        if !(mean_occupation >= 0.0) {
            return Err(InfoError::InvalidState(format!("mean occupation {mean_occupation} < 0")));
        }
        if dim < 2 {
            return Err(InfoError::Mismatch(format!("dim {dim} < 2")));
        }
        Ok(Self { mean_occupation, omega, dim })
    }

    pub fn temperature(&self) -> f64 {
        effective_temperature(self.mean_occupation, self.omega)
    }

    /// Probability beyond the truncation, `(n̄/(n̄+1))^dim`.
    pub fn truncation_leak(&self) -> f64 {
        let n = self.mean_occupation;
        (n / (n + 1.0)).powi(self.dim as i32)
    }

    /// Truncated, renormalized geometric distribution.
    pub fn density(&self) -> Result<DensityMatrix, InfoError> {
        let n = self.mean_occupation;
        let r = n / (n + 1.0);
        let mut p: Vec<f64> = (0..self.dim).map(|k| r.powi(k as i32) / (n + 1.0)).collect();
        let total: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= total);
        Ok(DensityMatrix::from_diagonal(HilbertSpec::single(self.dim)?, &p)?)
    }
}

fn sqrtm_psd(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let (vals, vecs) = eigh(m);
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&l| Complex64::new(l.max(0.0).sqrt(), 0.0)),
    ));
    &vecs * d * vecs.adjoint()
}

/// `Tr √(√ρ σ √ρ)`, clipped to `[0, 1]`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64, InfoError> {
    if rho.dim() != sigma.dim() {
        return Err(InfoError::Mismatch(format!("{} vs {}", rho.dim(), sigma.dim())));
    }
    let s = sqrtm_psd(rho.matrix());
    let inner = &s * sigma.matrix() * &s;
    let inner = (&inner + inner.adjoint()) * Complex64::new(0.5, 0.0);
    let (vals, _) = eigh(&inner);
    let f: f64 = vals.iter().map(|&l| l.max(0.0).sqrt()).sum();
    if f > 1.0 + CLIP_TOL {
        return Err(InfoError::InvalidState(format!("fidelity {f} exceeds 1 beyond clip tolerance")));
    }
    Ok(f.clamp(0.0, 1.0))
}

/// Mean occupation `Tr(ρ N)` of a single-mode state.
pub fn mean_occupation(rho: &DensityMatrix) -> Result<f64, InfoError> {
    single_mode(rho)?;
    Ok(rho.diagonal().iter().enumerate().map(|(n, p)| n as f64 * p).sum())
}

fn single_mode(rho: &DensityMatrix) -> Result<(), InfoError> {
    if rho.spec().modes() != 1 {
        return Err(InfoError::Mismatch(format!("single-mode state required, got {} modes", rho.spec().modes())));
    }
    Ok(())
}

/// Entropy deficit relative to the thermal state with the same mean: `S_th(n̄) − S(ρ)`.
pub fn information(rho: &DensityMatrix) -> Result<f64, InfoError> {
    Ok(thermal_entropy(mean_occupation(rho)?) - von_neumann_entropy(rho)?)
}

/// `(I_{a:bc}, I_{b:c})` for a pure three-mode state.
///
/// With the total state pure, `S_bc = S_a`, so `I_{a:bc} = 2 S_a` and `I_{b:c} = S_b + S_c − S_a`.
pub fn mutual_information_partitions(state: &StateVector) -> Result<(f64, f64), InfoError> {
    if state.spec().modes() != 3 {
        return Err(InfoError::Mismatch("three-mode state required".into()));
    }
    let s = |keep: &[usize]| -> Result<f64, InfoError> { von_neumann_entropy(&partial_trace(state, keep)?) };
    let (sa, sb, sc) = (s(&[0])?, s(&[1])?, s(&[2])?);
    Ok((2.0 * sa, sb + sc - sa))
}

/// Quadrature squeezing `(q₊, q₋)`, `q = 4⟨ΔX²⟩ − 1` with `X₊ = (a + a†)/2`, `X₋ = (a − a†)/2i`.
pub fn squeezing_params(rho: &DensityMatrix) -> Result<(f64, f64), InfoError> {
    single_mode(rho)?;
    let (a, ad, _) = ladder_ops(rho.dim())?;
    let half = Complex64::new(0.5, 0.0);
    let xp = a.add_scaled(&ad, Complex64::new(1.0, 0.0))?.scale(half);
    let xm = a.add_scaled(&ad, Complex64::new(-1.0, 0.0))?.scale(Complex64::new(0.0, -0.5));
    let var = |x: &crate::fock::ModeOperator| -> Result<f64, InfoError> {
        let m = expectation(rho, x)?.re;
        Ok(expectation(rho, &x.mul(x)?)?.re - m * m)
    };
    Ok((4.0 * var(&xp)? - 1.0, 4.0 * var(&xm)? - 1.0))
}

/// Reduced state of `mode` from any state, for callers that hold full three-mode states.
pub fn mode_marginal<S: QuantumState + ?Sized>(state: &S, mode: usize) -> Result<DensityMatrix, InfoError> {
    Ok(partial_trace(state, &[mode])?)
}

/// Mean occupation of `mode` in a multi-mode state.
pub fn mode_occupation<S: QuantumState + ?Sized>(state: &S, mode: usize) -> Result<f64, InfoError> {
    let (_, _, n) = ladder_ops(state.spec().dims()[mode])?;
    Ok(expectation(state, &embed(&n, mode, state.spec())?)?.re)
}

/// First τ where `lhs − rhs` changes sign, linearly interpolated.
pub fn first_crossing(tau: &[f64], lhs: &[f64], rhs: &[f64]) -> Option<f64> {
    let diff: Vec<f64> = lhs.iter().zip(rhs).map(|(a, b)| a - b).collect();
    (1..diff.len()).find_map(|k| {
        let (d0, d1) = (diff[k - 1], diff[k]);
        if d0 == 0.0 {
            Some(tau[k - 1])
        } else if d0.signum() != d1.signum() {
            Some(tau[k - 1] + (tau[k] - tau[k - 1]) * d0 / (d0 - d1))
        } else {
            None
        }
    })
}
