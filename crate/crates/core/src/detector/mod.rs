//! Duffing cavity displacement detector and back-action cooler.
//!
//! A SQUID-terminated superconducting cavity, pumped near resonance, senses the motion of a
//! mechanical resonator embedded in the SQUID loop. Mean field, linear response around it,
//! output spectra and an effective thermal description of the back-action bath.

mod mean_field;
mod params;
mod response;
mod spectra;
mod thermo;

pub use mean_field::{
    bistability_boundary, bistability_onset, drive_amplitude, mean_field, mean_field_linear, mean_field_residual,
    BistabilityOnset, Branch, BranchPolicy, MeanFieldSolution,
};
pub use params::{
    fundamental_wavenumber, Couplings, DetectorParams, DirectCoupling, DrivePoint, Geometry, InductanceCoeffs,
    ValidityGates,
};
pub use response::{response_coeffs, Kernels, ResponseCoeffs, Sideband};
pub use spectra::{caves_bound, noise_density, noise_spectrum, signal_density, signal_spectrum, Band, Spectra};
pub use thermo::{cooling_curve, effective_thermo, effective_thermo_at, CoolingPoint, EffectiveThermo, MeanFieldModel, ThermoOptions};

use crate::numerics::NumericsError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DetectorError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("flux bias at a singular point (cos = {0:e})")]
    Singularity(f64),
    #[error("no bistability for this Duffing sign and detuning")]
    NoBistability,
    #[error("detuning ratio {0} outside the bistable region")]
    OutsideRegion(f64),
    #[error("no non-negative mean-field root")]
    NoPhysicalRoot,
    #[error("mean-field residual {0:e} above tolerance")]
    Residual(f64),
    #[error("renormalized pole search did not converge")]
    PoleSearch,
    #[error("mechanical mode unstable (R_gamma = {r_gamma})")]
    Unstable { r_gamma: f64 },
    #[error("signal peak is not Lorentzian (residual {residual:.3})")]
    NonLorentzian { residual: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

impl DetectorError {
    /// Errors that mark an operating point outside the model's regime rather than a bad input.
    pub fn is_validity(&self) -> bool {
        matches!(
            self,
            DetectorError::Unstable { .. }
                | DetectorError::NonLorentzian { .. }
                | DetectorError::Residual(_)
                | DetectorError::PoleSearch
        )
    }
}
