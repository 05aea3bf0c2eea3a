use super::{
    bistability_onset, mean_field, mean_field_linear, BranchPolicy, DetectorError, DetectorParams, DrivePoint, Sideband,
    Spectra,
};
use crate::constants::{bose_occupation, HBAR};
use crate::numerics::{fit_lorentzian, LorentzianFit};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Maximum relative RMS misfit for the Lorentzian description of a sideband.
pub const LORENTZIAN_GATE: f64 = 0.05;
const FIT_WINDOW: f64 = 20.0;
const FIT_SAMPLES: usize = 401;
/// Below this `|R_γ − 1|` the back-action damping is too weak to define a bath.
const WEAK_COUPLING: f64 = 1e-4;

/// Back-action seen by the resonator, as a renormalized oscillator coupled to an effective bath.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveThermo {
    pub r_omega: f64,
    pub r_gamma: f64,
    pub g_plus: f64,
    pub g_minus: f64,
    /// Back-action bath occupations from the two sidebands; `NaN` under weak coupling.
    pub n_back_plus: f64,
    pub n_back_minus: f64,
    pub n_net: f64,
    /// Fit residual of the phase-preserving sideband, which defines `R_ω` and `R_γ`.
    pub lorentzian_residual: f64,
    /// Fit residual of the phase-conjugating sideband; `g_minus` and `n_back_minus` are `NaN`
    /// when it fails the gate.
    pub lorentzian_residual_minus: f64,
    pub weak_coupling: bool,
}

impl EffectiveThermo {
    pub fn two_n_back_plus_one(&self) -> f64 {
        2.0 * self.n_back_plus + 1.0
    }
}

/// How the cavity mean field is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MeanFieldModel {
    /// Cubic Duffing steady state.
    #[default]
    Duffing,
    /// Cubic term dropped (`χ = c`): the harmonic-cavity reference.
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ThermoOptions {
    pub policy: BranchPolicy,
    pub model: MeanFieldModel,
}

struct SidebandFit {
    fit: LorentzianFit,
    r_omega: f64,
    noise_amplitude: f64,
    thermal: f64,
}

fn fit_sideband(spectra: &Spectra, params: &DetectorParams, sideband: Sideband, bath_t: f64) -> Result<SidebandFit, DetectorError> {
    let gm = params.gamma_bm();
    let pole = spectra.kernels().mechanical_pole(sideband)?;
    let width = -pole.im;
    if width <= 0.0 {
        return Err(DetectorError::Unstable { r_gamma: width / gm });
    }
    let lo = pole.re - FIT_WINDOW * width;
    let step = 2.0 * FIT_WINDOW * width / (FIT_SAMPLES - 1) as f64;
    let omegas: Vec<f64> = (0..FIT_SAMPLES).map(|i| lo + step * i as f64).collect();
    let samples: Vec<(f64, f64)> = omegas.iter().map(|&w| (w, spectra.signal_density(w, bath_t))).collect();
    let fit = fit_lorentzian(&samples)?;
    if fit.half_width <= 0.0 {
        return Err(DetectorError::Unstable { r_gamma: fit.half_width / gm });
    }
    // Noise = A·2Γ/((ω−c)²+Γ²) + dispersive and linear background, solved in u = (ω−c)/Γ.
    let (c, g) = (fit.center, fit.half_width);
    let design = DMatrix::from_fn(FIT_SAMPLES, 4, |i, j| {
        let u = (omegas[i] - c) / g;
        let den = u * u + 1.0;
        match j {
            0 => 2.0 / den,
            1 => u / den,
            2 => 1.0,
            _ => u,
        }
    });
    let noise = DVector::from_iterator(FIT_SAMPLES, omegas.iter().map(|&w| spectra.noise_density(w)));
    let scale = noise.amax();
    let coef = if scale > 0.0 {
        design
            .svd(true, true)
            .solve(&(noise / scale), 1e-12)
            .map_err(|e| DetectorError::InvalidParams(e.to_string()))?
            * scale
    } else {
        DVector::zeros(4)
    };
    let r_omega = sideband.sign() * (c - spectra.omega_p()) / params.omega_m;
    let thermal = 2.0 * bose_occupation(r_omega * params.omega_m, bath_t) + 1.0;
    Ok(SidebandFit { fit, r_omega, noise_amplitude: coef[0] * g, thermal })
}

/// Effective renormalization, gains, bath occupations and net occupation at one operating point,
/// for a given mean-field amplitude.
pub fn effective_thermo_at(
    params: &DetectorParams,
    drive: &DrivePoint,
    chi: Complex64,
    bath_t: f64,
) -> Result<EffectiveThermo, DetectorError> {
    let spectra = Spectra::new(params, drive, chi)?;
    let gm = params.gamma_bm();
    let plus = fit_sideband(&spectra, params, Sideband::PhasePreserving, bath_t)?;
    if !(plus.fit.residual < LORENTZIAN_GATE) {
        return Err(DetectorError::NonLorentzian { residual: plus.fit.residual });
    }
    let minus = fit_sideband(&spectra, params, Sideband::PhaseConjugating, bath_t).ok();
    let minus_ok = minus.as_ref().filter(|m| m.fit.residual < LORENTZIAN_GATE);
    let r_gamma = plus.fit.half_width / gm;
    let gain = |s: &SidebandFit| {
        s.fit.amplitude() * s.fit.half_width * params.z_p * 2.0 * PI * 2.0 * params.mass * s.r_omega * params.omega_m
            / (HBAR * gm * s.thermal)
    };
    let weak_coupling = (r_gamma - 1.0).abs() < WEAK_COUPLING;
    let n_back = |s: &SidebandFit| {
        if weak_coupling {
            f64::NAN
        } else {
            let gamma_back = gm * (s.fit.half_width / gm - 1.0);
            let two_n1 = s.noise_amplitude / s.fit.amplitude() * s.thermal * gm / gamma_back;
            0.5 * (two_n1 - 1.0)
        }
    };
    // (1 − R_γ⁻¹)(2n_back + 1) straight from the fitted areas; dropped when there is no bath.
    let back_term = if weak_coupling {
        0.0
    } else {
        plus.noise_amplitude / plus.fit.amplitude() * plus.thermal * gm / plus.fit.half_width
    };
    let two_net1 = plus.thermal / r_gamma + back_term;
    Ok(EffectiveThermo {
        r_omega: plus.r_omega,
        r_gamma,
        g_plus: gain(&plus),
        g_minus: minus_ok.map_or(f64::NAN, gain),
        n_back_plus: n_back(&plus),
        n_back_minus: minus_ok.map_or(f64::NAN, n_back),
        n_net: 0.5 * (two_net1 - 1.0),
        lorentzian_residual: plus.fit.residual,
        lorentzian_residual_minus: minus.map_or(f64::NAN, |m| m.fit.residual),
        weak_coupling,
    })
}

/// [`effective_thermo_at`] on the small-amplitude Duffing branch.
pub fn effective_thermo(params: &DetectorParams, drive: &DrivePoint, bath_t: f64) -> Result<EffectiveThermo, DetectorError> {
    let sols = mean_field(params, drive)?;
    let sol = BranchPolicy::Small.select(&sols, None).ok_or(DetectorError::NoPhysicalRoot)?;
    effective_thermo_at(params, drive, sol.chi, bath_t)
}

/// One entry of a cooling sweep; failed points carry the reason.
#[derive(Debug, Clone, PartialEq)]
pub struct CoolingPoint {
    pub current: f64,
    pub bath_t: f64,
    pub result: Result<EffectiveThermo, DetectorError>,
}

/// Sweeps drive current (in units of `I_bi`) at fixed detuning (in units of `|Δω_bi|`, signed)
/// for each bath temperature.
pub fn cooling_curve(
    params: &DetectorParams,
    detuning_ratio: f64,
    current_ratios: &[f64],
    bath_temperatures: &[f64],
    options: ThermoOptions,
) -> Result<Vec<CoolingPoint>, DetectorError> {
    let onset = bistability_onset(params)?;
    let delta_omega = detuning_ratio * onset.delta_omega.abs();
    let mut out = Vec::with_capacity(current_ratios.len() * bath_temperatures.len());
    for &t in bath_temperatures {
        let mut previous = None;
        for &r in current_ratios {
            let drive = DrivePoint::new(r * onset.current, delta_omega)?;
            let chi = match options.model {
                MeanFieldModel::Linear => Ok(mean_field_linear(params, &drive)),
                MeanFieldModel::Duffing => mean_field(params, &drive).and_then(|sols| {
                    options.policy.select(&sols, previous).ok_or(DetectorError::NoPhysicalRoot)
                }),
            };
            let result = chi.and_then(|sol| {
                previous = Some(sol.energy);
                effective_thermo_at(params, &drive, sol.chi, t)
            });
            out.push(CoolingPoint { current: drive.i_0, bath_t: t, result });
        }
    }
    Ok(out)
}
