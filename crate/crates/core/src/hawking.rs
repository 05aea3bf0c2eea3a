//! Flux-biased dc-SQUID array transmission line as an analogue event horizon.
//!
//! A travelling flux pulse lowers the local propagation velocity `c(ξ)` in the comoving
//! coordinate `ξ = x − ut`; where `c(ξ) = u` the line has a horizon whose velocity gradient
//! sets a Hawking temperature.

use crate::constants::{BOLTZMANN, ELEMENTARY_CHARGE, FLUX_QUANTUM, HBAR, RESISTANCE_QUANTUM};
use crate::numerics::{find_root_bracketed, NumericsError, Tolerance};
use std::f64::consts::PI;
use thiserror::Error;

const HORIZON_SCAN_POINTS: usize = 4001;
const SCAN_HALF_WIDTH: f64 = 20.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HawkingError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("current {current:e} A at or above the SQUID critical current {limit:e} A")]
    CriticalCurrent { current: f64, limit: f64 },
    #[error("flux {0} Φ₀ outside [0, 0.5)")]
    FluxGate(f64),
    #[error("wavenumber outside the first Brillouin zone (|k|a = {0})")]
    BrillouinZone(f64),
    #[error("no horizon: pulse velocity never equals the line velocity")]
    NoHorizon,
    #[error("{count} horizons found: the pulse also forms a white hole")]
    WhiteHole { count: usize },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

impl HawkingError {
    pub fn is_validity(&self) -> bool {
        matches!(
            self,
            HawkingError::CriticalCurrent { .. } | HawkingError::FluxGate(_) | HawkingError::NoHorizon | HawkingError::WhiteHole { .. }
        )
    }
}

/// How the flux-tunable critical current is built from single-junction values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum JunctionConvention {
    /// Two junctions per SQUID: `I_c^s = 2I_c cos(πΦ/Φ₀)`.
    #[default]
    SquidPair,
    /// One effective junction carrying `I_c cos(πΦ/Φ₀)`.
    Single,
}

impl JunctionConvention {
    fn multiplicity(self) -> f64 {
        match self {
            JunctionConvention::SquidPair => 2.0,
            JunctionConvention::Single => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineParams {
    /// Single-junction critical current (A).
    pub i_c: f64,
    /// Junction capacitance (F).
    pub c_j: f64,
    /// Capacitance to ground per cell (F).
    pub c_0: f64,
    /// Cell length (m).
    pub a: f64,
    pub n_cells: usize,
    /// Bias pulse velocity (m/s).
    pub u: f64,
    /// SQUID loop self-inductance (H), for the `β_L` gate.
    pub loop_inductance: f64,
    pub convention: JunctionConvention,
}

impl LineParams {
    /// Junctions with `I_c = 2 µA`, plasma frequency `2π × 1 THz`, `C₀ = 50 aF`, `a = 0.25 µm`,
    /// 4800 cells, pulse at 95% of the unbiased line velocity.
    pub fn beltran() -> Self {
        let i_c = 2e-6;
        let omega_p = 2.0 * PI * 1e12;
        let mut p = Self {
            i_c,
            c_j: 2.0 * PI * i_c / (FLUX_QUANTUM * omega_p * omega_p),
            c_0: 5e-17,
            a: 0.25e-6,
            n_cells: 4800,
            u: 0.0,
            loop_inductance: 1e-12,
            convention: JunctionConvention::SquidPair,
        };
        p.u = 0.95 * p.propagation_velocity(0.0).expect("preset flux is valid");
        p
    }

    pub fn validate(&self) -> Result<(), HawkingError> {
        let positive = [("i_c", self.i_c), ("c_j", self.c_j), ("c_0", self.c_0), ("a", self.a), ("u", self.u)];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(HawkingError::InvalidParams(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        if self.n_cells == 0 {
            return Err(HawkingError::InvalidParams("n_cells must be >= 1".into()));
        }
        if !(self.loop_inductance >= 0.0) {
            return Err(HawkingError::InvalidParams(format!("loop_inductance must be >= 0, got {}", self.loop_inductance)));
        }
        Ok(())
    }

    /// Flux-tuned critical current `I_c^s(Φ)`.
    pub fn squid_critical_current(&self, phi_ext: f64) -> Result<f64, HawkingError> {
        check_flux(phi_ext)?;
        Ok(self.convention.multiplicity() * self.i_c * (PI * phi_ext).cos())
    }

    /// Effective plasma frequency `ω_p^s = √(2πI_c^s/(2C_JΦ₀))`.
    pub fn plasma_frequency(&self, phi_ext: f64) -> Result<f64, HawkingError> {
        Ok((2.0 * PI * self.squid_critical_current(phi_ext)? / (2.0 * self.c_j * FLUX_QUANTUM)).sqrt())
    }

    /// Nonlinear junction inductance `Φ₀ arcsin(I/I_c^s)/(2πI)`.
    pub fn junction_inductance(&self, current: f64, phi_ext: f64) -> Result<f64, HawkingError> {
        let limit = self.squid_critical_current(phi_ext)?;
        let x = current / limit;
        if x.abs() >= 1.0 {
            return Err(HawkingError::CriticalCurrent { current, limit });
        }
        let l0 = FLUX_QUANTUM / (2.0 * PI * limit);
        if x.abs() < 1e-6 {
            return Ok(l0 * (1.0 + x * x / 6.0));
        }
        Ok(l0 * x.asin() / x)
    }

    /// Small-signal line velocity `a/√(L C₀)`.
    pub fn propagation_velocity(&self, phi_ext: f64) -> Result<f64, HawkingError> {
        Ok(self.a / (self.junction_inductance(0.0, phi_ext)? * self.c_0).sqrt())
    }

    /// Lattice dispersion `ω(k) = (2/√(LC₀))|sin(ka/2)|`.
    pub fn dispersion(&self, k: f64, phi_ext: f64) -> Result<f64, HawkingError> {
        let ka = k * self.a;
        if ka.abs() > PI * (1.0 + 1e-12) {
            return Err(HawkingError::BrillouinZone(ka.abs()));
        }
        let l = self.junction_inductance(0.0, phi_ext)?;
        Ok(2.0 / (l * self.c_0).sqrt() * (0.5 * ka).sin().abs())
    }

    /// Array impedance `Z_A = R_Q √(2πe² sec(πΦ/Φ₀)/(Φ₀C₀I_c))`.
    pub fn array_impedance(&self, phi_ext: f64) -> Result<f64, HawkingError> {
        check_flux(phi_ext)?;
        let sec = 1.0 / (PI * phi_ext).cos();
        Ok(RESISTANCE_QUANTUM
            * (2.0 * PI * ELEMENTARY_CHARGE * ELEMENTARY_CHARGE * sec / (FLUX_QUANTUM * self.c_0 * self.i_c)).sqrt())
    }

    /// Screening parameter `β_L = 2πL I_c/Φ₀`.
    pub fn beta_l(&self) -> f64 {
        2.0 * PI * self.loop_inductance * self.i_c / FLUX_QUANTUM
    }
}

fn check_flux(phi_ext: f64) -> Result<(), HawkingError> {
    if !(0.0..0.5).contains(&phi_ext) {
        return Err(HawkingError::FluxGate(phi_ext));
    }
    Ok(())
}

/// Profile of the travelling flux pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PulseShape {
    /// `Φ(ξ) = (A/2)(1 − tanh(ξ/w))`: full flux behind the front, zero ahead of it.
    TanhStep,
    /// `Φ(ξ) = A exp(−ξ²/2w²)`, which forms a black and a white hole.
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxPulse {
    pub shape: PulseShape,
    /// Peak flux (units of Φ₀).
    pub amplitude: f64,
    /// Rise length `w` (m).
    pub rise_scale: f64,
}

impl FluxPulse {
    pub fn tanh_step(amplitude: f64, rise_scale: f64) -> Result<Self, HawkingError> {
        Self::new(PulseShape::TanhStep, amplitude, rise_scale)
    }

    pub fn gaussian(amplitude: f64, rise_scale: f64) -> Result<Self, HawkingError> {
        Self::new(PulseShape::Gaussian, amplitude, rise_scale)
    }

    fn new(shape: PulseShape, amplitude: f64, rise_scale: f64) -> Result<Self, HawkingError> {
        check_flux(amplitude)?;
        if !(rise_scale > 0.0) || !rise_scale.is_finite() {
            return Err(HawkingError::InvalidParams(format!("rise_scale must be > 0, got {rise_scale}")));
        }
        Ok(Self { shape, amplitude, rise_scale })
    }

    /// Flux (units of Φ₀) at comoving position `xi`.
    pub fn flux(&self, xi: f64) -> f64 {
        let s = xi / self.rise_scale;
        match self.shape {
            PulseShape::TanhStep => 0.5 * self.amplitude * (1.0 - s.tanh()),
            PulseShape::Gaussian => self.amplitude * (-0.5 * s * s).exp(),
        }
    }

    pub fn flux_derivative(&self, xi: f64) -> f64 {
        let s = xi / self.rise_scale;
        match self.shape {
            PulseShape::TanhStep => -0.5 * self.amplitude / (self.rise_scale * s.cosh().powi(2)),
            PulseShape::Gaussian => -self.amplitude * s / self.rise_scale * (-0.5 * s * s).exp(),
        }
    }

    /// Tanh step whose horizon velocity gradient `|dc/dξ|` equals `rate` (1/s) on `params`.
    pub fn tanh_for_rate(params: &LineParams, amplitude: f64, rate: f64) -> Result<Self, HawkingError> {
        if !(rate > 0.0) {
            return Err(HawkingError::InvalidParams(format!("rate must be > 0, got {rate}")));
        }
        let unit = Self::tanh_step(amplitude, 1.0)?;
        let g = velocity_gradient(&unit, params)?;
        // The gradient scales as 1/w at fixed amplitude.
        Self::tanh_step(amplitude, g / rate)
    }

    /// Largest flux reached anywhere on the pulse.
    pub fn max_flux(&self) -> f64 {
        self.amplitude
    }
}

/// Line velocity under the pulse at comoving position `xi`.
pub fn local_velocity(pulse: &FluxPulse, params: &LineParams, xi: f64) -> Result<f64, HawkingError> {
    params.propagation_velocity(pulse.flux(xi))
}

/// Acoustic metric `(g_tt, g_tx, g_xx) = (c² − u², −u, −1)`.
pub fn metric_components(pulse: &FluxPulse, params: &LineParams, xi: f64) -> Result<(f64, f64, f64), HawkingError> {
    let c = local_velocity(pulse, params, xi)?;
    Ok((c * c - params.u * params.u, -params.u, -1.0))
}

/// Every point where `c(ξ) = u`, ascending.
pub fn find_horizons(pulse: &FluxPulse, params: &LineParams) -> Result<Vec<f64>, HawkingError> {
    params.validate()?;
    let half = SCAN_HALF_WIDTH * pulse.rise_scale;
    let step = 2.0 * half / (HORIZON_SCAN_POINTS - 1) as f64;
    let f = |xi: f64| local_velocity(pulse, params, xi).map(|c| c - params.u);
    let tol = Tolerance::new(1e-15 * pulse.rise_scale, 1e-14, 200)?;
    let mut roots = Vec::new();
    let mut x0 = -half;
    let mut f0 = f(x0)?;
    for i in 1..HORIZON_SCAN_POINTS {
        let x1 = -half + step * i as f64;
        let f1 = f(x1)?;
        if f0 == 0.0 {
            roots.push(x0);
        } else if f0 * f1 < 0.0 {
            roots.push(find_root_bracketed(|x| f(x).unwrap_or(f64::NAN), x0, x1, tol)?);
        }
        x0 = x1;
        f0 = f1;
    }
    if roots.is_empty() {
        return Err(HawkingError::NoHorizon);
    }
    Ok(roots)
}

/// The single black-hole horizon of the pulse; more than one crossing is rejected.
pub fn find_horizon(pulse: &FluxPulse, params: &LineParams) -> Result<f64, HawkingError> {
    let roots = find_horizons(pulse, params)?;
    match roots.as_slice() {
        [x] => Ok(*x),
        _ => Err(HawkingError::WhiteHole { count: roots.len() }),
    }
}

/// `|dc/dξ|` at the horizon, by 5-point central differences with one Richardson step.
pub fn velocity_gradient(pulse: &FluxPulse, params: &LineParams) -> Result<f64, HawkingError> {
    let xh = find_horizon(pulse, params)?;
    let c = |x: f64| local_velocity(pulse, params, x);
    let five = |h: f64| -> Result<f64, HawkingError> {
        Ok((-c(xh + 2.0 * h)? + 8.0 * c(xh + h)? - 8.0 * c(xh - h)? + c(xh - 2.0 * h)?) / (12.0 * h))
    };
    let h = 1e-2 * pulse.rise_scale;
    let coarse = five(h)?;
    let fine = five(0.5 * h)?;
    Ok(((64.0 * fine - coarse) / 63.0).abs())
}

/// `|dc/dξ|` at the horizon from the closed-form pulse derivative.
pub fn velocity_gradient_analytic(pulse: &FluxPulse, params: &LineParams) -> Result<f64, HawkingError> {
    let xh = find_horizon(pulse, params)?;
    let phi = pulse.flux(xh);
    // c(Φ) = c(0)·√cos(πΦ/Φ₀)
    let c0 = params.propagation_velocity(0.0)?;
    let dc_dphi = -c0 * PI * (PI * phi).sin() / (2.0 * (PI * phi).cos().sqrt());
    Ok((dc_dphi * pulse.flux_derivative(xh)).abs())
}

/// `T_H = (ħ/2πk_B)|dc/dξ|` at the horizon.
pub fn hawking_temperature(pulse: &FluxPulse, params: &LineParams) -> Result<f64, HawkingError> {
    Ok(temperature_from_gradient(velocity_gradient(pulse, params)?))
}

pub fn temperature_from_gradient(gradient: f64) -> f64 {
    HBAR / (2.0 * PI * BOLTZMANN) * gradient.abs()
}

/// Single-channel thermal power `(π/12ħ)(k_B T)²`.
pub fn radiated_power(t_h: f64) -> f64 {
    PI / (12.0 * HBAR) * (BOLTZMANN * t_h).powi(2)
}

/// Linear fall of the Hawking temperature as the pulse disperses along the line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemperatureDecay {
    /// Fractional drop per `cells` cells.
    pub fraction: f64,
    pub cells: f64,
}

impl Default for TemperatureDecay {
    fn default() -> Self {
        Self { fraction: 0.1, cells: 1000.0 }
    }
}

/// Expected photon count while the pulse crosses the line.
///
/// Photon rate is `P/(k_B T_H)`; the temperature falls linearly per `decay` (clamped at zero)
/// over the lab-frame traversal time `N a/u`.
pub fn photons_per_pulse(pulse: &FluxPulse, params: &LineParams, decay: Option<TemperatureDecay>) -> Result<f64, HawkingError> {
    let t0 = hawking_temperature(pulse, params)?;
    let rate0 = radiated_power(t0) / (BOLTZMANN * t0);
    let n = params.n_cells as f64;
    // ∫₀ᴺ T(n)/T₀ dn over cells, each taking a/u seconds.
    let cell_integral = match decay {
        None => n,
        Some(d) => {
            let slope = d.fraction / d.cells;
            let end = if slope > 0.0 { n.min(1.0 / slope) } else { n };
            end - 0.5 * slope * end * end
        }
    };
    Ok(rate0 * cell_integral * params.a / params.u)
}

/// Model validity figures for a pulse on a line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineGates {
    pub beta_l: f64,
    /// `Z_A/R_Q` at the largest flux on the pulse.
    pub impedance_ratio: f64,
    pub max_flux: f64,
}

impl LineGates {
    /// `β_L·margin ≤ 1` and `Z_A < R_Q`.
    pub fn pass(&self, margin: f64) -> bool {
        self.beta_l * margin <= 1.0 && self.impedance_ratio < 1.0 && self.max_flux < 0.5
    }
}

pub fn gates(pulse: &FluxPulse, params: &LineParams) -> Result<LineGates, HawkingError> {
    Ok(LineGates {
        beta_l: params.beta_l(),
        impedance_ratio: params.array_impedance(pulse.max_flux())? / RESISTANCE_QUANTUM,
        max_flux: pulse.max_flux(),
    })
}
