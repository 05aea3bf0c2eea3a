use super::DetectorError;
use crate::constants::{ELEMENTARY_CHARGE, FLUX_QUANTUM, HBAR};
use crate::numerics::{find_root_bracketed, Tolerance};
use std::f64::consts::PI;

const TWO_PI: f64 = 2.0 * PI;

/// Directly specified coupling constants (dimensionless).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectCoupling {
    pub k_d: f64,
    pub k_tm: f64,
}

/// Geometric inputs for computing the couplings from the circuit layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    /// Flux-capture geometric factor of the mechanical loop.
    pub lambda: f64,
    /// Length of the oscillating loop segment (m).
    pub l_osc: f64,
    /// Total stripline inductance `L_T·l` (H).
    pub inductance: f64,
    /// Total stripline capacitance `C_T·l` (F).
    pub capacitance: f64,
}

/// Circuit and mechanical constants of the SQUID-cavity detector.
///
/// Angular frequencies are in rad/s, the external flux in units of `Φ₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorParams {
    pub z_p: f64,
    pub omega_t: f64,
    pub q_t: f64,
    pub omega_m: f64,
    pub q_m: f64,
    pub mass: f64,
    pub i_c: f64,
    pub c_j: f64,
    pub phi_ext: f64,
    pub b_ext: f64,
    /// SQUID loop self-inductance entering `β_L = 2πL_loop·I_c/Φ₀` (H).
    pub loop_inductance: f64,
    pub direct: Option<DirectCoupling>,
    pub geometry: Option<Geometry>,
}

/// Drive current amplitude and pump detuning `Δω = ω_p − ω_T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrivePoint {
    pub i_0: f64,
    pub delta_omega: f64,
}

impl DrivePoint {
    pub fn new(i_0: f64, delta_omega: f64) -> Result<Self, DetectorError> {
        if !(i_0 >= 0.0) || !i_0.is_finite() {
            return Err(DetectorError::InvalidParams(format!("drive amplitude must be >= 0, got {i_0}")));
        }
        if !delta_omega.is_finite() {
            return Err(DetectorError::InvalidParams("detuning must be finite".into()));
        }
        Ok(Self { i_0, delta_omega })
    }
}

/// Linear SQUID inductance expansion coefficients (H, H, H/m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InductanceCoeffs {
    pub l00: f64,
    pub l20: f64,
    pub l01: f64,
}

/// Resolved coupling constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Couplings {
    pub k_tm: f64,
    pub k_d: f64,
}

/// Small-parameter validity measures of the SQUID expansion; both should be ≪ 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityGates {
    /// `|I/I_c · sec(πΦ_ext)|`.
    pub current: f64,
    /// `|β_L · sec(πΦ_ext)|`.
    pub screening: f64,
}

impl ValidityGates {
    /// True when both measures are at most `1/margin`.
    pub fn pass(&self, margin: f64) -> bool {
        self.current * margin <= 1.0 && self.screening * margin <= 1.0
    }
}

impl DetectorParams {
    /// Displacement-detection parameter set (`K_d = −3.4e−6`, `K_Tm = 1.1e−5`, `Q_m = 10³`).
    pub fn detection() -> Self {
        Self {
            z_p: 50.0,
            omega_t: TWO_PI * 5e9,
            q_t: 300.0,
            omega_m: TWO_PI * 4e6,
            q_m: 1e3,
            mass: 1e-16,
            i_c: 4.5e-6,
            c_j: 1e-14,
            phi_ext: 0.442,
            b_ext: 0.05,
            loop_inductance: 1e-12,
            direct: Some(DirectCoupling { k_d: -3.4e-6, k_tm: 1.1e-5 }),
            geometry: None,
        }
    }

    /// Bad-cavity cooling set: detection values with `Q_m = 10⁴`.
    pub fn cooling() -> Self {
        Self { q_m: 1e4, ..Self::detection() }
    }

    /// Good-cavity cooling set: `Q_T = 1000`, `Q_m = 10⁴`.
    pub fn good_cavity() -> Self {
        Self { q_t: 1000.0, ..Self::cooling() }
    }

    /// Same parameters with the Duffing constant replaced (direct mode).
    pub fn with_k_d(mut self, k_d: f64) -> Result<Self, DetectorError> {
        let c = self.couplings()?;
        self.direct = Some(DirectCoupling { k_d, k_tm: c.k_tm });
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), DetectorError> {
        let positive = [
            ("z_p", self.z_p),
            ("omega_t", self.omega_t),
            ("q_t", self.q_t),
            ("omega_m", self.omega_m),
            ("q_m", self.q_m),
            ("mass", self.mass),
            ("i_c", self.i_c),
            ("c_j", self.c_j),
            ("loop_inductance", self.loop_inductance),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(DetectorError::InvalidParams(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !self.phi_ext.is_finite() || !self.b_ext.is_finite() {
            return Err(DetectorError::InvalidParams("flux and field must be finite".into()));
        }
        if self.direct.is_none() && self.geometry.is_none() {
            return Err(DetectorError::InvalidParams("need direct couplings or a geometry block".into()));
        }
        Ok(())
    }

    /// Cavity amplitude damping `γ_pT = ω_T/(2Q_T)`.
    pub fn gamma_pt(&self) -> f64 {
        self.omega_t / (2.0 * self.q_t)
    }

    /// Mechanical amplitude damping `γ_bm = ω_m/(2Q_m)`.
    pub fn gamma_bm(&self) -> f64 {
        self.omega_m / (2.0 * self.q_m)
    }

    /// `sec(πΦ_ext/Φ₀)`; errors at half-integer flux.
    pub fn flux_secant(&self) -> Result<f64, DetectorError> {
        let c = (PI * self.phi_ext).cos();
        if c.abs() < 1e-9 {
            return Err(DetectorError::Singularity(self.phi_ext));
        }
        Ok(1.0 / c)
    }

    /// Zero-point displacement `√(ħ/(2mω_m))` (m).
    pub fn zero_point(&self) -> f64 {
        (HBAR / (2.0 * self.mass * self.omega_m)).sqrt()
    }

    pub fn inductance_coeffs(&self) -> Result<InductanceCoeffs, DetectorError> {
        let sec = self.flux_secant()?;
        let tan = (PI * self.phi_ext).tan();
        let l01 = match self.geometry {
            Some(g) => g.lambda * self.b_ext * g.l_osc * sec * tan / (4.0 * self.i_c),
            None => 0.0,
        };
        Ok(InductanceCoeffs {
            l00: FLUX_QUANTUM * sec / (4.0 * PI * self.i_c),
            l20: FLUX_QUANTUM * sec.powi(3) / (96.0 * PI * self.i_c),
            l01,
        })
    }

    /// `(K_Tm, K_d)`: stored values in direct mode, otherwise computed from the geometry.
    pub fn couplings(&self) -> Result<Couplings, DetectorError> {
        if let Some(d) = self.direct {
            return Ok(Couplings { k_tm: d.k_tm, k_d: d.k_d });
        }
        let g = self.geometry.ok_or_else(|| DetectorError::InvalidParams("no coupling inputs".into()))?;
        let sec = self.flux_secant()?;
        let tan = (PI * self.phi_ext).tan();
        let zeta = self.inductance_coeffs()?.l00 / g.inductance;
        let k0l = fundamental_wavenumber(zeta)?;
        let k_tm = g.lambda * self.b_ext * g.l_osc * self.zero_point() / (FLUX_QUANTUM / PI) * FLUX_QUANTUM
            / (4.0 * PI * g.inductance * self.i_c)
            * tan
            * sec;
        let charging = (2.0 * ELEMENTARY_CHARGE).powi(2) / (2.0 * g.capacitance);
        let k_d = -k0l * k0l * zeta.powi(3) * charging / (HBAR * self.omega_t);
        Ok(Couplings { k_tm, k_d })
    }

    /// Effective Duffing constant `𝒦 = K_d − 2ω_Tω_m K_Tm²/(ω_m² + γ_bm²)`.
    pub fn effective_duffing(&self) -> Result<f64, DetectorError> {
        let c = self.couplings()?;
        let (wm, gm) = (self.omega_m, self.gamma_bm());
        Ok(c.k_d - 2.0 * self.omega_t * wm * c.k_tm * c.k_tm / (wm * wm + gm * gm))
    }

    /// Validity measures at drive current `i_0`.
    pub fn gates(&self, i_0: f64) -> Result<ValidityGates, DetectorError> {
        let sec = self.flux_secant()?.abs();
        let beta_l = 2.0 * PI * self.loop_inductance * self.i_c / FLUX_QUANTUM;
        Ok(ValidityGates { current: (i_0 / self.i_c).abs() * sec, screening: beta_l * sec })
    }
}

/// Root `k⁽⁰⁾l` of `(x/2)·tan(x/2) = 1/ζ` on the lowest branch.
///
/// For `ζ > 0` the root lies in `(0, π)`; a negative `ζ` (flux past `Φ₀/2`) moves it to `(π, 2π)`.
pub fn fundamental_wavenumber(zeta: f64) -> Result<f64, DetectorError> {
    if zeta == 0.0 || !zeta.is_finite() {
        return Err(DetectorError::InvalidParams(format!("zeta must be finite and nonzero, got {zeta}")));
    }
    let f = |x: f64| 0.5 * x * (0.5 * x).tan() - 1.0 / zeta;
    let eps = 1e-12;
    let (lo, hi) = if zeta > 0.0 { (eps, PI - eps) } else { (PI + eps, 2.0 * PI - eps) };
    Ok(find_root_bracketed(f, lo, hi, Tolerance::root())?)
}
