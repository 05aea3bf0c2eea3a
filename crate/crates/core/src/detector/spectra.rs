use super::{mean_field, BranchPolicy, DetectorError, DetectorParams, DrivePoint, Kernels, ResponseCoeffs};
use crate::constants::{bose_occupation, HBAR};
use crate::numerics::{integrate_adaptive, Tolerance};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Integration band `[center − width/2, center + width/2]` in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub center: f64,
    pub width: f64,
}

impl Band {
    pub fn new(center: f64, width: f64) -> Result<Self, DetectorError> {
        if !(width > 0.0) || !center.is_finite() {
            return Err(DetectorError::InvalidParams(format!("band needs finite centre and width > 0 (got {center}, {width})")));
        }
        Ok(Self { center, width })
    }

    fn lo(&self) -> f64 {
        self.center - 0.5 * self.width
    }

    fn hi(&self) -> f64 {
        self.center + 0.5 * self.width
    }
}

/// Output current spectral densities (A² per rad/s) around one mean-field operating point.
#[derive(Debug, Clone, Copy)]
pub struct Spectra {
    kernels: Kernels,
    c: Complex64,
    gamma_pt: f64,
    omega_m: f64,
    gamma_bm: f64,
    omega_p: f64,
    delta_omega: f64,
    z_p: f64,
    signal_pref: f64,
}

impl Spectra {
    pub fn new(params: &DetectorParams, drive: &DrivePoint, chi: Complex64) -> Result<Self, DetectorError> {
        let kernels = Kernels::new(params, drive, chi)?;
        let g = params.gamma_pt();
        let k_tm = params.couplings()?.k_tm;
        let dw = drive.delta_omega;
        let signal_pref = (drive.i_0 * k_tm * params.omega_t / g).powi(2) * g * g / (g * g + dw * dw) / (2.0 * PI);
        Ok(Self {
            kernels,
            c: super::drive_amplitude(params, drive),
            gamma_pt: g,
            omega_m: params.omega_m,
            gamma_bm: params.gamma_bm(),
            omega_p: params.omega_t + dw,
            delta_omega: dw,
            z_p: params.z_p,
            signal_pref,
        })
    }

    /// Uses the mean-field solution picked by `policy`.
    pub fn from_policy(params: &DetectorParams, drive: &DrivePoint, policy: BranchPolicy) -> Result<Self, DetectorError> {
        let sols = mean_field(params, drive)?;
        let sol = policy.select(&sols, None).ok_or(DetectorError::NoPhysicalRoot)?;
        Self::new(params, drive, sol.chi)
    }

    pub fn omega_p(&self) -> f64 {
        self.omega_p
    }

    pub fn kernels(&self) -> &Kernels {
        &self.kernels
    }

    pub fn coeffs(&self, omega: f64) -> ResponseCoeffs {
        self.kernels.coeffs(Complex64::new(omega, 0.0))
    }

    /// Transduction factor common to the signal and the Caves bound, without the mechanical part.
    fn transduction(&self, omega: f64) -> f64 {
        let g = self.gamma_pt;
        let x = omega - self.omega_p;
        let xd = x + self.delta_omega;
        let r = self.coeffs(omega);
        let ig = Complex64::i() * g;
        let amp = r.alpha1 / self.c + r.alpha2 / self.c * (xd + ig) / (x - self.delta_omega + ig);
        self.signal_pref * (omega / self.omega_p) * g * g / (xd * xd + g * g) * amp.norm_sqr()
    }

    fn mechanical_peaks(&self, omega: f64) -> (f64, f64) {
        let x = omega - self.omega_p;
        let gm = self.gamma_bm;
        let lp = 2.0 * gm / ((x - self.omega_m).powi(2) + gm * gm);
        let lm = 2.0 * gm / ((-x - self.omega_m).powi(2) + gm * gm);
        (lp, lm)
    }

    /// Signal density from the thermal and zero-point motion of the resonator.
    pub fn signal_density(&self, omega: f64, bath_t: f64) -> f64 {
        let x = omega - self.omega_p;
        let (lp, lm) = self.mechanical_peaks(omega);
        let thermal = 2.0 * bose_occupation(x.abs(), bath_t) + 1.0;
        self.transduction(omega) * (lp + lm) * thermal
    }

    /// Noise density from the cavity input fluctuations, without the added zero-point term.
    pub fn noise_density(&self, omega: f64) -> f64 {
        let g = self.gamma_pt;
        let x = omega - self.omega_p;
        let xd = x + self.delta_omega;
        let xm = x - self.delta_omega;
        let r = self.coeffs(omega);
        let ratio = (xd * xd + g * g) / (xm * xm + g * g);
        let bracket = r.beta1.norm_sqr() + ratio * r.beta2.norm_sqr() - r.beta1.re + xd / g * r.beta1.im;
        HBAR * omega * 2.0 * g * g / (xd * xd + g * g) * bracket / self.z_p / (2.0 * PI)
    }

    /// Gain part of the minimum-noise bound: the zero-point signal with the two peaks subtracted.
    pub fn caves_density(&self, omega: f64) -> f64 {
        let (lp, lm) = self.mechanical_peaks(omega);
        self.transduction(omega) * (lp - lm)
    }

    /// Zero-point noise the amplifier must add across the band.
    pub fn added_noise(&self, band: &Band) -> f64 {
        HBAR * band.center / 2.0 * band.width / (2.0 * PI) / self.z_p
    }

    pub fn signal(&self, band: &Band, bath_t: f64) -> Result<f64, DetectorError> {
        integrate_band(|w| self.signal_density(w, bath_t), band)
    }

    pub fn noise(&self, band: &Band) -> Result<f64, DetectorError> {
        Ok(integrate_band(|w| self.noise_density(w), band)? + self.added_noise(band))
    }

    pub fn caves(&self, band: &Band) -> Result<f64, DetectorError> {
        Ok((self.added_noise(band) - integrate_band(|w| self.caves_density(w), band)?).abs())
    }
}

/// Adaptive quadrature over the band, rescaled to unit interval and unit peak value.
fn integrate_band<F: Fn(f64) -> f64>(f: F, band: &Band) -> Result<f64, DetectorError> {
    let (lo, hi) = (band.lo(), band.hi());
    let probe = (0..=8)
        .map(|i| f(lo + band.width * i as f64 / 8.0).abs())
        .fold(0.0, f64::max);
    if probe == 0.0 {
        return Ok(0.0);
    }
    let tol = Tolerance::new(1e-13, 1e-10, 200_000)?;
    let v = integrate_adaptive(|u| f(lo + u * (hi - lo)) / probe, 0.0, 1.0, tol)?;
    Ok(v * probe * band.width)
}

/// Integrated signal variance (A²) in the band on the small-amplitude branch.
pub fn signal_spectrum(
    params: &DetectorParams,
    drive: &DrivePoint,
    omega_s: f64,
    delta_band: f64,
    bath_t: f64,
) -> Result<f64, DetectorError> {
    if !(bath_t >= 0.0) {
        return Err(DetectorError::InvalidParams(format!("bath temperature must be >= 0, got {bath_t}")));
    }
    Spectra::from_policy(params, drive, BranchPolicy::Small)?.signal(&Band::new(omega_s, delta_band)?, bath_t)
}

/// Integrated noise variance (A²) in the band on the small-amplitude branch.
pub fn noise_spectrum(params: &DetectorParams, drive: &DrivePoint, omega_s: f64, delta_band: f64) -> Result<f64, DetectorError> {
    Spectra::from_policy(params, drive, BranchPolicy::Small)?.noise(&Band::new(omega_s, delta_band)?)
}

/// Minimum added noise (A²) allowed for the gain realized in the band.
pub fn caves_bound(params: &DetectorParams, drive: &DrivePoint, omega_s: f64, delta_band: f64) -> Result<f64, DetectorError> {
    Spectra::from_policy(params, drive, BranchPolicy::Small)?.caves(&Band::new(omega_s, delta_band)?)
}

/// Signal or noise sampled on a grid, as a convenience for plotting and fitting.
pub fn noise_density(spectra: &Spectra, omegas: &[f64]) -> Vec<f64> {
    omegas.iter().map(|&w| spectra.noise_density(w)).collect()
}

pub fn signal_density(spectra: &Spectra, omegas: &[f64], bath_t: f64) -> Vec<f64> {
    omegas.iter().map(|&w| spectra.signal_density(w, bath_t)).collect()
}
