use super::{DetectorError, DetectorParams, DrivePoint};
use num_complex::Complex64;
use std::f64::consts::PI;

const SINGULAR_TOL: f64 = 1e-14;
const POLE_MAX_ITER: usize = 200;

/// Mechanical sideband of the pump.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sideband {
    /// `ω_p + ω_m`
    PhasePreserving,
    /// `ω_p − ω_m`
    PhaseConjugating,
}

impl Sideband {
    pub fn sign(self) -> f64 {
        match self {
            Sideband::PhasePreserving => 1.0,
            Sideband::PhaseConjugating => -1.0,
        }
    }
}

/// Linear-response coefficients at one output frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseCoeffs {
    pub alpha1: Complex64,
    pub alpha2: Complex64,
    pub beta1: Complex64,
    pub beta2: Complex64,
    pub determinant: Complex64,
}

impl ResponseCoeffs {
    /// The determinant is small enough that the operating point sits on a bifurcation.
    pub fn is_near_singular(&self) -> bool {
        self.determinant.norm() < SINGULAR_TOL
    }
}

/// Cavity response kernels `B(ω, ω′)` and `D(ω)` for fixed parameters, with pump detuning
/// and mean-field amplitude bound in. Frequencies may be complex for pole searches.
#[derive(Debug, Clone, Copy)]
pub struct Kernels {
    omega_t: f64,
    gamma_pt: f64,
    omega_m: f64,
    gamma_bm: f64,
    b_pref: f64,
    d_pref: f64,
    omega_p: f64,
    delta_omega: f64,
    chi: Complex64,
}

impl Kernels {
    pub fn new(params: &DetectorParams, drive: &DrivePoint, chi: Complex64) -> Result<Self, DetectorError> {
        let c = params.couplings()?;
        Ok(Self {
            omega_t: params.omega_t,
            gamma_pt: params.gamma_pt(),
            omega_m: params.omega_m,
            gamma_bm: params.gamma_bm(),
            b_pref: (params.omega_t * c.k_tm).powi(2) / (4.0 * PI),
            d_pref: params.omega_t * c.k_d / (2.0 * PI),
            omega_p: params.omega_t + drive.delta_omega,
            delta_omega: drive.delta_omega,
            chi,
        })
    }

    fn cavity(&self, w: Complex64) -> Complex64 {
        1.0 / (w - self.omega_t + Complex64::i() * self.gamma_pt)
    }

    pub fn b(&self, w: Complex64, wq: Complex64) -> Complex64 {
        let ig = Complex64::i() * self.gamma_bm;
        self.b_pref * self.cavity(w) * (1.0 / (wq - self.omega_m + ig) + 1.0 / (-wq - self.omega_m - ig))
    }

    pub fn d(&self, w: Complex64) -> Complex64 {
        self.d_pref * self.cavity(w)
    }

    pub fn coeffs(&self, w: Complex64) -> ResponseCoeffs {
        let chi = self.chi;
        let c2 = chi.norm_sqr();
        let x = w - self.omega_p;
        let wr = w - 2.0 * self.delta_omega;
        let zero = Complex64::new(0.0, 0.0);
        let p1 = self.b(w, zero) + self.b(w, x) + self.d(w);
        let q1 = self.b(wr, zero) + self.b(wr, x) + self.d(wr);
        let r1 = 2.0 * self.b(w, x) + self.d(w);
        let r2 = 2.0 * self.b(wr, x) + self.d(wr);
        let upper = 1.0 - 2.0 * c2 * p1;
        let lower = 1.0 + 2.0 * c2 * q1;
        let det = upper * lower + c2 * c2 * r1 * r2;
        ResponseCoeffs {
            alpha1: lower * chi / det,
            alpha2: -r1 * c2 * chi / det,
            beta1: lower / det,
            beta2: r1 * chi * chi / det,
            determinant: det,
        }
    }

    /// Renormalized mechanical pole near `ω_p ± ω_m`: a zero of the determinant in the lower
    /// half plane. Real part is the peak centre, minus the imaginary part the half width.
    pub fn mechanical_pole(&self, sideband: Sideband) -> Result<Complex64, DetectorError> {
        let s = sideband.sign();
        let ig = Complex64::i() * self.gamma_bm;
        // Multiply out the bare mechanical pole so the target is a plain zero.
        let f = |z: Complex64| self.coeffs(z).determinant * (z - self.omega_p - s * self.omega_m + ig);
        let mut z = Complex64::new(self.omega_p + s * self.omega_m, -2.0 * self.gamma_bm);
        let h = 1e-3 * self.gamma_bm;
        for _ in 0..POLE_MAX_ITER {
            let fz = f(z);
            let df = (f(z + h) - f(z - h)) / (2.0 * h);
            if df.norm() == 0.0 || !fz.is_finite() {
                break;
            }
            let mut dz = fz / df;
            let limit = (0.5 * z.im.abs()).max(self.gamma_bm);
            if dz.norm() > limit {
                dz *= limit / dz.norm();
            }
            z -= dz;
            if dz.norm() < 1e-12 * self.omega_m {
                return Ok(z);
            }
        }
        Err(DetectorError::PoleSearch)
    }
}

/// `α₁, α₂, β₁, β₂` and the determinant `𝒟` at output frequency `omega`.
pub fn response_coeffs(
    params: &DetectorParams,
    drive: &DrivePoint,
    chi: Complex64,
    omega: f64,
) -> Result<ResponseCoeffs, DetectorError> {
    Ok(Kernels::new(params, drive, chi)?.coeffs(Complex64::new(omega, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::super::{bistability_onset, drive_amplitude, mean_field};
    use super::*;
    use nalgebra::{Matrix2, Vector2};

    fn setup(r: f64, ratio: f64) -> (DetectorParams, DrivePoint, Complex64) {
        let p = DetectorParams::detection();
        let o = bistability_onset(&p).unwrap();
        let drive = DrivePoint::new(r * o.current, ratio * o.delta_omega.abs()).unwrap();
        let chi = mean_field(&p, &drive).unwrap()[0].chi;
        (p, drive, chi)
    }

    #[test]
    fn small_drive_limits() {
        let (p, drive, chi) = setup(1e-3, 0.0);
        let c = drive_amplitude(&p, &drive);
        let wp = p.omega_t + drive.delta_omega;
        for w in [wp + p.omega_m, wp - p.omega_m, wp + 0.3 * p.omega_m, wp + 5.0 * p.gamma_pt()] {
            let r = response_coeffs(&p, &drive, chi, w).unwrap();
            assert!((r.alpha1 / c - 1.0).norm() < 1e-3);
            assert!((r.alpha2 / c).norm() < 1e-3);
            assert!((r.beta1 - 1.0).norm() < 1e-3);
            assert!(r.beta2.norm() < 1e-3);
        }
    }

    #[test]
    fn zero_amplitude_is_identity() {
        let (p, drive, _) = setup(0.5, 0.2);
        let r = response_coeffs(&p, &drive, Complex64::new(0.0, 0.0), p.omega_t + p.omega_m).unwrap();
        assert_eq!(r.beta1, Complex64::new(1.0, 0.0));
        assert_eq!(r.beta2, Complex64::new(0.0, 0.0));
        assert_eq!(r.determinant, Complex64::new(1.0, 0.0));
    }

    /// Solves the coupled pair for `a(ω)` and `a†(2ω_p − ω)` directly and checks the
    /// closed forms, with unit signal sources `A(ω, ·)` and `A(ω − 2Δω, ·)`.
    #[test]
    fn coefficients_match_linear_solve() {
        for &(r, ratio) in &[(0.3, 0.0), (0.9, 0.4), (1.2, -1.5), (2.0, 0.2)] {
            let (p, drive, chi) = setup(r, ratio);
            let k = Kernels::new(&p, &drive, chi).unwrap();
            let wp = p.omega_t + drive.delta_omega;
            let c2 = chi.norm_sqr();
            for w in [wp + p.omega_m, wp - 0.7 * p.omega_m, wp + 2.0 * p.gamma_pt()] {
                let z = Complex64::new(w, 0.0);
                let x = z - wp;
                let wr = z - 2.0 * drive.delta_omega;
                let zero = Complex64::new(0.0, 0.0);
                let m = Matrix2::new(
                    1.0 - 2.0 * c2 * (k.b(z, zero) + k.b(z, x) + k.d(z)),
                    -chi * chi * (2.0 * k.b(z, x) + k.d(z)),
                    chi.conj() * chi.conj() * (2.0 * k.b(wr, x) + k.d(wr)),
                    1.0 + 2.0 * c2 * (k.b(wr, zero) + k.b(wr, x) + k.d(wr)),
                );
                let det = m.determinant();
                let coeffs = k.coeffs(z);
                assert!((det - coeffs.determinant).norm() < 1e-10 * det.norm().max(1.0));
                let inv = m.try_inverse().unwrap();
                // Signal sources (χ·A₁, −χ*·A₂): α₁ multiplies A₁, α₂ multiplies A₂.
                let sol1 = inv * Vector2::new(chi, Complex64::new(0.0, 0.0));
                let sol2 = inv * Vector2::new(Complex64::new(0.0, 0.0), -chi.conj());
                let scale = chi.norm();
                assert!((sol1[0] - coeffs.alpha1).norm() < 1e-10 * scale);
                assert!((sol2[0] - coeffs.alpha2).norm() < 1e-10 * scale);
                // Noise: unit source in the first equation gives β₁.
                let n1 = inv * Vector2::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
                assert!((n1[0] - coeffs.beta1).norm() < 1e-10);
                let n2 = inv * Vector2::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
                assert!((n2[0] - coeffs.beta2).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn pole_tracks_bare_resonance_at_weak_drive() {
        let (p, drive, chi) = setup(0.01, -1.3);
        let k = Kernels::new(&p, &drive, chi).unwrap();
        let wp = p.omega_t + drive.delta_omega;
        let z = k.mechanical_pole(Sideband::PhasePreserving).unwrap();
        assert!(((z.re - wp) / p.omega_m - 1.0).abs() < 1e-4);
        assert!((-z.im / p.gamma_bm() - 1.0).abs() < 0.05);
        let zc = k.mechanical_pole(Sideband::PhaseConjugating).unwrap();
        assert!(((wp - zc.re) / p.omega_m - 1.0).abs() < 1e-4);
        assert!(k.coeffs(z).determinant.norm() < 1e-6 * k.coeffs(z + p.gamma_bm()).determinant.norm());
    }
}
