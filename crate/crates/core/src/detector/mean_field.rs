use super::{DetectorError, DetectorParams, DrivePoint};
use crate::constants::HBAR;
use crate::numerics::solve_cubic_real;
use num_complex::Complex64;
use std::f64::consts::PI;

const RESIDUAL_TOL: f64 = 1e-9;

/// Which metastable amplitude a steady state belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Small,
    Unstable,
    Large,
}

/// How a sweep picks among coexisting solutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BranchPolicy {
    #[default]
    Small,
    Large,
    /// Stay on the solution continuously connected to the previous sweep point.
    FollowSweep,
}

/// Steady cavity amplitude `⟨a_T(ω)⟩ = χ·δ(ω − ω_p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFieldSolution {
    pub chi: Complex64,
    pub branch: Branch,
    /// `E = |χ|²/2π`.
    pub energy: f64,
}

/// Bistability onset point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BistabilityOnset {
    pub energy: f64,
    pub delta_omega: f64,
    pub current: f64,
}

/// Linear-response amplitude `c` (value of `χ` without the cubic term).
pub fn drive_amplitude(params: &DetectorParams, drive: &DrivePoint) -> Complex64 {
    let g = params.gamma_pt();
    let wp = params.omega_t + drive.delta_omega;
    let mag = (2.0 * PI).sqrt() * (drive.i_0 * drive.i_0 * params.z_p * g / (HBAR * wp)).sqrt();
    Complex64::i() * mag / Complex64::new(g, -drive.delta_omega)
}

/// Right-hand side magnitude `√(2π I₀² Z_p γ_pT/(ħω_p))` of the mean-field equation.
fn forcing(params: &DetectorParams, drive: &DrivePoint) -> f64 {
    let wp = params.omega_t + drive.delta_omega;
    (2.0 * PI * drive.i_0 * drive.i_0 * params.z_p * params.gamma_pt() / (HBAR * wp)).sqrt()
}

/// `|LHS − RHS| / |RHS|` of `(ω_T − ω_p − iγ_pT)χ + (ω_T/2π)𝒦χ|χ|² = RHS`.
pub fn mean_field_residual(params: &DetectorParams, drive: &DrivePoint, chi: Complex64) -> Result<f64, DetectorError> {
    let k = params.effective_duffing()?;
    let lhs = Complex64::new(-drive.delta_omega, -params.gamma_pt()) * chi
        + params.omega_t / (2.0 * PI) * k * chi * chi.norm_sqr();
    let rhs = forcing(params, drive);
    if rhs == 0.0 {
        return Ok(lhs.norm());
    }
    Ok((lhs - rhs).norm() / rhs)
}

/// Steady states of the driven Duffing cavity, ascending in amplitude.
///
/// Three coexisting solutions are labelled small/unstable/large. A lone solution is
/// labelled by which side of the response curve's inflection energy it sits on.
pub fn mean_field(params: &DetectorParams, drive: &DrivePoint) -> Result<Vec<MeanFieldSolution>, DetectorError> {
    params.validate()?;
    let k = params.effective_duffing()?;
    let g = params.gamma_pt();
    let delta = -drive.delta_omega;
    let wp = params.omega_t + drive.delta_omega;
    // ⟨b_in⟩² = I₀² Z_p / (2ħω_p)
    let b2 = drive.i_0 * drive.i_0 * params.z_p / (2.0 * HBAR * wp);
    let energies: Vec<f64> = if k == 0.0 {
        vec![2.0 * g * b2 / (delta * delta + g * g)]
    } else {
        // Scale E by γ/(ω_T|𝒦|) so the cubic coefficients are O(1).
        let scale = g / (params.omega_t * k.abs());
        let d = delta / g;
        let roots = solve_cubic_real(2.0 * k.signum() * d, d * d + 1.0, -2.0 * b2 / (g * scale));
        roots.into_iter().filter(|&e| e >= -1e-12).map(|e| e.max(0.0) * scale).collect()
    };
    if energies.is_empty() {
        return Err(DetectorError::NoPhysicalRoot);
    }
    let labels: Vec<Branch> = match energies.len() {
        3 => vec![Branch::Small, Branch::Unstable, Branch::Large],
        2 => vec![Branch::Small, Branch::Large],
        _ => {
            let inflection = if k == 0.0 { f64::INFINITY } else { 2.0 * drive.delta_omega / (3.0 * params.omega_t * k) };
            vec![if energies[0] < inflection.max(0.0) { Branch::Small } else { Branch::Large }]
        }
    };
    let mut out = Vec::with_capacity(energies.len());
    for (e, branch) in energies.into_iter().zip(labels) {
        let m = e.sqrt();
        let lhs = Complex64::new(delta, -g) * m + k * params.omega_t * m * m * m;
        // e^{iφ_M} is the phase of the left side (drive phase φ_pT = 0).
        let phase = if lhs.norm() > 0.0 { lhs / lhs.norm() } else { Complex64::new(1.0, 0.0) };
        let chi = (2.0 * PI).sqrt() * m * phase.conj();
        let res = mean_field_residual(params, drive, chi)?;
        if res > RESIDUAL_TOL && drive.i_0 > 0.0 {
            return Err(DetectorError::Residual(res));
        }
        out.push(MeanFieldSolution { chi, branch, energy: e });
    }
    Ok(out)
}

/// Mean field with the cubic term dropped: `χ = c`.
pub fn mean_field_linear(params: &DetectorParams, drive: &DrivePoint) -> MeanFieldSolution {
    let chi = drive_amplitude(params, drive);
    MeanFieldSolution { chi, branch: Branch::Small, energy: chi.norm_sqr() / (2.0 * PI) }
}

impl BranchPolicy {
    /// Picks a stable solution; `previous` is the energy at the preceding sweep point.
    pub fn select(&self, solutions: &[MeanFieldSolution], previous: Option<f64>) -> Option<MeanFieldSolution> {
        let stable: Vec<&MeanFieldSolution> = solutions.iter().filter(|s| s.branch != Branch::Unstable).collect();
        let pick = match (self, previous) {
            (BranchPolicy::Small, _) | (BranchPolicy::FollowSweep, None) => stable.first(),
            (BranchPolicy::Large, _) => stable.last(),
            (BranchPolicy::FollowSweep, Some(e)) => stable
                .iter()
                .min_by(|a, b| (a.energy - e).abs().partial_cmp(&(b.energy - e).abs()).unwrap()),
        };
        pick.map(|s| **s)
    }
}

/// Onset of bistability: `E_bi`, `Δω_bi` and `I_bi`.
pub fn bistability_onset(params: &DetectorParams) -> Result<BistabilityOnset, DetectorError> {
    let k = params.effective_duffing()?;
    if k == 0.0 {
        return Err(DetectorError::NoBistability);
    }
    let g = params.gamma_pt();
    let sqrt3 = 3f64.sqrt();
    let delta_omega = sqrt3 * g * k.signum();
    let wp = params.omega_t + delta_omega;
    let current = 2.0 * g * (2.0 * HBAR * wp / (3.0 * sqrt3 * params.omega_t * k.abs() * params.z_p)).sqrt();
    Ok(BistabilityOnset { energy: 2.0 * g / (sqrt3 * params.omega_t * k.abs()), delta_omega, current })
}

/// Lower and upper drive boundaries `(I_lower/I_bi, I_upper/I_bi)` of the bistable region at
/// detuning `ratio = Δω/Δω_bi ≥ 1`.
pub fn bistability_boundary(ratio: f64) -> Result<(f64, f64), DetectorError> {
    if !(ratio >= 1.0) || !ratio.is_finite() {
        return Err(DetectorError::OutsideRegion(ratio));
    }
    let s2 = 1.0 / (ratio * ratio);
    let root = (1.0 - s2).powf(1.5);
    let pre = 0.5 * ratio.powf(1.5);
    Ok((pre * (1.0 + 3.0 * s2 - root).sqrt(), pre * (1.0 + 3.0 * s2 + root).sqrt()))
}
