//! Scenario configuration files.
//!
//! A config is a TOML document with a top-level `kind` key selecting the scenario, plain keys for
//! scalar settings and one table per parameter block. Frequencies carry an `_hz` suffix and are
//! converted to angular frequencies internally.

use crate::error::CliError;
use nlcavity::constants::FLUX_QUANTUM;
use nlcavity::detector::{BranchPolicy, DetectorParams, DirectCoupling, MeanFieldModel};
use nlcavity::hawking::{FluxPulse, JunctionConvention, LineParams};
use nlcavity::numerics::{RealGrid, Tolerance};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScenarioConfig {
    DetectorSignalNoise(SignalNoiseConfig),
    DetectorBistability(BistabilityConfig),
    DetectorCooling(CoolingConfig),
    HawkingLine(HawkingLineConfig),
    TrilinearEvolve(EvolveConfig),
    TrilinearInfo(InfoConfig),
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ScenarioConfig::DetectorSignalNoise(_) => "detector-signal-noise",
            ScenarioConfig::DetectorBistability(_) => "detector-bistability",
            ScenarioConfig::DetectorCooling(_) => "detector-cooling",
            ScenarioConfig::HawkingLine(_) => "hawking-line",
            ScenarioConfig::TrilinearEvolve(_) => "trilinear-evolve",
            ScenarioConfig::TrilinearInfo(_) => "trilinear-info",
        }
    }

    pub fn output(&self) -> &Path {
        match self {
            ScenarioConfig::DetectorSignalNoise(c) => &c.output,
            ScenarioConfig::DetectorBistability(c) => &c.output,
            ScenarioConfig::DetectorCooling(c) => &c.output,
            ScenarioConfig::HawkingLine(c) => &c.output,
            ScenarioConfig::TrilinearEvolve(c) => &c.output,
            ScenarioConfig::TrilinearInfo(c) => &c.output,
        }
    }

    pub fn set_output(&mut self, dir: PathBuf) {
        match self {
            ScenarioConfig::DetectorSignalNoise(c) => c.output = dir,
            ScenarioConfig::DetectorBistability(c) => c.output = dir,
            ScenarioConfig::DetectorCooling(c) => c.output = dir,
            ScenarioConfig::HawkingLine(c) => c.output = dir,
            ScenarioConfig::TrilinearEvolve(c) => c.output = dir,
            ScenarioConfig::TrilinearInfo(c) => c.output = dir,
        }
    }

    /// Checks that do not need any physics: grids, list lengths, signs.
    pub fn validate(&self) -> Result<(), CliError> {
        match self {
            ScenarioConfig::DetectorSignalNoise(c) => {
                c.current.check("current")?;
                nonempty("detunings", &c.detunings)?;
                nonnegative("bath_temperature", c.bath_temperature)?;
            }
            ScenarioConfig::DetectorBistability(c) => {
                c.detuning.check("detuning")?;
                if c.detuning.start < 1.0 {
                    return Err(CliError::Config("detuning grid must start at Δω/Δω_bi >= 1".into()));
                }
            }
            ScenarioConfig::DetectorCooling(c) => {
                c.current.check("current")?;
                nonempty("bath_temperatures", &c.bath_temperatures)?;
                for &t in &c.bath_temperatures {
                    nonnegative("bath_temperatures", t)?;
                }
            }
            ScenarioConfig::HawkingLine(c) => {
                c.flux.check("flux")?;
                if c.flux.stop >= 0.5 || c.flux.start < 0.0 {
                    return Err(CliError::Config("flux grid must lie in [0, 0.5)".into()));
                }
                if c.profile_points == 0 {
                    return Err(CliError::Config("profile_points must be >= 1".into()));
                }
                if c.pulse.gradient_rate.is_some() == c.pulse.rise_scale.is_some() {
                    return Err(CliError::Config("[pulse] needs exactly one of gradient_rate and rise_scale".into()));
                }
            }
            ScenarioConfig::TrilinearEvolve(c) => {
                c.tau.check("tau")?;
                if c.dims.iter().any(|&d| d < 2) {
                    return Err(CliError::Config("dims must all be >= 2".into()));
                }
            }
            ScenarioConfig::TrilinearInfo(c) => {
                c.tau.check("tau")?;
                nonempty("means", &c.means)?;
                if c.means.iter().any(|&m| !(m > 0.0)) {
                    return Err(CliError::Config("means must be > 0".into()));
                }
            }
        }
        Ok(())
    }
}

fn nonempty(name: &str, v: &[f64]) -> Result<(), CliError> {
    if v.is_empty() {
        return Err(CliError::Config(format!("{name} is empty")));
    }
    Ok(())
}

fn nonnegative(name: &str, v: f64) -> Result<(), CliError> {
    if !(v >= 0.0) || !v.is_finite() {
        return Err(CliError::Config(format!("{name} must be finite and >= 0, got {v}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// Evenly (or log-evenly) spaced points `start..=stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl Grid {
    pub fn check(&self, name: &str) -> Result<(), CliError> {
        if self.points == 0 {
            return Err(CliError::Config(format!("{name} grid is empty")));
        }
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(CliError::Config(format!("{name} grid bounds must be finite")));
        }
        if self.points > 1 && !(self.stop > self.start) {
            return Err(CliError::Config(format!("{name} grid needs stop > start")));
        }
        if self.spacing == Spacing::Log && !(self.start > 0.0) {
            return Err(CliError::Config(format!("{name} log grid needs start > 0")));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let n = (self.points - 1) as f64;
        (0..self.points)
            .map(|k| {
                let t = k as f64 / n;
                match self.spacing {
                    Spacing::Linear => self.start + t * (self.stop - self.start),
                    Spacing::Log => self.start * (self.stop / self.start).powf(t),
                }
            })
            .collect()
    }

    pub fn real_grid(&self) -> Result<RealGrid, CliError> {
        RealGrid::new(self.values()).map_err(|e| CliError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Margin applied to the `≪ 1` validity measures.
    pub gate_margin: f64,
    pub ode_abs: f64,
    pub ode_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let t = Tolerance::ode();
        Self { gate_margin: 1.0, ode_abs: t.abs_tol, ode_rel: t.rel_tol }
    }
}

impl Tolerances {
    pub fn ode(&self) -> Result<Tolerance, CliError> {
        Tolerance::new(self.ode_abs, self.ode_rel, Tolerance::ode().max_iter).map_err(|e| CliError::Config(e.to_string()))
    }
}

/// Detector circuit, with the couplings given directly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorConfig {
    /// Pump-probe line impedance (Ω).
    pub z_p: f64,
    pub omega_t_hz: f64,
    pub q_t: f64,
    pub omega_m_hz: f64,
    pub q_m: f64,
    /// Mechanical mass (kg).
    pub mass: f64,
    /// Junction critical current (A).
    pub i_c: f64,
    /// Junction capacitance (F).
    pub c_j: f64,
    /// Flux bias (units of Φ₀).
    pub phi_ext: f64,
    /// In-plane field (T).
    pub b_ext: f64,
    /// SQUID loop inductance (H).
    pub loop_inductance: f64,
    pub k_d: f64,
    pub k_tm: f64,
}

impl DetectorConfig {
    pub fn params(&self) -> Result<DetectorParams, CliError> {
        let p = DetectorParams {
            z_p: self.z_p,
            omega_t: 2.0 * PI * self.omega_t_hz,
            q_t: self.q_t,
            omega_m: 2.0 * PI * self.omega_m_hz,
            q_m: self.q_m,
            mass: self.mass,
            i_c: self.i_c,
            c_j: self.c_j,
            phi_ext: self.phi_ext,
            b_ext: self.b_ext,
            loop_inductance: self.loop_inductance,
            direct: Some(DirectCoupling { k_d: self.k_d, k_tm: self.k_tm }),
            geometry: None,
        };
        p.validate().map_err(CliError::from)?;
        Ok(p)
    }

    pub fn from_params(p: &DetectorParams) -> Self {
        let c = p.couplings().expect("preset couplings are defined");
        Self {
            z_p: p.z_p,
            omega_t_hz: p.omega_t / (2.0 * PI),
            q_t: p.q_t,
            omega_m_hz: p.omega_m / (2.0 * PI),
            q_m: p.q_m,
            mass: p.mass,
            i_c: p.i_c,
            c_j: p.c_j,
            phi_ext: p.phi_ext,
            b_ext: p.b_ext,
            loop_inductance: p.loop_inductance,
            k_d: c.k_d,
            k_tm: c.k_tm,
        }
    }
}

/// Signal, noise and Caves bound against drive current at several detunings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalNoiseConfig {
    pub output: PathBuf,
    /// Pump detunings in units of `|Δω_bi|`, signed.
    pub detunings: Vec<f64>,
    /// Mechanical bath temperature for the signal (K).
    #[serde(default)]
    pub bath_temperature: f64,
    /// Add columns for the same circuit with `K_d = 0` at zero detuning.
    #[serde(default)]
    pub harmonic_reference: bool,
    pub detector: DetectorConfig,
    /// Drive current in units of `I_bi`.
    pub current: Grid,
    #[serde(default)]
    pub tolerances: Tolerances,
}

/// Bistable-region boundaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BistabilityConfig {
    pub output: PathBuf,
    pub detector: DetectorConfig,
    /// Detuning in units of `Δω_bi`.
    pub detuning: Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ModelChoice {
    #[default]
    Duffing,
    Linear,
}

impl From<ModelChoice> for MeanFieldModel {
    fn from(m: ModelChoice) -> Self {
        match m {
            ModelChoice::Duffing => MeanFieldModel::Duffing,
            ModelChoice::Linear => MeanFieldModel::Linear,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum BranchChoice {
    #[default]
    Small,
    Large,
    FollowSweep,
}

impl From<BranchChoice> for BranchPolicy {
    fn from(b: BranchChoice) -> Self {
        match b {
            BranchChoice::Small => BranchPolicy::Small,
            BranchChoice::Large => BranchPolicy::Large,
            BranchChoice::FollowSweep => BranchPolicy::FollowSweep,
        }
    }
}

/// Back-action bath and net occupation against drive current.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoolingConfig {
    pub output: PathBuf,
    /// Pump detuning in units of `|Δω_bi|`, signed.
    pub detuning: f64,
    /// Mechanical bath temperatures (K).
    pub bath_temperatures: Vec<f64>,
    #[serde(default)]
    pub model: ModelChoice,
    #[serde(default)]
    pub branch: BranchChoice,
    pub detector: DetectorConfig,
    /// Drive current in units of `I_bi`.
    pub current: Grid,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ConventionChoice {
    #[default]
    SquidPair,
    Single,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineConfig {
    /// Junction critical current (A).
    pub i_c: f64,
    /// Junction capacitance (F).
    pub c_j: f64,
    /// Capacitance to ground per cell (F).
    pub c_0: f64,
    /// Cell length (m).
    pub a: f64,
    pub n_cells: usize,
    /// Pulse velocity as a fraction of the unbiased line velocity.
    pub pulse_velocity_ratio: f64,
    /// SQUID loop inductance (H).
    pub loop_inductance: f64,
    #[serde(default)]
    pub convention: ConventionChoice,
}

impl LineConfig {
    pub fn params(&self) -> Result<LineParams, CliError> {
        let mut p = LineParams {
            i_c: self.i_c,
            c_j: self.c_j,
            c_0: self.c_0,
            a: self.a,
            n_cells: self.n_cells,
            u: 1.0,
            loop_inductance: self.loop_inductance,
            convention: match self.convention {
                ConventionChoice::SquidPair => JunctionConvention::SquidPair,
                ConventionChoice::Single => JunctionConvention::Single,
            },
        };
        p.validate().map_err(CliError::from)?;
        if !(self.pulse_velocity_ratio > 0.0) {
            return Err(CliError::Config("pulse_velocity_ratio must be > 0".into()));
        }
        p.u = self.pulse_velocity_ratio * p.propagation_velocity(0.0).map_err(CliError::from)?;
        Ok(p)
    }

    pub fn from_params(p: &LineParams) -> Self {
        Self {
            i_c: p.i_c,
            c_j: p.c_j,
            c_0: p.c_0,
            a: p.a,
            n_cells: p.n_cells,
            pulse_velocity_ratio: p.u / p.propagation_velocity(0.0).expect("preset flux is valid"),
            loop_inductance: p.loop_inductance,
            convention: match p.convention {
                JunctionConvention::SquidPair => ConventionChoice::SquidPair,
                JunctionConvention::Single => ConventionChoice::Single,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeChoice {
    #[default]
    Tanh,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseConfig {
    #[serde(default)]
    pub shape: ShapeChoice,
    /// Peak flux (units of Φ₀).
    pub amplitude: f64,
    /// Target `|dc/dξ|` at the horizon (s⁻¹); tanh pulses only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gradient_rate: Option<f64>,
    /// Rise length (m).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rise_scale: Option<f64>,
    /// Required to run a Gaussian pulse, which also forms a white hole.
    #[serde(default)]
    pub allow_white_hole: bool,
}

impl PulseConfig {
    pub fn pulse(&self, line: &LineParams) -> Result<FluxPulse, CliError> {
        match (self.shape, self.gradient_rate, self.rise_scale) {
            (ShapeChoice::Tanh, Some(rate), _) => FluxPulse::tanh_for_rate(line, self.amplitude, rate),
            (ShapeChoice::Tanh, None, Some(w)) => FluxPulse::tanh_step(self.amplitude, w),
            (ShapeChoice::Gaussian, _, Some(w)) if self.allow_white_hole => FluxPulse::gaussian(self.amplitude, w),
            (ShapeChoice::Gaussian, _, Some(_)) => {
                return Err(CliError::Config("gaussian pulses form a white hole; set allow_white_hole = true".into()))
            }
            (ShapeChoice::Gaussian, _, None) => return Err(CliError::Config("gaussian pulses need rise_scale".into())),
            (ShapeChoice::Tanh, None, None) => return Err(CliError::Config("pulse needs gradient_rate or rise_scale".into())),
        }
        .map_err(CliError::from)
    }
}

/// Line dispersion, impedance and horizon quantities for one pulse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HawkingLineConfig {
    pub output: PathBuf,
    /// Samples of the comoving velocity profile.
    #[serde(default = "default_profile_points")]
    pub profile_points: usize,
    /// Half-width of the profile window in rise lengths.
    #[serde(default = "default_profile_span")]
    pub profile_span: f64,
    /// Apply the linear decay of `T_H` along the line to the photon count.
    #[serde(default = "default_true")]
    pub temperature_decay: bool,
    pub line: LineConfig,
    pub pulse: PulseConfig,
    /// Static flux bias (units of Φ₀) for the velocity and impedance table.
    pub flux: Grid,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_profile_points() -> usize {
    401
}

fn default_profile_span() -> f64 {
    10.0
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PumpConfig {
    Fock { n: usize },
    Coherent { mean: f64 },
}

/// Full Fock-space evolution from a pump state with signal and idler in vacuum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    pub output: PathBuf,
    /// Truncation per mode (pump, signal, idler).
    pub dims: [usize; 3],
    pub pump: PumpConfig,
    /// Dimensionless time `χt`.
    pub tau: Grid,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TierChoice {
    #[default]
    ShortTime,
    Full,
}

/// Signal fidelity, information and pump squeezing for coherent pumps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InfoConfig {
    pub output: PathBuf,
    /// Initial coherent pump occupations.
    pub means: Vec<f64>,
    #[serde(default)]
    pub tier: TierChoice,
    /// Pump truncation; also the per-mode truncation of the full tier.
    pub dim: usize,
    /// Signal frequency, for the effective temperature column.
    pub omega_b_hz: f64,
    /// Dimensionless time `χt`.
    pub tau: Grid,
    #[serde(default)]
    pub tolerances: Tolerances,
}

/// Junction capacitance that puts the SQUID plasma frequency at `plasma_hz` (pair convention).
pub fn junction_capacitance(i_c: f64, plasma_hz: f64) -> f64 {
    let w = 2.0 * PI * plasma_hz;
    2.0 * PI * i_c / (FLUX_QUANTUM * w * w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_values() {
        let g = Grid { start: 1.0, stop: 3.0, points: 5, spacing: Spacing::Linear };
        assert_eq!(g.values(), vec![1.0, 1.5, 2.0, 2.5, 3.0]);
        let l = Grid { start: 0.01, stop: 1.0, points: 3, spacing: Spacing::Log };
        let v = l.values();
        assert!((v[1] - 0.1).abs() < 1e-15);
        assert!(Grid { points: 0, ..g }.check("x").is_err());
        assert_eq!(Grid { points: 1, ..g }.values(), vec![1.0]);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = r#"
kind = "trilinear-evolve"
output = "out"
dims = [2, 2, 2]
colour = "blue"
[pump]
state = "fock"
n = 1
[tau]
start = 0.0
stop = 1.0
points = 3
"#;
        assert!(matches!(ScenarioConfig::parse(text), Err(CliError::Config(_))));
        let ok = text.replace("colour = \"blue\"\n", "");
        assert!(ScenarioConfig::parse(&ok).is_ok());
    }

    #[test]
    fn frequencies_are_converted() {
        let p = DetectorParams::detection();
        let back = DetectorConfig::from_params(&p).params().unwrap();
        assert!((back.omega_t / p.omega_t - 1.0).abs() < 1e-15);
        assert_eq!(DetectorConfig::from_params(&p).omega_m_hz, p.omega_m / (2.0 * PI));
        let line = LineParams::beltran();
        assert!((junction_capacitance(line.i_c, 1e12) / line.c_j - 1.0).abs() < 1e-12);
    }
}
