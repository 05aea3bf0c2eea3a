//! Named scenario configurations.

use crate::config::{
    BranchChoice, CoolingConfig, DetectorConfig, Grid, HawkingLineConfig, InfoConfig, LineConfig, ModelChoice, PulseConfig,
    ScenarioConfig, ShapeChoice, SignalNoiseConfig, Spacing, TierChoice, Tolerances,
};
use crate::error::CliError;
use nlcavity::detector::{bistability_boundary, DetectorParams};
use nlcavity::hawking::LineParams;
use std::f64::consts::PI;
use std::path::PathBuf;

pub const PRESETS: [&str; 5] = ["ch2-detection", "ch2-cooling-Q1e4", "ch2-goodcavity-Q1000", "ch3-beltran", "ch4-coherent9"];

const PRESET_GATE_MARGIN: f64 = 5.0;

fn tolerances() -> Tolerances {
    Tolerances { gate_margin: PRESET_GATE_MARGIN, ..Tolerances::default() }
}

fn cooling(name: &str, p: DetectorParams, detuning: f64) -> ScenarioConfig {
    let (_, upper) = bistability_boundary(detuning.abs()).expect("preset detuning is past the onset");
    ScenarioConfig::DetectorCooling(CoolingConfig {
        output: PathBuf::from(name),
        detuning,
        bath_temperatures: vec![0.0, 0.001, 0.01, 0.1],
        model: ModelChoice::Duffing,
        branch: BranchChoice::Small,
        detector: DetectorConfig::from_params(&p),
        current: Grid { start: 0.05, stop: 0.99 * upper, points: 60, spacing: Spacing::Linear },
        tolerances: tolerances(),
    })
}

pub fn preset(name: &str) -> Result<ScenarioConfig, CliError> {
    let output = PathBuf::from(name);
    let config = match name {
        "ch2-detection" => ScenarioConfig::DetectorSignalNoise(SignalNoiseConfig {
            output,
            detunings: vec![0.0, 0.2, 0.4],
            bath_temperature: 0.0,
            harmonic_reference: true,
            detector: DetectorConfig::from_params(&DetectorParams::detection()),
            current: Grid { start: 0.01, stop: 0.3, points: 30, spacing: Spacing::Log },
            tolerances: tolerances(),
        }),
        "ch2-cooling-Q1e4" => cooling(name, DetectorParams::cooling(), -1.3),
        "ch2-goodcavity-Q1000" => cooling(name, DetectorParams::good_cavity(), -2.2),
        "ch3-beltran" => {
            let line = LineParams::beltran();
            let rate = line.plasma_frequency(0.0)? / (2.0 * PI * 10.0);
            ScenarioConfig::HawkingLine(HawkingLineConfig {
                output,
                profile_points: 401,
                profile_span: 10.0,
                temperature_decay: true,
                line: LineConfig::from_params(&line),
                pulse: PulseConfig {
                    shape: ShapeChoice::Tanh,
                    amplitude: 0.2,
                    gradient_rate: Some(rate),
                    rise_scale: None,
                    allow_white_hole: false,
                },
                flux: Grid { start: 0.0, stop: 0.45, points: 46, spacing: Spacing::Linear },
                tolerances: tolerances(),
            })
        }
        "ch4-coherent9" => ScenarioConfig::TrilinearInfo(InfoConfig {
            output,
            means: vec![1.0, 3.0, 6.0, 9.0],
            tier: TierChoice::ShortTime,
            dim: 40,
            omega_b_hz: 5e9,
            tau: Grid { start: 0.0, stop: 4.0, points: 401, spacing: Spacing::Linear },
            tolerances: Tolerances::default(),
        }),
        _ => return Err(CliError::Config(format!("unknown preset {name:?}; known: {}", PRESETS.join(", ")))),
    };
    Ok(config)
}
