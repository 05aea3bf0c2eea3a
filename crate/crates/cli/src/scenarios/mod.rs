//! One runner per scenario kind. Each returns a [`Report`]; per-point validity failures become
//! NaN cells with a warning, anything else aborts the run.

mod detector;
mod hawking;
mod trilinear;

use crate::config::ScenarioConfig;
use crate::error::CliError;
use crate::output::Report;

pub fn run(config: &ScenarioConfig) -> Result<Report, CliError> {
    match config {
        ScenarioConfig::DetectorSignalNoise(c) => detector::signal_noise(c),
        ScenarioConfig::DetectorBistability(c) => detector::bistability(c),
        ScenarioConfig::DetectorCooling(c) => detector::cooling(c),
        ScenarioConfig::HawkingLine(c) => hawking::line(c),
        ScenarioConfig::TrilinearEvolve(c) => trilinear::evolve(c),
        ScenarioConfig::TrilinearInfo(c) => trilinear::info(c),
    }
}

/// Result of one grid point: values, or a validity warning that blanks the row's cells.
pub(crate) type Cell<T> = Result<T, String>;

/// Splits validity failures (kept as warnings) from hard failures.
pub(crate) fn soften<T>(r: Result<T, CliError>, context: &str) -> Result<Cell<T>, CliError> {
    match r {
        Ok(v) => Ok(Ok(v)),
        Err(CliError::Validity(msg)) => Ok(Err(format!("{context}: {msg}"))),
        Err(e) => Err(e),
    }
}
