use crate::config::HawkingLineConfig;
use crate::error::CliError;
use crate::output::{num, Column, Report, Table};
use nlcavity::constants::RESISTANCE_QUANTUM;
use nlcavity::hawking::{
    find_horizons, gates, hawking_temperature, local_velocity, metric_components, photons_per_pulse, temperature_from_gradient,
    FluxPulse, LineParams, PulseShape, TemperatureDecay,
};
use std::f64::consts::PI;

/// `|dc/dξ|` at `xh` by a 5-point central difference.
fn gradient_at(pulse: &FluxPulse, line: &LineParams, xh: f64) -> Result<f64, CliError> {
    let h = 1e-3 * pulse.rise_scale;
    let c = |x: f64| local_velocity(pulse, line, x);
    Ok(((-c(xh + 2.0 * h)? + 8.0 * c(xh + h)? - 8.0 * c(xh - h)? + c(xh - 2.0 * h)?) / (12.0 * h)).abs())
}

pub fn line(c: &HawkingLineConfig) -> Result<Report, CliError> {
    let mut report = Report::default();
    let line = c.line.params()?;
    let pulse = c.pulse.pulse(&line)?;

    let g = gates(&pulse, &line)?;
    report.gate("beta_l", num(g.beta_l));
    report.gate("impedance_over_r_q", num(g.impedance_ratio));
    report.gate("max_flux", num(g.max_flux));
    if !g.pass(c.tolerances.gate_margin) {
        return Err(CliError::Validity(format!(
            "line gates fail (beta_L {:.3}, Z_A/R_Q {:.3}, max flux {:.3})",
            g.beta_l, g.impedance_ratio, g.max_flux
        )));
    }

    let c0 = line.propagation_velocity(0.0)?;
    report.resolve("c0_m_per_s", num(c0));
    report.resolve("pulse_velocity_m_per_s", num(line.u));
    report.resolve("plasma_frequency_hz", num(line.plasma_frequency(0.0)? / (2.0 * PI)));
    report.resolve("rise_scale_m", num(pulse.rise_scale));

    let mut flux = Table::new(
        "flux.csv",
        vec![
            Column::new("phi", "Phi_0", "static flux bias"),
            Column::new("velocity", "m/s", "propagation velocity"),
            Column::new("velocity_ratio", "", "velocity over its zero-flux value"),
            Column::new("impedance_ratio", "", "array impedance over R_Q"),
            Column::new("plasma_frequency", "Hz", "SQUID plasma frequency"),
        ],
    );
    for phi in c.flux.values() {
        let v = line.propagation_velocity(phi)?;
        let z = line.array_impedance(phi)? / RESISTANCE_QUANTUM;
        flux.push(vec![phi, v, v / c0, z, line.plasma_frequency(phi)? / (2.0 * PI)]);
    }
    report.tables.push(flux);

    let mut profile = Table::new(
        "profile.csv",
        vec![
            Column::new("xi", "m", "position in the pulse frame"),
            Column::new("flux", "Phi_0", "pulse flux"),
            Column::new("velocity", "m/s", "local propagation velocity"),
            Column::new("g_tt", "m^2/s^2", "metric component c^2 - u^2"),
        ],
    );
    let half = c.profile_span * pulse.rise_scale;
    let n = c.profile_points;
    for i in 0..n {
        let xi = if n == 1 { 0.0 } else { -half + 2.0 * half * i as f64 / (n - 1) as f64 };
        let (g_tt, _, _) = metric_components(&pulse, &line, xi)?;
        profile.push(vec![xi, pulse.flux(xi), local_velocity(&pulse, &line, xi)?, g_tt]);
    }
    report.tables.push(profile);

    let horizons = find_horizons(&pulse, &line)?;
    match pulse.shape {
        PulseShape::Gaussian => {
            report.warn(format!("gaussian pulse has {} velocity crossings; photon count not computed", horizons.len()));
            let temps = horizons
                .iter()
                .map(|&xh| gradient_at(&pulse, &line, xh).map(|d| num(temperature_from_gradient(d))))
                .collect::<Result<Vec<_>, _>>()?;
            report.resolve("horizons_m", horizons.iter().map(|&x| num(x)).collect::<Vec<_>>());
            report.resolve("hawking_temperatures_k", temps);
        }
        PulseShape::TanhStep => {
            report.resolve("horizon_m", num(horizons[0]));
            report.resolve("hawking_temperature_k", num(hawking_temperature(&pulse, &line)?));
            let decay = c.temperature_decay.then(TemperatureDecay::default);
            report.resolve("photons_per_pulse", num(photons_per_pulse(&pulse, &line, decay)?));
            report.resolve("photons_per_pulse_no_decay", num(photons_per_pulse(&pulse, &line, None)?));
        }
    }
    Ok(report)
}
