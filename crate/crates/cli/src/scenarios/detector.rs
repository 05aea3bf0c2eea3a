use super::{soften, Cell};
use crate::config::{BistabilityConfig, CoolingConfig, SignalNoiseConfig};
use crate::error::CliError;
use crate::output::{num, Column, Report, Table};
use nlcavity::detector::{
    bistability_boundary, bistability_onset, cooling_curve, mean_field, BistabilityOnset, Band, DetectorError, DetectorParams,
    DrivePoint, Sideband, Spectra, ThermoOptions,
};
use rayon::prelude::*;
use std::f64::consts::PI;

fn onset(p: &DetectorParams, report: &mut Report) -> Result<BistabilityOnset, CliError> {
    let o = bistability_onset(p)?;
    report.resolve("i_bi_a", num(o.current));
    report.resolve("delta_omega_bi_hz", num(o.delta_omega / (2.0 * PI)));
    report.resolve("e_bi", num(o.energy));
    report.resolve("gamma_pt_hz", num(p.gamma_pt() / (2.0 * PI)));
    report.resolve("gamma_bm_hz", num(p.gamma_bm() / (2.0 * PI)));
    report.resolve("effective_duffing", num(p.effective_duffing()?));
    report.resolve("zero_point_m", num(p.zero_point()));
    Ok(o)
}

fn gate_check(p: &DetectorParams, i_0: f64, margin: f64) -> Result<(), CliError> {
    let g = p.gates(i_0)?;
    if g.pass(margin) {
        Ok(())
    } else {
        Err(CliError::Validity(format!("SQUID expansion gate (current {:.3}, screening {:.3})", g.current, g.screening)))
    }
}

fn record_gates(p: &DetectorParams, max_current: f64, report: &mut Report) -> Result<(), CliError> {
    let g = p.gates(max_current)?;
    report.gate("current_over_critical_at_max_drive", num(g.current));
    report.gate("screening_beta_l", num(g.screening));
    Ok(())
}

/// Signal, noise and Caves bound in the band `2R_γγ_bm` about the renormalized upper sideband.
fn detection_point(p: &DetectorParams, drive: &DrivePoint, bath_t: f64, margin: f64) -> Result<[f64; 4], CliError> {
    gate_check(p, drive.i_0, margin)?;
    let chi = mean_field(p, drive)?.first().ok_or(DetectorError::NoPhysicalRoot)?.chi;
    let s = Spectra::new(p, drive, chi)?;
    let z = s.kernels().mechanical_pole(Sideband::PhasePreserving)?;
    let r_gamma = -z.im / p.gamma_bm();
    if !(r_gamma > 0.0) {
        return Err(DetectorError::Unstable { r_gamma }.into());
    }
    let band = Band::new(z.re, -2.0 * z.im)?;
    Ok([s.signal(&band, bath_t)?, s.noise(&band)?, s.caves(&band)?, r_gamma])
}

pub fn signal_noise(c: &SignalNoiseConfig) -> Result<Report, CliError> {
    let mut report = Report::default();
    let p = c.detector.params()?;
    let o = onset(&p, &mut report)?;
    let unit = o.delta_omega.abs();
    let harmonic = if c.harmonic_reference { Some(p.with_k_d(0.0)?) } else { None };
    let currents = c.current.values();
    record_gates(&p, currents.iter().copied().fold(0.0, f64::max) * o.current, &mut report)?;

    let mut columns = vec![Column::new("current_ratio", "I_bi", "drive current amplitude I_0/I_bi")];
    let mut curves: Vec<(String, &DetectorParams, f64)> =
        c.detunings.iter().enumerate().map(|(k, &d)| (format!("d{k}"), &p, d * unit)).collect();
    if let Some(h) = &harmonic {
        curves.push(("harmonic".into(), h, 0.0));
    }
    for (tag, _, dw) in &curves {
        let at = match tag.as_str() {
            "harmonic" => "with K_d = 0 at zero detuning".to_string(),
            _ => format!("at detuning {:.6e} Hz", dw / (2.0 * PI)),
        };
        columns.push(Column::new(format!("{tag}_signal"), "A^2", format!("integrated signal {at}")));
        columns.push(Column::new(format!("{tag}_noise"), "A^2", format!("integrated noise {at}")));
        columns.push(Column::new(format!("{tag}_caves"), "A^2", format!("Caves bound {at}")));
        columns.push(Column::new(format!("{tag}_r_gamma"), "", format!("damping renormalization {at}")));
    }

    let cells: Vec<Vec<Cell<[f64; 4]>>> = currents
        .par_iter()
        .map(|&r| {
            curves
                .iter()
                .map(|(tag, params, dw)| {
                    let drive = DrivePoint::new(r * o.current, *dw)?;
                    let point = detection_point(params, &drive, c.bath_temperature, c.tolerances.gate_margin);
                    soften(point, &format!("{tag} at I/I_bi={r}"))
                })
                .collect()
        })
        .collect::<Result<_, CliError>>()?;

    let mut table = Table::new("signal_noise.csv", columns);
    for (r, row_cells) in currents.iter().zip(cells) {
        let mut row = vec![*r];
        for cell in row_cells {
            match cell {
                Ok(v) => row.extend(v),
                Err(w) => {
                    report.warn(w);
                    row.extend([f64::NAN; 4]);
                }
            }
        }
        table.push(row);
    }
    report.tables.push(table);
    Ok(report)
}

pub fn bistability(c: &BistabilityConfig) -> Result<Report, CliError> {
    let mut report = Report::default();
    let p = c.detector.params()?;
    let o = onset(&p, &mut report)?;
    let mut table = Table::new(
        "bistability.csv",
        vec![
            Column::new("detuning_ratio", "delta_omega_bi", "pump detuning over the onset detuning"),
            Column::new("lower_ratio", "I_bi", "lower boundary of the bistable region"),
            Column::new("upper_ratio", "I_bi", "upper boundary of the bistable region"),
            Column::new("lower_current", "A", "lower boundary drive current"),
            Column::new("upper_current", "A", "upper boundary drive current"),
        ],
    );
    let mut top: f64 = 0.0;
    for d in c.detuning.values() {
        let (lo, hi) = bistability_boundary(d)?;
        top = top.max(hi);
        table.push(vec![d, lo, hi, lo * o.current, hi * o.current]);
    }
    record_gates(&p, top * o.current, &mut report)?;
    if !p.gates(top * o.current)?.pass(1.0) {
        report.warn("upper boundary drive exceeds the SQUID expansion gate");
    }
    report.tables.push(table);
    Ok(report)
}

pub fn cooling(c: &CoolingConfig) -> Result<Report, CliError> {
    let mut report = Report::default();
    let p = c.detector.params()?;
    let o = onset(&p, &mut report)?;
    report.resolve("detuning_hz", num(c.detuning * o.delta_omega.abs() / (2.0 * PI)));
    let currents = c.current.values();
    record_gates(&p, currents.iter().copied().fold(0.0, f64::max) * o.current, &mut report)?;
    let options = ThermoOptions { policy: c.branch.into(), model: c.model.into() };

    let curves = c
        .bath_temperatures
        .par_iter()
        .map(|&t| cooling_curve(&p, c.detuning, &currents, &[t], options))
        .collect::<Result<Vec<_>, _>>()?;

    let mut columns = vec![
        Column::new("current_ratio", "I_bi", "drive current amplitude I_0/I_bi"),
        Column::new("r_omega", "", "mechanical frequency renormalization"),
        Column::new("r_gamma", "", "mechanical damping renormalization"),
        Column::new("g_plus", "", "gain of the phase-preserving sideband"),
        Column::new("g_minus", "", "gain of the phase-conjugating sideband"),
        Column::new("two_n_back_plus_one", "", "2 n_back + 1 from the phase-preserving sideband"),
        Column::new("two_n_back_minus_plus_one", "", "2 n_back + 1 from the phase-conjugating sideband"),
        Column::new("lorentzian_residual", "", "relative RMS misfit of the signal peak"),
    ];
    for (k, t) in c.bath_temperatures.iter().enumerate() {
        columns.push(Column::new(format!("n_net_t{k}"), "", format!("net mechanical occupation at bath {t} K")));
    }
    let mut table = Table::new("cooling.csv", columns);
    for (i, &r) in currents.iter().enumerate() {
        let mut row = vec![r];
        let gate = gate_check(&p, r * o.current, c.tolerances.gate_margin);
        let first = soften(gate.and(curves[0][i].result.clone().map_err(CliError::from)), &format!("I/I_bi={r}"))?;
        match &first {
            Ok(t) => {
                row.extend([t.r_omega, t.r_gamma, t.g_plus, t.g_minus, t.two_n_back_plus_one(), 2.0 * t.n_back_minus + 1.0]);
                row.push(t.lorentzian_residual);
                if t.weak_coupling {
                    report.warn(format!("I/I_bi={r}: back-action damping too weak to define n_back"));
                }
                if t.g_minus.is_nan() {
                    report.warn(format!("I/I_bi={r}: phase-conjugating peak fails the Lorentzian gate"));
                }
            }
            Err(w) => {
                report.warn(w.clone());
                row.extend([f64::NAN; 7]);
            }
        }
        for curve in &curves {
            row.push(match (&first, &curve[i].result) {
                (Ok(_), Ok(t)) => t.n_net,
                _ => f64::NAN,
            });
        }
        table.push(row);
    }
    report.tables.push(table);
    Ok(report)
}
