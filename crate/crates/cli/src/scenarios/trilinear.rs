use crate::config::{EvolveConfig, InfoConfig, PumpConfig, TierChoice};
use crate::error::CliError;
use crate::output::{num, Column, Report, Table};
use nlcavity::fock::{coherent_state, DensityMatrix, HilbertSpec, StateVector};
use nlcavity::info::{
    effective_dimension, effective_temperature, fidelity, first_crossing, information, mean_occupation, mode_marginal,
    squeezing_params, ThermalReference,
};
use nlcavity::trilinear::{evolve_full_with, short_time_reduced, PumpInitialState, TrilinearParams};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

fn pump_state(pump: PumpConfig, dim: usize) -> Result<StateVector, CliError> {
    let spec = HilbertSpec::single(dim)?;
    match pump {
        PumpConfig::Fock { n } => {
            if n >= dim {
                return Err(CliError::Config(format!("pump level {n} needs dims[0] > {n}")));
            }
            Ok(StateVector::basis(spec, &[n])?)
        }
        PumpConfig::Coherent { mean } => Ok(coherent_state(Complex64::new(mean.sqrt(), 0.0), dim)?),
    }
}

fn joint_state(pump: StateVector, dims: [usize; 3]) -> Result<(TrilinearParams, StateVector), CliError> {
    let params = TrilinearParams::degenerate(1.0, 2.0, HilbertSpec::new(dims.to_vec())?)?;
    let vac = |d| StateVector::basis(HilbertSpec::single(d)?, &[0]);
    let joint = pump.tensor(&vac(dims[1])?).tensor(&vac(dims[2])?);
    let init = StateVector::new(params.spec().clone(), joint.amplitudes().to_vec())?;
    Ok((params, init))
}

pub fn evolve(c: &EvolveConfig) -> Result<Report, CliError> {
    let mut report = Report::default();
    let (params, init) = joint_state(pump_state(c.pump, c.dims[0])?, c.dims)?;
    let tr = evolve_full_with(&init, &params, &c.tau.real_grid()?, c.tolerances.ode()?)?;
    report.gate("max_outward_leak", num(tr.max_leak));
    report.resolve("hilbert_dim", params.spec().total_dim());

    let mut table = Table::new(
        "evolve.csv",
        vec![
            Column::new("tau", "1/chi", "dimensionless time chi t"),
            Column::new("n_a", "", "pump mean occupation"),
            Column::new("n_b", "", "signal mean occupation"),
            Column::new("n_c", "", "idler mean occupation"),
            Column::new("norm", "", "state norm"),
            Column::new("interaction_energy", "hbar chi", "expectation of the interaction Hamiltonian"),
            Column::new("factorization_residual", "", "pump number variance <N_a^2> - <N_a>^2"),
        ],
    );
    let cols = [
        tr.mean_number(0),
        tr.mean_number(1),
        tr.mean_number(2),
        tr.norms(),
        tr.interaction_energy(),
        tr.factorization_residual(),
    ];
    for (k, &t) in tr.tau.iter().enumerate() {
        let mut row = vec![t];
        row.extend(cols.iter().map(|col| col[k]));
        table.push(row);
    }
    report.tables.push(table);
    Ok(report)
}

struct InfoRow {
    n_a: f64,
    n_b: f64,
    fidelity: f64,
    information: f64,
    q_pump: (f64, f64),
}

fn info_row(pump: &DensityMatrix, signal: &DensityMatrix) -> Result<InfoRow, CliError> {
    let n_b = mean_occupation(signal)?;
    // Fidelity does not depend on the reference frequency.
    let reference = ThermalReference::new(n_b, 1.0, signal.dim())?.density()?;
    Ok(InfoRow {
        n_a: mean_occupation(pump)?,
        n_b,
        fidelity: fidelity(signal, &reference)?,
        information: information(signal)?,
        q_pump: squeezing_params(pump)?,
    })
}

fn info_rows(c: &InfoConfig, mean: f64) -> Result<Vec<InfoRow>, CliError> {
    let alpha = Complex64::new(mean.sqrt(), 0.0);
    match c.tier {
        TierChoice::ShortTime => {
            let initial = PumpInitialState::coherent(alpha, c.dim)?;
            c.tau
                .values()
                .into_iter()
                .map(|t| {
                    let r = short_time_reduced(&initial, t)?;
                    info_row(&r.pump, &r.signal)
                })
                .collect()
        }
        TierChoice::Full => {
            let (params, init) = joint_state(coherent_state(alpha, c.dim)?, [c.dim; 3])?;
            let tr = evolve_full_with(&init, &params, &c.tau.real_grid()?, c.tolerances.ode()?)?;
            tr.states.iter().map(|psi| info_row(&mode_marginal(psi, 0)?, &mode_marginal(psi, 1)?)).collect()
        }
    }
}

pub fn info(c: &InfoConfig) -> Result<Report, CliError> {
    let mut report = Report::default();
    let omega_b = 2.0 * PI * c.omega_b_hz;
    let tau = c.tau.values();
    let runs = c.means.par_iter().map(|&m| info_rows(c, m)).collect::<Result<Vec<_>, _>>()?;

    let mut crossings = Vec::new();
    for (k, (mean, rows)) in c.means.iter().zip(runs).enumerate() {
        let mut table = Table::new(
            &format!("info_{k}.csv"),
            vec![
                Column::new("tau", "1/chi", "dimensionless time chi t"),
                Column::new("n_b", "", "signal mean occupation"),
                Column::new("fidelity", "", format!("signal fidelity to a thermal state (pump mean {mean})")),
                Column::new("information", "nat", "thermal entropy at n_b minus the signal entropy"),
                Column::new("d_a_eff", "", "pump effective dimension 2<N_a>+1"),
                Column::new("d_bc_eff", "", "signal-idler effective dimension (2<N_b>+1)^2"),
                Column::new("q_plus_pump", "", "pump squeezing parameter of X+"),
                Column::new("q_minus_pump", "", "pump squeezing parameter of X-"),
                Column::new("temperature_b", "K", "signal effective temperature"),
            ],
        );
        let d_a: Vec<f64> = rows.iter().map(|r| effective_dimension(r.n_a)).collect();
        let d_bc: Vec<f64> = rows.iter().map(|r| effective_dimension(r.n_b).powi(2)).collect();
        for (i, r) in rows.iter().enumerate() {
            table.push(vec![
                tau[i],
                r.n_b,
                r.fidelity,
                r.information,
                d_a[i],
                d_bc[i],
                r.q_pump.0,
                r.q_pump.1,
                effective_temperature(r.n_b, omega_b),
            ]);
        }
        let cross = first_crossing(&tau, &d_a, &d_bc);
        if cross.is_none() {
            report.warn(format!("pump mean {mean}: d_bc never reaches d_a on the tau grid"));
        }
        crossings.push(cross.map_or(serde_json::Value::Null, num));
        report.tables.push(table);
    }
    report.resolve("crossing_tau", crossings);
    Ok(report)
}
