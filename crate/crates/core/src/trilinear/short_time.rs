use super::{PumpInitialState, TrilinearError};
use crate::fock::{DensityMatrix, HilbertSpec, StateVector};
use crate::numerics::ln_upper_incomplete_gamma;
use nalgebra::DMatrix;
use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

/// Expansion coefficient `f_n(k, M) = [M! Γ(2k+n) / (n! (M−n)! Γ(2k))]^{1/2}`.
///
/// `k = 1/2` (vacuum signal and idler) reduces to `√(M!/(M−n)!)`.
pub fn short_time_coefficient(k: f64, m: usize, n: usize) -> f64 {
    assert!(n <= m, "n = {n} exceeds M = {m}");
    let ln = ln_fact(m) + ln_gamma(2.0 * k + n as f64) - ln_fact(n) - ln_fact(m - n) - ln_gamma(2.0 * k);
    (0.5 * ln).exp()
}

fn ln_fact(n: usize) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// `ln N_s(τ) = τ⁻² + 2s ln τ + ln Γ(s+1, τ⁻²)` for vacuum signal and idler.
pub fn short_time_ln_normalization(s: usize, tau: f64) -> Result<f64, TrilinearError> {
    if !(tau > 0.0) {
        return Err(TrilinearError::Domain(format!("normalization needs tau > 0, got {tau}")));
    }
    let x = tau.powi(-2);
    Ok(x + 2.0 * s as f64 * tau.ln() + ln_upper_incomplete_gamma(s as f64 + 1.0, x)?)
}

/// Normalized weights `f_n(k, s) τⁿ / √N` on `|s−n⟩|k, n⟩` for `n = 0..=s`.
pub fn short_time_weights(k: f64, s: usize, tau: f64) -> Vec<f64> {
    if tau <= 0.0 {
        let mut w = vec![0.0; s + 1];
        w[0] = 1.0;
        return w;
    }
    let ln: Vec<f64> = (0..=s).map(|n| short_time_coefficient(k, s, n).ln() + n as f64 * tau.ln()).collect();
    let peak = ln.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let norm = 0.5 * ln.iter().map(|l| (2.0 * (l - peak)).exp()).sum::<f64>().ln() + peak;
    ln.iter().map(|l| (l - norm).exp()).collect()
}

/// One pump Fock branch `s` of the short-time state.
#[derive(Debug, Clone, PartialEq)]
pub struct ShortTimeBranch {
    pub s: usize,
    pub amplitude: Complex64,
    /// Weight on `|s−n, n, n⟩`, index `n`.
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShortTimeState {
    pub tau: f64,
    pub branches: Vec<ShortTimeBranch>,
}

impl ShortTimeState {
    /// Embeds into a three-mode space with `dims[m] >` the highest populated level.
    pub fn to_state_vector(&self, spec: &HilbertSpec) -> Result<StateVector, TrilinearError> {
        if spec.modes() != 3 {
            return Err(TrilinearError::Domain("three-mode spec required".into()));
        }
        let mut amps = vec![Complex64::default(); spec.total_dim()];
        for b in &self.branches {
            if b.amplitude == Complex64::default() {
                continue;
            }
            for (n, w) in b.weights.iter().enumerate() {
                amps[spec.index_of(&[b.s - n, n, n])?] += b.amplitude * w;
            }
        }
        Ok(StateVector::new(spec.clone(), amps)?)
    }

    pub fn mean_signal(&self) -> f64 {
        self.branches
            .iter()
            .map(|b| b.amplitude.norm_sqr() * b.weights.iter().enumerate().map(|(n, w)| n as f64 * w * w).sum::<f64>())
            .sum()
    }
}

/// Short-time expansion of `exp(τ(aK₊ − a†K₋))` applied branchwise to `Σ a_s |s, 0, 0⟩`.
pub fn short_time_state(initial: &PumpInitialState, tau: f64) -> ShortTimeState {
    let branches = initial
        .coefficients()
        .iter()
        .enumerate()
        .map(|(s, &amplitude)| ShortTimeBranch { s, amplitude, weights: short_time_weights(0.5, s, tau) })
        .collect();
    ShortTimeState { tau, branches }
}

/// Pump and signal marginals of the short-time state.
#[derive(Debug, Clone, PartialEq)]
pub struct ShortTimeReduced {
    /// Full pump matrix including inter-branch coherences.
    pub pump: DensityMatrix,
    pub pump_diagonal: Vec<f64>,
    pub signal: DensityMatrix,
}

/// Reduced pump and signal states; both live on the pump's truncation.
pub fn short_time_reduced(initial: &PumpInitialState, tau: f64) -> Result<ShortTimeReduced, TrilinearError> {
    if tau < 0.0 {
        return Err(TrilinearError::Domain(format!("tau must be nonnegative, got {tau}")));
    }
    let state = short_time_state(initial, tau);
    let d = initial.dim().max(2);
    let mut pump = DMatrix::<Complex64>::zeros(d, d);
    let mut signal = vec![0.0; d];
    for bs in &state.branches {
        let p = bs.amplitude.norm_sqr();
        for (i, w) in bs.weights.iter().enumerate() {
            signal[i] += p * w * w;
        }
        for br in &state.branches {
            let c = bs.amplitude * br.amplitude.conj();
            if c == Complex64::default() {
                continue;
            }
            for i in 0..=bs.s.min(br.s) {
                pump[(bs.s - i, br.s - i)] += c * bs.weights[i] * br.weights[i];
            }
        }
    }
    let spec = HilbertSpec::single(d)?;
    let pump_diagonal = pump.diagonal().iter().map(|z| z.re).collect();
    Ok(ShortTimeReduced {
        pump: DensityMatrix::new(spec.clone(), pump)?,
        pump_diagonal,
        signal: DensityMatrix::from_diagonal(spec, &signal)?,
    })
}

/// Late-time signal marginal `Σ P_s |s⟩⟨s|`.
pub fn long_time_signal(probabilities: &[f64]) -> Result<DensityMatrix, TrilinearError> {
    let total: f64 = probabilities.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(TrilinearError::Domain(format!("probabilities sum to {total}")));
    }
    let mut p = probabilities.to_vec();
    if p.len() < 2 {
        p.resize(2, 0.0);
    }
    Ok(DensityMatrix::from_diagonal(HilbertSpec::single(p.len())?, &p)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::partial_trace;
    use proptest::prelude::*;

    #[test]
    fn coefficient_values() {
        for m in 0..12 {
            assert!((short_time_coefficient(0.5, m, 0) - 1.0).abs() < 1e-12);
            assert!((short_time_coefficient(1.5, m, 0) - 1.0).abs() < 1e-12);
        }
        assert!((short_time_coefficient(0.5, 9, 1) - 3.0).abs() < 1e-12);
        // √(9!/6!) = √504
        assert!((short_time_coefficient(0.5, 9, 3) - 504f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn weights_match_closed_normalization() {
        for &(s, tau) in &[(0usize, 0.3f64), (9, 0.1), (9, 0.7), (20, 0.25), (9, 3.0)] {
            let direct: f64 = (0..=s).map(|n| short_time_coefficient(0.5, s, n).powi(2) * tau.powi(2 * n as i32)).sum();
            let closed = short_time_ln_normalization(s, tau).unwrap();
            assert!((direct.ln() - closed).abs() < 1e-9 * closed.abs().max(1.0), "s {s} tau {tau}");
            let w = short_time_weights(0.5, s, tau);
            for n in 0..=s {
                let expect = short_time_coefficient(0.5, s, n) * tau.powi(n as i32) / direct.sqrt();
                assert!((w[n] - expect).abs() < 1e-12);
            }
        }
        assert!(short_time_ln_normalization(3, 0.0).is_err());
    }

    #[test]
    fn tau_zero_recovers_initial() {
        let init = PumpInitialState::coherent(Complex64::new(3.0, 0.0), 40).unwrap();
        let st = short_time_state(&init, 0.0);
        assert!(st.branches.iter().all(|b| b.weights[0] == 1.0));
        let red = short_time_reduced(&init, 0.0).unwrap();
        assert!((red.signal.diagonal()[0] - 1.0).abs() < 1e-14);
        for (p, q) in red.pump_diagonal.iter().zip(init.probabilities()) {
            assert!((p - q).abs() < 1e-15);
        }
        let tiny = short_time_state(&init, 1e-4);
        assert!(tiny.branches.iter().all(|b| (b.weights[0] - 1.0).abs() < 1e-6));
    }

    #[test]
    fn reduced_agree_with_partial_trace() {
        let init = PumpInitialState::coherent(Complex64::new(1.2, 0.4), 12).unwrap();
        let tau = 0.35;
        let spec = HilbertSpec::new(vec![12, 12, 12]).unwrap();
        let psi = short_time_state(&init, tau).to_state_vector(&spec).unwrap();
        let red = short_time_reduced(&init, tau).unwrap();
        assert!(partial_trace(&psi, &[0]).unwrap().max_abs_diff(&red.pump) < 1e-12);
        assert!(partial_trace(&psi, &[1]).unwrap().max_abs_diff(&red.signal) < 1e-12);
        assert!(!red.pump.is_diagonal(1e-6));
    }

    #[test]
    fn late_time_signal_becomes_pump_distribution() {
        let init = PumpInitialState::coherent(Complex64::new(3.0, 0.0), 40).unwrap();
        let red = short_time_reduced(&init, 100.0).unwrap();
        let tv: f64 = 0.5 * red.signal.diagonal().iter().zip(init.probabilities()).map(|(a, b)| (a - b).abs()).sum::<f64>();
        assert!(tv < 1e-3, "{tv}");
        let late = long_time_signal(&init.probabilities()).unwrap();
        assert_eq!(late.diagonal(), init.probabilities());
        assert!(long_time_signal(&[0.5, 0.4]).is_err());
        assert_eq!(long_time_signal(&[1.0]).unwrap().diagonal(), vec![1.0, 0.0]);
    }

    proptest! {
        #[test]
        fn branches_and_marginals_normalized(tau in 0.0f64..5.0, re in -3.0f64..3.0, im in -3.0f64..3.0) {
            let init = PumpInitialState::coherent(Complex64::new(re, im), 60).unwrap();
            let st = short_time_state(&init, tau);
            for b in &st.branches {
                let n: f64 = b.weights.iter().map(|w| w * w).sum();
                prop_assert!((n - 1.0).abs() < 1e-9);
            }
            let red = short_time_reduced(&init, tau).unwrap();
            prop_assert!((red.pump.trace().re - 1.0).abs() < 1e-9);
            prop_assert!((red.signal.trace().re - 1.0).abs() < 1e-9);
        }
    }
}
