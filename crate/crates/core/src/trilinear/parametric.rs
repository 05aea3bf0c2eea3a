use super::TrilinearError;
use crate::constants::{BOLTZMANN, HBAR};
use crate::fock::{HilbertSpec, StateVector};
use crate::numerics::{integrate_adaptive, jacobi_dn, RealGrid, Tolerance};
use num_complex::Complex64;

/// Pair occupation `sinh²(Aτ)` under a fixed classical pump of amplitude `A`.
pub fn parametric_occupation(amplitude: f64, tau: f64) -> f64 {
    (amplitude * tau).sinh().powi(2)
}

/// Two-mode squeezed vacuum `sech(Aτ) Σ tanhⁿ(Aτ) |n, n⟩` on signal ⊗ idler, each truncated at `dim`.
pub fn parametric_state(amplitude: f64, tau: f64, dim: usize) -> Result<StateVector, TrilinearError> {
    if amplitude < 0.0 || tau < 0.0 {
        return Err(TrilinearError::Domain("amplitude and tau must be nonnegative".into()));
    }
    let t = (amplitude * tau).tanh();
    let gate = t.powi(2 * dim as i32);
    if gate >= 1e-8 {
        return Err(TrilinearError::Domain(format!("squeezed tail tanh^(2·{dim}) = {gate:.3e} exceeds 1e-8")));
    }
    let spec = HilbertSpec::new(vec![dim, dim])?;
    let mut amps = vec![Complex64::default(); dim * dim];
    let sech = 1.0 / (amplitude * tau).cosh();
    let mut tn = 1.0;
    for n in 0..dim {
        amps[n * dim + n] = Complex64::new(sech * tn, 0.0);
        tn *= t;
    }
    Ok(StateVector::new(spec, amps)?)
}

/// Effective signal temperature `ħω_b / (2 k_B ln coth(Aτ))`; zero at `Aτ = 0`.
pub fn parametric_temperature(amplitude: f64, tau: f64, omega_b: f64) -> f64 {
    let x = amplitude * tau;
    if x <= 0.0 {
        return 0.0;
    }
    let ln_coth = (1.0 / x.tanh()).ln();
    if ln_coth == 0.0 {
        return f64::INFINITY;
    }
    HBAR * omega_b / (2.0 * BOLTZMANN * ln_coth)
}

/// `(β₊, β₋)` of the depletion closed form for vacuum signal and idler.
pub fn semiclassical_betas(n_a0: f64) -> (f64, f64) {
    let root = (1.0 + 12.0 * n_a0 + 4.0 * n_a0 * n_a0).sqrt();
    (0.25 * (1.0 + 2.0 * n_a0 + root), 0.25 * (1.0 + 2.0 * n_a0 - root))
}

/// Pump occupation and accumulated squeezing angle `θ(τ) = ∫√N_a dτ'` on a τ grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SemiclassicalCurve {
    pub tau: Vec<f64>,
    pub n_a: Vec<f64>,
    pub theta: Vec<f64>,
    /// First τ at which the closed form reaches zero pump occupation, if inside the grid.
    pub depletion_tau: Option<f64>,
}

struct PumpClosedForm {
    n0: f64,
    beta_plus: f64,
    rate: f64,
    m: f64,
}

impl PumpClosedForm {
    fn new(n0: f64) -> Self {
        let (bp, bm) = semiclassical_betas(n0);
        Self { n0, beta_plus: bp, rate: (bp - bm).sqrt(), m: (n0 - bm) / (bp - bm) }
    }

    /// Closed form clamped to the physical range `[0, N_a(0)]`.
    fn eval(&self, tau: f64) -> f64 {
        let dn = jacobi_dn(self.rate * tau, self.m).expect("modulus inside [0, 1]");
        (self.beta_plus + (self.n0 - self.beta_plus) / (dn * dn)).clamp(0.0, self.n0)
    }
}

/// Semiclassical pump depletion with signal and idler starting in vacuum.
///
/// The dn closed form swings down to `β₋ < 0`; values are clamped at zero, which is where the
/// pump is fully depleted.
pub fn semiclassical_pump(n_a0: f64, tau_grid: &RealGrid) -> Result<SemiclassicalCurve, TrilinearError> {
    if !(n_a0 > 0.0) {
        return Err(TrilinearError::Domain(format!("initial pump occupation must be positive, got {n_a0}")));
    }
    if tau_grid.first() < 0.0 {
        return Err(TrilinearError::Domain("tau grid must start at tau >= 0".into()));
    }
    let pump = PumpClosedForm::new(n_a0);
    let tau = tau_grid.points().to_vec();
    let n_a: Vec<f64> = tau.iter().map(|&t| pump.eval(t)).collect();
    let mut theta = Vec::with_capacity(tau.len());
    // √N_a has square-root kinks where the clamp engages, so the relative target is kept modest.
    let tol = Tolerance::new(1e-11, 1e-9, 400_000)?;
    let mut acc = if tau[0] > 0.0 { integrate_adaptive(|t| pump.eval(t).sqrt(), 0.0, tau[0], tol)? } else { 0.0 };
    theta.push(acc);
    for w in tau.windows(2) {
        acc += integrate_adaptive(|t| pump.eval(t).sqrt(), w[0], w[1], tol)?;
        theta.push(acc);
    }
    let depletion_tau = n_a.iter().position(|&n| n == 0.0).map(|k| tau[k]);
    Ok(SemiclassicalCurve { tau, n_a, theta, depletion_tau })
}

/// Signal (= idler) occupation `sinh²θ(τ)` along a semiclassical curve.
pub fn semiclassical_occupation(curve: &SemiclassicalCurve) -> Vec<f64> {
    curve.theta.iter().map(|t| t.sinh().powi(2)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{embed, expectation, ladder_ops, partial_trace};
    use proptest::prelude::*;

    #[test]
    fn occupation_values() {
        assert_eq!(parametric_occupation(3.0, 0.0), 0.0);
        assert_eq!(parametric_occupation(0.0, 2.0), 0.0);
        // sinh²(1.5)
        assert!((parametric_occupation(3.0, 0.5) - 4.533830997888883).abs() < 1e-12);
    }

    #[test]
    fn squeezed_state_matches_occupation_and_is_geometric() {
        let (amp, tau, dim) = (3.0, 0.2, 60);
        let psi = parametric_state(amp, tau, dim).unwrap();
        let (_, _, n) = ladder_ops(dim).unwrap();
        let nb = embed(&n, 0, psi.spec()).unwrap();
        let mean = expectation(&psi, &nb).unwrap().re;
        assert!((mean - parametric_occupation(amp, tau)).abs() < 1e-6);
        let rb = partial_trace(&psi, &[0]).unwrap();
        assert!(rb.is_diagonal(1e-15));
        let t2 = (amp * tau).tanh().powi(2);
        let p = rb.diagonal();
        for k in 0..10 {
            assert!((p[k + 1] / p[k] - t2).abs() < 1e-12);
        }
        assert_eq!(parametric_state(amp, 0.0, 4).unwrap().amplitudes()[0].re, 1.0);
        assert!(parametric_state(amp, 0.5, 20).is_err());
    }

    #[test]
    fn temperature_matches_bose_inverse() {
        let unit = HBAR / BOLTZMANN;
        let t = parametric_temperature(3.0, 0.5, 1.0);
        // 1 / (2 ln coth 1.5)
        assert!((t / unit - 5.017232562426336).abs() < 1e-9);
        let n = parametric_occupation(3.0, 0.5);
        let bose = 1.0 / ((unit / t).exp() - 1.0);
        assert!((bose - n).abs() < 1e-10 * n);
        assert_eq!(parametric_temperature(3.0, 0.0, 1.0), 0.0);
    }

    #[test]
    fn betas_for_nine() {
        let (bp, bm) = semiclassical_betas(9.0);
        // ¼(19 ± √433)
        assert!((bp - 9.952163011671203).abs() < 1e-12);
        assert!((bm + 0.4521630116712029).abs() < 1e-12);
        assert!(((9.0 - bm) / (bp - bm) - 0.9084839316323808).abs() < 1e-12);
    }

    #[test]
    fn early_signal_growth() {
        let grid = RealGrid::linspace(0.0, 0.05, 11).unwrap();
        let curve = semiclassical_pump(9.0, &grid).unwrap();
        assert_eq!(curve.n_a[0], 9.0);
        assert_eq!(curve.theta[0], 0.0);
        let nb = semiclassical_occupation(&curve);
        assert_eq!(nb[0], 0.0);
        for (k, &t) in curve.tau.iter().enumerate().skip(1) {
            let par = parametric_occupation(3.0, t);
            assert!((nb[k] - par).abs() < 5.0 * t.powi(3), "tau {t}: {} vs {par}", nb[k]);
            assert!((nb[k] / (9.0 * t * t) - 1.0).abs() < 0.1);
        }
        assert!(semiclassical_pump(0.0, &grid).is_err());
    }

    #[test]
    fn full_depletion_is_clamped() {
        let grid = RealGrid::linspace(0.0, 3.0, 400).unwrap();
        let curve = semiclassical_pump(9.0, &grid).unwrap();
        let t0 = curve.depletion_tau.expect("depletes inside [0, 3]");
        assert!(t0 > 0.3 && t0 < 1.5, "{t0}");
        assert!(curve.n_a.iter().all(|&n| (0.0..=9.0).contains(&n)));
    }

    proptest! {
        #[test]
        fn curve_invariants(n0 in 0.5f64..40.0, span in 0.1f64..4.0) {
            let grid = RealGrid::linspace(0.0, span, 60).unwrap();
            let curve = semiclassical_pump(n0, &grid).unwrap();
            prop_assert_eq!(curve.n_a[0], n0);
            prop_assert_eq!(curve.theta[0], 0.0);
            prop_assert!(curve.n_a.iter().all(|&n| n >= 0.0 && n <= n0));
            prop_assert!(curve.theta.windows(2).all(|w| w[1] >= w[0]));
        }

        #[test]
        fn temperature_monotone_in_tau(a in 0.1f64..5.0, t1 in 0.01f64..2.0, dt in 0.01f64..2.0) {
            prop_assert!(parametric_temperature(a, t1 + dt, 1.0) >= parametric_temperature(a, t1, 1.0));
        }
    }
}
