use super::{TrilinearError, TrilinearParams};
use crate::fock::{embed, expectation, ladder_ops, partial_trace, DensityMatrix, FockError, HilbertSpec, ModeOperator, StateVector};
use crate::numerics::{evolve_ode, RealGrid, Tolerance};
use num_complex::Complex64;

const LEAK_LIMIT: f64 = 1e-6;

/// Generator `G = a b†c† − a† b c`, so that `dψ/dτ = G ψ` in the interaction picture.
pub fn interaction_generator(spec: &HilbertSpec) -> Result<ModeOperator, TrilinearError> {
    if spec.modes() != 3 {
        return Err(TrilinearError::Domain("three-mode spec required".into()));
    }
    let lower = |m: usize| -> Result<(ModeOperator, ModeOperator), FockError> {
        let (a, ad, _) = ladder_ops(spec.dims()[m])?;
        Ok((embed(&a, m, spec)?, embed(&ad, m, spec)?))
    };
    let (a, ad) = lower(0)?;
    let (b, bd) = lower(1)?;
    let (c, cd) = lower(2)?;
    let forward = a.mul(&bd)?.mul(&cd)?;
    let back = ad.mul(&b)?.mul(&c)?;
    Ok(forward.add_scaled(&back, Complex64::new(-1.0, 0.0))?)
}

/// `H_I / ħχ = i(a b†c† − a† b c)`.
pub fn build_interaction_hamiltonian(params: &TrilinearParams) -> Result<ModeOperator, TrilinearError> {
    Ok(interaction_generator(params.spec())?.scale(Complex64::new(0.0, 1.0)))
}

/// Per-mode population in basis states that the generator couples past the truncation.
///
/// Zero means the truncated dynamics is exact at this instant even if a top level is occupied.
pub fn outward_leak(state: &StateVector) -> [f64; 3] {
    let spec = state.spec();
    let d = spec.dims();
    let mut leak = [0.0; 3];
    for (idx, z) in state.amplitudes().iter().enumerate() {
        let p = z.norm_sqr();
        if p == 0.0 {
            continue;
        }
        let l = spec.levels_of(idx);
        if l[0] >= 1 {
            if l[1] + 1 >= d[1] {
                leak[1] += p;
            }
            if l[2] + 1 >= d[2] {
                leak[2] += p;
            }
        }
        if l[1] >= 1 && l[2] >= 1 && l[0] + 1 >= d[0] {
            leak[0] += p;
        }
    }
    leak
}

/// Evolved states on a τ grid with the operators needed for diagnostics.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub tau: Vec<f64>,
    pub states: Vec<StateVector>,
    /// Largest per-mode outward leak seen on the grid.
    pub max_leak: f64,
    numbers: [ModeOperator; 3],
    hamiltonian: ModeOperator,
}

impl Trajectory {
    fn expect_re(&self, op: &ModeOperator) -> Vec<f64> {
        self.states.iter().map(|s| expectation(s, op).expect("spec checked").re).collect()
    }

    /// `⟨N_m⟩(τ)` for mode `m` in (pump, signal, idler) order.
    pub fn mean_number(&self, mode: usize) -> Vec<f64> {
        self.expect_re(&self.numbers[mode])
    }

    /// `(⟨N_a+N_b⟩, ⟨N_a+N_c⟩, ⟨N_b−N_c⟩)` at each grid point.
    pub fn manley_rowe(&self) -> Vec<[f64; 3]> {
        let (na, nb, nc) = (self.mean_number(0), self.mean_number(1), self.mean_number(2));
        (0..self.tau.len()).map(|k| [na[k] + nb[k], na[k] + nc[k], nb[k] - nc[k]]).collect()
    }

    /// `⟨H_I⟩ / ħχ`.
    pub fn interaction_energy(&self) -> Vec<f64> {
        self.expect_re(&self.hamiltonian)
    }

    pub fn norms(&self) -> Vec<f64> {
        self.states.iter().map(StateVector::norm).collect()
    }

    /// `⟨N_a²⟩ − ⟨N_a⟩²`, the error of the semiclassical factorization.
    pub fn factorization_residual(&self) -> Vec<f64> {
        let n2 = self.numbers[0].mul(&self.numbers[0]).expect("same spec");
        let second = self.expect_re(&n2);
        self.mean_number(0).iter().zip(second).map(|(m, s)| s - m * m).collect()
    }

    pub fn reduced(&self, index: usize, keep: &[usize]) -> Result<DensityMatrix, TrilinearError> {
        Ok(partial_trace(&self.states[index], keep)?)
    }
}

/// Integrates `dψ/dτ = (a b†c† − a† b c) ψ` from `initial` over `tau_grid`.
///
/// Fails if the outward leak of any mode exceeds 1e-6 at a grid point.
pub fn evolve_full(initial: &StateVector, params: &TrilinearParams, tau_grid: &RealGrid) -> Result<Trajectory, TrilinearError> {
    evolve_full_with(initial, params, tau_grid, Tolerance::ode())
}

/// [`evolve_full`] with explicit integrator tolerances.
pub fn evolve_full_with(
    initial: &StateVector,
    params: &TrilinearParams,
    tau_grid: &RealGrid,
    tol: Tolerance,
) -> Result<Trajectory, TrilinearError> {
    let spec = params.spec();
    if initial.spec() != spec {
        return Err(TrilinearError::Domain(format!("state dims {:?} vs params dims {:?}", initial.spec().dims(), spec.dims())));
    }
    let gen = interaction_generator(spec)?;
    let raw = evolve_ode(|_, y, dy| gen.apply_into(y, dy), initial.amplitudes(), tau_grid, tol)?;
    let mut states = Vec::with_capacity(raw.len());
    let mut max_leak: f64 = 0.0;
    for (amps, &tau) in raw.into_iter().zip(tau_grid.points()) {
        let psi = StateVector::from_raw(spec.clone(), amps);
        let leak = outward_leak(&psi);
        for (mode, &l) in leak.iter().enumerate() {
            if l > LEAK_LIMIT {
                return Err(TrilinearError::Truncation { mode, leak: l, tau });
            }
            max_leak = max_leak.max(l);
        }
        states.push(psi);
    }
    let numbers = [0, 1, 2].map(|m| {
        let (_, _, n) = ladder_ops(spec.dims()[m]).expect("dims validated");
        embed(&n, m, spec).expect("mode in range")
    });
    Ok(Trajectory {
        tau: tau_grid.points().to_vec(),
        states,
        max_leak,
        numbers,
        hamiltonian: gen.scale(Complex64::new(0.0, 1.0)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trilinear::{short_time_state, PumpInitialState};
    use nalgebra::{DMatrix, DVector};

    fn params(dims: [usize; 3]) -> TrilinearParams {
        TrilinearParams::degenerate(1.0, 2.0, HilbertSpec::new(dims.to_vec()).unwrap()).unwrap()
    }

    /// Scaling-and-squaring Taylor exponential.
    fn expm(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let norm = m.iter().map(|z| z.norm()).sum::<f64>();
        let squarings = (norm.max(1.0).log2().ceil() as u32) + 4;
        let scaled = m / Complex64::new(2f64.powi(squarings as i32), 0.0);
        let n = m.nrows();
        let mut term = DMatrix::<Complex64>::identity(n, n);
        let mut sum = term.clone();
        for k in 1..30 {
            term = &term * &scaled / Complex64::new(k as f64, 0.0);
            sum += &term;
        }
        for _ in 0..squarings {
            sum = &sum * &sum;
        }
        sum
    }

    #[test]
    fn hamiltonian_elements() {
        let p = params([10, 4, 4]);
        let h = build_interaction_hamiltonian(&p).unwrap();
        assert!(h.hermiticity_defect() < 1e-12);
        let spec = p.spec();
        let vac = spec.index_of(&[0, 0, 0]).unwrap();
        assert_eq!(h.get(vac, vac), Complex64::default());
        for s in 1..4 {
            let from = spec.index_of(&[s, 0, 0]).unwrap();
            let to = spec.index_of(&[s - 1, 1, 1]).unwrap();
            assert!((h.get(to, from) - Complex64::new(0.0, (s as f64).sqrt())).norm() < 1e-14);
        }
        let psi = StateVector::basis(spec.clone(), &[7, 0, 0]).unwrap();
        assert_eq!(expectation(&psi, &h).unwrap(), Complex64::default());
    }

    #[test]
    fn single_quantum_oscillation() {
        let p = params([2, 2, 2]);
        let psi0 = StateVector::basis(p.spec().clone(), &[1, 0, 0]).unwrap();
        let grid = RealGrid::linspace(0.0, 6.0, 61).unwrap();
        let tr = evolve_full(&psi0, &p, &grid).unwrap();
        assert_eq!(tr.max_leak, 0.0);
        for (nb, &t) in tr.mean_number(1).iter().zip(&tr.tau) {
            assert!((nb - t.sin().powi(2)).abs() < 1e-6);
        }
        assert_eq!(tr.states[0], psi0);
    }

    #[test]
    fn matches_dense_propagator() {
        for (dims, levels) in [([2usize, 2, 2], [1usize, 0, 0]), ([4, 4, 4], [2, 1, 0]), ([3, 3, 3], [2, 0, 1])] {
            let p = params(dims);
            let init = StateVector::basis(p.spec().clone(), &levels).unwrap();
            let grid = RealGrid::linspace(0.0, 2.0, 9).unwrap();
            let tr = match evolve_full(&init, &p, &grid) {
                Ok(tr) => tr,
                Err(TrilinearError::Truncation { .. }) => continue,
                Err(e) => panic!("{e}"),
            };
            let g = interaction_generator(p.spec()).unwrap().to_dense();
            let v0 = DVector::from_column_slice(init.amplitudes());
            for (psi, &t) in tr.states.iter().zip(&tr.tau) {
                let exact = expm(&(&g * Complex64::new(t, 0.0))) * &v0;
                let err = psi.amplitudes().iter().zip(exact.iter()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
                assert!(err < 1e-7, "dims {dims:?} tau {t}: {err}");
            }
        }
    }

    #[test]
    fn generic_mixed_start_matches_dense_propagator() {
        // Total dimension 48; not restricted to a single Manley–Rowe block.
        let p = params([4, 4, 3]);
        let amps: Vec<Complex64> = (0..48).map(|k| Complex64::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos())).collect();
        let mut amps = amps;
        for (idx, z) in amps.iter_mut().enumerate() {
            let l = p.spec().levels_of(idx);
            if l[0] + l[1] > 3 || l[0] + l[2] > 2 {
                *z = Complex64::default();
            }
        }
        let init = StateVector::new(p.spec().clone(), amps).unwrap();
        let grid = RealGrid::linspace(0.0, 1.5, 4).unwrap();
        let tr = evolve_full(&init, &p, &grid).unwrap();
        let g = interaction_generator(p.spec()).unwrap().to_dense();
        let v0 = DVector::from_column_slice(init.amplitudes());
        for (psi, &t) in tr.states.iter().zip(&tr.tau) {
            let exact = expm(&(&g * Complex64::new(t, 0.0))) * &v0;
            let err = psi.amplitudes().iter().zip(exact.iter()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            assert!(err < 1e-7, "tau {t}: {err}");
        }
    }

    #[test]
    fn truncation_leak_is_reported() {
        let p = params([6, 3, 3]);
        let init = StateVector::basis(p.spec().clone(), &[5, 0, 0]).unwrap();
        let grid = RealGrid::linspace(0.0, 1.0, 11).unwrap();
        assert!(matches!(evolve_full(&init, &p, &grid), Err(TrilinearError::Truncation { mode: 1 | 2, .. })));
    }

    #[test]
    fn conservation_and_symmetry_small_pump() {
        let p = params([7, 7, 7]);
        let pump = PumpInitialState::fock(5);
        let init = StateVector::basis(p.spec().clone(), &[5, 0, 0]).unwrap();
        let grid = RealGrid::linspace(0.0, 3.0, 31).unwrap();
        let tr = evolve_full(&init, &p, &grid).unwrap();
        let mr0 = tr.manley_rowe()[0];
        for (k, mr) in tr.manley_rowe().iter().enumerate() {
            for j in 0..3 {
                assert!((mr[j] - mr0[j]).abs() < 1e-7);
            }
            let rb = tr.reduced(k, &[1]).unwrap();
            let rc = tr.reduced(k, &[2]).unwrap();
            assert!(rb.max_abs_diff(&rc) < 1e-8);
        }
        assert!(tr.norms().iter().all(|n| (n - 1.0).abs() < 1e-8));
        assert!(tr.interaction_energy().iter().all(|e| e.abs() < 1e-8));
        assert!(tr.factorization_residual()[0].abs() < 1e-12);
        // Short-time branch amplitudes agree inside the validity window τ√(M/2) ≤ 0.1.
        let tau = 0.1 / (2.5f64).sqrt();
        let g = RealGrid::new(vec![0.0, tau]).unwrap();
        let tr = evolve_full(&init, &p, &g).unwrap();
        let approx = short_time_state(&pump, tau).to_state_vector(p.spec()).unwrap();
        for (a, b) in tr.states[1].amplitudes().iter().zip(approx.amplitudes()) {
            assert!((a - b).norm() < 1e-3);
        }
    }
}
