use super::{FockError, HilbertSpec, ModeOperator};
use nalgebra::DMatrix;
use num_complex::Complex64;

const HERMITIAN_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-9;
const COHERENT_TAIL: f64 = 1e-6;

/// Pure state over a truncated Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    spec: HilbertSpec,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Normalizes `amps`; a zero vector is rejected.
    pub fn new(spec: HilbertSpec, amps: Vec<Complex64>) -> Result<Self, FockError> {
        if amps.len() != spec.total_dim() {
            return Err(FockError::Mismatch(format!("{} amplitudes for dimension {}", amps.len(), spec.total_dim())));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(FockError::InvalidState("non-finite amplitude".into()));
        }
        let norm = l2(&amps);
        if norm == 0.0 {
            return Err(FockError::InvalidState("zero vector".into()));
        }
        Ok(Self { spec, amps: amps.into_iter().map(|z| z / norm).collect() })
    }

    /// Keeps the amplitudes as given; used for evolved states whose norm drift is itself a diagnostic.
    pub(crate) fn from_raw(spec: HilbertSpec, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(amps.len(), spec.total_dim());
        Self { spec, amps }
    }

    /// Basis state with the given occupation per mode.
    pub fn basis(spec: HilbertSpec, levels: &[usize]) -> Result<Self, FockError> {
        let idx = spec.index_of(levels)?;
        let mut amps = vec![Complex64::default(); spec.total_dim()];
        amps[idx] = Complex64::new(1.0, 0.0);
        Ok(Self { spec, amps })
    }

    pub fn spec(&self) -> &HilbertSpec {
        &self.spec
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        l2(&self.amps)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex64, FockError> {
        if self.spec != other.spec {
            return Err(FockError::Mismatch("inner product across different specs".into()));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Tensor product with `self` as the leading modes.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.spec.dims().to_vec();
        dims.extend_from_slice(other.spec.dims());
        let amps = self.amps.iter().flat_map(|a| other.amps.iter().map(move |b| a * b)).collect();
        Self { spec: HilbertSpec::new(dims).expect("factors valid"), amps }
    }

    /// Probability sitting in each mode's top Fock level.
    pub fn boundary_population(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.spec.modes()];
        for (idx, z) in self.amps.iter().enumerate() {
            let p = z.norm_sqr();
            if p == 0.0 {
                continue;
            }
            for (m, (&n, &d)) in self.spec.levels_of(idx).iter().zip(self.spec.dims()).enumerate() {
                if n == d - 1 {
                    out[m] += p;
                }
            }
        }
        out
    }

    pub fn to_density(&self) -> DensityMatrix {
        let v = nalgebra::DVector::from_column_slice(&self.amps);
        DensityMatrix { spec: self.spec.clone(), matrix: &v * v.adjoint() }
    }
}

fn l2(amps: &[Complex64]) -> f64 {
    amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Dense Hermitian, unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    spec: HilbertSpec,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates shape, Hermiticity and trace.
    pub fn new(spec: HilbertSpec, matrix: DMatrix<Complex64>) -> Result<Self, FockError> {
        let n = spec.total_dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(FockError::Mismatch(format!("{}x{} matrix for dimension {n}", matrix.nrows(), matrix.ncols())));
        }
        let defect = (&matrix - matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if defect > HERMITIAN_TOL {
            return Err(FockError::InvalidState(format!("not Hermitian (defect {defect:.3e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(FockError::InvalidState(format!("trace {tr} != 1")));
        }
        Ok(Self { spec, matrix })
    }

    /// Diagonal state `Σ p_i |i⟩⟨i|`.
    pub fn from_diagonal(spec: HilbertSpec, probs: &[f64]) -> Result<Self, FockError> {
        if probs.len() != spec.total_dim() {
            return Err(FockError::Mismatch(format!("{} weights for dimension {}", probs.len(), spec.total_dim())));
        }
        if probs.iter().any(|&p| !(p >= -1e-15)) {
            return Err(FockError::InvalidState("negative or NaN weight".into()));
        }
        let diag = nalgebra::DVector::from_iterator(probs.len(), probs.iter().map(|&p| Complex64::new(p, 0.0)));
        Self::new(spec, DMatrix::from_diagonal(&diag))
    }

    pub(crate) fn from_parts_unchecked(spec: HilbertSpec, matrix: DMatrix<Complex64>) -> Self {
        Self { spec, matrix }
    }

    pub fn spec(&self) -> &HilbertSpec {
        &self.spec
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|r| (0..n).all(|c| r == c || self.matrix[(r, c)].norm() <= tol))
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Max entrywise distance to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.matrix - &other.matrix).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Shared surface of pure and mixed states.
pub trait QuantumState {
    fn spec(&self) -> &HilbertSpec;
    fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix, FockError>;
    fn expect(&self, op: &ModeOperator) -> Result<Complex64, FockError>;
}

struct Split {
    keep_spec: HilbertSpec,
    keep_dim: usize,
    env_dim: usize,
    /// `(keep index, env index)` per flat index.
    coords: Vec<(usize, usize)>,
}

fn split(spec: &HilbertSpec, keep: &[usize]) -> Result<Split, FockError> {
    if keep.is_empty() {
        return Err(FockError::Domain("keep set is empty".into()));
    }
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if let Some(&m) = keep.iter().find(|&&m| m >= spec.modes()) {
        return Err(FockError::Domain(format!("mode {m} out of range for {} modes", spec.modes())));
    }
    let dims = spec.dims();
    let keep_dim: usize = keep.iter().map(|&m| dims[m]).product();
    let env: Vec<usize> = (0..spec.modes()).filter(|m| !keep.contains(m)).collect();
    let env_dim: usize = env.iter().map(|&m| dims[m]).product();
    let coords = (0..spec.total_dim())
        .map(|idx| {
            let lv = spec.levels_of(idx);
            let k = keep.iter().fold(0, |acc, &m| acc * dims[m] + lv[m]);
            let e = env.iter().fold(0, |acc, &m| acc * dims[m] + lv[m]);
            (k, e)
        })
        .collect();
    Ok(Split { keep_spec: spec.restrict(&keep)?, keep_dim, env_dim, coords })
}

fn check_op(spec: &HilbertSpec, op: &ModeOperator) -> Result<(), FockError> {
    if op.spec() != spec {
        return Err(FockError::Domain(format!("operator dims {:?} vs state dims {:?}", op.spec().dims(), spec.dims())));
    }
    Ok(())
}

impl QuantumState for StateVector {
    fn spec(&self) -> &HilbertSpec {
        &self.spec
    }

    fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix, FockError> {
        let s = split(&self.spec, keep)?;
        let mut m = DMatrix::<Complex64>::zeros(s.keep_dim, s.env_dim);
        for (z, &(k, e)) in self.amps.iter().zip(&s.coords) {
            m[(k, e)] = *z;
        }
        let rho = &m * m.adjoint();
        Ok(DensityMatrix::from_parts_unchecked(s.keep_spec, rho))
    }

    fn expect(&self, op: &ModeOperator) -> Result<Complex64, FockError> {
        check_op(&self.spec, op)?;
        let o = op.apply(&self.amps);
        Ok(self.amps.iter().zip(&o).map(|(a, b)| a.conj() * b).sum())
    }
}

impl QuantumState for DensityMatrix {
    fn spec(&self) -> &HilbertSpec {
        &self.spec
    }

    fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix, FockError> {
        let s = split(&self.spec, keep)?;
        let mut rho = DMatrix::<Complex64>::zeros(s.keep_dim, s.keep_dim);
        let mut by_env: Vec<Vec<(usize, usize)>> = vec![Vec::new(); s.env_dim];
        for (idx, &(k, e)) in s.coords.iter().enumerate() {
            by_env[e].push((k, idx));
        }
        for group in &by_env {
            for &(k1, i1) in group {
                for &(k2, i2) in group {
                    rho[(k1, k2)] += self.matrix[(i1, i2)];
                }
            }
        }
        Ok(DensityMatrix::from_parts_unchecked(s.keep_spec, rho))
    }

    fn expect(&self, op: &ModeOperator) -> Result<Complex64, FockError> {
        check_op(&self.spec, op)?;
        Ok(op.entries().map(|(r, c, v)| self.matrix[(c, r)] * v).sum())
    }
}

/// Reduced density matrix on the `keep` modes.
pub fn partial_trace<S: QuantumState + ?Sized>(state: &S, keep: &[usize]) -> Result<DensityMatrix, FockError> {
    state.reduce(keep)
}

/// `⟨ψ|O|ψ⟩` or `Tr(ρO)`.
pub fn expectation<S: QuantumState + ?Sized>(state: &S, op: &ModeOperator) -> Result<Complex64, FockError> {
    state.expect(op)
}

/// Truncated single-mode coherent state `|α⟩`.
///
/// Fails when the Poisson weight beyond `dim − 1` exceeds 1e-6; the error names the smallest
/// adequate dimension.
///
/// ```
/// use nlcavity::fock::{coherent_state, expectation, ladder_ops};
/// use num_complex::Complex64;
/// let psi = coherent_state(Complex64::new(3.0, 0.0), 30).unwrap();
/// let (_, _, n) = ladder_ops(30).unwrap();
/// assert!((expectation(&psi, &n).unwrap().re - 9.0).abs() < 1e-4);
/// assert!(coherent_state(Complex64::new(3.0, 0.0), 12).is_err());
/// ```
pub fn coherent_state(alpha: Complex64, dim: usize) -> Result<StateVector, FockError> {
    let spec = HilbertSpec::single(dim)?;
    let mean = alpha.norm_sqr();
    let tail_from = |d: usize| -> f64 {
        let mut p = (-mean).exp();
        let mut head = 0.0;
        for n in 0..d {
            if n > 0 {
                p *= mean / n as f64;
            }
            head += p;
        }
        (1.0 - head).max(0.0)
    };
    let tail = tail_from(dim);
    if tail >= COHERENT_TAIL {
        let mut need = dim;
        while tail_from(need) >= COHERENT_TAIL {
            need += 1;
        }
        return Err(FockError::Truncation { tail, required_dim: need });
    }
    let mut amps = Vec::with_capacity(dim);
    let mut c = Complex64::new((-mean / 2.0).exp(), 0.0);
    for n in 0..dim {
        if n > 0 {
            c *= alpha / (n as f64).sqrt();
        }
        amps.push(c);
    }
    StateVector::new(spec, amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{embed, ladder_ops};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn vacuum_coherent() {
        let psi = coherent_state(c(0.0, 0.0), 4).unwrap();
        assert_eq!(psi.amplitudes()[0], c(1.0, 0.0));
        assert!(psi.amplitudes()[1..].iter().all(|z| z.norm() == 0.0));
        let (_, _, n) = ladder_ops(4).unwrap();
        assert_eq!(expectation(&psi, &n).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn coherent_truncation_gate() {
        // Poisson(9) tail beyond n = 11 is ~0.197; first dim below 1e-6 is 27 (mpmath).
        match coherent_state(c(3.0, 0.0), 12) {
            Err(FockError::Truncation { tail, required_dim }) => {
                assert!((tail - 0.19699).abs() < 1e-4, "{tail}");
                assert_eq!(required_dim, 27);
            }
            other => panic!("{other:?}"),
        }
        let psi = coherent_state(c(0.0, 3.0), 30).unwrap();
        let (_, _, n) = ladder_ops(30).unwrap();
        let mean = expectation(&psi, &n).unwrap();
        assert!((mean.re - 9.0).abs() < 1e-4 && mean.im.abs() < 1e-12);
    }

    #[test]
    fn number_on_fock_state() {
        let spec = HilbertSpec::new(vec![3, 4, 2]).unwrap();
        let psi = StateVector::basis(spec.clone(), &[1, 2, 0]).unwrap();
        let (_, _, nb) = ladder_ops(4).unwrap();
        let op = embed(&nb, 1, &spec).unwrap();
        let out = op.apply(psi.amplitudes());
        for (a, b) in out.iter().zip(psi.amplitudes()) {
            assert_eq!(*a, b * 2.0);
        }
        assert_eq!(expectation(&psi.to_density(), &op).unwrap().re, 2.0);
        let (_, _, n3) = ladder_ops(3).unwrap();
        assert!(expectation(&psi, &n3).is_err());
    }

    #[test]
    fn product_state_reduction() {
        let a = coherent_state(c(0.7, -0.2), 10).unwrap();
        let b = StateVector::new(HilbertSpec::single(3).unwrap(), vec![c(1.0, 0.0), c(0.0, 1.0), c(0.5, 0.0)]).unwrap();
        let ab = a.tensor(&b);
        let ra = partial_trace(&ab, &[0]).unwrap();
        let rb = partial_trace(&ab, &[1]).unwrap();
        assert!(ra.max_abs_diff(&a.to_density()) < 1e-14);
        assert!(rb.max_abs_diff(&b.to_density()) < 1e-14);
        assert!(partial_trace(&ab, &[]).is_err());
        assert!(partial_trace(&ab, &[2]).is_err());
    }

    #[test]
    fn pump_fock_start_leaves_signal_vacuum() {
        let spec = HilbertSpec::new(vec![11, 11, 11]).unwrap();
        let psi = StateVector::basis(spec, &[9, 0, 0]).unwrap();
        let rb = partial_trace(&psi, &[1]).unwrap();
        assert_eq!(rb.matrix()[(0, 0)], c(1.0, 0.0));
        assert_eq!(rb.trace(), c(1.0, 0.0));
        let pure = partial_trace(&psi.to_density(), &[1]).unwrap();
        assert_eq!(pure, rb);
    }

    #[test]
    fn squeezed_pair_traces_to_geometric() {
        // Oracle: explicit outer product of Σ t^n |n,n⟩ then summing over the idler index by hand.
        let (d, t) = (12usize, 0.4f64);
        let spec = HilbertSpec::new(vec![d, d]).unwrap();
        let mut amps = vec![c(0.0, 0.0); d * d];
        for n in 0..d {
            amps[n * d + n] = c(t.powi(n as i32), 0.0);
        }
        let psi = StateVector::new(spec, amps).unwrap();
        let full = psi.to_density();
        let mut oracle = vec![0.0; d];
        for n in 0..d {
            for k in 0..d {
                oracle[n] += full.matrix()[(n * d + k, n * d + k)].re;
            }
        }
        let rb = partial_trace(&psi, &[0]).unwrap();
        assert!(rb.is_diagonal(1e-15));
        for n in 0..d {
            assert!((rb.diagonal()[n] - oracle[n]).abs() < 1e-14);
            if n + 1 < d {
                assert!((rb.diagonal()[n + 1] / rb.diagonal()[n] - t * t).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn boundary_population_reports_top_level() {
        let spec = HilbertSpec::new(vec![2, 3]).unwrap();
        let amps = vec![c(0.0, 0.0), c(0.0, 0.0), c(0.6, 0.0), c(0.0, 0.0), c(0.8, 0.0), c(0.0, 0.0)];
        let psi = StateVector::new(spec, amps).unwrap();
        let b = psi.boundary_population();
        assert!((b[0] - 0.64).abs() < 1e-15 && (b[1] - 0.36).abs() < 1e-15);
    }

    #[test]
    fn density_validation() {
        let spec = HilbertSpec::single(2).unwrap();
        let bad = DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.1, 0.0), c(0.2, 0.0), c(0.5, 0.0)]);
        assert!(DensityMatrix::new(spec.clone(), bad).is_err());
        assert!(DensityMatrix::from_diagonal(spec.clone(), &[0.5, 0.6]).is_err());
        assert!(DensityMatrix::from_diagonal(spec, &[0.25, 0.75]).is_ok());
    }

    fn random_state(dims: Vec<usize>, raw: &[(f64, f64)]) -> StateVector {
        let spec = HilbertSpec::new(dims).unwrap();
        let n = spec.total_dim();
        StateVector::new(spec, raw[..n].iter().map(|&(r, i)| c(r, i)).collect()).unwrap()
    }

    proptest! {
        #[test]
        fn constructed_states_are_normalized(raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 24)) {
            prop_assume!(raw.iter().any(|&(r, i)| r.abs() + i.abs() > 1e-3));
            let psi = random_state(vec![2, 3, 4], &raw);
            prop_assert!((psi.norm() - 1.0).abs() < 1e-9);
        }

        #[test]
        fn reductions_keep_trace(raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 24), keep in prop::sample::subsequence(vec![0usize, 1, 2], 1..=3)) {
            prop_assume!(raw.iter().any(|&(r, i)| r.abs() + i.abs() > 1e-3));
            let psi = random_state(vec![2, 3, 4], &raw);
            let rho = psi.to_density();
            let via_pure = partial_trace(&psi, &keep).unwrap();
            let via_mixed = partial_trace(&rho, &keep).unwrap();
            prop_assert!((via_pure.trace() - 1.0).norm() < 1e-10);
            prop_assert!((via_mixed.trace() - 1.0).norm() < 1e-10);
            prop_assert!(via_pure.max_abs_diff(&via_mixed) < 1e-12);
        }

        #[test]
        fn keeping_everything_is_identity(raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 12)) {
            prop_assume!(raw.iter().any(|&(r, i)| r.abs() + i.abs() > 1e-3));
            let rho = random_state(vec![3, 2, 2], &raw).to_density();
            let same = partial_trace(&rho, &[0, 1, 2]).unwrap();
            prop_assert!(same.max_abs_diff(&rho) < 1e-12);
        }

        #[test]
        fn schmidt_spectra_agree(raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 24), cut in 0usize..3) {
            prop_assume!(raw.iter().any(|&(r, i)| r.abs() + i.abs() > 1e-3));
            let psi = random_state(vec![2, 3, 4], &raw);
            let rest: Vec<usize> = (0..3).filter(|&m| m != cut).collect();
            let ea = partial_trace(&psi, &[cut]).unwrap().eigenvalues();
            let eb = partial_trace(&psi, &rest).unwrap().eigenvalues();
            let (small, big) = if ea.len() <= eb.len() { (ea, eb) } else { (eb, ea) };
            let pad = big.len() - small.len();
            for (k, l) in big.iter().enumerate() {
                let other = if k < pad { 0.0 } else { small[k - pad] };
                prop_assert!((l - other).abs() < 1e-8);
            }
        }

        #[test]
        fn hermitian_expectations_are_real(raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 24), mode in 0usize..3) {
            prop_assume!(raw.iter().any(|&(r, i)| r.abs() + i.abs() > 1e-3));
            let psi = random_state(vec![2, 3, 4], &raw);
            let (a, ad, n) = ladder_ops(psi.spec().dims()[mode]).unwrap();
            let x = a.add_scaled(&ad, c(1.0, 0.0)).unwrap();
            for op in [n, x] {
                let e = embed(&op, mode, psi.spec()).unwrap();
                prop_assert!(expectation(&psi, &e).unwrap().im.abs() < 1e-10);
                prop_assert!(expectation(&psi.to_density(), &e).unwrap().im.abs() < 1e-10);
            }
        }

        #[test]
        fn distinct_modes_commute(d0 in 2usize..5, d1 in 2usize..5, d2 in 2usize..4, i in 0usize..3, j in 0usize..3) {
            prop_assume!(i != j);
            let spec = HilbertSpec::new(vec![d0, d1, d2]).unwrap();
            let (ai, _, _) = ladder_ops(spec.dims()[i]).unwrap();
            let (_, adj, _) = ladder_ops(spec.dims()[j]).unwrap();
            let x = embed(&ai, i, &spec).unwrap();
            let y = embed(&adj, j, &spec).unwrap();
            prop_assert_eq!(x.commutator(&y).unwrap().nnz(), 0);
        }
    }
}
