use super::{FockError, HilbertSpec};
use nalgebra::DMatrix;
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OperatorLabel {
    Annihilation,
    Creation,
    Number,
    Identity,
    Custom,
}

/// Sparse (CSR) operator on a truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeOperator {
    spec: HilbertSpec,
    label: OperatorLabel,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl ModeOperator {
    /// Builds from `(row, col, value)` entries; duplicates are summed and zeros dropped.
    pub fn from_triplets(spec: HilbertSpec, label: OperatorLabel, mut entries: Vec<(usize, usize, Complex64)>) -> Result<Self, FockError> {
        let n = spec.total_dim();
        if let Some(&(r, c, _)) = entries.iter().find(|&&(r, c, _)| r >= n || c >= n) {
            return Err(FockError::Domain(format!("entry ({r}, {c}) outside dimension {n}")));
        }
        entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0; n + 1];
        let mut cols = Vec::with_capacity(entries.len());
        let mut vals: Vec<Complex64> = Vec::with_capacity(entries.len());
        let mut rows = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            if let (Some(&lr), Some(&lc)) = (rows.last(), cols.last()) {
                if lr == r && lc == c {
                    *vals.last_mut().unwrap() += v;
                    continue;
                }
            }
            rows.push(r);
            cols.push(c);
            vals.push(v);
        }
        let keep: Vec<bool> = vals.iter().map(|v| *v != Complex64::default()).collect();
        let mut k = keep.iter();
        rows.retain(|_| *k.next().unwrap());
        let mut k = keep.iter();
        cols.retain(|_| *k.next().unwrap());
        vals.retain(|v| *v != Complex64::default());
        for &r in &rows {
            row_ptr[r + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(Self { spec, label, row_ptr, cols, vals })
    }

    pub fn identity(spec: HilbertSpec) -> Self {
        let n = spec.total_dim();
        Self {
            spec,
            label: OperatorLabel::Identity,
            row_ptr: (0..=n).collect(),
            cols: (0..n).collect(),
            vals: vec![Complex64::new(1.0, 0.0); n],
        }
    }

    pub fn spec(&self) -> &HilbertSpec {
        &self.spec
    }

    pub fn label(&self) -> &OperatorLabel {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.spec.total_dim()
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn with_label(mut self, label: OperatorLabel) -> Self {
        self.label = label;
        self
    }

    /// Iterates `(row, col, value)` over stored entries.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim()).flat_map(move |r| (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.cols[k], self.vals[k])))
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        (self.row_ptr[row]..self.row_ptr[row + 1])
            .find(|&k| self.cols[k] == col)
            .map(|k| self.vals[k])
            .unwrap_or_default()
    }

    /// `out = self · x`.
    pub fn apply_into(&self, x: &[Complex64], out: &mut [Complex64]) {
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = Complex64::default();
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *o = acc;
        }
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); self.dim()];
        self.apply_into(x, &mut out);
        out
    }

    fn check_same(&self, other: &Self) -> Result<(), FockError> {
        if self.spec != other.spec {
            return Err(FockError::Mismatch(format!("{:?} vs {:?}", self.spec.dims(), other.spec.dims())));
        }
        Ok(())
    }

    /// Operator product `self · other`.
    pub fn mul(&self, other: &Self) -> Result<Self, FockError> {
        self.check_same(other)?;
        let mut entries = Vec::new();
        for (r, k, v) in self.entries() {
            for idx in other.row_ptr[k]..other.row_ptr[k + 1] {
                entries.push((r, other.cols[idx], v * other.vals[idx]));
            }
        }
        Self::from_triplets(self.spec.clone(), OperatorLabel::Custom, entries)
    }

    /// `self + factor · other`.
    pub fn add_scaled(&self, other: &Self, factor: Complex64) -> Result<Self, FockError> {
        self.check_same(other)?;
        let entries = self.entries().chain(other.entries().map(|(r, c, v)| (r, c, v * factor))).collect();
        Self::from_triplets(self.spec.clone(), OperatorLabel::Custom, entries)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = self.clone();
        out.vals.iter_mut().for_each(|v| *v *= factor);
        out.label = OperatorLabel::Custom;
        out
    }

    /// Hermitian conjugate.
    pub fn adjoint(&self) -> Self {
        let label = match self.label {
            OperatorLabel::Annihilation => OperatorLabel::Creation,
            OperatorLabel::Creation => OperatorLabel::Annihilation,
            ref l => l.clone(),
        };
        let entries = self.entries().map(|(r, c, v)| (c, r, v.conj())).collect();
        Self::from_triplets(self.spec.clone(), label, entries).expect("transpose stays in range")
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &Self) -> Result<Self, FockError> {
        self.mul(other)?.add_scaled(&other.mul(self)?, Complex64::new(-1.0, 0.0))
    }

    /// Kronecker product with `self` as the leading (slower) factor.
    pub fn kron(&self, other: &Self) -> Self {
        let mut dims = self.spec.dims().to_vec();
        dims.extend_from_slice(other.spec.dims());
        let spec = HilbertSpec::new(dims).expect("both factors valid");
        let nb = other.dim();
        let mut entries = Vec::with_capacity(self.nnz() * other.nnz());
        for (r1, c1, v1) in self.entries() {
            for (r2, c2, v2) in other.entries() {
                entries.push((r1 * nb + r2, c1 * nb + c2, v1 * v2));
            }
        }
        Self::from_triplets(spec, OperatorLabel::Custom, entries).expect("kron indices in range")
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        for (r, c, v) in self.entries() {
            m[(r, c)] += v;
        }
        m
    }

    /// Largest `|O_ij − conj(O_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.entries().map(|(r, c, v)| (v - self.get(c, r).conj()).norm()).fold(0.0, f64::max)
    }
}

/// Annihilation `a`, creation `a†` and number `a†a` on a single mode truncated at `dim`.
///
/// # Example
/// ```
/// use nlcavity::fock::ladder_ops;
/// let (a, ad, n) = ladder_ops(3).unwrap();
/// assert_eq!(a.get(0, 1).re, 1.0);
/// assert!((ad.get(2, 1).re - 2f64.sqrt()).abs() < 1e-15);
/// assert_eq!(n.get(2, 2).re, 2.0);
/// ```
pub fn ladder_ops(dim: usize) -> Result<(ModeOperator, ModeOperator, ModeOperator), FockError> {
    if dim < 2 {
        return Err(FockError::Domain(format!("ladder operators need dim >= 2, got {dim}")));
    }
    let spec = HilbertSpec::single(dim)?;
    let lower: Vec<_> = (1..dim).map(|n| (n - 1, n, Complex64::new((n as f64).sqrt(), 0.0))).collect();
    let a = ModeOperator::from_triplets(spec.clone(), OperatorLabel::Annihilation, lower)?;
    let ad = a.adjoint();
    let number = (1..dim).map(|n| (n, n, Complex64::new(n as f64, 0.0))).collect();
    let n = ModeOperator::from_triplets(spec, OperatorLabel::Number, number)?;
    Ok((a, ad, n))
}

/// `I ⊗ … ⊗ op ⊗ … ⊗ I` with `op` acting on `mode`.
pub fn embed(op: &ModeOperator, mode: usize, spec: &HilbertSpec) -> Result<ModeOperator, FockError> {
    if mode >= spec.modes() {
        return Err(FockError::Domain(format!("mode {mode} out of range for {} modes", spec.modes())));
    }
    if op.spec().dims() != [spec.dims()[mode]] {
        return Err(FockError::Mismatch(format!(
            "operator dims {:?} vs mode {mode} dim {}",
            op.spec().dims(),
            spec.dims()[mode]
        )));
    }
    let inner: usize = spec.dims()[mode + 1..].iter().product();
    let outer: usize = spec.dims()[..mode].iter().product();
    let d = spec.dims()[mode];
    let mut entries = Vec::with_capacity(op.nnz() * inner * outer);
    for o in 0..outer {
        for (r, c, v) in op.entries() {
            for i in 0..inner {
                entries.push(((o * d + r) * inner + i, (o * d + c) * inner + i, v));
            }
        }
    }
    Ok(ModeOperator::from_triplets(spec.clone(), op.label().clone(), entries)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qubit_ladder() {
        let (a, ad, n) = ladder_ops(2).unwrap();
        let d = a.to_dense();
        assert_eq!(d[(0, 1)], Complex64::new(1.0, 0.0));
        assert_eq!(d[(0, 0)] + d[(1, 0)] + d[(1, 1)], Complex64::default());
        assert_eq!(ad.to_dense(), d.adjoint());
        assert_eq!(n.to_dense()[(1, 1)].re, 1.0);
        assert!(ladder_ops(1).is_err());
    }

    #[test]
    fn truncated_commutator() {
        // Oracle: dense product of the explicit matrices.
        let dim = 5;
        let (a, ad, _) = ladder_ops(dim).unwrap();
        let (da, dad) = (a.to_dense(), ad.to_dense());
        let dense = &da * &dad - &dad * &da;
        let sparse = a.commutator(&ad).unwrap().to_dense();
        for r in 0..dim {
            for c in 0..dim {
                let expect = if r != c { 0.0 } else if r == dim - 1 { -((dim - 1) as f64) } else { 1.0 };
                assert!((sparse[(r, c)].re - expect).abs() < 1e-14);
                assert!((sparse[(r, c)] - dense[(r, c)]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn number_spectrum() {
        let (_, _, n) = ladder_ops(6).unwrap();
        let ev = n.to_dense().map(|z| z.re).symmetric_eigenvalues();
        let mut ev: Vec<f64> = ev.iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (k, e) in ev.iter().enumerate() {
            assert!((e - k as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn embedding_identity_and_commutation() {
        let spec = HilbertSpec::new(vec![3, 4, 2]).unwrap();
        let id = ModeOperator::identity(HilbertSpec::single(4).unwrap());
        assert_eq!(embed(&id, 1, &spec).unwrap().to_dense(), ModeOperator::identity(spec.clone()).to_dense());
        let (a, _, _) = ladder_ops(3).unwrap();
        let (_, bd, _) = ladder_ops(4).unwrap();
        let ea = embed(&a, 0, &spec).unwrap();
        let ebd = embed(&bd, 1, &spec).unwrap();
        assert_eq!(ea.commutator(&ebd).unwrap().nnz(), 0);
        let dense = ea.to_dense() * ebd.to_dense() - ebd.to_dense() * ea.to_dense();
        assert!(dense.iter().all(|z| z.norm() == 0.0));
        assert!(embed(&a, 3, &spec).is_err());
        assert!(embed(&a, 1, &spec).is_err());
    }

    #[test]
    fn embedding_matches_kron() {
        let spec = HilbertSpec::new(vec![2, 3, 2]).unwrap();
        let (_, _, n) = ladder_ops(3).unwrap();
        let i2 = ModeOperator::identity(HilbertSpec::single(2).unwrap());
        let k = i2.kron(&n).kron(&i2);
        assert_eq!(embed(&n, 1, &spec).unwrap().to_dense(), k.to_dense());
    }
}
