//! Truncated multi-mode Fock spaces: sparse mode operators, state vectors, density matrices,
//! partial traces and expectation values.
//!
//! Modes are laid out in row-major order: the last mode index varies fastest, so for dims
//! `(d_a, d_b, d_c)` the basis state `|i, j, k⟩` sits at `(i·d_b + j)·d_c + k`.

mod operator;
mod state;

pub use operator::{embed, ladder_ops, ModeOperator, OperatorLabel};
pub use state::{coherent_state, expectation, partial_trace, DensityMatrix, QuantumState, StateVector};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FockError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: {0}")]
    Mismatch(String),
    #[error("truncation tail {tail:.3e} too heavy; need dim >= {required_dim}")]
    Truncation { tail: f64, required_dim: usize },
    #[error("invalid state: {0}")]
    InvalidState(String),
}

/// Per-mode truncation dimensions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HilbertSpec {
    dims: Vec<usize>,
}

impl HilbertSpec {
    pub fn new(dims: Vec<usize>) -> Result<Self, FockError> {
        if dims.is_empty() {
            return Err(FockError::Domain("at least one mode required".into()));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(FockError::Domain(format!("mode dimension {d} < 2")));
        }
        Ok(Self { dims })
    }

    pub fn single(dim: usize) -> Result<Self, FockError> {
        Self::new(vec![dim])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn modes(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Flat index of the basis state with the given occupation per mode.
    pub fn index_of(&self, levels: &[usize]) -> Result<usize, FockError> {
        if levels.len() != self.dims.len() {
            return Err(FockError::Mismatch(format!("{} levels for {} modes", levels.len(), self.dims.len())));
        }
        let mut idx = 0;
        for (&n, &d) in levels.iter().zip(&self.dims) {
            if n >= d {
                return Err(FockError::Domain(format!("level {n} outside truncation {d}")));
            }
            idx = idx * d + n;
        }
        Ok(idx)
    }

    /// Occupation per mode of flat basis index `idx`.
    pub fn levels_of(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (slot, &d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = idx % d;
            idx /= d;
        }
        out
    }

    /// Spec restricted to the listed modes (in ascending mode order).
    pub fn restrict(&self, modes: &[usize]) -> Result<Self, FockError> {
        Self::new(modes.iter().map(|&m| self.dims[m]).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_indexing_roundtrip() {
        let s = HilbertSpec::new(vec![3, 4, 2]).unwrap();
        assert_eq!(s.total_dim(), 24);
        for idx in 0..24 {
            assert_eq!(s.index_of(&s.levels_of(idx)).unwrap(), idx);
        }
        assert_eq!(s.index_of(&[1, 2, 1]).unwrap(), (4 + 2) * 2 + 1);
        assert!(HilbertSpec::new(vec![1, 3]).is_err());
        assert!(HilbertSpec::new(vec![]).is_err());
    }
}
