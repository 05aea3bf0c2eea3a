//! Special functions, quadrature, ODE stepping, root finding and peak fitting.

mod fit;
mod ode;
mod quad;
mod roots;
mod special;

pub use fit::{fit_lorentzian, LorentzianFit};
pub use ode::evolve_ode;
pub use quad::integrate_adaptive;
pub use roots::{find_root_bracketed, solve_cubic_real};
pub use special::{jacobi_dn, ln_upper_incomplete_gamma, upper_incomplete_gamma};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("argument outside domain: {0}")]
    Domain(String),
    #[error("no convergence after {iterations} iterations (best estimate {estimate})")]
    Convergence { iterations: usize, estimate: f64 },
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("no sign change on [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },
    #[error("degenerate fit: {0}")]
    FitDegenerate(String),
}

/// Stopping criteria shared by the iterative routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Tolerance {
    pub fn new(abs_tol: f64, rel_tol: f64, max_iter: usize) -> Result<Self, NumericsError> {
        if !(abs_tol > 0.0) || !(rel_tol > 0.0) || max_iter == 0 {
            return Err(NumericsError::Domain(format!(
                "tolerance requires abs_tol > 0, rel_tol > 0, max_iter >= 1 (got {abs_tol}, {rel_tol}, {max_iter})"
            )));
        }
        Ok(Self { abs_tol, rel_tol, max_iter })
    }

    /// Defaults for ODE integration: abs 1e-10, rel 1e-8.
    pub fn ode() -> Self {
        Self { abs_tol: 1e-10, rel_tol: 1e-8, max_iter: 5_000_000 }
    }

    /// Defaults for quadrature.
    pub fn quadrature() -> Self {
        Self { abs_tol: 1e-12, rel_tol: 1e-9, max_iter: 200_000 }
    }

    /// Defaults for scalar root finding.
    pub fn root() -> Self {
        Self { abs_tol: 1e-14, rel_tol: 1e-14, max_iter: 200 }
    }
}

/// Strictly increasing, nonempty sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct RealGrid {
    points: Vec<f64>,
}

impl RealGrid {
    pub fn new(points: Vec<f64>) -> Result<Self, NumericsError> {
        if points.is_empty() {
            return Err(NumericsError::Domain("grid is empty".into()));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(NumericsError::Domain("grid contains non-finite points".into()));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(NumericsError::Domain("grid is not strictly increasing".into()));
        }
        Ok(Self { points })
    }

    /// `n` evenly spaced points from `start` to `stop` inclusive.
    pub fn linspace(start: f64, stop: f64, n: usize) -> Result<Self, NumericsError> {
        match n {
            0 => Err(NumericsError::Domain("grid is empty".into())),
            1 => Self::new(vec![start]),
            _ => {
                let step = (stop - start) / (n - 1) as f64;
                Self::new((0..n).map(|i| if i == n - 1 { stop } else { start + step * i as f64 }).collect())
            }
        }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first(&self) -> f64 {
        self.points[0]
    }

    pub fn last(&self) -> f64 {
        self.points[self.points.len() - 1]
    }
}
