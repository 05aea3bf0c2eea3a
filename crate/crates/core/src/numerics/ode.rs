use super::{NumericsError, RealGrid, Tolerance};
use num_complex::Complex64;

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `dy/dt = rhs(t, y)` with an embedded Runge–Kutta 5(4) pair and returns the
/// solution at every grid point (the first entry is `y0` at `t_grid[0]`).
///
/// `rhs(t, y, dy)` writes the derivative into `dy`. `max_iter` caps the total number of
/// attempted steps.
pub fn evolve_ode<F>(rhs: F, y0: &[Complex64], t_grid: &RealGrid, tol: Tolerance) -> Result<Vec<Vec<Complex64>>, NumericsError>
where
    F: Fn(f64, &[Complex64], &mut [Complex64]),
{
    let n = y0.len();
    let mut out = Vec::with_capacity(t_grid.len());
    let mut y = y0.to_vec();
    out.push(y.clone());
    let mut k: Vec<Vec<Complex64>> = vec![vec![Complex64::default(); n]; 7];
    let mut stage = vec![Complex64::default(); n];
    let mut y5 = vec![Complex64::default(); n];
    let mut t = t_grid.first();
    let span = (t_grid.last() - t).abs().max(1e-300);
    let mut h = span * 1e-3;
    let mut attempts = 0usize;
    let mut fsal_valid = false;

    for &t_next in &t_grid.points()[1..] {
        while t < t_next {
            let last = t + h >= t_next;
            let step = if last { t_next - t } else { h };
            if step <= 1e-14 * t.abs().max(span) {
                if last {
                    break;
                }
                return Err(NumericsError::StepUnderflow { t });
            }
            attempts += 1;
            if attempts > tol.max_iter {
                return Err(NumericsError::Convergence { iterations: attempts, estimate: t });
            }
            if !fsal_valid {
                rhs(t, &y, &mut k[0]);
            }
            for s in 1..7 {
                for i in 0..n {
                    let mut acc = y[i];
                    for (j, kj) in k.iter().enumerate().take(s) {
                        if A[s][j] != 0.0 {
                            acc += kj[i] * (step * A[s][j]);
                        }
                    }
                    stage[i] = acc;
                }
                rhs(t + C[s] * step, &stage, &mut k[s]);
            }
            // Stage 6 argument is the 5th-order solution (FSAL).
            y5.copy_from_slice(&stage);
            let mut err: f64 = 0.0;
            for i in 0..n {
                let mut e = Complex64::default();
                for s in 0..7 {
                    let w = B5[s] - B4[s];
                    if w != 0.0 {
                        e += k[s][i] * w;
                    }
                }
                let scale = tol.abs_tol + tol.rel_tol * y[i].norm().max(y5[i].norm());
                err = err.max((e * step).norm() / scale);
            }
            if !err.is_finite() {
                return Err(NumericsError::Domain(format!("non-finite derivative near t = {t}")));
            }
            if err <= 1.0 {
                t = if last { t_next } else { t + step };
                std::mem::swap(&mut y, &mut y5);
                k.swap(0, 6);
                fsal_valid = true;
                let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !last || factor < 1.0 {
                    h = step * factor;
                }
            } else {
                // k[0] still holds rhs(t, y)
                h = step * (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}
