use super::{NumericsError, Tolerance};
use std::f64::consts::PI;

/// Real roots of `E³ + c2·E² + c1·E + c0 = 0`, sorted ascending, each Newton-polished.
///
/// Coincident roots (double or triple) are reported once.
///
/// # Example
/// ```
/// use nlcavity::numerics::solve_cubic_real;
/// let r = solve_cubic_real(-6.0, 11.0, -6.0);
/// assert_eq!(r.len(), 3);
/// assert!((r[0] - 1.0).abs() < 1e-12 && (r[2] - 3.0).abs() < 1e-12);
/// ```
pub fn solve_cubic_real(c2: f64, c1: f64, c0: f64) -> Vec<f64> {
    let scale = c2.abs().max(c1.abs().sqrt()).max(c0.abs().cbrt());
    if scale == 0.0 {
        return vec![0.0];
    }
    // Work with z = E / scale so the coefficients are O(1).
    let (a, b, c) = (c2 / scale, c1 / (scale * scale), c0 / (scale * scale * scale));
    let poly = |z: f64| ((z + a) * z + b) * z + c;
    let deriv = |z: f64| (3.0 * z + 2.0 * a) * z + b;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let shift = -a / 3.0;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);

    let mut candidates = Vec::with_capacity(3);
    if p == 0.0 && q == 0.0 {
        candidates.push(shift);
    } else if disc <= 0.0 {
        let r = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * r)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        for k in 0..3 {
            candidates.push(r * (theta - 2.0 * PI * k as f64 / 3.0).cos() + shift);
        }
    } else {
        let sq = disc.sqrt();
        let u = (-q / 2.0 + sq).cbrt();
        let v = (-q / 2.0 - sq).cbrt();
        candidates.push(u + v + shift);
        // Near-double pair: keep its real part if the imaginary part is negligible.
        if (3f64.sqrt() / 2.0 * (u - v)).abs() < 1e-6 {
            candidates.push(-(u + v) / 2.0 + shift);
        }
    }

    let mut roots: Vec<f64> = Vec::with_capacity(3);
    for z0 in candidates {
        let mut z = z0;
        for _ in 0..50 {
            let d = deriv(z);
            if d == 0.0 {
                break;
            }
            let step = poly(z) / d;
            let next = z - step;
            if !next.is_finite() || poly(next).abs() > poly(z).abs() {
                break;
            }
            z = next;
            if step.abs() <= 4.0 * f64::EPSILON * z.abs().max(1.0) {
                break;
            }
        }
        if poly(z).abs() <= 1e-9 * z.abs().powi(3).max(1.0) {
            roots.push(z);
        }
    }
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    roots.dedup_by(|x, y| (*x - *y).abs() <= 1e-6 * x.abs().max(1.0));
    roots.into_iter().map(|z| z * scale).collect()
}

/// Brent's method on a sign-changing bracket `[lo, hi]`.
///
/// Stops when the bracket shrinks below `abs_tol + rel_tol·|x|` or `f` vanishes.
pub fn find_root_bracketed<F>(f: F, lo: f64, hi: f64, tol: Tolerance) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa * fb < 0.0) {
        return Err(NumericsError::Bracket { lo, hi });
    }
    let (mut c, mut fc) = (b, fb);
    let (mut d, mut e) = (b - a, b - a);
    for _ in 0..tol.max_iter {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * (tol.abs_tol + tol.rel_tol * b.abs());
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    Err(NumericsError::Convergence { iterations: tol.max_iter, estimate: b })
}
