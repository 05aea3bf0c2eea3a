use super::NumericsError;
use statrs::function::gamma::ln_gamma;

const AGM_MAX_DEPTH: usize = 32;
const GAMMA_MAX_ITER: usize = 10_000;

/// Jacobi elliptic function `dn(u | m)` with parameter `m` (so `k² = m`).
///
/// Uses the arithmetic-geometric mean with descending Landen back-substitution.
///
/// # Example
/// ```
/// use nlcavity::numerics::jacobi_dn;
/// assert_eq!(jacobi_dn(0.0, 0.5).unwrap(), 1.0);
/// assert!((jacobi_dn(2.0, 1.0).unwrap() - 1.0 / 2f64.cosh()).abs() < 1e-15);
/// ```
pub fn jacobi_dn(u: f64, m: f64) -> Result<f64, NumericsError> {
    if !(0.0..=1.0).contains(&m) {
        return Err(NumericsError::Domain(format!("dn parameter m = {m} outside [0, 1]")));
    }
    if m == 0.0 {
        return Ok(1.0);
    }
    if m == 1.0 {
        return Ok(1.0 / u.cosh());
    }
    let mut a = [0.0; AGM_MAX_DEPTH + 1];
    let mut c = [0.0; AGM_MAX_DEPTH + 1];
    a[0] = 1.0;
    c[0] = m.sqrt();
    let mut b = (1.0 - m).sqrt();
    let mut depth = 0;
    while c[depth].abs() > f64::EPSILON {
        if depth == AGM_MAX_DEPTH {
            return Err(NumericsError::Convergence { iterations: depth, estimate: f64::NAN });
        }
        let (an, bn) = (a[depth], b);
        depth += 1;
        a[depth] = 0.5 * (an + bn);
        c[depth] = 0.5 * (an - bn);
        b = (an * bn).sqrt();
    }
    let mut phi = (1u64 << depth) as f64 * a[depth] * u;
    let mut prev = phi;
    for n in (1..=depth).rev() {
        prev = phi;
        phi = 0.5 * (phi + (c[n] / a[n] * phi.sin()).asin());
    }
    Ok(phi.cos() / (prev - phi).cos())
}

/// Upper incomplete gamma function `Γ(s, x) = ∫ₓ^∞ t^{s−1} e^{−t} dt` (not regularized).
///
/// Series for the lower function when `x ≤ s + 1`, Lentz continued fraction otherwise.
pub fn upper_incomplete_gamma(s: f64, x: f64) -> Result<f64, NumericsError> {
    ln_upper_incomplete_gamma(s, x).map(f64::exp)
}

/// `ln Γ(s, x)`, finite where `Γ(s, x)` itself underflows.
pub fn ln_upper_incomplete_gamma(s: f64, x: f64) -> Result<f64, NumericsError> {
    if !(s > 0.0) {
        return Err(NumericsError::Domain(format!("incomplete gamma requires s > 0, got {s}")));
    }
    if !(x >= 0.0) {
        return Err(NumericsError::Domain(format!("incomplete gamma requires x >= 0, got {x}")));
    }
    let lg = ln_gamma(s);
    if x == 0.0 {
        return Ok(lg);
    }
    if x <= s + 1.0 {
        let lower = lower_series(s, x, lg)?;
        Ok(lg + (1.0 - lower).max(0.0).ln())
    } else {
        upper_fraction(s, x)
    }
}

/// Regularized lower function `P(s, x)` by its power series.
fn lower_series(s: f64, x: f64, ln_gamma_s: f64) -> Result<f64, NumericsError> {
    let mut term = 1.0 / s;
    let mut sum = term;
    let mut ap = s;
    for _ in 0..GAMMA_MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * f64::EPSILON {
            return Ok(sum * (-x + s * x.ln() - ln_gamma_s).exp());
        }
    }
    Err(NumericsError::Convergence { iterations: GAMMA_MAX_ITER, estimate: sum })
}

/// `ln Γ(s, x)` by the modified Lentz continued fraction.
fn upper_fraction(s: f64, x: f64) -> Result<f64, NumericsError> {
    let tiny = f64::MIN_POSITIVE / f64::EPSILON;
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..GAMMA_MAX_ITER {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < f64::EPSILON {
            return Ok(-x + s * x.ln() + h.ln());
        }
    }
    Err(NumericsError::Convergence { iterations: GAMMA_MAX_ITER, estimate: h })
}
