use super::{NumericsError, Tolerance};

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
}

const MAX_DEPTH: u32 = 60;

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
///
/// Each panel is accepted when its Richardson error estimate falls below its share of
/// `max(abs_tol, rel_tol·|I|)`. `max_iter` caps the number of panel subdivisions.
///
/// # Example
/// ```
/// use nlcavity::numerics::{integrate_adaptive, Tolerance};
/// let v = integrate_adaptive(f64::sin, 0.0, std::f64::consts::PI, Tolerance::quadrature()).unwrap();
/// assert!((v - 2.0).abs() < 1e-9);
/// ```
pub fn integrate_adaptive<F>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> f64,
{
    if !(a < b) {
        return Err(NumericsError::Domain(format!("integration bounds must satisfy a < b (got {a}, {b})")));
    }
    let eval = |x: f64| -> Result<f64, NumericsError> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(NumericsError::Domain(format!("integrand not finite at {x}")))
        }
    };
    // A coarse 16-panel pass sets the scale for the relative tolerance.
    let n0 = 16;
    let h = (b - a) / n0 as f64;
    let mut coarse = 0.0;
    let mut abs_scale = 0.0;
    let mut stack = Vec::with_capacity(64);
    let mut fl = eval(a)?;
    for i in 0..n0 {
        let pa = a + h * i as f64;
        let pb = if i == n0 - 1 { b } else { pa + h };
        let fr = eval(pb)?;
        let fmid = eval(0.5 * (pa + pb))?;
        let s = simpson(pa, pb, fl, fmid, fr);
        coarse += s;
        abs_scale += simpson(pa, pb, fl.abs(), fmid.abs(), fr.abs());
        stack.push(Panel { a: pa, b: pb, fa: fl, fm: fmid, fb: fr, whole: s, eps: 0.0, depth: 0 });
        fl = fr;
    }
    let target = tol.abs_tol.max(tol.rel_tol * coarse.abs().max(1e-3 * abs_scale));
    for p in stack.iter_mut() {
        p.eps = target / n0 as f64;
    }

    let mut total = 0.0;
    let mut splits = 0usize;
    while let Some(p) = stack.pop() {
        let lm = 0.5 * (p.a + p.fm_x());
        let rm = 0.5 * (p.fm_x() + p.b);
        let (flm, frm) = (eval(lm)?, eval(rm)?);
        let left = simpson(p.a, p.fm_x(), p.fa, flm, p.fm);
        let right = simpson(p.fm_x(), p.b, p.fm, frm, p.fb);
        let delta = left + right - p.whole;
        if delta.abs() <= 15.0 * p.eps || p.depth >= MAX_DEPTH {
            total += left + right + delta / 15.0;
            continue;
        }
        splits += 1;
        if splits > tol.max_iter {
            let rest: f64 = stack.iter().map(|q| q.whole).sum();
            return Err(NumericsError::Convergence { iterations: splits, estimate: total + left + right + rest });
        }
        let mid = p.fm_x();
        stack.push(Panel { a: p.a, b: mid, fa: p.fa, fm: flm, fb: p.fm, whole: left, eps: 0.5 * p.eps, depth: p.depth + 1 });
        stack.push(Panel { a: mid, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right, eps: 0.5 * p.eps, depth: p.depth + 1 });
    }
    Ok(total)
}

impl Panel {
    fn fm_x(&self) -> f64 {
        0.5 * (self.a + self.b)
    }
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn trivial_integrals() {
        let tol = Tolerance::quadrature();
        assert!((integrate_adaptive(|_| 1.0, 0.0, 2.0, tol).unwrap() - 2.0).abs() < 1e-14);
        assert!((integrate_adaptive(f64::sin, 0.0, PI, tol).unwrap() - 2.0).abs() < 1e-9);
        assert!(integrate_adaptive(|_| 1.0, 1.0, 1.0, tol).is_err());
    }

    #[test]
    fn sharp_lorentzian_against_arctan() {
        let (x0, g) = (3.0e10, 1.2e4);
        let tol = Tolerance::new(1e-14, 1e-10, 100_000).unwrap();
        let v = integrate_adaptive(|x| 2.0 * g / ((x - x0).powi(2) + g * g), x0 - 20.0 * g, x0 + 20.0 * g, tol).unwrap();
        let exact = 4.0 * 20f64.atan();
        assert!((v - exact).abs() < 1e-9 * exact);
        assert!((v - 2.0 * PI).abs() < 0.21);
    }

    #[test]
    fn reports_nonconvergence_with_estimate() {
        let tol = Tolerance::new(1e-16, 1e-16, 3).unwrap();
        match integrate_adaptive(|x| (50.0 * x).sin().abs(), 0.0, 1.0, tol) {
            Err(NumericsError::Convergence { estimate, .. }) => assert!(estimate.is_finite()),
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn error_bound_on_closed_form_corpus() {
        let tol = Tolerance::new(1e-10, 1e-10, 100_000).unwrap();
        let cases: Vec<(Box<dyn Fn(f64) -> f64>, f64, f64, f64)> = vec![
            (Box::new(|x: f64| x.exp()), 0.0, 1.0, 1f64.exp() - 1.0),
            (Box::new(|x: f64| 1.0 / (1.0 + x * x)), -5.0, 5.0, 2.0 * 5f64.atan()),
            (Box::new(|x: f64| x.sqrt()), 0.0, 4.0, 16.0 / 3.0),
            (Box::new(|x: f64| (-x * x).exp()), -8.0, 8.0, PI.sqrt()),
            (Box::new(|x: f64| x.powi(7) - 3.0 * x), -1.0, 2.0, (256.0 - 1.0) / 8.0 - 1.5 * 3.0),
        ];
        for (f, a, b, exact) in cases {
            let v = integrate_adaptive(&*f, a, b, tol).unwrap();
            assert!((v - exact).abs() <= 1e-10f64.max(1e-10 * exact.abs()) * 10.0, "{v} vs {exact}");
        }
    }
}
