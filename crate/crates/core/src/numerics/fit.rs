use super::NumericsError;
use nalgebra::{Matrix3, Vector3};

/// Least-squares Lorentzian `A·2γ/((ω−ω₀)²+γ²)`; `area = 2πA`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzianFit {
    pub center: f64,
    pub half_width: f64,
    pub area: f64,
    /// RMS misfit divided by the RMS of the samples.
    pub residual: f64,
}

impl LorentzianFit {
    pub fn amplitude(&self) -> f64 {
        self.area / (2.0 * std::f64::consts::PI)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let d = x - self.center;
        self.amplitude() * 2.0 * self.half_width / (d * d + self.half_width * self.half_width)
    }
}

const MAX_STEPS: usize = 500;

/// Fits a single Lorentzian to `(x, y)` samples sorted by `x`.
///
/// Starts from the highest sample and the half-maximum crossings, then runs damped
/// Gauss–Newton (Levenberg) iterations on centre, half width and amplitude.
pub fn fit_lorentzian(samples: &[(f64, f64)]) -> Result<LorentzianFit, NumericsError> {
    if samples.len() < 5 {
        return Err(NumericsError::Domain(format!("need at least 5 samples, got {}", samples.len())));
    }
    if samples.iter().any(|&(x, y)| !x.is_finite() || !y.is_finite() || y <= 0.0) {
        return Err(NumericsError::Domain("samples must be finite and positive".into()));
    }
    if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(NumericsError::Domain("sample abscissae must be strictly increasing".into()));
    }
    let (imax, &(xpk, ypk)) = samples
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.partial_cmp(&b.1 .1).unwrap())
        .unwrap();
    let half = 0.5 * ypk;
    let crossing = |i: usize, j: usize| {
        let ((x1, y1), (x2, y2)) = (samples[i], samples[j]);
        x1 + (half - y1) * (x2 - x1) / (y2 - y1)
    };
    let left = (1..=imax).rev().find(|&i| samples[i - 1].1 < half).map(|i| crossing(i - 1, i));
    let right = (imax..samples.len() - 1).find(|&i| samples[i + 1].1 < half).map(|i| crossing(i, i + 1));
    let gamma0 = match (left, right) {
        (Some(l), Some(r)) => 0.5 * (r - l),
        (Some(l), None) => xpk - l,
        (None, Some(r)) => r - xpk,
        (None, None) => return Err(NumericsError::FitDegenerate("no half-maximum crossing".into())),
    };
    if !(gamma0 > 0.0) {
        return Err(NumericsError::FitDegenerate("zero initial width".into()));
    }

    // Normalized coordinates: u = (x − x_peak)/γ₀, v = y/y_peak.
    let pts: Vec<(f64, f64)> = samples.iter().map(|&(x, y)| ((x - xpk) / gamma0, y / ypk)).collect();
    let model = |p: &Vector3<f64>, u: f64| {
        let d = u - p[0];
        p[2] * 2.0 * p[1] / (d * d + p[1] * p[1])
    };
    let cost = |p: &Vector3<f64>| pts.iter().map(|&(u, v)| (model(p, u) - v).powi(2)).sum::<f64>();
    let mut p = Vector3::new(0.0, 1.0, 0.5);
    let mut c = cost(&p);
    let mut lambda = 1e-3;
    for _ in 0..MAX_STEPS {
        let mut jtj = Matrix3::zeros();
        let mut jtr = Vector3::zeros();
        for &(u, v) in &pts {
            let d = u - p[0];
            let den = d * d + p[1] * p[1];
            let g = Vector3::new(
                p[2] * 4.0 * p[1] * d / (den * den),
                2.0 * p[2] * (den - 2.0 * p[1] * p[1]) / (den * den),
                2.0 * p[1] / den,
            );
            jtj += g * g.transpose();
            jtr += g * (model(&p, u) - v);
        }
        let mut accepted = false;
        while lambda < 1e12 {
            let mut lhs = jtj;
            for k in 0..3 {
                lhs[(k, k)] += lambda * jtj[(k, k)].max(1e-300);
            }
            let step = lhs
                .lu()
                .solve(&(-jtr))
                .ok_or_else(|| NumericsError::FitDegenerate("singular normal equations".into()))?;
            let trial = p + step;
            if trial[1] > 0.0 {
                let ct = cost(&trial);
                if ct <= c {
                    let converged = (c - ct) <= 1e-15 * c.max(1e-300) || step.norm() < 1e-14;
                    p = trial;
                    c = ct;
                    lambda = (lambda * 0.3).max(1e-12);
                    accepted = true;
                    if converged {
                        return finish(&p, c, &pts, xpk, gamma0, ypk);
                    }
                    break;
                }
            }
            lambda *= 10.0;
        }
        if !accepted {
            break;
        }
    }
    finish(&p, c, &pts, xpk, gamma0, ypk)
}

fn finish(p: &Vector3<f64>, cost: f64, pts: &[(f64, f64)], xpk: f64, gamma0: f64, ypk: f64) -> Result<LorentzianFit, NumericsError> {
    if !(p[2] > 0.0) || !(p[1] > 0.0) || !p.iter().all(|v| v.is_finite()) {
        return Err(NumericsError::FitDegenerate("fit collapsed".into()));
    }
    let norm: f64 = pts.iter().map(|&(_, v)| v * v).sum();
    Ok(LorentzianFit {
        center: xpk + p[0] * gamma0,
        half_width: p[1] * gamma0,
        area: 2.0 * std::f64::consts::PI * p[2] * ypk * gamma0,
        residual: (cost / norm).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lorentz(x: f64, x0: f64, g: f64, a: f64) -> f64 {
        a * 2.0 * g / ((x - x0).powi(2) + g * g)
    }

    #[test]
    fn recovers_exact_lorentzian() {
        let (x0, g, a) = (2.5133e7 + 37.0, 1.26e4, 3.3e-21);
        let samples: Vec<(f64, f64)> = (0..121).map(|i| {
            let x = x0 - 6.0 * g + 12.0 * g * i as f64 / 120.0 + 0.3 * g;
            (x, lorentz(x, x0, g, a))
        }).collect();
        let fit = fit_lorentzian(&samples).unwrap();
        assert!((fit.center - x0).abs() < 1e-6 * g);
        assert!((fit.half_width - g).abs() < 1e-6 * g);
        assert!((fit.amplitude() - a).abs() < 1e-6 * a);
        assert!(fit.residual < 1e-9);
    }

    #[test]
    fn constant_spectrum_is_degenerate() {
        let samples: Vec<(f64, f64)> = (0..20).map(|i| (i as f64, 1.0)).collect();
        assert!(matches!(fit_lorentzian(&samples), Err(NumericsError::FitDegenerate(_))));
    }

    #[test]
    fn two_separated_peaks_fail_the_gate() {
        let g = 1.0;
        let samples: Vec<(f64, f64)> = (0..401).map(|i| {
            let x = -20.0 + 0.1 * i as f64;
            (x, lorentz(x, -5.0, g, 1.0) + lorentz(x, 5.0, g, 1.0))
        }).collect();
        let fit = fit_lorentzian(&samples).unwrap();
        assert!(fit.residual > 0.05, "residual {}", fit.residual);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(fit_lorentzian(&[(0.0, 1.0); 3]).is_err());
        let neg: Vec<(f64, f64)> = (0..6).map(|i| (i as f64, -1.0)).collect();
        assert!(fit_lorentzian(&neg).is_err());
    }
}
