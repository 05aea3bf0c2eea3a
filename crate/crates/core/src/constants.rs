//! Physical constants in SI units (CODATA 2018 exact values where defined).

/// Reduced Planck constant (J·s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Planck constant (J·s).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Boltzmann constant (J/K).
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Elementary charge (C).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Magnetic flux quantum h/2e (Wb).
pub const FLUX_QUANTUM: f64 = PLANCK / (2.0 * ELEMENTARY_CHARGE);
/// Resistance quantum h/4e² (Ω).
pub const RESISTANCE_QUANTUM: f64 = PLANCK / (4.0 * ELEMENTARY_CHARGE * ELEMENTARY_CHARGE);
/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Bose–Einstein occupation `1/(exp(ħω/k_BT) − 1)`; zero at `T = 0`.
pub fn bose_occupation(omega: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 || omega == 0.0 {
        return if omega == 0.0 && temperature > 0.0 { f64::INFINITY } else { 0.0 };
    }
    1.0 / (HBAR * omega / (BOLTZMANN * temperature)).exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flux_quantum_value() {
        assert!((FLUX_QUANTUM - 2.067_833_848e-15).abs() < 1e-23);
        assert!((RESISTANCE_QUANTUM - 6453.2).abs() < 0.1);
    }

    #[test]
    fn bose_limits() {
        assert_eq!(bose_occupation(1e9, 0.0), 0.0);
        let w = 2.0 * std::f64::consts::PI * 4e6;
        let t = 0.1;
        let n = bose_occupation(w, t);
        assert!((n - BOLTZMANN * t / (HBAR * w)).abs() / n < 0.01);
    }
}
