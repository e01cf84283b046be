//! Gamma-function helpers.
//!
//! Real arguments delegate to `statrs`; complex arguments use a Lanczos
//! approximation (g = 7, nine terms) with reflection.

use num_complex::Complex64;
use std::f64::consts::PI;

/// Γ(x) for real x; exact products at small positive integers.
pub fn gamma(x: f64) -> f64 {
    if x >= 1.0 && x <= 171.0 && x == x.round() {
        return (2..x as u32).fold(1.0, |acc, k| acc * k as f64);
    }
    statrs::function::gamma::gamma(x)
}

/// ln Γ(x) for real x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// 1/Γ(x), exactly zero at the non-positive integers.
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.round() {
        return 0.0;
    }
    if x > 170.0 {
        return (-ln_gamma(x)).exp();
    }
    1.0 / gamma(x)
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln Γ(z) for complex z (any branch; intended for exponentiation).
pub fn ln_gamma_c(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Γ(z)Γ(1-z) = π / sin(πz)
        let s = (z * PI).sin();
        return Complex64::new(PI.ln(), 0.0) - s.ln() - ln_gamma_c(1.0 - z);
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        x += *c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

/// Γ(z) for complex z. Real arguments are routed through the real routine.
pub fn gamma_c(z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        return Complex64::new(gamma(z.re), 0.0);
    }
    ln_gamma_c(z).exp()
}
