//! The companion entire function `E(z) = Σ zⁿ/m_e(n)`.
//!
//! Two routes are available. The power series is summed until a ratio-test
//! tail bound is negligible; its error also accounts for cancellation.
//! For moment laws `Γ(αλ+β)/Γ(β)` with `0 < α < 2` the large-argument
//! Mittag-Leffler expansion
//! `E_{α,β}(z) = (1/α) Σ_j t_j^{1−β} e^{t_j} − Σ_k z^{−k}/Γ(β−αk)`
//! is tried as well, with `t_j = |z|^{1/α} e^{i(arg z + 2πj)/α}` over the
//! branches with `arg t_j ∈ (−π, π]`.

use super::{Kernel, KernelKind, MomentLaw};
use crate::error::{Error, Result};
use crate::special::{gamma, rgamma};
use num_complex::Complex64;
use std::f64::consts::PI;

const MAX_SERIES_TERMS: usize = 20_000;
const MAX_ASYMPTOTIC_TERMS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ERoute {
    Series { terms: usize },
    Asymptotic { terms: usize },
}

/// A value of `E` with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EValue {
    pub value: Complex64,
    pub error: f64,
    pub route: ERoute,
}

impl EValue {
    pub fn relative_error(&self) -> f64 {
        self.error / self.value.norm()
    }
}

pub(super) fn best(kernel: &Kernel, z: Complex64) -> Result<EValue> {
    let law = match kernel.law() {
        Some(MomentLaw::Gamma { alpha, beta }) if *alpha < 2.0 => Some((*alpha, *beta)),
        _ => None,
    };
    // Far out the series needs many terms; an expansion already at full
    // precision is taken without summing it.
    if let Some((alpha, beta)) = law.filter(|_| z.norm() > 8.0) {
        if let Some(a) = asymptotic(alpha, beta, z) {
            if a.error <= 1e-15 * a.value.norm() {
                return Ok(a);
            }
        }
    }
    let series = series(kernel, z);
    if let Some(s) = &series {
        if s.error <= 1e-15 * s.value.norm() {
            return Ok(*s);
        }
    }
    let asymptotic = law.and_then(|(alpha, beta)| asymptotic(alpha, beta, z));
    match (series, asymptotic) {
        (Some(s), Some(a)) => Ok(if a.relative_error() < s.relative_error() {
            a
        } else {
            s
        }),
        (Some(v), None) | (None, Some(v)) => Ok(v),
        (None, None) => Err(Error::depth(format!(
            "tail of E-series unavailable at |z| = {:.4e} for {}",
            z.norm(),
            kernel.tag()
        ))),
    }
}

fn series(kernel: &Kernel, z: Complex64) -> Option<EValue> {
    let r = z.norm();
    if r == 0.0 {
        return Some(EValue {
            value: Complex64::new(1.0, 0.0),
            error: 0.0,
            route: ERoute::Series { terms: 1 },
        });
    }
    let (lr, th) = (r.ln(), z.arg());
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    let mut lm = kernel.series_log_moment(0)?;
    for n in 0..MAX_SERIES_TERMS {
        let lt = n as f64 * lr - lm;
        if lt > 700.0 {
            return None;
        }
        let mag = lt.exp();
        sum += Complex64::from_polar(mag, n as f64 * th);
        abs_sum += mag;
        let next = kernel.series_log_moment(n + 1)?;
        // Quotients of log-convex moments never decrease, so the tail is
        // dominated by a geometric series with this ratio.
        let ratio = (lr - (next - lm)).exp();
        if ratio < 0.5 {
            let tail = mag * ratio / (1.0 - ratio);
            let rounding = 2.0 * f64::EPSILON * abs_sum;
            if tail <= 1e-3 * rounding.max(1e-17 * sum.norm()) || tail == 0.0 {
                return Some(EValue {
                    value: sum,
                    error: tail + rounding,
                    route: ERoute::Series { terms: n + 1 },
                });
            }
        }
        lm = next;
    }
    None
}

/// Mittag-Leffler expansion of `Γ(β) E_{α,β}(z)`, the `E` of the law
/// `Γ(αλ+β)/Γ(β)`.
fn asymptotic(alpha: f64, beta: f64, z: Complex64) -> Option<EValue> {
    let r = z.norm();
    if r < 1.0 {
        return None;
    }
    let th = z.arg();
    let tr = r.powf(1.0 / alpha);
    let ltr = tr.ln();
    let mut expo = Complex64::new(0.0, 0.0);
    for j in -1..=1 {
        let a = (th + 2.0 * PI * j as f64) / alpha;
        if a > -PI && a <= PI {
            let log_mag = (1.0 - beta) * ltr + tr * a.cos();
            if log_mag > 700.0 {
                return None;
            }
            expo += Complex64::from_polar(log_mag.exp(), (1.0 - beta) * a + tr * a.sin()) / alpha;
        }
    }
    // With α = 1 and integer β the algebraic part terminates and the formula
    // is exact; otherwise exponentially small terms switch on across Stokes
    // lines and are counted as error.
    let exact_branch = alpha == 1.0 && beta.fract() == 0.0;
    let stokes = if exact_branch {
        0.0
    } else {
        ((1.0 - beta) * ltr - tr).exp() / alpha
    };
    let inv = z.inv();
    let mut power = Complex64::new(1.0, 0.0);
    let mut algebraic = Complex64::new(0.0, 0.0);
    let mut previous = f64::INFINITY;
    let mut truncation = 0.0;
    let mut terms = 0;
    let k_max = MAX_ASYMPTOTIC_TERMS.min((170.0 / alpha) as usize);
    for k in 1..=k_max {
        power *= inv;
        let c = rgamma(beta - alpha * k as f64);
        if c == 0.0 {
            continue;
        }
        let term = power * c;
        let mag = term.norm();
        if mag > previous {
            truncation = previous;
            break;
        }
        algebraic -= term;
        previous = mag;
        truncation = mag;
        terms = k;
        if mag <= 1e-3 * f64::EPSILON * (expo.norm() + algebraic.norm()) {
            break;
        }
    }
    let value = (expo + algebraic) * gamma(beta);
    let rounding = 4.0 * f64::EPSILON * (expo.norm() + algebraic.norm());
    let error = (truncation + stokes + rounding) * gamma(beta);
    Some(EValue {
        value,
        error,
        route: ERoute::Asymptotic { terms },
    })
}

/// `E` of the kernel; for a rescaled kernel with `ω ≥ 2` this is the `E`
/// of its base kernel, which is the function used by the Borel transform.
pub fn e_eval(kernel: &Kernel, z: Complex64, tol: f64) -> Result<Complex64> {
    if let KernelKind::Rescaled { base, .. } = kernel.kind() {
        if kernel.omega() >= 2.0 {
            return e_eval(base, z, tol);
        }
    }
    kernel.entire_e(z, tol).map(|v| v.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{custom_kernel, gevrey_kernel, rescale_kernel, SurfaceFn, SurfacePoint};
    use proptest::prelude::*;
    use std::sync::Arc;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn first_kernel_gives_exponential() {
        let k = gevrey_kernel(1.0).unwrap();
        let v = e_eval(&k, c(1.0, 0.0), 1e-14).unwrap();
        assert!((v.re - std::f64::consts::E).abs() < 1e-14);
        assert_eq!(e_eval(&k, c(0.0, 0.0), 1e-14).unwrap(), c(1.0, 0.0));
        for &z in &[c(-40.0, 0.0), c(-300.0, 5.0), c(12.0, -30.0), c(600.0, 0.0)] {
            let v = k.entire_e(z, 1e-12).unwrap();
            let exact = if z.re > 700.0 { None } else { Some(z.exp()) };
            if let Some(e) = exact {
                assert!((v.value - e).norm() <= 1e-12 * e.norm(), "z = {z}");
            }
        }
    }

    #[test]
    fn half_kernel_matches_closed_form() {
        // E_{1/2}(x) = exp(x²) erfc(−x)
        let k = gevrey_kernel(0.5).unwrap();
        for &x in &[-6.0f64, -2.5, 0.7, 3.0] {
            let exact = (x * x).exp() * statrs::function::erf::erfc(-x);
            let v = k.entire_e(c(x, 0.0), 1e-7).unwrap();
            assert!(
                (v.value.re - exact).abs() <= 1e-7 * exact,
                "x = {x}: {} vs {exact}",
                v.value.re
            );
        }
        // Far on the negative axis E_{1/2}(−x) ≈ 1/(x√π).
        let v = k.entire_e(c(-1e3, 0.0), 1e-10).unwrap();
        let lead = 1.0 / (1e3 * PI.sqrt());
        assert!((v.value.re / lead - 1.0).abs() < 1e-6);
    }

    #[test]
    fn shifted_law_uses_both_routes() {
        // moments Γ(p + 3/2)/Γ(3/2): E(w) = Γ(3/2) Σ wⁿ/Γ(n + 3/2)
        let e: SurfaceFn =
            Arc::new(|z: SurfacePoint| z.powf(1.5).to_complex() * (-z.to_complex()).exp());
        let k = custom_kernel(
            "shifted",
            e,
            1.0,
            Some(MomentLaw::Gamma {
                alpha: 1.0,
                beta: 1.5,
            }),
        )
        .unwrap();
        let small = k.entire_e(c(0.3, 0.4), 1e-13).unwrap();
        assert!(matches!(small.route, ERoute::Series { .. }));
        let far = k.entire_e(c(-60.0, 1.0), 1e-10).unwrap();
        assert!(matches!(far.route, ERoute::Asymptotic { .. }));
        // leading behaviour −Γ(3/2)/(wΓ(1/2)) = −1/(2w)
        let lead = -1.0 / (2.0 * c(-60.0, 1.0));
        assert!((far.value / lead - 1.0).norm() < 0.05);
    }

    #[test]
    fn rescaled_kernel_with_large_omega_uses_base() {
        let g = gevrey_kernel(1.0).unwrap();
        let r = rescale_kernel(&g, 2.0).unwrap();
        let z = c(0.5, 0.2);
        assert_eq!(e_eval(&r, z, 1e-12).unwrap(), e_eval(&g, z, 1e-12).unwrap());
        // its own E is Σ zⁿ/(2n)! = cosh √z
        let own = r.entire_e(z, 1e-13).unwrap().value;
        assert!((own - z.sqrt().cosh()).norm() < 1e-13);
    }

    proptest! {
        #[test]
        fn positive_on_positive_axis(alpha in 0.3f64..3.0, x in 0.0f64..5.0) {
            let k = gevrey_kernel(alpha).unwrap();
            let v = k.entire_e_best(c(x, 0.0)).unwrap();
            prop_assert!(v.value.re > 0.0);
            prop_assert!(v.value.im.abs() <= 1e-12 * v.value.re);
        }
    }
}
