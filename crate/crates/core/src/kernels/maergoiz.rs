//! Sampled checks of the properties required of a function `V` used to
//! build the kernel `(1/ω) z exp(−V(z))`.

use super::{SurfaceFn, SurfacePoint};
use crate::envelope::log_space;
use crate::error::{Error, Result};

/// Outcome of one sampled property.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> PropertyCheck {
    PropertyCheck {
        name,
        passed,
        detail,
    }
}

fn real_values(v: &SurfaceFn, radii: &[f64]) -> Vec<f64> {
    radii
        .iter()
        .map(|&r| v(SurfacePoint::new(r, 0.0)).re)
        .collect()
}

/// Hard screening on the positive axis: finite, non-negative, and
/// increasing once `r ≥ 10`.
pub(super) fn screen_real_axis(v: &SurfaceFn) -> Result<()> {
    let radii = log_space(1e-4, 1e4, 161);
    let values = real_values(v, &radii);
    for (r, x) in radii.iter().zip(&values) {
        if !(x.is_finite() && *x >= 0.0) {
            return Err(Error::param(format!(
                "V({r:e}) = {x} is not a non-negative real"
            )));
        }
    }
    for i in 1..radii.len() {
        if radii[i - 1] >= 10.0 && values[i] <= values[i - 1] {
            return Err(Error::param(format!(
                "V is not increasing on the positive axis near r = {:e}",
                radii[i]
            )));
        }
    }
    Ok(())
}

/// Samples properties (i)–(vi) of a `V`-function for growth index `omega`,
/// i.e. order `ρ = 1/ω` on the sector `S_{2ω}`.
pub fn v_properties(v: &SurfaceFn, omega: f64) -> Vec<PropertyCheck> {
    let rho = 1.0 / omega;
    let half_opening = omega * std::f64::consts::FRAC_PI_2;
    let mut out = Vec::new();

    // (i) V(zr)/V(r) → z^ρ locally uniformly.
    let zs: Vec<SurfacePoint> = [-0.5, 0.0, 0.5]
        .iter()
        .flat_map(|&f| [0.5, 2.0].map(|m| SurfacePoint::new(m, f * half_opening)))
        .collect();
    let deviation = |r: f64| {
        let vr = v(SurfacePoint::new(r, 0.0));
        zs.iter()
            .map(|z| {
                let target = z.powf(rho).to_complex();
                (v(z.mul(SurfacePoint::new(r, 0.0))) / vr - target).norm() / target.norm()
            })
            .fold(0.0, f64::max)
    };
    let (d2, d4) = (deviation(1e2), deviation(1e4));
    out.push(check(
        "(i)",
        d4 <= 0.05 && d4 <= d2 + 1e-9,
        format!("max |V(zr)/V(r) − z^ρ|/|z^ρ|: {d2:.3e} at r = 1e2, {d4:.3e} at r = 1e4"),
    ));

    // (ii) conjugate symmetry.
    let sym = log_space(1e-2, 1e3, 12)
        .iter()
        .flat_map(|&r| [0.3, 0.9].map(|f| SurfacePoint::new(r, f * 2.0 * half_opening)))
        .map(|z| {
            let a = v(z);
            let b = v(SurfacePoint::new(z.modulus, -z.arg)).conj();
            (a - b).norm() / a.norm().max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max);
    out.push(check(
        "(ii)",
        sym <= 1e-10,
        format!("max conjugation defect {sym:.3e}"),
    ));

    // (iii) positive, increasing, V(0+) = 0.
    let radii = log_space(1e-6, 1e4, 201);
    let values = real_values(v, &radii);
    let positive = values.iter().all(|x| *x > 0.0);
    let first_drop = (1..radii.len()).find(|&i| values[i] <= values[i - 1]);
    let at_zero = values[0];
    out.push(check(
        "(iii)",
        positive && first_drop.is_none() && at_zero < 1e-2 * values[100],
        match first_drop {
            Some(i) => format!("V decreases near r = {:.3e}", radii[i]),
            None => format!("V(1e-6) = {at_zero:.3e}, V(1) = {:.3e}", values[100]),
        },
    ));

    // (iv) t ↦ V(e^t) strictly convex: radii are equally spaced in log r.
    let convex_fail =
        (1..radii.len() - 1).find(|&i| values[i + 1] - 2.0 * values[i] + values[i - 1] <= 0.0);
    out.push(check(
        "(iv)",
        convex_fail.is_none(),
        match convex_fail {
            Some(i) => format!("V(e^t) not convex near r = {:.3e}", radii[i]),
            None => "second differences in log r positive".into(),
        },
    ));

    // (v) log V strictly concave in r.
    let concave_fail = (1..radii.len() - 1).find(|&i| {
        let (r0, r1, r2) = (radii[i - 1], radii[i], radii[i + 1]);
        let (l0, l1, l2) = (values[i - 1].ln(), values[i].ln(), values[i + 1].ln());
        let s1 = (l1 - l0) / (r1 - r0);
        let s2 = (l2 - l1) / (r2 - r1);
        !(s2 < s1)
    });
    out.push(check(
        "(v)",
        concave_fail.is_none(),
        match concave_fail {
            Some(i) => format!("log V not concave near r = {:.3e}", radii[i]),
            None => "slopes of log V decrease".into(),
        },
    ));

    // (vi) ρ₀(r) = log V(r)/log r is a proximate order with limit ρ.
    let rho0 = |r: f64| v(SurfacePoint::new(r, 0.0)).re.ln() / r.ln();
    let drift = |r: f64| {
        let h = 1e-3;
        let d = (rho0(r * (1.0 + h)) - rho0(r * (1.0 - h))) / (2.0 * h);
        (d * r.ln()).abs()
    };
    let (lim, w6, w8) = (rho0(1e8), drift(1e6), drift(1e8));
    out.push(check(
        "(vi)",
        (lim - rho).abs() <= 0.05 * rho && w8 <= w6 + 1e-9 && w8 < 0.05,
        format!(
            "ρ₀(1e8) = {lim:.5}, target {rho:.5}; r ρ₀' log r: {w6:.3e} at 1e6, {w8:.3e} at 1e8"
        ),
    ));
    out
}
