//! Cross-module identity suite behind `resum verify`.

use crate::commands::Output;
use crate::spec::KernelSpec;
use crate::{Global, Status};
use anyhow::Result;
use resum_core::kernels::{gevrey_kernel, moment_sequence, rescale_kernel};
use resum_core::sequences::{equivalence_check, generate};
use resum_core::summation::kernel_independence;
use resum_core::transforms::{borel_path, formal_borel, laplace_ray, reproducing_check};
use resum_core::{
    Complex64, FormalSeries, Kernel, MomentSequence, PathSpec, SequenceFamily, SurfacePoint,
};
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::time::Instant;

struct Check {
    name: &'static str,
    /// `None` when the check does not apply to the kernel.
    passed: Option<bool>,
    detail: String,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

fn worst_of(name: &'static str, tol: f64, f: impl FnOnce() -> Result<f64>) -> Check {
    match f() {
        Ok(w) => Check {
            name,
            passed: Some(w <= tol),
            detail: format!("max deviation {w:.3e} (limit {tol:.0e})"),
        },
        Err(e) => Check {
            name,
            passed: Some(false),
            detail: format!("error: {e:#}"),
        },
    }
}

/// Rays used by the transform checks, kept inside the kernel's sector.
fn rays(kernel: &Kernel) -> [f64; 3] {
    let a = (kernel.omega() * PI / 4.0).min(PI / 4.0);
    [-a, 0.0, a]
}

pub fn run_verify(g: &Global, kernel_spec: &str, inject: bool, budget: f64) -> Result<Status> {
    let start = Instant::now();
    let kernel = KernelSpec::resolve(kernel_spec)?.build()?;
    let table = moment_sequence(&kernel, 24, 1e-12)?;
    let moments = if inject {
        let wrong = (0..=table.depth())
            .map(|p| table.value(p) * (1.0 + 0.01 * p as f64))
            .collect();
        MomentSequence::from_values(wrong, "injected")?
    } else {
        table
    };
    let tol = g.tol.max(1e-12);
    let mut checks = Vec::new();

    checks.push(worst_of("moments-vs-quadrature", 1e-8, || {
        let mut w = 0.0f64;
        for p in 0..=20 {
            let q = kernel.moment_by_quadrature(c(p as f64), 1e-12)?;
            w = w.max((q.value.re - moments.value(p)).abs() / moments.value(p));
        }
        Ok(w)
    }));
    checks.push(worst_of("laplace-monomials", 1e-7, || {
        let mut w = 0.0f64;
        for tau in rays(&kernel) {
            let z = Complex64::from_polar(0.5, tau);
            for p in 0..=8 {
                let l = laplace_ray(
                    |u: SurfacePoint| u.to_complex().powi(p),
                    &kernel,
                    tau,
                    z,
                    tol,
                )?;
                w = w.max(rel(l.value, moments.value(p as usize) * z.powi(p)));
            }
        }
        Ok(w)
    }));
    checks.push(worst_of("borel-monomials", 1e-7, || {
        let mut w = 0.0f64;
        for tau in rays(&kernel) {
            let path = PathSpec::for_kernel(&kernel, tau, 1.0)?;
            let u = Complex64::from_polar(0.8, tau);
            for p in 0..=8 {
                let b = borel_path(
                    |z: SurfacePoint| z.to_complex().powi(p),
                    &kernel,
                    &path,
                    u,
                    tol,
                )?;
                w = w.max(rel(b.value, u.powi(p) / moments.value(p as usize)));
            }
        }
        Ok(w)
    }));
    checks.push(worst_of("formal-round-trip", 1e-7, || {
        let f = FormalSeries::from_real(&[1.0; 9], "1+z+...+z^8")?;
        let b = formal_borel(&f, &moments)?;
        let z = c(0.1);
        let back = laplace_ray(
            |u: SurfacePoint| b.eval(u.to_complex()),
            &kernel,
            0.0,
            z,
            tol,
        )?;
        Ok(rel(back.value, f.eval(z)))
    }));
    checks.push(worst_of("analytic-round-trip", 1e-6, || {
        let path = PathSpec::for_kernel(&kernel, 0.0, 0.5)?;
        let f = |z: SurfacePoint| 1.0 / (1.0 - z.to_complex());
        let g = |u: SurfacePoint| {
            borel_path(f, &kernel, &path, u.to_complex(), 1e-9)
                .map_or(Complex64::new(f64::NAN, 0.0), |q| q.value)
        };
        let z = c(0.05);
        let back = laplace_ray(g, &kernel, 0.0, z, 1e-9)?;
        Ok((back.value - 1.0 / (1.0 - z)).norm())
    }));
    checks.push(worst_of("reproducing-formula", 1e-8, || {
        Ok(reproducing_check(&kernel, c(0.2), c(1.0), 1e-11)?)
    }));

    // Only kernels whose moments match Γ(1+ωp) up to geometric factors are
    // compared with the rescaled Gevrey kernel of the same index.
    let omega = kernel.omega();
    let gevrey = generate(&SequenceFamily::gevrey(omega), 60)?;
    let equivalent = moment_sequence(&kernel, 60, 1e-10)
        .and_then(|m| m.to_table())
        .and_then(|t| equivalence_check(&gevrey, &t))
        .map(|r| r.equivalent)
        .unwrap_or(false);
    if equivalent {
        checks.push(worst_of("kernel-independence", 1e-6, || {
            let other = rescale_kernel(&gevrey_kernel(omega / 2.0)?, 2.0)?;
            let law = MomentSequence::from_law(
                &resum_core::MomentLaw::Gamma {
                    alpha: omega,
                    beta: 1.0,
                },
                30,
                "gamma(1+wp)",
            );
            let coeffs: Vec<Complex64> = (0..=30)
                .map(|p| c(if p % 2 == 0 { 1.0 } else { -1.0 } * law.value(p)))
                .collect();
            let series = FormalSeries::new(coeffs, "alternating moments")?;
            let pts = [c(0.05), c(0.1), c(0.2)];
            Ok(kernel_independence(
                &series, &kernel, &other, 0.0, &pts, 1e-12,
            )?)
        }));
    } else {
        checks.push(Check {
            name: "kernel-independence",
            passed: None,
            detail: format!("skipped: moments not equivalent to Gevrey({omega})"),
        });
    }

    let elapsed = start.elapsed().as_secs_f64();
    checks.push(Check {
        name: "runtime-budget",
        passed: Some(elapsed <= budget),
        detail: format!("{elapsed:.2} s of {budget} s"),
    });

    let mut csv = String::from("check,status,detail\n");
    let mut text = format!("kernel: {}\nmoments: {}\n", kernel.tag(), moments.source());
    let mut all = true;
    for ch in &checks {
        let status = match ch.passed {
            Some(true) => "pass",
            Some(false) => "fail",
            None => "skip",
        };
        all &= ch.passed != Some(false);
        writeln!(
            csv,
            "{},{status},\"{}\"",
            ch.name,
            ch.detail.replace('"', "'")
        )?;
        writeln!(text, "{status:4} {}: {}", ch.name, ch.detail)?;
    }
    let out = Output::new(g)?;
    out.write("verify.txt", &text)?;
    out.write("verify.csv", &csv)?;
    Ok(if all {
        Status::Success
    } else {
        Status::VerdictFailed
    })
}
