//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line
//! with its runtime; the test fails if any criterion fails or overruns its
//! time budget.

use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use resum_core::kernels::{
    classical_kernel, custom_kernel, gevrey_kernel, moment_equivalence, validate_kernel, SurfaceFn,
    ValidationGrids,
};
use resum_core::mpde::{
    formal_solution_single, growth_classify, summability_2var_check, Classification, Symbol,
};
use resum_core::sequences::{check_axiom, generate, quotient_bounds, Axiom};
use resum_core::summation::{kernel_independence, m_sum};
use resum_core::transforms::{
    borel_path, formal_borel, formal_laplace, integral_bound_fit, laplace_ray,
};
use resum_core::{
    Complex64, ContinuationMethod, FormalSeries, GrowthMaps, MomentLaw, MomentSequence, PathSpec,
    SequenceFamily, SurfacePoint,
};
use std::f64::consts::PI;
use std::sync::Arc;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

/// `Γ(1 + p/2)` by the recurrences from `Γ(1) = 1` and `Γ(1/2) = √π`.
fn gamma_half_step(p: usize) -> f64 {
    if p % 2 == 0 {
        (1..=p / 2).map(|i| i as f64).product()
    } else {
        let k = (p + 1) / 2;
        PI.sqrt() * (0..k).map(|i| i as f64 + 0.5).product::<f64>()
    }
}

fn factorial(p: usize) -> f64 {
    (1..=p).map(|i| i as f64).product()
}

fn euler_oracle(z: f64) -> f64 {
    // Simpson on ∫₀^60 e^{−t}/(1+zt) dt; the tail is below e^{−60}.
    let n = 60_000;
    let h = 60.0 / n as f64;
    let g = |t: f64| (-t).exp() / (1.0 + z * t);
    let mut s = g(0.0) + g(60.0);
    for i in 1..n {
        s += g(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

fn moments_vs_gamma() -> Outcome {
    let mut worst = 0.0f64;
    for alpha in [0.5, 1.0, 2.0] {
        let k = gevrey_kernel(alpha).map_err(|e| e.to_string())?;
        for p in 0..=20usize {
            let q = k
                .moment_by_quadrature(c(p as f64, 0.0), 1e-12)
                .map_err(|e| e.to_string())?;
            let exact = match alpha {
                a if a == 0.5 => gamma_half_step(p),
                a if a == 1.0 => factorial(p),
                _ => factorial(2 * p),
            };
            worst = worst.max((q.value.re - exact).abs() / exact);
        }
    }
    ensure(worst < 1e-8, format!("max relative error {worst:.3e}"))
}

fn monomial_identities() -> Outcome {
    let k = gevrey_kernel(1.0).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for tau in [-PI / 4.0, 0.0, PI / 4.0] {
        let z = Complex64::from_polar(0.5, tau);
        let u = Complex64::from_polar(0.8, tau);
        let path = PathSpec::for_kernel(&k, tau, 1.0).map_err(|e| e.to_string())?;
        for p in 0..=8i32 {
            let mono = move |w: SurfacePoint| w.to_complex().powi(p);
            let l = laplace_ray(mono, &k, tau, z, 1e-12).map_err(|e| e.to_string())?;
            worst = worst.max(rel(l.value, factorial(p as usize) * z.powi(p)));
            let b = borel_path(mono, &k, &path, u, 1e-12).map_err(|e| e.to_string())?;
            worst = worst.max(rel(b.value, u.powi(p) / factorial(p as usize)));
        }
    }
    ensure(worst < 1e-7, format!("max relative error {worst:.3e}"))
}

fn round_trip() -> Outcome {
    let k = gevrey_kernel(1.0).map_err(|e| e.to_string())?;
    let f = |z: SurfacePoint| 1.0 / (1.0 - z.to_complex());
    let points = [
        c(0.05, 0.0),
        c(0.1, 0.0),
        Complex64::from_polar(0.08, 0.4),
        Complex64::from_polar(0.1, -0.6),
        Complex64::from_polar(0.03, 1.0),
    ];
    let errors = points
        .par_iter()
        .map(|&z| {
            let tau = z.arg();
            let path = PathSpec::for_kernel(&k, tau, 0.5).map_err(|e| e.to_string())?;
            let g = |u: SurfacePoint| {
                borel_path(f, &k, &path, u.to_complex(), 1e-9)
                    .map(|q| q.value)
                    .unwrap_or(c(f64::NAN, f64::NAN))
            };
            let back = laplace_ray(g, &k, tau, z, 1e-9).map_err(|e| e.to_string())?;
            Ok((back.value - 1.0 / (1.0 - z)).norm())
        })
        .collect::<Result<Vec<f64>, String>>()?;
    let worst = errors.into_iter().fold(0.0, f64::max);
    ensure(worst < 1e-6, format!("max absolute error {worst:.3e}"))
}

fn euler_resummation() -> Outcome {
    let k = classical_kernel(1.0).map_err(|e| e.to_string())?;
    let series = resum_core::summation::euler_series(20);
    let pts = [c(0.05, 0.0), c(0.1, 0.0), c(0.2, 0.0)];
    let (values, report) = m_sum(
        &series,
        &k,
        0.0,
        &ContinuationMethod::near_diagonal(&series),
        &pts,
        1e-12,
    )
    .map_err(|e| e.to_string())?;
    let worst = values
        .iter()
        .map(|v| (v.value - euler_oracle(v.z.re)).norm())
        .fold(0.0, f64::max);
    let at = values[1].value.re;
    ensure(
        report.certified() && worst < 1e-6 && (at - 0.915633).abs() < 1e-6,
        format!(
            "max error {worst:.3e}, sum at 0.1 = {at:.8}, certified = {}",
            report.certified()
        ),
    )
}

fn kernel_independence_check() -> Outcome {
    let a = classical_kernel(1.0).map_err(|e| e.to_string())?;
    let e: SurfaceFn =
        Arc::new(|z: SurfacePoint| z.powf(1.5).to_complex() * (-z.to_complex()).exp());
    let b = custom_kernel(
        "z^1.5 e^-z",
        e,
        1.0,
        Some(MomentLaw::Gamma {
            alpha: 1.0,
            beta: 1.5,
        }),
    )
    .map_err(|e| e.to_string())?;
    let table = generate(&SequenceFamily::gevrey(1.0), 400).map_err(|e| e.to_string())?;
    let grids = ValidationGrids::default();
    let (va, vb) = (
        validate_kernel(&a, &table, &grids),
        validate_kernel(&b, &table, &grids),
    );
    let equivalent = moment_equivalence(&b, &table, 60)
        .map_err(|e| e.to_string())?
        .equivalent;
    let series = resum_core::summation::euler_series(30);
    let pts = [c(0.05, 0.0), c(0.1, 0.0), c(0.2, 0.0)];
    let dev = kernel_independence(&series, &a, &b, 0.0, &pts, 1e-12).map_err(|e| e.to_string())?;
    ensure(
        va.passed() && vb.passed() && equivalent && dev < 1e-6,
        format!(
            "deviation {dev:.3e}, validated = ({}, {}), equivalent moments = {equivalent}",
            va.passed(),
            vb.passed()
        ),
    )
}

fn h_brute_force() -> Outcome {
    let families = [
        SequenceFamily::gevrey(1.0),
        SequenceFamily::gevrey(0.5),
        SequenceFamily::GevreyLog {
            alpha: 1.0,
            beta: 1.0,
        },
        SequenceFamily::QPower { q: 1.05 },
    ];
    let n = 200;
    let mut worst = 0.0f64;
    for fam in &families {
        let table = generate(fam, n).map_err(|e| e.to_string())?;
        let maps = GrowthMaps::new(table.clone());
        // t from 1/m_{N−2} up to 10
        let lo = (1.0 / table.quotient(n - 2)).ln();
        let hi = 10f64.ln();
        for i in 0..100 {
            let t = (lo + (hi - lo) * i as f64 / 99.0).exp();
            let fast = maps.log_h(t).map_err(|e| e.to_string())?;
            // q^{p²} overflows f64 within the table, so the minimum is taken
            // over logarithms.
            let brute = (0..=n)
                .map(|p| table.log_value(p) + p as f64 * t.ln())
                .fold(f64::INFINITY, f64::min);
            worst = worst.max((fast - brute).exp_m1().abs());
        }
    }
    ensure(
        worst < 1e-12,
        format!("max relative error {worst:.3e} over four families"),
    )
}

fn omega_recovery() -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for alpha in [0.5, 1.0, 2.0] {
        let t = generate(&SequenceFamily::gevrey(alpha), 400).map_err(|e| e.to_string())?;
        let w = GrowthMaps::new(t)
            .order_and_omega()
            .map_err(|e| e.to_string())?
            .omega;
        ok &= (w - alpha).abs() <= 0.05;
        detail.push(format!("α = {alpha}: ω ≈ {w:.4}"));
    }
    let sq = SequenceFamily::product(SequenceFamily::gevrey(1.0), SequenceFamily::gevrey(1.0));
    let t = generate(&sq, 400).map_err(|e| e.to_string())?;
    let w = GrowthMaps::new(t)
        .order_and_omega()
        .map_err(|e| e.to_string())?
        .omega;
    ok &= (w - 2.0).abs() <= 0.1;
    detail.push(format!("Gevrey(1)²: ω ≈ {w:.4}"));
    ensure(ok, detail.join(", "))
}

fn proximate_order() -> Outcome {
    let t = generate(&SequenceFamily::gevrey(1.0), 400).map_err(|e| e.to_string())?;
    let diag = GrowthMaps::new(t).proximate_order_diagnostic(0.05);
    let tail = diag
        .criterion3
        .iter()
        .skip(300)
        .map(|(_, v)| *v)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    ensure(
        (tail.0 - 1.0).abs() <= 0.05 && (tail.1 - 1.0).abs() <= 0.05,
        format!("tail of (p+1)/M(m_p) in [{:.4}, {:.4}]", tail.0, tail.1),
    )
}

fn formal_pair() -> Outcome {
    let mut rng = rand::rngs::StdRng::seed_from_u64(0x5eed);
    let moments = [
        MomentSequence::factorial(40),
        MomentSequence::from_law(
            &MomentLaw::Gamma {
                alpha: 0.5,
                beta: 1.0,
            },
            40,
            "gamma(1+p/2)",
        ),
        MomentSequence::from_law(
            &MomentLaw::Gamma {
                alpha: 2.0,
                beta: 1.0,
            },
            40,
            "gamma(1+2p)",
        ),
    ];
    let mut mismatches = 0;
    for i in 0..1000 {
        let n = rng.gen_range(0..=40);
        let coeffs: Vec<Complex64> = (0..=n)
            .map(|_| c(rng.gen_range(-1e3..1e3), rng.gen_range(-1e3..1e3)))
            .collect();
        let s = FormalSeries::new(coeffs, "random").map_err(|e| e.to_string())?;
        let m = &moments[i % moments.len()];
        let back = formal_laplace(&formal_borel(&s, m).map_err(|e| e.to_string())?, m)
            .map_err(|e| e.to_string())?;
        let bitwise = back
            .coefficients()
            .iter()
            .zip(s.coefficients())
            .all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits());
        if !bitwise || back.degree() != s.degree() {
            mismatches += 1;
        }
    }
    ensure(
        mismatches == 0,
        format!("{mismatches} of 1000 random series differ"),
    )
}

fn heat_benchmark() -> Outcome {
    let m = MomentSequence::factorial(140);
    let sq = Symbol::real_polynomial(&[0.0, 0.0, 1.0]).map_err(|e| e.to_string())?;
    let phi = FormalSeries::from_real(&vec![1.0; 101], "1/(1-z)").map_err(|e| e.to_string())?;
    let sol =
        formal_solution_single(1, &sq, &phi, &m, &m, 40, 20, 0.1).map_err(|e| e.to_string())?;
    let exact = (0..=15u64).all(|j| {
        let oracle: u128 = ((j + 1)..=2 * j).map(u128::from).product();
        let v = sol.u(j as usize).coefficient(0);
        v.im == 0.0 && v.re.fract() == 0.0 && v.re as u128 == oracle
    });
    let r = growth_classify(&sol, &m, &m, 2.0, Some(&m)).map_err(|e| e.to_string())?;
    let a0 = r.lower.as_ref().map_or(f64::NAN, |w| w.a);
    // (2j)! ≤ 4^j j!² checked directly on the central binomials
    let witness = (1..=40usize).all(|j| {
        (1..=j).map(|i| (j + i) as f64 / i as f64).product::<f64>() <= 4f64.powi(j as i32)
    });
    let xi = Symbol::real_polynomial(&[0.0, 1.0]).map_err(|e| e.to_string())?;
    let first =
        formal_solution_single(1, &xi, &phi, &m, &m, 30, 20, 0.1).map_err(|e| e.to_string())?;
    let conv = growth_classify(&first, &m, &m, 1.0, Some(&m)).map_err(|e| e.to_string())?;
    ensure(
        exact
            && r.verdict == Classification::DivergentSummabilityCandidate
            && a0 <= 4.0
            && witness
            && conv.verdict == Classification::Convergent,
        format!(
            "exact u_j(0) = {exact}, heat: {} with A0 = {a0:.4}, q = 1: {}",
            r.verdict.label(),
            conv.verdict.label()
        ),
    )
}

fn two_variable() -> Outcome {
    let m = MomentSequence::factorial(140);
    let sq = Symbol::real_polynomial(&[0.0, 0.0, 1.0]).map_err(|e| e.to_string())?;
    let phi = FormalSeries::from_real(&vec![1.0; 101], "1/(1-z)").map_err(|e| e.to_string())?;
    let sol =
        formal_solution_single(1, &sq, &phi, &m, &m, 40, 20, 0.1).map_err(|e| e.to_string())?;
    let along = summability_2var_check(&sol, &m, 0.0).map_err(|e| e.to_string())?;
    let across = summability_2var_check(&sol, &m, PI / 2.0).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for k in 1..=10 {
        let t = c(0.0, 0.1 * k as f64);
        let oracle = (1.0 - 4.0 * t).powf(-0.5);
        let v = across.origin_value(t).unwrap_or(c(f64::NAN, 0.0));
        worst = worst.max(rel(v, oracle));
    }
    ensure(
        !along.certified && across.certified && worst < 1e-6,
        format!(
            "d = 0 certified = {}, d = π/2 certified = {}, oracle deviation {worst:.3e}",
            along.certified, across.certified
        ),
    )
}

fn property_suite() -> Outcome {
    let g1 = generate(&SequenceFamily::gevrey(1.0), 400).map_err(|e| e.to_string())?;
    let orders: Vec<usize> = (1..=12).collect();
    let bound = integral_bound_fit(&g1, 1.0, &orders, 1e-10).map_err(|e| e.to_string())?;
    let families = [
        SequenceFamily::gevrey(0.5),
        SequenceFamily::gevrey(1.0),
        SequenceFamily::gevrey(2.0),
        SequenceFamily::GevreyLog {
            alpha: 1.0,
            beta: 1.0,
        },
        SequenceFamily::product(SequenceFamily::gevrey(1.0), SequenceFamily::gevrey(1.0)),
    ];
    let mut quotients_ok = true;
    for fam in &families {
        let t = generate(fam, 200).map_err(|e| e.to_string())?;
        let mu = check_axiom(&t, Axiom::ModerateGrowth).map_err(|e| e.to_string())?;
        let a = mu.witness.ok_or("moderate growth without a witness")?;
        quotients_ok &= mu.holds_to_depth && quotient_bounds(&t, a).holds;
    }
    let grid = resum_core::envelope::log_space(0.02, 1.0, 30);
    let rho = GrowthMaps::new(g1).rho_of_s(2.0, &grid, 100.0);
    ensure(
        bound.holds && quotients_ok && rho.is_ok(),
        format!(
            "integral bound C = {:.3e}, D = {:.3e}; quotient bounds = {quotients_ok}; ρ(2) = {}",
            bound.c,
            bound.d,
            rho.map_or("none".into(), |r| format!("{:.4}", r.rho))
        ),
    )
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome, u64); 12] = [
        ("moment-vs-gamma", moments_vs_gamma, 5),
        ("monomial identities", monomial_identities, 10),
        ("round trip", round_trip, 10),
        ("euler resummation", euler_resummation, 10),
        ("kernel independence", kernel_independence_check, 20),
        ("h brute force", h_brute_force, 1),
        ("omega recovery", omega_recovery, 2),
        ("proximate order", proximate_order, 2),
        ("formal inverse pair", formal_pair, 1),
        ("heat benchmark", heat_benchmark, 5),
        ("two-variable directions", two_variable, 5),
        ("property suite", property_suite, 10),
    ];
    let mut failed = Vec::new();
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(*budget);
        let (pass, detail) = match outcome {
            Ok(d) if !over => (true, d),
            Ok(d) => (false, format!("{d}; over budget of {budget} s")),
            Err(d) => (false, d),
        };
        println!(
            "{} {:>2} {name} ({:.2} s): {detail}",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64()
        );
        if !pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
