//! The summation pipeline: coefficient class of the series, Borel
//! transform and its continuation along a ray, growth certificates, and the
//! Laplace integral that produces the sum.

mod pade;

pub use pade::Pade;

use crate::envelope::{fit_envelope, log_space, Envelope, EnvelopeFit, Sample};
use crate::error::{Error, Result, Stage};
use crate::kernels::{moment_sequence, Kernel, MomentSequence, SurfaceFn, SurfacePoint};
use crate::quad::Quadrature;
use crate::sequences::{tail_grows, GrowthMaps};
use crate::transforms::{
    formal_borel, growth_class_fit, laplace_ray, FormalSeries, GrowthFit, Sector,
};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

/// How the Borel transform is continued beyond its disc of convergence.
#[derive(Clone)]
pub enum ContinuationMethod {
    ClosedForm {
        name: String,
        g: SurfaceFn,
    },
    RationalApproximant {
        m: usize,
        n: usize,
    },
    /// The truncated Borel series itself.
    None,
}

impl fmt::Debug for ContinuationMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

impl ContinuationMethod {
    pub fn closed_form(
        name: &str,
        g: impl Fn(SurfacePoint) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        ContinuationMethod::ClosedForm {
            name: name.to_string(),
            g: Arc::new(g),
        }
    }

    /// Near-diagonal approximant using every coefficient of `series`.
    pub fn near_diagonal(series: &FormalSeries) -> Self {
        let d = series.degree();
        ContinuationMethod::RationalApproximant {
            m: d - d / 2,
            n: d / 2,
        }
    }

    pub fn tag(&self) -> String {
        match self {
            ContinuationMethod::ClosedForm { name, .. } => format!("closed:{name}"),
            ContinuationMethod::RationalApproximant { m, n } => format!("pade:{m},{n}"),
            ContinuationMethod::None => "none".into(),
        }
    }
}

/// Fit of `|a_p| ≤ C A^p m_e(p)`, i.e. `|f_p| ≤ C A^p p! m_e(p)` for the
/// factorial-normalized coefficients `f_p = p!·a_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientFit {
    /// `(|a_p|/m_e(p))^{1/p}` for `p ≥ 1`.
    pub ratio_roots: Vec<f64>,
    pub c: f64,
    pub a: f64,
    pub divergent: bool,
}

impl CoefficientFit {
    /// Radius of convergence suggested by the fit.
    pub fn borel_radius(&self) -> f64 {
        if self.divergent {
            0.0
        } else if self.a == 0.0 {
            f64::INFINITY
        } else {
            1.0 / self.a
        }
    }
}

pub fn coefficient_class(
    series: &FormalSeries,
    moments: &MomentSequence,
) -> Result<CoefficientFit> {
    let n = series.degree();
    if moments.depth() < n {
        return Err(Error::DepthMismatch {
            left: n,
            right: moments.depth(),
        });
    }
    let log_ratio: Vec<f64> = (0..=n)
        .map(|p| series.coefficient(p).norm().ln() - moments.log_value(p))
        .collect();
    let ratio_roots: Vec<f64> = (1..=n).map(|p| (log_ratio[p] / p as f64).exp()).collect();
    let nonzero: Vec<f64> = ratio_roots.iter().copied().filter(|r| *r > 0.0).collect();
    if nonzero.is_empty() {
        return Ok(CoefficientFit {
            ratio_roots,
            c: log_ratio[0].exp(),
            a: 0.0,
            divergent: false,
        });
    }
    if tail_grows(&nonzero) {
        return Ok(CoefficientFit {
            ratio_roots,
            c: f64::INFINITY,
            a: f64::INFINITY,
            divergent: true,
        });
    }
    let a = nonzero[nonzero.len() / 2..]
        .iter()
        .copied()
        .fold(0.0, f64::max);
    let la = a.ln();
    let c = (0..=n)
        .map(|p| log_ratio[p] - p as f64 * la)
        .fold(f64::NEG_INFINITY, f64::max)
        .exp();
    Ok(CoefficientFit {
        ratio_roots,
        c,
        a,
        divergent: false,
    })
}

/// The continued Borel transform `g = T̂⁻_e f̂` along a direction.
#[derive(Clone)]
pub struct BorelContinuation {
    pub method: String,
    pub direction: f64,
    pub borel_series: FormalSeries,
    pub approximant: Option<Pade>,
    /// Poles of the approximant, if any.
    pub poles: Vec<Complex64>,
    g: SurfaceFn,
}

impl fmt::Debug for BorelContinuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BorelContinuation")
            .field("method", &self.method)
            .field("direction", &self.direction)
            .field("poles", &self.poles)
            .finish()
    }
}

impl BorelContinuation {
    pub fn eval(&self, u: SurfacePoint) -> Complex64 {
        (self.g)(u)
    }

    pub fn evaluator(&self) -> SurfaceFn {
        self.g.clone()
    }
}

/// Relative distance below which a pole counts as lying on the ray.
const POLE_ON_RAY: f64 = 1e-6;

fn distance_to_ray(p: Complex64, d: f64) -> f64 {
    let dir = Complex64::from_polar(1.0, d);
    let along = (p * dir.conj()).re;
    if along <= 0.0 {
        p.norm()
    } else {
        (p - dir * along).norm()
    }
}

pub fn continue_borel(
    series: &FormalSeries,
    moments: &MomentSequence,
    method: &ContinuationMethod,
    direction: f64,
) -> Result<BorelContinuation> {
    let fit = coefficient_class(series, moments)?;
    if fit.divergent {
        return Err(Error::stage(
            Stage::CoefficientClass,
            "formal Borel transform has radius zero",
        ));
    }
    let borel_series = formal_borel(series, moments)?;
    let (g, approximant, poles): (SurfaceFn, _, _) = match method {
        ContinuationMethod::ClosedForm { g, .. } => (g.clone(), None, Vec::new()),
        ContinuationMethod::None => {
            let s = borel_series.clone();
            (
                Arc::new(move |u: SurfacePoint| s.eval(u.to_complex())),
                None,
                Vec::new(),
            )
        }
        ContinuationMethod::RationalApproximant { m, n } => {
            let pade = Pade::new(borel_series.coefficients(), *m, *n)?;
            let poles = pade.poles();
            let on_ray: Vec<Complex64> = poles
                .iter()
                .copied()
                .filter(|p| distance_to_ray(*p, direction) <= POLE_ON_RAY * p.norm().max(1.0))
                .collect();
            if !on_ray.is_empty() {
                let list: Vec<String> = on_ray.iter().map(|p| format!("{p:.6}")).collect();
                return Err(Error::stage(
                    Stage::Continuation,
                    format!(
                        "approximant poles on the ray arg u = {direction}: {}",
                        list.join(", ")
                    ),
                ));
            }
            let r = pade.clone();
            (
                Arc::new(move |u: SurfacePoint| r.eval(u.to_complex())),
                Some(pade),
                poles,
            )
        }
    };
    Ok(BorelContinuation {
        method: method.tag(),
        direction,
        borel_series,
        approximant,
        poles,
        g,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    SummableInDirection,
    NotCertified,
}

/// One value of the sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumValue {
    pub z: Complex64,
    pub value: Complex64,
    pub error: f64,
}

/// Evaluates `T_e g` at further points.
#[derive(Clone)]
pub struct SumEvaluator {
    kernel: Kernel,
    direction: f64,
    g: SurfaceFn,
    tol: f64,
}

impl fmt::Debug for SumEvaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SumEvaluator({}, d = {})",
            self.kernel.tag(),
            self.direction
        )
    }
}

impl SumEvaluator {
    pub fn eval(&self, z: Complex64) -> Result<Quadrature> {
        laplace_ray(|u| (self.g)(u), &self.kernel, self.direction, z, self.tol)
    }
}

#[derive(Debug, Clone)]
pub struct SummabilityReport {
    pub direction: f64,
    pub coefficient: CoefficientFit,
    pub borel_radius: f64,
    pub method: String,
    pub poles: Vec<Complex64>,
    /// `O^{m_e}` fit of the continued Borel transform on the ray.
    pub growth: GrowthFit,
    /// Decay fit of the kernel over the arguments `τ − arg z` in use.
    pub kernel_decay: EnvelopeFit,
    pub rho2: Option<f64>,
    /// `k₁/(ρ(2)k₂)` from the two fits.
    pub certified_radius: Option<f64>,
    pub verdict: Verdict,
    pub reasons: Vec<String>,
    pub evaluator: SumEvaluator,
}

impl SummabilityReport {
    pub fn certified(&self) -> bool {
        self.verdict == Verdict::SummableInDirection
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("direction: {}\n", self.direction));
        out.push_str(&format!(
            "coefficient class: C = {:.6e}, A = {:.6e}{}\n",
            self.coefficient.c,
            self.coefficient.a,
            if self.coefficient.divergent {
                " (divergent)"
            } else {
                ""
            }
        ));
        out.push_str(&format!(
            "borel radius estimate: {:.6e}\n",
            self.borel_radius
        ));
        out.push_str(&format!("continuation: {}\n", self.method));
        if !self.poles.is_empty() {
            let list: Vec<String> = self.poles.iter().map(|p| format!("{p:.6}")).collect();
            out.push_str(&format!("approximant poles: {}\n", list.join(", ")));
        }
        out.push_str(&format!(
            "borel growth fit: member = {}, k1 = {}, c = {:.6e}\n",
            self.growth.member(),
            self.growth
                .k()
                .map_or("none".into(), |k| format!("{k:.6e}")),
            self.growth.c()
        ));
        out.push_str(&format!(
            "kernel decay fit: member = {}, k2 = {}\n",
            self.kernel_decay.member,
            self.kernel_decay
                .k
                .map_or("none".into(), |k| format!("{k:.6e}"))
        ));
        out.push_str(&format!(
            "rho(2): {}\ncertified radius: {}\n",
            self.rho2.map_or("none".into(), |r| format!("{r:.6}")),
            self.certified_radius
                .map_or("none".into(), |r| format!("{r:.6e}"))
        ));
        out.push_str(&format!(
            "verdict: {}\n",
            match self.verdict {
                Verdict::SummableInDirection => "summable-in-d",
                Verdict::NotCertified => "not-certified",
            }
        ));
        for r in &self.reasons {
            out.push_str(&format!("reason: {r}\n"));
        }
        out
    }
}

/// Depth of the moment table used for growth fits; kernels without a
/// closed-form law pay one quadrature per moment.
const FIT_DEPTH: usize = 400;
const QUADRATURE_FIT_DEPTH: usize = 160;

fn staged(stage: Stage, e: Error) -> Error {
    match e {
        Error::Stage { .. } => e,
        other => Error::stage(stage, other.to_string()),
    }
}

/// Sums `series` in direction `d` with kernel `e` at `points`.
pub fn m_sum(
    series: &FormalSeries,
    kernel: &Kernel,
    d: f64,
    method: &ContinuationMethod,
    points: &[Complex64],
    tol: f64,
) -> Result<(Vec<SumValue>, SummabilityReport)> {
    let depth = if kernel.law().is_some() {
        FIT_DEPTH
    } else {
        QUADRATURE_FIT_DEPTH
    };
    let moments = moment_sequence(kernel, series.degree().max(depth), tol.max(1e-12))
        .map_err(|e| staged(Stage::CoefficientClass, e))?;
    let coefficient =
        coefficient_class(series, &moments).map_err(|e| staged(Stage::CoefficientClass, e))?;
    if coefficient.divergent {
        return Err(Error::stage(
            Stage::CoefficientClass,
            "coefficients are not bounded by C·A^p·m_e(p)",
        ));
    }
    let continuation =
        continue_borel(series, &moments, method, d).map_err(|e| staged(Stage::Continuation, e))?;
    let mut reasons = Vec::new();

    let table = moments
        .to_table()
        .map_err(|e| staged(Stage::GrowthFit, e))?;
    let maps = GrowthMaps::new(table.clone());
    let ray = Sector::new(d, 0.05, None).map_err(|e| staged(Stage::GrowthFit, e))?;
    // Keep radii where the table still resolves h_M(k/r) for k near 1.
    let r_max = (0.25 * table.quotient(table.depth() - 1)).min(1e2);
    let samples = ray.sample_points(1e-2, r_max, 40, 3);
    let growth = growth_class_fit(|u| continuation.eval(u), &table, &ray, &samples);
    if !growth.member() {
        reasons.push(format!(
            "continued Borel transform not of kernel growth: {}",
            growth.fit.note
        ));
    }

    for z in points {
        let off = (d - z.arg() - 2.0 * PI * ((d - z.arg()) / (2.0 * PI)).round()).abs();
        if off >= kernel.omega() * PI / 2.0 {
            return Err(Error::stage(
                Stage::Direction,
                format!("|arg z − d| = {off:.4} at z = {z} is not below ωπ/2"),
            ));
        }
    }
    let theta_max = points
        .iter()
        .map(|z| (d - z.arg() - 2.0 * PI * ((d - z.arg()) / (2.0 * PI)).round()).abs())
        .fold(0.0, f64::max);
    let decay_samples: Vec<Sample> = [-theta_max, 0.0, theta_max]
        .iter()
        .flat_map(|&a| {
            log_space(1e-3, r_max, 25)
                .into_iter()
                .map(move |r| SurfacePoint::new(r, a))
        })
        .map(|w| Sample::new(w.modulus, kernel.eval(w).norm()))
        .collect();
    let kernel_decay = fit_envelope(&decay_samples, &maps, Envelope::Decay);
    if !kernel_decay.member {
        reasons.push(format!("kernel decay fit failed: {}", kernel_decay.note));
    }
    let rho2 = maps
        .rho_of_s(2.0, &log_space(0.02, 1.0, 30), 1e3)
        .ok()
        .map(|w| w.rho);
    if rho2.is_none() {
        reasons.push("no ρ(2) witness on the table".into());
    }
    let certified_radius = match (growth.k(), kernel_decay.k, rho2) {
        (Some(k1), Some(k2), Some(r)) if growth.member() && kernel_decay.member => {
            Some(k1 / (r * k2))
        }
        _ => None,
    };
    if let Some(r) = certified_radius {
        if let Some(z) = points.iter().find(|z| z.norm() >= r) {
            reasons.push(format!(
                "|z| = {} lies outside the certified radius {r:.4e}",
                z.norm()
            ));
        }
    }

    let g = continuation.evaluator();
    let values: Vec<SumValue> = points
        .par_iter()
        .map(|&z| {
            laplace_ray(|u| g(u), kernel, d, z, tol).map(|q| SumValue {
                z,
                value: q.value,
                error: q.error,
            })
        })
        .collect::<Result<_>>()
        .map_err(|e| staged(Stage::Laplace, e))?;

    let verdict = if reasons.is_empty() && certified_radius.is_some() {
        Verdict::SummableInDirection
    } else {
        Verdict::NotCertified
    };
    let report = SummabilityReport {
        direction: d,
        borel_radius: coefficient.borel_radius(),
        coefficient,
        method: continuation.method.clone(),
        poles: continuation.poles.clone(),
        growth,
        kernel_decay,
        rho2,
        certified_radius,
        verdict,
        reasons,
        evaluator: SumEvaluator {
            kernel: kernel.clone(),
            direction: d,
            g,
            tol,
        },
    };
    Ok((values, report))
}

/// Largest deviation between the sums under two kernels, each continued by
/// its near-diagonal rational approximant.
pub fn kernel_independence(
    series: &FormalSeries,
    a: &Kernel,
    b: &Kernel,
    d: f64,
    points: &[Complex64],
    tol: f64,
) -> Result<f64> {
    let method = ContinuationMethod::near_diagonal(series);
    let (va, _) = m_sum(series, a, d, &method, points, tol)?;
    let (vb, _) = m_sum(series, b, d, &method, points, tol)?;
    Ok(va
        .iter()
        .zip(&vb)
        .map(|(x, y)| (x.value - y.value).norm())
        .fold(0.0, f64::max))
}

/// `Σ (−1)^p p! z^p` up to degree `n`.
pub fn euler_series(n: usize) -> FormalSeries {
    let fact = MomentSequence::factorial(n.max(2));
    let c: Vec<Complex64> = (0..=n)
        .map(|p| Complex64::new(if p % 2 == 0 { 1.0 } else { -1.0 } * fact.value(p), 0.0))
        .collect();
    FormalSeries::new(c, "euler").expect("finite factorials")
}
