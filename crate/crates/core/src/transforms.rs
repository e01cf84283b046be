//! Formal and analytic `e`-Laplace and `e`-Borel transforms, together with
//! sampled growth-class and asymptotic-expansion fits.

use crate::envelope::{fit_envelope, log_space, Envelope, EnvelopeFit, Sample};
use crate::error::{Error, Result};
use crate::kernels::{Kernel, MomentSequence, SurfacePoint};
use crate::quad::{integrate, integrate_to_infinity, Quadrature, Tolerance};
use crate::sequences::{tail_grows, GrowthMaps, SequenceTable};
use num_complex::Complex64;
use std::cell::Cell;
use std::f64::consts::PI;

/// Truncated power series `Σ_{p ≤ N} a_p z^p`.
///
/// A series produced by a formal transform remembers the coefficients it was
/// made from and the signed power of the moment sequence applied to them, so
/// that formal Laplace and Borel transforms undo each other exactly.
#[derive(Debug, Clone)]
pub struct FormalSeries {
    coefficients: Vec<Complex64>,
    origin: String,
    weighting: Option<Weighting>,
}

#[derive(Debug, Clone)]
struct Weighting {
    base: Vec<Complex64>,
    moments: MomentSequence,
    power: i32,
}

impl PartialEq for FormalSeries {
    fn eq(&self, other: &Self) -> bool {
        self.coefficients == other.coefficients
    }
}

impl FormalSeries {
    pub fn new(coefficients: Vec<Complex64>, origin: &str) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::param("a series needs at least one coefficient"));
        }
        if let Some(c) = coefficients
            .iter()
            .find(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::NonFinite(format!("coefficient {c}")));
        }
        Ok(FormalSeries {
            coefficients,
            origin: origin.to_string(),
            weighting: None,
        })
    }

    pub fn from_real(coefficients: &[f64], origin: &str) -> Result<Self> {
        Self::new(
            coefficients
                .iter()
                .map(|&x| Complex64::new(x, 0.0))
                .collect(),
            origin,
        )
    }

    /// Series from factorial-normalized coefficients `f_p = p!·a_p`.
    pub fn from_factorial(f: &[Complex64], origin: &str) -> Result<Self> {
        let fact = MomentSequence::factorial(f.len().max(2));
        Self::new(
            f.iter()
                .enumerate()
                .map(|(p, v)| v / fact.value(p))
                .collect(),
            origin,
        )
    }

    pub fn zero(degree: usize) -> Self {
        FormalSeries {
            coefficients: vec![Complex64::new(0.0, 0.0); degree + 1],
            origin: "zero".into(),
            weighting: None,
        }
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficient(&self, p: usize) -> Complex64 {
        self.coefficients.get(p).copied().unwrap_or_default()
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn origin(&self) -> &str {
        &self.origin
    }

    /// `f_p = p!·a_p`.
    pub fn factorial_view(&self) -> Vec<Complex64> {
        let fact = MomentSequence::factorial(self.degree().max(2));
        self.coefficients
            .iter()
            .enumerate()
            .map(|(p, a)| a * fact.value(p))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients
            .iter()
            .all(|c| *c == Complex64::new(0.0, 0.0))
    }

    /// The full partial sum.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.eval_truncated(z, self.coefficients.len())
    }

    /// `Σ_{p<n} a_p z^p`.
    pub fn eval_truncated(&self, z: Complex64, n: usize) -> Complex64 {
        self.coefficients[..n.min(self.coefficients.len())]
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + a)
    }

    /// CSV lines `p,re_a,im_a` with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("p,re_a,im_a\n");
        for (p, a) in self.coefficients.iter().enumerate() {
            out.push_str(&format!("{p},{:.17e},{:.17e}\n", a.re, a.im));
        }
        out
    }

    fn reweighted(&self, moments: &MomentSequence, step: i32, origin: String) -> Result<Self> {
        if moments.depth() < self.degree() {
            return Err(Error::DepthMismatch {
                left: self.degree(),
                right: moments.depth(),
            });
        }
        let (base, power) = match &self.weighting {
            Some(w) if w.moments == *moments => (w.base.clone(), w.power + step),
            _ => (self.coefficients.clone(), step),
        };
        let coefficients = if power == 0 {
            base.clone()
        } else {
            base.iter()
                .enumerate()
                .map(|(p, a)| {
                    let m = moments.value(p);
                    (0..power.unsigned_abs())
                        .fold(*a, |acc, _| if power > 0 { acc * m } else { acc / m })
                })
                .collect()
        };
        if let Some(c) = coefficients
            .iter()
            .find(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::NonFinite(format!("transformed coefficient {c}")));
        }
        Ok(FormalSeries {
            coefficients,
            origin,
            weighting: (power != 0).then(|| Weighting {
                base,
                moments: moments.clone(),
                power,
            }),
        })
    }
}

/// `a_p ↦ m_e(p)·a_p`.
pub fn formal_laplace(series: &FormalSeries, moments: &MomentSequence) -> Result<FormalSeries> {
    series.reweighted(
        moments,
        1,
        format!("laplace[{}]({})", moments.source(), series.origin),
    )
}

/// `a_p ↦ a_p/m_e(p)`.
pub fn formal_borel(series: &FormalSeries, moments: &MomentSequence) -> Result<FormalSeries> {
    series.reweighted(
        moments,
        -1,
        format!("borel[{}]({})", moments.source(), series.origin),
    )
}

/// Sector `|arg z − d| < γπ/2`, `|z| < radius`, on the Riemann surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sector {
    pub direction: f64,
    /// Opening in units of π.
    pub opening: f64,
    pub radius: Option<f64>,
}

impl Sector {
    pub fn new(direction: f64, opening: f64, radius: Option<f64>) -> Result<Self> {
        if !(opening > 0.0 && opening.is_finite() && direction.is_finite()) {
            return Err(Error::param(format!(
                "invalid sector opening {opening} or direction {direction}"
            )));
        }
        if let Some(r) = radius {
            if !(r > 0.0) {
                return Err(Error::param(format!(
                    "sector radius must be positive, got {r}"
                )));
            }
        }
        Ok(Sector {
            direction,
            opening,
            radius,
        })
    }

    pub fn half_angle(&self) -> f64 {
        self.opening * PI / 2.0
    }

    pub fn contains(&self, z: SurfacePoint) -> bool {
        (z.arg - self.direction).abs() < self.half_angle()
            && self.radius.map_or(true, |r| z.modulus < r)
            && z.modulus > 0.0
    }

    /// Points on `rays` rays over 90% of the opening and `radii` log-spaced
    /// radii in `[r_min, r_max]` (`r_max` is capped below a finite radius).
    pub fn sample_points(
        &self,
        r_min: f64,
        r_max: f64,
        radii: usize,
        rays: usize,
    ) -> Vec<SurfacePoint> {
        let top = self.radius.map_or(r_max, |r| r_max.min(r * (1.0 - 1e-9)));
        let half = 0.9 * self.half_angle();
        let args: Vec<f64> = if rays <= 1 {
            vec![self.direction]
        } else {
            (0..rays)
                .map(|i| self.direction - half + 2.0 * half * i as f64 / (rays - 1) as f64)
                .collect()
        };
        let mut out = Vec::with_capacity(args.len() * radii);
        for &a in &args {
            for r in log_space(r_min.min(top), top, radii) {
                out.push(SurfacePoint::new(r, a));
            }
        }
        out
    }
}

/// The Borel integration path: a segment out along `arg z = τ + ω(π+ε)/2`,
/// the clockwise arc `|z| = r₂`, and a segment back along
/// `arg z = τ − ω(π+ε)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSpec {
    pub tau: f64,
    pub omega: f64,
    pub epsilon: f64,
    pub r2: f64,
}

pub const DEFAULT_PATH_EPSILON: f64 = PI / 4.0;

impl PathSpec {
    pub fn new(tau: f64, omega: f64, epsilon: f64, r2: f64) -> Result<Self> {
        if !(omega > 0.0 && r2 > 0.0 && epsilon > 0.0 && epsilon < PI && tau.is_finite()) {
            return Err(Error::param(format!(
                "invalid path: tau {tau}, omega {omega}, epsilon {epsilon}, r2 {r2}"
            )));
        }
        Ok(PathSpec {
            tau,
            omega,
            epsilon,
            r2,
        })
    }

    /// Path for `kernel` in direction `tau` with the default `ε`.
    pub fn for_kernel(kernel: &Kernel, tau: f64, r2: f64) -> Result<Self> {
        Self::new(tau, kernel.omega(), DEFAULT_PATH_EPSILON, r2)
    }

    /// Half of the angular span of the path.
    pub fn half_span(&self) -> f64 {
        self.omega * (PI + self.epsilon) / 2.0
    }
}

/// Argument of `z` shifted by a multiple of 2π to lie closest to `tau`.
fn arg_near(z: Complex64, tau: f64) -> f64 {
    let a = z.arg();
    a + (2.0 * PI) * ((tau - a) / (2.0 * PI)).round()
}

/// `T_e f(z) = ∫₀^{∞(τ)} e(u/z) f(u) du/u` along `arg u = τ`.
///
/// The ray is split at `|u| = |z|`; the inner part uses `u = |z|e^{−v}`.
pub fn laplace_ray<F>(f: F, kernel: &Kernel, tau: f64, z: Complex64, tol: f64) -> Result<Quadrature>
where
    F: Fn(SurfacePoint) -> Complex64,
{
    if z.norm() == 0.0 {
        return Err(Error::domain("Laplace transform needs z ≠ 0"));
    }
    let theta = tau - arg_near(z, tau);
    if theta.abs() >= kernel.omega() * PI / 2.0 {
        return Err(Error::domain(format!(
            "direction {tau} is not admissible for arg z = {}: |difference| must stay below {}",
            z.arg(),
            kernel.omega() * PI / 2.0
        )));
    }
    let r = z.norm();
    let tolerance = Tolerance::relative(tol);
    let product = |s: f64| {
        let e = kernel.eval(SurfacePoint::new(s, theta));
        if e == Complex64::new(0.0, 0.0) {
            e
        } else {
            e * f(SurfacePoint::new(r * s, tau))
        }
    };
    let near = integrate_to_infinity(|v| product((-v).exp()), 0.0, 1.0, tolerance)?;
    let far = integrate_to_infinity(|s| product(s) / s, 1.0, 1.0, tolerance)?;
    Ok(Quadrature {
        value: near.value + far.value,
        error: near.error + far.error,
        evals: near.evals + far.evals,
    })
}

/// `T⁻_e f(u) = −(1/2πi) ∫_{δ_ω(τ)} E(u/z) f(z) dz/z`.
///
/// For `ω ≥ 2` the transform is computed through a base kernel `ẽ` with
/// `e(z) = ẽ(z^{1/s})/s`: `T⁻_e f(u) = T⁻_ẽ[z ↦ f(z^s)](u^{1/s})`.
pub fn borel_path<F>(
    f: F,
    kernel: &Kernel,
    path: &PathSpec,
    u: Complex64,
    tol: f64,
) -> Result<Quadrature>
where
    F: Fn(SurfacePoint) -> Complex64,
{
    borel_dyn(&f, kernel, path, u, tol)
}

fn borel_dyn(
    f: &dyn Fn(SurfacePoint) -> Complex64,
    kernel: &Kernel,
    path: &PathSpec,
    u: Complex64,
    tol: f64,
) -> Result<Quadrature> {
    if (path.omega - kernel.omega()).abs() > 1e-12 * kernel.omega() {
        return Err(Error::param(format!(
            "path built for ω = {} but kernel has ω = {}",
            path.omega,
            kernel.omega()
        )));
    }
    if let Some((base, s)) = kernel.borel_base()? {
        let inner = PathSpec::new(
            path.tau / s,
            base.omega(),
            path.epsilon,
            path.r2.powf(1.0 / s),
        )?;
        let us = SurfacePoint::new(u.norm(), arg_near(u, path.tau)).powf(1.0 / s);
        return borel_dyn(
            &|w: SurfacePoint| f(w.powf(s)),
            &base,
            &inner,
            us.to_complex(),
            tol,
        );
    }
    if u.norm() == 0.0 {
        return Ok(Quadrature {
            value: f(SurfacePoint::new(0.0, path.tau)),
            error: 0.0,
            evals: 1,
        });
    }
    let phi_in = path.tau + path.half_span();
    let phi_out = path.tau - path.half_span();
    let r2 = path.r2;
    let tolerance = Tolerance::relative(tol);
    let worst = Cell::new(0.0f64);
    let failure: Cell<Option<Error>> = Cell::new(None);
    let e_at = |w: Complex64| match kernel.entire_e_best(w) {
        Ok(v) => {
            if v.error > 0.0 {
                worst.set(worst.get().max(v.relative_error()));
            }
            v.value
        }
        Err(e) => {
            failure.set(Some(e));
            Complex64::new(f64::NAN, f64::NAN)
        }
    };
    let (log_u, arg_u) = (u.norm().ln() - r2.ln(), u.arg());
    let segment = |phi: f64| {
        integrate_to_infinity(
            |v| {
                let z = SurfacePoint::new(r2 * (-v).exp(), phi);
                let fz = f(z);
                // Along the segments E decays, and beyond this point the
                // product underflows.
                if fz == Complex64::new(0.0, 0.0) || log_u + v > 700.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    e_at(Complex64::from_polar((log_u + v).exp(), arg_u - phi)) * fz
                }
            },
            0.0,
            1.0,
            tolerance,
        )
    };
    let outward = segment(phi_in);
    let inward = segment(phi_out);
    let arc_integrand = |phi: f64| {
        let z = SurfacePoint::new(r2, phi);
        e_at(u / z.to_complex()) * f(z)
    };
    // Cancellation on the arc limits the attainable accuracy to a multiple
    // of the integrand's peak.
    let peak = (0..=64)
        .map(|j| arc_integrand(phi_out + (phi_in - phi_out) * j as f64 / 64.0).norm())
        .fold(0.0, f64::max);
    let floor = 1e3 * f64::EPSILON * peak * (phi_in - phi_out);
    let arc = integrate(arc_integrand, phi_out, phi_in, tolerance.with_abs(floor));
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let (outward, inward, arc) = (outward?, inward?, arc?);
    // The arc runs clockwise, from phi_in down to phi_out, with dz/z = i dφ.
    let i = Complex64::new(0.0, 1.0);
    let total = outward.value - i * arc.value - inward.value;
    let scale = outward.value.norm() + arc.value.norm() + inward.value.norm();
    let value = -total / (2.0 * PI * i);
    let error = (outward.error + arc.error + inward.error + worst.get() * scale) / (2.0 * PI);
    Ok(Quadrature {
        value,
        error,
        evals: outward.evals + arc.evals + inward.evals,
    })
}

/// `|w/(w−z) − ∫₀^{∞(τ)} e(u/z) E(u/w) du/u|` along `τ = arg z`.
pub fn reproducing_check(kernel: &Kernel, z: Complex64, w: Complex64, tol: f64) -> Result<f64> {
    if z.norm() == 0.0 || w.norm() == 0.0 {
        return Err(Error::domain("reproducing formula needs z and w nonzero"));
    }
    if (z / w).norm() >= 1.0 {
        return Err(Error::domain(format!(
            "reproducing formula needs |z/w| < 1, got {}",
            (z / w).norm()
        )));
    }
    let failure: Cell<Option<Error>> = Cell::new(None);
    let q = laplace_ray(
        |u: SurfacePoint| match kernel.entire_e_best(u.to_complex() / w) {
            Ok(v) => v.value,
            Err(e) => {
                failure.set(Some(e));
                Complex64::new(f64::NAN, f64::NAN)
            }
        },
        kernel,
        z.arg(),
        z,
        tol,
    );
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok((w / (w - z) - q?.value).norm())
}

/// Sampled membership in `O^M(S)`: `|f(z)| ≤ c/h_M(k/|z|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthFit {
    pub fit: EnvelopeFit,
    pub sector: Sector,
    pub points: Vec<SurfacePoint>,
    /// Supplied points outside the sector, ignored by the fit.
    pub outside: usize,
}

impl GrowthFit {
    pub fn member(&self) -> bool {
        self.fit.member
    }

    pub fn c(&self) -> f64 {
        self.fit.c()
    }

    pub fn k(&self) -> Option<f64> {
        self.fit.k
    }
}

pub fn growth_class_fit<F>(
    f: F,
    table: &SequenceTable,
    sector: &Sector,
    samples: &[SurfacePoint],
) -> GrowthFit
where
    F: Fn(SurfacePoint) -> Complex64,
{
    let maps = GrowthMaps::new(table.clone());
    let points: Vec<SurfacePoint> = samples
        .iter()
        .copied()
        .filter(|z| sector.contains(*z))
        .collect();
    let s: Vec<Sample> = points
        .iter()
        .map(|z| Sample::new(z.modulus, f(*z).norm()))
        .collect();
    GrowthFit {
        fit: fit_envelope(&s, &maps, Envelope::Growth),
        sector: *sector,
        outside: samples.len() - points.len(),
        points,
    }
}

/// Coefficient and growth sides of the correspondence between entire
/// functions of `M`-growth and coefficients `|a_n| ≤ c kⁿ/M_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualityReport {
    /// `(|a_n| M_n)^{1/n}` for `n ≥ 1` (zero coefficients give 0).
    pub ratio_roots: Vec<f64>,
    pub coefficient_k: Option<f64>,
    pub coefficient_c: f64,
    pub coefficient_member: bool,
    /// Growth fit of the partial sum, maximized over each circle.
    pub growth: EnvelopeFit,
    pub member: bool,
    /// Whether both sides reach the same verdict.
    pub consistent: bool,
}

pub fn entire_duality_check(
    coefficients: &[Complex64],
    table: &SequenceTable,
    radii: &[f64],
) -> Result<DualityReport> {
    let n = coefficients.len().saturating_sub(1);
    if n < 2 {
        return Err(Error::param("need coefficients up to degree 2 at least"));
    }
    if table.depth() < n {
        return Err(Error::DepthMismatch {
            left: n,
            right: table.depth(),
        });
    }
    let log_a: Vec<f64> = coefficients.iter().map(|a| a.norm().ln()).collect();
    let ratio_roots: Vec<f64> = (1..=n)
        .map(|p| ((log_a[p] + table.log_value(p)) / p as f64).exp())
        .collect();
    let nonzero: Vec<f64> = ratio_roots.iter().copied().filter(|r| *r > 0.0).collect();
    let (coefficient_k, coefficient_c, coefficient_member) = if nonzero.is_empty() {
        (Some(0.0), coefficients[0].norm(), true)
    } else if tail_grows(&nonzero) {
        (None, f64::INFINITY, false)
    } else {
        let tail = &nonzero[nonzero.len() / 2..];
        let k = tail.iter().copied().fold(0.0, f64::max);
        let lk = k.ln();
        let log_c = (0..=n)
            .map(|p| log_a[p] + table.log_value(p) - p as f64 * lk)
            .fold(f64::NEG_INFINITY, f64::max);
        (Some(k), log_c.exp(), true)
    };
    let series = FormalSeries::new(coefficients.to_vec(), "duality")?;
    let samples: Vec<Sample> = radii
        .iter()
        .map(|&r| {
            let max = (0..32)
                .map(|j| {
                    series
                        .eval(Complex64::from_polar(r, 2.0 * PI * j as f64 / 32.0))
                        .norm()
                })
                .fold(0.0, f64::max);
            Sample::new(r, max)
        })
        .collect();
    let growth = fit_envelope(&samples, &GrowthMaps::new(table.clone()), Envelope::Growth);
    Ok(DualityReport {
        ratio_roots,
        coefficient_k,
        coefficient_c,
        coefficient_member,
        member: coefficient_member && growth.member,
        consistent: coefficient_member == growth.member,
        growth,
    })
}

/// Sampling layout for remainder estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticGrid {
    pub radii: usize,
    pub rays: usize,
    /// Radii are spread over `[inner_fraction·R, R)`.
    pub inner_fraction: f64,
    /// Remainders below `noise·|f(z)|` are treated as unresolved.
    pub noise: f64,
}

impl Default for AsymptoticGrid {
    fn default() -> Self {
        AsymptoticGrid {
            radii: 6,
            rays: 3,
            inner_fraction: 0.5,
            noise: 1e-9,
        }
    }
}

/// Fit of `sup |f(z) − Σ_{p<n} a_p z^p| / (M_n |z|^n) ≤ C Aⁿ` over the
/// sampled orders.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticFit {
    pub orders: Vec<usize>,
    /// Sampled `K_n` for each order (0 when every remainder was unresolved).
    pub constants: Vec<f64>,
    pub c: f64,
    pub a: f64,
    pub bounded: bool,
    pub samples: usize,
    pub note: String,
}

pub fn asymptotic_fit<F>(
    f: F,
    series: &FormalSeries,
    table: &SequenceTable,
    subsector: &Sector,
    orders: &[usize],
    grid: &AsymptoticGrid,
) -> Result<AsymptoticFit>
where
    F: Fn(SurfacePoint) -> Complex64,
{
    let r = subsector
        .radius
        .ok_or_else(|| Error::param("asymptotic fits need a bounded subsector"))?;
    let top = orders.iter().copied().max().unwrap_or(0);
    if top > series.degree() + 1 {
        return Err(Error::depth(format!(
            "order {top} needs coefficients up to {}, series has degree {}",
            top - 1,
            series.degree()
        )));
    }
    if top > table.depth() {
        return Err(Error::depth(format!(
            "order {top} exceeds table depth {}",
            table.depth()
        )));
    }
    let points = subsector.sample_points(grid.inner_fraction * r, r, grid.radii, grid.rays);
    let values: Vec<Complex64> = points.iter().map(|z| f(*z)).collect();
    let mut constants = Vec::with_capacity(orders.len());
    for &n in orders {
        let mut k = 0.0f64;
        for (z, fz) in points.iter().zip(&values) {
            let rem = (fz - series.eval_truncated(z.to_complex(), n)).norm();
            if rem <= grid.noise * fz.norm() || rem == 0.0 {
                continue;
            }
            let log_k = rem.ln() - table.log_value(n) - n as f64 * z.modulus.ln();
            k = k.max(log_k.exp());
        }
        constants.push(k);
    }
    let roots: Vec<f64> = orders
        .iter()
        .zip(&constants)
        .filter(|(n, k)| **n > 0 && **k > 0.0)
        .map(|(n, k)| k.powf(1.0 / *n as f64))
        .collect();
    let finite = constants.iter().all(|k| k.is_finite());
    let (a, c, bounded, note) = if !finite {
        (
            f64::INFINITY,
            f64::INFINITY,
            false,
            "non-finite remainders".to_string(),
        )
    } else if roots.is_empty() {
        (
            0.0,
            constants.iter().copied().fold(0.0, f64::max),
            true,
            "all remainders unresolved or zero".into(),
        )
    } else if tail_grows(&roots) {
        (
            f64::INFINITY,
            f64::INFINITY,
            false,
            "K_n^{1/n} grows across the sampled orders".into(),
        )
    } else {
        let tail = &roots[roots.len() / 2..];
        let a = tail.iter().copied().fold(0.0, f64::max);
        let c = orders
            .iter()
            .zip(&constants)
            .map(|(n, k)| k / a.powi(*n as i32))
            .fold(0.0, f64::max);
        (a, c, true, format!("C = {c:.4e}, A = {a:.4e}"))
    };
    Ok(AsymptoticFit {
        orders: orders.to_vec(),
        constants,
        c,
        a,
        bounded,
        samples: points.len(),
        note,
    })
}

/// Settings for [`transform_asymptotics_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct TransformCheck {
    /// Bounded sector where the input expansion and the Laplace transform
    /// are sampled; its opening must be below the kernel's `ω`.
    pub sector: Sector,
    pub orders: Vec<usize>,
    pub grid: AsymptoticGrid,
    pub tol: f64,
    /// Arc radius of the Borel path; `None` skips the Borel half.
    pub borel_r2: Option<f64>,
    /// Radius of the sector on which the Borel transform is sampled.
    pub borel_radius: f64,
    /// Radius used for the growth fit of the input.
    pub growth_radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransformAsymptoticsReport {
    pub growth: GrowthFit,
    pub input: AsymptoticFit,
    pub laplace: AsymptoticFit,
    pub borel: Option<AsymptoticFit>,
    pub passed: bool,
}

/// Checks that `T_e f` expands in `M·M'` with coefficients `m_e(p)a_p` and,
/// optionally, that `T⁻_e f` expands in `M'/M` with coefficients `a_p/m_e(p)`.
/// `table_m` is the kernel's class, `table_mp` the class of the input.
pub fn transform_asymptotics_check<F>(
    f: F,
    series: &FormalSeries,
    table_m: &SequenceTable,
    table_mp: &SequenceTable,
    kernel: &Kernel,
    cfg: &TransformCheck,
) -> Result<TransformAsymptoticsReport>
where
    F: Fn(SurfacePoint) -> Complex64 + Sync,
{
    let n = table_m.depth().min(table_mp.depth());
    let (tm, tmp) = (table_m.truncate(n)?, table_mp.truncate(n)?);
    let growth_sector = Sector::new(cfg.sector.direction, cfg.sector.opening, None)?;
    let pts = growth_sector.sample_points(1e-2, cfg.growth_radius, 24, 3);
    let growth = growth_class_fit(&f, &tm, &growth_sector, &pts);
    if !growth.member() {
        return Err(Error::domain(format!(
            "input is not of the kernel's growth: {}",
            growth.fit.note
        )));
    }
    let input = asymptotic_fit(&f, series, &tmp, &cfg.sector, &cfg.orders, &cfg.grid)?;

    let depth = series.degree().max(2);
    let moments = crate::kernels::moment_sequence(kernel, depth, cfg.tol)?;
    let transformed = formal_laplace(series, &moments)?;
    let product = tm.product(&tmp)?;
    let failure: Cell<Option<Error>> = Cell::new(None);
    let laplace_f = |z: SurfacePoint| match laplace_ray(
        &f,
        kernel,
        cfg.sector.direction,
        z.to_complex(),
        cfg.tol,
    ) {
        Ok(q) => q.value,
        Err(e) => {
            failure.set(Some(e));
            Complex64::new(f64::NAN, f64::NAN)
        }
    };
    let laplace = asymptotic_fit(
        laplace_f,
        &transformed,
        &product,
        &cfg.sector,
        &cfg.orders,
        &cfg.grid,
    )?;
    if let Some(e) = failure.take() {
        return Err(e);
    }

    let borel = match cfg.borel_r2 {
        None => None,
        Some(r2) => {
            let path = PathSpec::for_kernel(kernel, cfg.sector.direction, r2)?;
            let quotient = tmp.quotient_table(&tm)?;
            let borel_series = formal_borel(series, &moments)?;
            let sector = Sector::new(cfg.sector.direction, 0.1, Some(cfg.borel_radius))?;
            let borel_f =
                |u: SurfacePoint| match borel_path(&f, kernel, &path, u.to_complex(), cfg.tol) {
                    Ok(q) => q.value,
                    Err(e) => {
                        failure.set(Some(e));
                        Complex64::new(f64::NAN, f64::NAN)
                    }
                };
            let fit = asymptotic_fit(
                borel_f,
                &borel_series,
                &quotient,
                &sector,
                &cfg.orders,
                &cfg.grid,
            )?;
            if let Some(e) = failure.take() {
                return Err(e);
            }
            Some(fit)
        }
    };
    let passed = input.bounded && laplace.bounded && borel.as_ref().map_or(true, |b| b.bounded);
    Ok(TransformAsymptoticsReport {
        growth,
        input,
        laplace,
        borel,
        passed,
    })
}

/// Fitted constants for `∫₀^∞ t^{p−1} h_M(K/t) dt ≤ C Dᵖ M_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralBound {
    pub k: f64,
    /// `(p, ∫₀^∞ t^{p−1} h_M(K/t) dt)`.
    pub integrals: Vec<(usize, f64)>,
    pub c: f64,
    pub d: f64,
    pub holds: bool,
}

pub fn integral_bound_fit(
    table: &SequenceTable,
    k: f64,
    orders: &[usize],
    tol: f64,
) -> Result<IntegralBound> {
    if !(k > 0.0) {
        return Err(Error::param(format!("K must be positive, got {k}")));
    }
    let maps = GrowthMaps::new(table.clone());
    let mut integrals = Vec::with_capacity(orders.len());
    for &p in orders {
        if p == 0 || p > table.depth() {
            return Err(Error::param(format!(
                "order {p} outside 1..={}",
                table.depth()
            )));
        }
        let pf = p as f64;
        // h_M(K/t) = 1 for t ≤ K·m_0.
        let knee = k * table.quotient(0);
        let head = knee.powf(pf) / pf;
        let failure: Cell<Option<Error>> = Cell::new(None);
        let tail = integrate_to_infinity(
            |t| match maps.log_h(k / t) {
                Ok(lh) => Complex64::new(((pf - 1.0) * t.ln() + lh).exp(), 0.0),
                Err(e) => {
                    failure.set(Some(e));
                    Complex64::new(f64::NAN, 0.0)
                }
            },
            knee,
            knee.max(1.0),
            Tolerance::relative(tol),
        );
        if let Some(e) = failure.take() {
            return Err(e);
        }
        integrals.push((p, head + tail?.value.re));
    }
    let roots: Vec<f64> = integrals
        .iter()
        .map(|&(p, i)| ((i.ln() - table.log_value(p)) / p as f64).exp())
        .collect();
    let d = roots[roots.len() / 2..].iter().copied().fold(0.0, f64::max);
    let c = integrals
        .iter()
        .map(|&(p, i)| (i.ln() - table.log_value(p) - p as f64 * d.ln()).exp())
        .fold(0.0, f64::max);
    let holds = c.is_finite() && d.is_finite() && !tail_grows(&roots);
    Ok(IntegralBound {
        k,
        integrals,
        c,
        d,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{classical_kernel, gevrey_kernel, moment_sequence, rescale_kernel};
    use crate::sequences::{generate, SequenceFamily};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn power(p: i32) -> impl Fn(SurfacePoint) -> Complex64 {
        move |z: SurfacePoint| z.to_complex().powi(p)
    }

    fn euler_oracle(z: f64) -> f64 {
        // ∫₀^∞ e^{−t}/(1+zt) dt by composite Simpson on [0, 50].
        let n = 200_000;
        let h = 50.0 / n as f64;
        let g = |t: f64| (-t).exp() / (1.0 + z * t);
        let mut s = g(0.0) + g(50.0);
        for i in 1..n {
            s += g(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    #[test]
    fn formal_pair_examples() {
        let m = MomentSequence::factorial(6);
        let one = FormalSeries::from_real(&[1.0, 0.0, 0.0], "one").unwrap();
        assert_eq!(formal_laplace(&one, &m).unwrap(), one);
        let geometric =
            FormalSeries::from_real(&[1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0], "geo").unwrap();
        let euler = formal_laplace(&geometric, &m).unwrap();
        assert_eq!(euler.coefficients()[6], c(720.0, 0.0));
        let back = formal_borel(&euler, &m).unwrap();
        assert_eq!(back, geometric);
        assert!(formal_borel(&FormalSeries::zero(4), &m).unwrap().is_zero());
        let short = MomentSequence::factorial(3);
        assert!(formal_laplace(&geometric, &short).is_err());
    }

    #[test]
    fn laplace_of_monomials() {
        let k = gevrey_kernel(1.0).unwrap();
        let q = laplace_ray(power(2), &k, 0.0, c(0.3, 0.0), 1e-12).unwrap();
        assert!((q.value - c(0.18, 0.0)).norm() < 1e-12);
        let zero = laplace_ray(|_| c(0.0, 0.0), &k, 0.0, c(0.3, 0.0), 1e-12).unwrap();
        assert_eq!(zero.value, c(0.0, 0.0));
        assert!(laplace_ray(power(2), &k, 0.0, c(-0.3, 0.01), 1e-12).is_err());
    }

    #[test]
    fn laplace_of_rational_matches_oracle() {
        let k = classical_kernel(1.0).unwrap();
        let q = laplace_ray(
            |u: SurfacePoint| 1.0 / (1.0 + u.to_complex()),
            &k,
            0.0,
            c(0.1, 0.0),
            1e-12,
        )
        .unwrap();
        assert!((q.value.re - euler_oracle(0.1)).abs() < 1e-10);
        assert!((q.value.re - 0.915_633).abs() < 1e-6);
    }

    #[test]
    fn laplace_is_direction_independent() {
        let k = gevrey_kernel(1.0).unwrap();
        let f = |u: SurfacePoint| 1.0 / (1.0 + u.to_complex());
        let z = c(0.1, 0.02);
        let a = laplace_ray(f, &k, 0.0, z, 1e-10).unwrap().value;
        let b = laplace_ray(f, &k, 0.1, z, 1e-10).unwrap().value;
        assert!((a - b).norm() < 1e-9);
    }

    #[test]
    fn borel_of_monomials() {
        let k = gevrey_kernel(1.0).unwrap();
        let path = PathSpec::for_kernel(&k, 0.0, 1.0).unwrap();
        let u = c(0.7, 0.1);
        let q = borel_path(power(2), &k, &path, u, 1e-12).unwrap();
        assert!((q.value - u * u / 2.0).norm() < 1e-10, "{}", q.value);
        assert_eq!(
            borel_path(|_| c(0.0, 0.0), &k, &path, u, 1e-12)
                .unwrap()
                .value,
            c(0.0, 0.0)
        );
    }

    #[test]
    fn borel_with_large_index_uses_rescaling() {
        let k = rescale_kernel(&gevrey_kernel(1.0).unwrap(), 2.0).unwrap();
        let path = PathSpec::for_kernel(&k, 0.0, 1.0).unwrap();
        let u = c(0.5, 0.05);
        let q = borel_path(power(3), &k, &path, u, 1e-11).unwrap();
        // m(3) = Γ(7) = 720
        assert!((q.value - u.powi(3) / 720.0).norm() < 1e-12);
    }

    #[test]
    fn round_trip_recovers_rational() {
        let k = gevrey_kernel(1.0).unwrap();
        let path = PathSpec::for_kernel(&k, 0.0, 0.5).unwrap();
        let f = |z: SurfacePoint| 1.0 / (1.0 - z.to_complex());
        let g = |u: SurfacePoint| {
            borel_path(f, &k, &path, u.to_complex(), 1e-11)
                .unwrap()
                .value
        };
        let z = c(0.05, 0.0);
        let back = laplace_ray(g, &k, 0.0, z, 1e-10).unwrap().value;
        assert!((back - 1.0 / (1.0 - z)).norm() < 1e-6);
    }

    #[test]
    fn reproducing_formula() {
        let k = gevrey_kernel(1.0).unwrap();
        assert!(reproducing_check(&k, c(0.2, 0.0), c(1.0, 0.0), 1e-11).unwrap() < 1e-8);
        let z = Complex64::from_polar(0.5, PI / 8.0);
        assert!(reproducing_check(&k, z, c(1.0, 0.0), 1e-10).unwrap() < 1e-6);
        assert!(reproducing_check(&k, c(0.0, 0.0), c(1.0, 0.0), 1e-10).is_err());
    }

    #[test]
    fn growth_fits() {
        let t = generate(&SequenceFamily::gevrey(1.0), 400).unwrap();
        let s = Sector::new(0.0, 0.5, None).unwrap();
        let pts = s.sample_points(1e-2, 40.0, 30, 3);
        let bounded =
            growth_class_fit(|u: SurfacePoint| 1.0 / (1.0 + u.to_complex()), &t, &s, &pts);
        assert!(bounded.member());
        let exp = growth_class_fit(|u: SurfacePoint| u.to_complex().exp(), &t, &s, &pts);
        assert!(exp.member() && exp.k().unwrap() < 1.0);
        let gauss = growth_class_fit(
            |u: SurfacePoint| (u.to_complex() * u.to_complex()).exp(),
            &t,
            &s,
            &pts,
        );
        assert!(!gauss.member());
    }

    #[test]
    fn duality_examples() {
        let t = generate(&SequenceFamily::gevrey(1.0), 60).unwrap();
        let fact = MomentSequence::factorial(60);
        let radii = log_space(0.1, 20.0, 15);
        let inv: Vec<Complex64> = (0..=60).map(|n| c(1.0 / fact.value(n), 0.0)).collect();
        let r = entire_duality_check(&inv, &t, &radii).unwrap();
        assert!(r.coefficient_member && (r.coefficient_k.unwrap() - 1.0).abs() < 1e-12);
        assert!(r.member && r.consistent);
        let ones = vec![c(1.0, 0.0); 61];
        assert!(
            !entire_duality_check(&ones, &t, &radii)
                .unwrap()
                .coefficient_member
        );
        let two: Vec<Complex64> = (0..=60)
            .map(|n| c(2f64.powi(n as i32) / fact.value(n), 0.0))
            .collect();
        let r = entire_duality_check(&two, &t, &radii).unwrap();
        assert!((r.coefficient_k.unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn asymptotics_of_polynomial_and_euler_sum() {
        let t = generate(&SequenceFamily::gevrey(1.0), 40).unwrap();
        let poly = FormalSeries::from_real(&[1.0, 2.0, -1.0], "poly").unwrap();
        let sector = Sector::new(0.0, 0.5, Some(0.1)).unwrap();
        let fit = asymptotic_fit(
            |z: SurfacePoint| poly.eval(z.to_complex()),
            &poly,
            &t,
            &sector,
            &[3],
            &AsymptoticGrid::default(),
        )
        .unwrap();
        assert_eq!(fit.constants, vec![0.0]);

        let k = classical_kernel(1.0).unwrap();
        let euler = FormalSeries::from_real(
            &(0..=16).map(|p| if p % 2 == 0 { 1.0 } else { -1.0 } * MomentSequence::factorial(16).value(p)).collect::<Vec<_>>(),
            "euler",
        )
        .unwrap();
        let sum = |z: SurfacePoint| {
            laplace_ray(
                |u: SurfacePoint| 1.0 / (1.0 + u.to_complex()),
                &k,
                0.0,
                z.to_complex(),
                1e-13,
            )
            .unwrap()
            .value
        };
        let orders: Vec<usize> = (1..=8).collect();
        let good = asymptotic_fit(
            sum,
            &euler,
            &t,
            &sector,
            &orders,
            &AsymptoticGrid::default(),
        )
        .unwrap();
        assert!(good.bounded, "{}", good.note);
        let half = generate(&SequenceFamily::gevrey(0.5), 40).unwrap();
        let orders: Vec<usize> = (1..=16).collect();
        let bad = asymptotic_fit(
            sum,
            &euler,
            &half,
            &sector,
            &orders,
            &AsymptoticGrid::default(),
        )
        .unwrap();
        assert!(!bad.bounded);
    }

    #[test]
    fn transform_expansions() {
        let m = generate(&SequenceFamily::gevrey(1.0), 40).unwrap();
        let ones = SequenceTable::from_values(&[1.0; 41]).unwrap();
        let k = gevrey_kernel(1.0).unwrap();
        let cfg = TransformCheck {
            sector: Sector::new(0.0, 0.5, Some(0.1)).unwrap(),
            orders: (1..=6).collect(),
            grid: AsymptoticGrid::default(),
            tol: 1e-12,
            borel_r2: Some(0.5),
            borel_radius: 1.0,
            growth_radius: 40.0,
        };
        let geometric =
            FormalSeries::from_real(&[1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0], "geo").unwrap();
        let report = transform_asymptotics_check(
            |u: SurfacePoint| 1.0 / (1.0 + u.to_complex()),
            &geometric,
            &m,
            &ones,
            &k,
            &cfg,
        )
        .unwrap();
        assert!(report.passed, "{report:?}");
        let cube = FormalSeries::from_real(&[0.0, 0.0, 0.0, 1.0], "cube").unwrap();
        let cfg3 = TransformCheck {
            orders: vec![4],
            ..cfg.clone()
        };
        let report = transform_asymptotics_check(power(3), &cube, &m, &ones, &k, &cfg3).unwrap();
        assert_eq!(report.laplace.constants, vec![0.0]);
        assert_eq!(report.borel.unwrap().constants, vec![0.0]);
        let zero = transform_asymptotics_check(
            |_| c(0.0, 0.0),
            &FormalSeries::zero(6),
            &m,
            &ones,
            &k,
            &cfg,
        )
        .unwrap();
        assert!(zero.laplace.constants.iter().all(|k| *k == 0.0));
    }

    #[test]
    fn integral_bound_for_first_order() {
        let t = generate(&SequenceFamily::gevrey(1.0), 400).unwrap();
        let orders: Vec<usize> = (1..=12).collect();
        let b = integral_bound_fit(&t, 1.0, &orders, 1e-10).unwrap();
        assert!(b.holds);
        for &(p, i) in &b.integrals {
            assert!(i <= b.c * b.d.powi(p as i32) * t.value(p) * (1.0 + 1e-12));
        }
    }

    proptest::proptest! {
        #[test]
        fn formal_pair_is_exact(coeffs in proptest::collection::vec(-1e6f64..1e6, 1..30), shift in 0.5f64..3.0) {
            let n = coeffs.len() - 1;
            let m = MomentSequence::from_law(&crate::kernels::MomentLaw::Gamma { alpha: shift, beta: 1.0 }, n.max(2), "law");
            let s = FormalSeries::from_real(&coeffs, "random").unwrap();
            let there_and_back = formal_laplace(&formal_borel(&s, &m).unwrap(), &m).unwrap();
            proptest::prop_assert_eq!(there_and_back.coefficients(), s.coefficients());
            let back_and_there = formal_borel(&formal_laplace(&s, &m).unwrap(), &m).unwrap();
            proptest::prop_assert_eq!(back_and_there.coefficients(), s.coefficients());
        }

        #[test]
        fn laplace_of_monomials_on_three_rays(p in 0i32..=8, ray in 0usize..3) {
            let k = gevrey_kernel(1.0).unwrap();
            let arg = [-0.6, 0.0, 0.6][ray];
            let z = Complex64::from_polar(0.4, arg);
            let tol = 1e-10;
            let q = laplace_ray(power(p), &k, arg, z, tol).unwrap().value;
            let exact = z.powi(p) * moment_sequence(&k, 8, tol).unwrap().value(p as usize);
            proptest::prop_assert!((q - exact).norm() <= 10.0 * tol * exact.norm());
        }
    }
}
