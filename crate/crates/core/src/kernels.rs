//! Summation kernels `e`, their moment functions `m_e(λ)` and the companion
//! entire functions `E(z) = Σ zⁿ/m_e(n)`.
//!
//! Every kernel is normalized at construction so that `m_e(0) = 1`.
//! Arguments live on the Riemann surface of the logarithm and are carried as
//! [`SurfacePoint`]s with an unrestricted argument.

mod entire;
mod maergoiz;
mod validation;

pub use entire::{e_eval, ERoute, EValue};
pub use maergoiz::{v_properties, PropertyCheck};
pub use validation::{
    moment_equivalence, validate_kernel, ConditionCheck, KernelValidationReport, ValidationGrids,
    Verdict,
};

use crate::error::{Error, Result};
use crate::quad::{integrate_to_infinity, Quadrature, Tolerance};
use crate::sequences::SequenceTable;
use crate::special::{gamma, gamma_c, ln_gamma};
use num_complex::Complex64;
use std::fmt;
use std::sync::{Arc, OnceLock};

/// A point `modulus · e^{i·arg}` of the Riemann surface of the logarithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub modulus: f64,
    pub arg: f64,
}

impl SurfacePoint {
    pub fn new(modulus: f64, arg: f64) -> Self {
        SurfacePoint { modulus, arg }
    }

    /// Principal-branch lift of a complex number.
    pub fn from_complex(z: Complex64) -> Self {
        SurfacePoint {
            modulus: z.norm(),
            arg: z.arg(),
        }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(self.modulus, self.arg)
    }

    pub fn powf(self, a: f64) -> Self {
        SurfacePoint {
            modulus: self.modulus.powf(a),
            arg: self.arg * a,
        }
    }

    pub fn mul(self, other: SurfacePoint) -> Self {
        SurfacePoint {
            modulus: self.modulus * other.modulus,
            arg: self.arg + other.arg,
        }
    }

    pub fn div(self, other: SurfacePoint) -> Self {
        SurfacePoint {
            modulus: self.modulus / other.modulus,
            arg: self.arg - other.arg,
        }
    }

    /// `log z = ln|z| + i·arg z` on the surface.
    pub fn ln(self) -> Complex64 {
        Complex64::new(self.modulus.ln(), self.arg)
    }
}

impl From<f64> for SurfacePoint {
    fn from(x: f64) -> Self {
        SurfacePoint::new(x, 0.0)
    }
}

pub type SurfaceFn = Arc<dyn Fn(SurfacePoint) -> Complex64 + Send + Sync>;
pub type MomentFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// Closed form of a normalized moment function.
#[derive(Clone)]
pub enum MomentLaw {
    /// `m(λ) = Γ(αλ + β) / Γ(β)`.
    Gamma {
        alpha: f64,
        beta: f64,
    },
    Function(MomentFn),
}

impl fmt::Debug for MomentLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MomentLaw::Gamma { alpha, beta } => {
                write!(f, "Gamma {{ alpha: {alpha}, beta: {beta} }}")
            }
            MomentLaw::Function(_) => f.write_str("Function(..)"),
        }
    }
}

impl MomentLaw {
    pub fn eval(&self, lambda: Complex64) -> Complex64 {
        match self {
            MomentLaw::Gamma { alpha, beta } => {
                if lambda.im == 0.0 {
                    Complex64::new(self.real(lambda.re), 0.0)
                } else {
                    gamma_c(lambda * *alpha + *beta) / gamma(*beta)
                }
            }
            MomentLaw::Function(f) => f(lambda),
        }
    }

    fn real(&self, x: f64) -> f64 {
        match self {
            MomentLaw::Gamma { alpha, beta } => {
                let a = alpha * x + beta;
                if a <= 171.0 && *beta <= 171.0 {
                    gamma(a) / gamma(*beta)
                } else {
                    (ln_gamma(a) - ln_gamma(*beta)).exp()
                }
            }
            MomentLaw::Function(f) => f(Complex64::new(x, 0.0)).re,
        }
    }

    /// `log m(x)` for real `x ≥ 0`, finite far beyond the `f64` range of `m`.
    pub fn log_real(&self, x: f64) -> f64 {
        let v = self.real(x);
        if v.is_finite() && v > 0.0 {
            return v.ln();
        }
        match self {
            MomentLaw::Gamma { alpha, beta } => ln_gamma(alpha * x + beta) - ln_gamma(*beta),
            MomentLaw::Function(_) => v.ln(),
        }
    }

    /// Law of `λ ↦ m(sλ)`.
    pub fn rescaled(&self, s: f64) -> MomentLaw {
        match self {
            MomentLaw::Gamma { alpha, beta } => MomentLaw::Gamma {
                alpha: alpha * s,
                beta: *beta,
            },
            MomentLaw::Function(f) => {
                let f = f.clone();
                MomentLaw::Function(Arc::new(move |l| f(l * s)))
            }
        }
    }

    /// `m(p+1)/m(p)` as an exact product when `α` and `β` are integers.
    fn integer_quotient(&self, p: usize) -> Option<f64> {
        match self {
            MomentLaw::Gamma { alpha, beta }
                if *alpha >= 1.0 && alpha.fract() == 0.0 && beta.fract() == 0.0 && *beta > 0.0 =>
            {
                let a = *alpha as usize;
                let base = alpha * p as f64 + beta;
                Some((0..a).map(|i| base + i as f64).product())
            }
            _ => None,
        }
    }
}

#[derive(Clone)]
pub enum KernelKind {
    /// `(1/α) z^{1/α} exp(−z^{1/α})`.
    Gevrey {
        alpha: f64,
    },
    /// `k z^k exp(−z^k)`.
    Classical {
        k: f64,
    },
    /// `(1/ω) z exp(−V(z))`.
    Maergoiz {
        v: SurfaceFn,
    },
    /// `e(z^{1/s})/s`.
    Rescaled {
        base: Box<Kernel>,
        s: f64,
    },
    Custom {
        name: String,
        e: SurfaceFn,
    },
}

/// Depth of the lazily computed moment table used by `E` when no closed
/// form is known.
const CACHE_DEPTH: usize = 160;
const CACHE_TOL: f64 = 1e-11;
const NORMALIZATION_TOL: f64 = 1e-12;

/// A kernel of summability, normalized so that `m_e(0) = 1`.
#[derive(Clone)]
pub struct Kernel {
    kind: KernelKind,
    omega: f64,
    scale: f64,
    law: Option<MomentLaw>,
    diagnostics: Vec<String>,
    log_moment_cache: Arc<OnceLock<Vec<f64>>>,
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Kernel")
            .field("tag", &self.tag())
            .field("omega", &self.omega)
            .field("scale", &self.scale)
            .field("law", &self.law)
            .finish()
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::param(format!("{name} must be positive, got {v}")))
    }
}

pub fn gevrey_kernel(alpha: f64) -> Result<Kernel> {
    positive("alpha", alpha)?;
    Ok(Kernel::assemble(
        KernelKind::Gevrey { alpha },
        alpha,
        1.0,
        Some(MomentLaw::Gamma { alpha, beta: 1.0 }),
        Vec::new(),
    ))
}

pub fn classical_kernel(k: f64) -> Result<Kernel> {
    positive("k", k)?;
    Ok(Kernel::assemble(
        KernelKind::Classical { k },
        1.0 / k,
        1.0,
        Some(MomentLaw::Gamma {
            alpha: 1.0 / k,
            beta: 1.0,
        }),
        Vec::new(),
    ))
}

/// Kernel `(1/ω) z exp(−V(z))` from a user-supplied `V`.
///
/// `V` is sampled on the positive axis: non-finite or negative values, and
/// loss of monotonicity beyond `r = 10`, are errors. Any other failed
/// property of `V` is kept as a diagnostic and surfaces in validation.
pub fn maergoiz_kernel(v: SurfaceFn, omega: f64) -> Result<Kernel> {
    positive("omega", omega)?;
    if omega >= 2.0 {
        return Err(Error::param(format!(
            "omega must be below 2 for this construction, got {omega}; rescale a kernel instead"
        )));
    }
    maergoiz::screen_real_axis(&v)?;
    let diagnostics = v_properties(&v, omega)
        .into_iter()
        .filter(|c| !c.passed)
        .map(|c| format!("V property {} failed: {}", c.name, c.detail))
        .collect();
    Kernel::normalized(KernelKind::Maergoiz { v }, omega, None, diagnostics)
}

/// `e^{(s)}(z) = e(z^{1/s})/s`, with moment function `λ ↦ m_e(sλ)`.
pub fn rescale_kernel(base: &Kernel, s: f64) -> Result<Kernel> {
    positive("s", s)?;
    let law = base.law.as_ref().map(|l| l.rescaled(s));
    Ok(Kernel::assemble(
        KernelKind::Rescaled {
            base: Box::new(base.clone()),
            s,
        },
        base.omega * s,
        1.0,
        law,
        Vec::new(),
    ))
}

/// A kernel given by an arbitrary evaluator. `law`, when supplied, must
/// describe the moments of the normalized kernel.
pub fn custom_kernel(
    name: &str,
    e: SurfaceFn,
    omega: f64,
    law: Option<MomentLaw>,
) -> Result<Kernel> {
    positive("omega", omega)?;
    Kernel::normalized(
        KernelKind::Custom {
            name: name.to_string(),
            e,
        },
        omega,
        law,
        Vec::new(),
    )
}

impl Kernel {
    fn assemble(
        kind: KernelKind,
        omega: f64,
        scale: f64,
        law: Option<MomentLaw>,
        diagnostics: Vec<String>,
    ) -> Self {
        Kernel {
            kind,
            omega,
            scale,
            law,
            diagnostics,
            log_moment_cache: Arc::new(OnceLock::new()),
        }
    }

    fn normalized(
        kind: KernelKind,
        omega: f64,
        law: Option<MomentLaw>,
        diagnostics: Vec<String>,
    ) -> Result<Self> {
        let raw = Kernel::assemble(kind, omega, 1.0, None, diagnostics);
        let m0 = raw.moment_by_quadrature(Complex64::new(0.0, 0.0), NORMALIZATION_TOL)?;
        if !(m0.value.re > 0.0 && m0.value.re.is_finite()) {
            return Err(Error::domain(format!(
                "kernel has non-positive mass {}",
                m0.value
            )));
        }
        Ok(Kernel {
            scale: 1.0 / m0.value.re,
            law,
            ..raw
        })
    }

    pub fn kind(&self) -> &KernelKind {
        &self.kind
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn law(&self) -> Option<&MomentLaw> {
        self.law.as_ref()
    }

    /// Factor applied to the raw formula to reach `m_e(0) = 1`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Construction-time findings that did not prevent building the kernel.
    pub fn diagnostics(&self) -> &[String] {
        &self.diagnostics
    }

    pub fn tag(&self) -> String {
        match &self.kind {
            KernelKind::Gevrey { alpha } => format!("gevrey(alpha={alpha})"),
            KernelKind::Classical { k } => format!("classical(k={k})"),
            KernelKind::Maergoiz { .. } => format!("maergoiz(omega={})", self.omega),
            KernelKind::Rescaled { base, s } => format!("rescaled({}, s={s})", base.tag()),
            KernelKind::Custom { name, .. } => format!("custom({name})"),
        }
    }

    /// The unnormalized formula.
    pub fn raw_eval(&self, z: SurfacePoint) -> Complex64 {
        match &self.kind {
            KernelKind::Gevrey { alpha } => {
                let w = z.powf(1.0 / alpha).to_complex();
                w * (-w).exp() / *alpha
            }
            KernelKind::Classical { k } => {
                let w = z.powf(*k).to_complex();
                w * (-w).exp() * *k
            }
            KernelKind::Maergoiz { v } => z.to_complex() * (-v(z)).exp() / self.omega,
            KernelKind::Rescaled { base, s } => base.eval(z.powf(1.0 / s)) / *s,
            KernelKind::Custom { e, .. } => e(z),
        }
    }

    pub fn eval(&self, z: SurfacePoint) -> Complex64 {
        self.raw_eval(z) * self.scale
    }

    pub fn eval_real(&self, x: f64) -> f64 {
        self.eval(SurfacePoint::new(x, 0.0)).re
    }

    pub fn closed_form_moment(&self, lambda: Complex64) -> Option<Complex64> {
        self.law.as_ref().map(|l| l.eval(lambda))
    }

    /// `m_e(λ)`: the closed form when known, otherwise quadrature.
    pub fn moment(&self, lambda: Complex64, tol: f64) -> Result<Complex64> {
        check_lambda(lambda)?;
        if let Some(v) = self.closed_form_moment(lambda) {
            return Ok(v);
        }
        if let KernelKind::Rescaled { base, s } = &self.kind {
            return base.moment(lambda * *s, tol);
        }
        self.moment_by_quadrature(lambda, tol).map(|q| q.value)
    }

    /// `∫₀^∞ t^{λ−1} e(t) dt`, split at `t = 1` with `t = e^{−u}` on `(0, 1)`.
    pub fn moment_by_quadrature(&self, lambda: Complex64, tol: f64) -> Result<Quadrature> {
        check_lambda(lambda)?;
        positive("tol", tol)?;
        let tolerance = Tolerance::relative(tol);
        let near = integrate_to_infinity(
            |u| {
                let e = self.eval(SurfacePoint::new((-u).exp(), 0.0));
                if e == Complex64::new(0.0, 0.0) {
                    e
                } else {
                    (e.ln() - lambda * u).exp()
                }
            },
            0.0,
            1.0,
            tolerance,
        )?;
        let far = integrate_to_infinity(
            |t| {
                let e = self.eval(SurfacePoint::new(t, 0.0));
                if e == Complex64::new(0.0, 0.0) {
                    e
                } else {
                    (e.ln() + (lambda - 1.0) * t.ln()).exp()
                }
            },
            1.0,
            1.0,
            tolerance,
        )?;
        let value = near.value + far.value;
        let error = near.error + far.error;
        if error > tol * value.norm() && error > f64::MIN_POSITIVE {
            return Err(Error::Quadrature {
                what: format!("moment at λ = {lambda}"),
                estimate: value.norm(),
                error,
            });
        }
        Ok(Quadrature {
            value,
            error,
            evals: near.evals + far.evals,
        })
    }

    /// `log m_e(x)` for real `x ≥ 0`.
    pub fn log_moment(&self, x: f64, tol: f64) -> Result<f64> {
        if let Some(l) = &self.law {
            return Ok(l.log_real(x));
        }
        if let KernelKind::Rescaled { base, s } = &self.kind {
            return base.log_moment(s * x, tol);
        }
        let v = self
            .moment_by_quadrature(Complex64::new(x, 0.0), tol)?
            .value
            .re;
        if !(v > 0.0) {
            return Err(Error::domain(format!("moment at {x} is not positive: {v}")));
        }
        Ok(v.ln())
    }

    /// Log-moments `0..` used by the `E` series when there is no closed form.
    fn cached_log_moments(&self) -> &[f64] {
        self.log_moment_cache.get_or_init(|| {
            let mut out = Vec::with_capacity(CACHE_DEPTH + 1);
            for p in 0..=CACHE_DEPTH {
                match self.log_moment(p as f64, CACHE_TOL) {
                    Ok(l) if l.is_finite() => out.push(l),
                    _ => break,
                }
            }
            out
        })
    }

    /// `log m_e(n)` for the `E` series, `None` past the available depth.
    fn series_log_moment(&self, n: usize) -> Option<f64> {
        match &self.law {
            Some(l) => Some(l.log_real(n as f64)),
            None => self.cached_log_moments().get(n).copied(),
        }
    }

    /// For `ω ≥ 2`, a kernel `ẽ` with `ω/s < 2` and the factor `s` such that
    /// `e(z) = ẽ(z^{1/s})/s`. `None` when `ω < 2`.
    pub fn borel_base(&self) -> Result<Option<(Kernel, f64)>> {
        if self.omega < 2.0 {
            return Ok(None);
        }
        let s = self.omega.floor() + 1.0;
        match &self.kind {
            KernelKind::Rescaled { base, s } => match base.borel_base()? {
                None => Ok(Some(((**base).clone(), *s))),
                Some((b, s2)) => Ok(Some((b, s * s2))),
            },
            KernelKind::Gevrey { alpha } => Ok(Some((gevrey_kernel(alpha / s)?, s))),
            KernelKind::Classical { k } => Ok(Some((classical_kernel(k * s)?, s))),
            _ => {
                let outer = self.clone();
                let e: SurfaceFn = Arc::new(move |w: SurfacePoint| outer.eval(w.powf(s)) * s);
                let law = self.law.as_ref().map(|l| l.rescaled(1.0 / s));
                let base =
                    custom_kernel(&format!("{}^(1/{s})", self.tag()), e, self.omega / s, law)?;
                Ok(Some((base, s)))
            }
        }
    }

    /// `E(z)` by whichever of the series and the large-argument expansion
    /// has the smaller error estimate, regardless of any tolerance.
    pub fn entire_e_best(&self, z: Complex64) -> Result<EValue> {
        entire::best(self, z)
    }

    /// `E(z)` with relative error estimate at most `tol`.
    pub fn entire_e(&self, z: Complex64, tol: f64) -> Result<EValue> {
        let v = self.entire_e_best(z)?;
        if v.error > tol * v.value.norm() {
            return Err(Error::depth(format!(
                "tail of E-series unavailable at |z| = {:.4e}: best error {:.2e} for value {:.4e}",
                z.norm(),
                v.error,
                v.value.norm()
            )));
        }
        Ok(v)
    }
}

fn check_lambda(lambda: Complex64) -> Result<()> {
    if !(lambda.re >= 0.0 && lambda.im.is_finite() && lambda.re.is_finite()) {
        return Err(Error::domain(format!(
            "moment needs Re λ >= 0, got {lambda}"
        )));
    }
    Ok(())
}

/// Free-function form of [`Kernel::moment`].
pub fn moment(kernel: &Kernel, lambda: Complex64, tol: f64) -> Result<Complex64> {
    kernel.moment(lambda, tol)
}

/// Moments `m_e(0)..m_e(N)` with per-entry quadrature errors.
#[derive(Debug, Clone)]
pub struct MomentSequence {
    values: Vec<f64>,
    log_values: Vec<f64>,
    quotients: Vec<f64>,
    errors: Vec<f64>,
    source: String,
    law: Option<MomentLaw>,
}

impl PartialEq for MomentSequence {
    fn eq(&self, other: &Self) -> bool {
        self.values == other.values
            && self.log_values == other.log_values
            && self.source == other.source
    }
}

impl MomentSequence {
    fn assemble(
        values: Vec<f64>,
        log_values: Vec<f64>,
        quotients: Vec<f64>,
        errors: Vec<f64>,
        source: &str,
    ) -> Self {
        MomentSequence {
            values,
            log_values,
            quotients,
            errors,
            source: source.to_string(),
            law: None,
        }
    }

    /// A sequence from explicit positive values; log-convexity is not required.
    pub fn from_values(values: Vec<f64>, source: &str) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::param("a moment sequence needs at least two entries"));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::param(format!("moment {v} is not a positive number")));
        }
        let log_values: Vec<f64> = values.iter().map(|v| v.ln()).collect();
        let quotients = values.windows(2).map(|w| w[1] / w[0]).collect();
        let n = values.len();
        Ok(Self::assemble(
            values,
            log_values,
            quotients,
            vec![0.0; n],
            source,
        ))
    }

    /// `m(p) = p!` with exact quotients `p + 1`.
    pub fn factorial(n: usize) -> Self {
        Self::from_law(
            &MomentLaw::Gamma {
                alpha: 1.0,
                beta: 1.0,
            },
            n,
            "factorial",
        )
    }

    /// `m(0)..m(n)` from a closed-form law.
    pub fn from_law(law: &MomentLaw, n: usize, source: &str) -> Self {
        let log_values: Vec<f64> = (0..=n).map(|p| law.log_real(p as f64)).collect();
        let values: Vec<f64> = (0..=n).map(|p| law.real(p as f64)).collect();
        let quotients = (0..n)
            .map(|p| {
                law.integer_quotient(p).unwrap_or_else(|| {
                    let q = values[p + 1] / values[p];
                    if q.is_finite() && q > 0.0 {
                        q
                    } else {
                        (log_values[p + 1] - log_values[p]).exp()
                    }
                })
            })
            .collect();
        let mut s = Self::assemble(values, log_values, quotients, vec![0.0; n + 1], source);
        s.law = Some(law.clone());
        s
    }

    pub fn depth(&self) -> usize {
        self.values.len() - 1
    }

    /// `m(p)`; may overflow to infinity where only the logarithm is finite.
    pub fn value(&self, p: usize) -> f64 {
        self.values[p]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn log_value(&self, p: usize) -> f64 {
        self.log_values[p]
    }

    pub fn log_values(&self) -> &[f64] {
        &self.log_values
    }

    /// `m(p+1)/m(p)`.
    pub fn quotient(&self, p: usize) -> f64 {
        self.quotients[p]
    }

    pub fn errors(&self) -> &[f64] {
        &self.errors
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn law(&self) -> Option<&MomentLaw> {
        self.law.as_ref()
    }

    /// `m(x)` at a real argument, through the closed form when the index
    /// is not an integer within the table.
    pub fn at(&self, x: f64) -> Option<f64> {
        if x >= 0.0 && x.fract() == 0.0 && (x as usize) <= self.depth() {
            return Some(self.values[x as usize]);
        }
        self.law.as_ref().map(|l| l.real(x))
    }

    /// `log m(x)` at a real argument; see [`MomentSequence::at`].
    pub fn log_at(&self, x: f64) -> Option<f64> {
        if x >= 0.0 && x.fract() == 0.0 && (x as usize) <= self.depth() {
            return Some(self.log_values[x as usize]);
        }
        self.law.as_ref().map(|l| l.log_real(x))
    }

    /// Index of the first `p` with `m(p)² > m(p−1) m(p+1)` beyond the
    /// combined rounding and quadrature slack.
    pub fn first_convexity_violation(&self) -> Option<usize> {
        (1..self.depth()).find(|&p| {
            let l = &self.log_values;
            let rel = |i: usize| self.errors[i] / self.values[i].max(f64::MIN_POSITIVE);
            let slack = 1e-12 * (1.0 + l[p].abs()) + 2.0 * rel(p) + rel(p - 1) + rel(p + 1);
            2.0 * l[p] > l[p - 1] + l[p + 1] + slack
        })
    }

    pub fn is_log_convex(&self) -> bool {
        self.first_convexity_violation().is_none()
    }

    /// The sequence as a [`SequenceTable`] (requires `m(0) = 1`).
    pub fn to_table(&self) -> Result<SequenceTable> {
        SequenceTable::from_log_values(self.log_values.clone())
    }

    /// CSV lines `p,m_p,quad_error` with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("p,m_p,quad_error\n");
        for p in 0..=self.depth() {
            out.push_str(&format!(
                "{p},{:.17e},{:.3e}\n",
                self.values[p], self.errors[p]
            ));
        }
        out
    }
}

/// `m_e(0)..m_e(N)`, verified positive and log-convex.
pub fn moment_sequence(kernel: &Kernel, n: usize, tol: f64) -> Result<MomentSequence> {
    if n < 2 {
        return Err(Error::param(format!(
            "moment depth must be at least 2, got {n}"
        )));
    }
    let seq = match kernel.law() {
        Some(law) => MomentSequence::from_law(law, n, &kernel.tag()),
        None => {
            let mut values = Vec::with_capacity(n + 1);
            let mut errors = Vec::with_capacity(n + 1);
            for p in 0..=n {
                let (v, e) = match &kernel.kind {
                    KernelKind::Rescaled { base, s } => {
                        let q =
                            base.moment_by_quadrature(Complex64::new(s * p as f64, 0.0), tol)?;
                        (q.value.re, q.error)
                    }
                    _ => {
                        let q = kernel.moment_by_quadrature(Complex64::new(p as f64, 0.0), tol)?;
                        (q.value.re, q.error)
                    }
                };
                values.push(v);
                errors.push(e);
            }
            let mut seq = MomentSequence::from_values(values, &kernel.tag())?;
            seq.errors = errors;
            seq
        }
    };
    if let Some(p) = seq.first_convexity_violation() {
        return Err(Error::domain(format!(
            "moments of {} are not log-convex at p = {p}",
            kernel.tag()
        )));
    }
    Ok(seq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn gevrey_values_and_closed_form() {
        let k = gevrey_kernel(1.0).unwrap();
        assert!((k.eval_real(1.0) - (-1.0f64).exp()).abs() < 1e-16);
        assert_eq!(k.closed_form_moment(c(3.0)).unwrap().re, 6.0);
        let half = gevrey_kernel(0.5).unwrap();
        assert_eq!(half.moment(c(2.0), 1e-10).unwrap().re, 1.0);
    }

    #[test]
    fn quadrature_matches_gamma() {
        let k = gevrey_kernel(1.0).unwrap();
        let q = k.moment_by_quadrature(c(4.0), 1e-11).unwrap();
        assert!(rel(q.value.re, 24.0) < 1e-10);
        let half = gevrey_kernel(0.5).unwrap();
        let q = half.moment_by_quadrature(c(6.0), 1e-11).unwrap();
        assert!(rel(q.value.re, 6.0) < 1e-10);
    }

    #[test]
    fn classical_kernel_moments_by_independent_quadrature() {
        // ∫ t^p e^{-t} dt by the trapezoid rule on [0, 60].
        let k = classical_kernel(1.0).unwrap();
        for p in 0..6 {
            let h = 1e-3;
            let f = |t: f64| t.powi(p) * (-t).exp();
            let oracle: f64 =
                h * (0.5 * f(0.0) + (1..60_000).map(|i| f(i as f64 * h)).sum::<f64>());
            let m = k.moment_by_quadrature(c(p as f64), 1e-11).unwrap().value.re;
            assert!(rel(m, oracle) < 1e-6, "p = {p}: {m} vs {oracle}");
        }
        assert!(k.eval_real(0.7) > 0.0);
        let k2 = classical_kernel(2.0).unwrap();
        assert!(
            rel(
                k2.moment_by_quadrature(c(0.0), 1e-11).unwrap().value.re,
                1.0
            ) < 1e-10
        );
    }

    #[test]
    fn maergoiz_matches_classical_for_linear_v() {
        let k = maergoiz_kernel(Arc::new(|z: SurfacePoint| z.to_complex()), 1.0).unwrap();
        assert!(k.diagnostics().is_empty(), "{:?}", k.diagnostics());
        for &x in &[0.1, 1.0, 3.0] {
            assert!(rel(k.eval_real(x), x * (-x).exp()) < 1e-10);
        }
        let sq =
            maergoiz_kernel(Arc::new(|z: SurfacePoint| z.powf(2.0).to_complex()), 0.5).unwrap();
        assert!(rel(sq.raw_eval(1.3.into()).re, 2.0 * 1.3 * (-1.69f64).exp()) < 1e-14);
        // ∫ 2 e^{-t²} dt = √π
        assert!(rel(sq.scale(), 1.0 / std::f64::consts::PI.sqrt()) < 1e-11);
    }

    #[test]
    fn maergoiz_log_perturbation_is_flagged_not_rejected() {
        let v: SurfaceFn = Arc::new(|z: SurfacePoint| z.powf(2.0).to_complex() - 3.0 * z.ln());
        let k = maergoiz_kernel(v, 0.5).unwrap();
        assert!(!k.diagnostics().is_empty());
        // e_V(x) = 2x⁴e^{−x²} before normalization
        let x: f64 = 1.1;
        assert!(rel(k.raw_eval(x.into()).re, 2.0 * x.powi(4) * (-x * x).exp()) < 1e-12);
    }

    #[test]
    fn maergoiz_rejects_decreasing_tail() {
        let v: SurfaceFn = Arc::new(|z: SurfacePoint| Complex64::new(1.0 / z.modulus, 0.0));
        assert!(maergoiz_kernel(v, 1.0).is_err());
    }

    #[test]
    fn rescaling_identities() {
        let g1 = gevrey_kernel(1.0).unwrap();
        let id = rescale_kernel(&g1, 1.0).unwrap();
        let r2 = rescale_kernel(&g1, 2.0).unwrap();
        let g2 = gevrey_kernel(2.0).unwrap();
        assert_eq!(r2.moment(c(1.0), 1e-10).unwrap().re, 2.0);
        assert_eq!(r2.omega(), 2.0);
        for i in 1..40 {
            let x = 0.05 * i as f64 * i as f64;
            assert_eq!(id.eval_real(x), g1.eval_real(x));
            assert!(rel(r2.eval_real(x), g2.eval_real(x)) < 1e-14);
        }
    }

    #[test]
    fn rescaled_moment_law_matches_quadrature() {
        let base = gevrey_kernel(1.0).unwrap();
        for &s in &[0.5, 2.0, 3.0] {
            let r = rescale_kernel(&base, s).unwrap();
            for &l in &[0.0, 0.5, 1.0, 2.0, 5.0] {
                let q = r.moment_by_quadrature(c(l), 1e-10).unwrap();
                let exact = base.moment(c(s * l), 1e-10).unwrap().re;
                assert!(rel(q.value.re, exact) < 1e-9, "s = {s}, λ = {l}");
            }
        }
    }

    #[test]
    fn moment_sequence_is_exact_for_factorials() {
        let k = gevrey_kernel(1.0).unwrap();
        let s = moment_sequence(&k, 5, 1e-10).unwrap();
        assert_eq!(s.values(), &[1.0, 1.0, 2.0, 6.0, 24.0, 120.0]);
        let f = MomentSequence::factorial(30);
        assert!((0..30).all(|p| f.quotient(p) == (p + 1) as f64));
        let table = crate::sequences::generate(&crate::SequenceFamily::gevrey(1.0), 5).unwrap();
        let eq = crate::sequences::equivalence_check(&table, &s.to_table().unwrap()).unwrap();
        assert_eq!(eq.bounds(), Some((1.0, 1.0)));
    }

    #[test]
    fn quadrature_sequence_for_custom_kernel() {
        let e: SurfaceFn = Arc::new(|z: SurfacePoint| {
            let w = z.to_complex();
            z.powf(1.5).to_complex() * (-w).exp()
        });
        let k = custom_kernel("z^1.5 e^-z", e, 1.0, None).unwrap();
        let s = moment_sequence(&k, 8, 1e-10).unwrap();
        for p in 0..=8 {
            let exact = gamma(p as f64 + 1.5) / gamma(1.5);
            assert!(rel(s.value(p), exact) < 1e-9, "p = {p}");
        }
        assert!(s.errors().iter().all(|e| *e >= 0.0));
    }

    #[test]
    fn negative_real_part_is_rejected() {
        let k = gevrey_kernel(1.0).unwrap();
        assert!(k.moment(c(-0.5), 1e-10).is_err());
    }

    #[test]
    fn wrong_moments_break_convexity_check() {
        let s = MomentSequence::from_values(vec![1.0, 1.0, 2.0, 3.0, 24.0], "injected").unwrap();
        assert_eq!(s.first_convexity_violation(), Some(2));
    }

    proptest! {
        #[test]
        fn closed_form_and_quadrature_agree(alpha in 0.3f64..2.5, p in 0u32..=20) {
            let k = gevrey_kernel(alpha).unwrap();
            let tol = 1e-10;
            let q = k.moment_by_quadrature(c(p as f64), tol).unwrap().value.re;
            let exact = k.closed_form_moment(c(p as f64)).unwrap().re;
            prop_assert!(rel(q, exact) <= 10.0 * tol, "{} vs {}", q, exact);
        }

        #[test]
        fn law_sequences_are_positive_and_log_convex(alpha in 0.1f64..4.0, beta in 0.5f64..3.0) {
            let s = MomentSequence::from_law(&MomentLaw::Gamma { alpha, beta }, 60, "law");
            prop_assert!(s.values().iter().all(|v| *v > 0.0));
            prop_assert!(s.is_log_convex());
        }
    }
}
