//! Moment-partial differential equations `P(∂_{m₁,t}, ∂_{m₂,z})u = 0`:
//! moment derivatives on truncated series, formal solutions of the
//! single-factor problems, and growth/summability classification of their
//! coefficients.

use crate::error::{Error, Result};
use crate::kernels::{MomentSequence, SurfaceFn, SurfacePoint};
use crate::sequences::{tail_grows, SequenceTable};
use crate::summation::Pade;
use crate::transforms::{growth_class_fit, FormalSeries, GrowthFit, Sector};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// `m(p+k)/(m(p)·m₁(j))` from exact quotients, alternating the factors of
/// numerator and denominator so that integer ratios stay exact.
fn shift_ratio(
    m: &MomentSequence,
    p: usize,
    k: usize,
    m1: Option<(&MomentSequence, usize)>,
) -> f64 {
    let j = m1.map_or(0, |(_, j)| j);
    let mut r = 1.0;
    for i in 0..k.max(j) {
        if i < k {
            r *= m.quotient(p + i);
        }
        if let Some((m1, _)) = m1.filter(|_| i < j) {
            r /= m1.quotient(i);
        }
    }
    match m1 {
        Some((m1, _)) => r * m.value(0) / m1.value(0),
        None => r,
    }
}

/// `log m(x)`, interpolating linearly between integer indices when the
/// sequence has no closed-form law.
fn log_moment_at(m: &MomentSequence, x: f64) -> Option<f64> {
    if let Some(v) = m.log_at(x) {
        return Some(v);
    }
    let i = x.floor() as usize;
    if x < 0.0 || i + 1 > m.depth() {
        return None;
    }
    let t = x - i as f64;
    Some((1.0 - t) * m.log_value(i) + t * m.log_value(i + 1))
}

/// `∂_{m,z}ⁿ`: the moment-normalized coefficients shift by `n`.
pub fn moment_derivative(
    series: &FormalSeries,
    moments: &MomentSequence,
    n: usize,
) -> Result<FormalSeries> {
    if n == 0 {
        return Ok(series.clone());
    }
    let deg = series.degree();
    if deg < n {
        return Err(Error::depth(format!(
            "derivative of order {n} needs degree ≥ {n}, got {deg}"
        )));
    }
    if moments.depth() < deg {
        return Err(Error::depth(format!(
            "moment table depth {} is below series degree {deg}",
            moments.depth()
        )));
    }
    let c = (0..=deg - n)
        .map(|p| series.coefficient(p + n) * shift_ratio(moments, p, n, None))
        .collect();
    FormalSeries::new(c, &format!("d^{n}({})", series.origin()))
}

/// A symbol `λ(ξ)`; only polynomial symbols can be applied to series.
#[derive(Debug, Clone, PartialEq)]
pub struct Symbol {
    coefficients: Vec<Complex64>,
    mu: u32,
    nu: u32,
    leading: Option<Complex64>,
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl Symbol {
    /// `λ(ξ) = Σ c_k ξ^k`, pole order equal to the degree.
    pub fn polynomial(coefficients: &[Complex64]) -> Result<Self> {
        let mut c = coefficients.to_vec();
        if c.is_empty() {
            return Err(Error::param("symbol needs at least one coefficient"));
        }
        while c.len() > 1 && c.last() == Some(&zero()) {
            c.pop();
        }
        let leading = c.last().copied().filter(|x| *x != zero());
        Ok(Symbol {
            mu: c.len() as u32 - 1,
            nu: 1,
            coefficients: c,
            leading,
        })
    }

    pub fn real_polynomial(coefficients: &[f64]) -> Result<Self> {
        Self::polynomial(
            &coefficients
                .iter()
                .map(|&x| Complex64::new(x, 0.0))
                .collect::<Vec<_>>(),
        )
    }

    /// An algebraic symbol known only through its pole order `μ/ν` and
    /// leading term; it can be classified but not applied.
    pub fn with_pole_order(mu: u32, nu: u32, leading: Complex64) -> Result<Self> {
        if nu == 0 || mu == 0 || leading == zero() {
            return Err(Error::param(
                "pole order μ/ν needs μ, ν > 0 and a nonzero leading term",
            ));
        }
        let g = gcd(mu, nu);
        Ok(Symbol {
            coefficients: Vec::new(),
            mu: mu / g,
            nu: nu / g,
            leading: Some(leading),
        })
    }

    pub fn is_polynomial(&self) -> bool {
        !self.coefficients.is_empty()
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// `(μ, ν)` in lowest terms.
    pub fn pole_order(&self) -> (u32, u32) {
        (self.mu, self.nu)
    }

    pub fn q(&self) -> f64 {
        self.mu as f64 / self.nu as f64
    }

    pub fn leading(&self) -> Option<Complex64> {
        self.leading
    }

    /// Coefficients of `λ(ξ)^j`.
    pub fn power(&self, j: usize) -> Result<Vec<Complex64>> {
        if !self.is_polynomial() {
            return Err(Error::param("only polynomial symbols can be expanded"));
        }
        let mut out = vec![Complex64::new(1.0, 0.0)];
        for _ in 0..j {
            let mut next = vec![zero(); out.len() + self.coefficients.len() - 1];
            for (a, x) in out.iter().enumerate() {
                for (b, y) in self.coefficients.iter().enumerate() {
                    next[a + b] += x * y;
                }
            }
            out = next;
        }
        Ok(out)
    }
}

/// `λ^j(∂_{m₂,z})φ`, truncated to degree `n`; `denominator` divides by
/// `m₁(j)` inside the exact ratio.
fn symbol_power_series(
    symbol: &Symbol,
    j: usize,
    phi: &FormalSeries,
    m2: &MomentSequence,
    n: usize,
    denominator: Option<(&MomentSequence, usize)>,
) -> Result<Vec<Complex64>> {
    let power = symbol.power(j)?;
    let needed = n + power.len() - 1;
    if phi.degree() < needed || m2.depth() < needed {
        return Err(Error::depth(format!(
            "λ^{j}(∂) to degree {n} needs data and m₂ to degree {needed} (have {} and {})",
            phi.degree(),
            m2.depth()
        )));
    }
    if let Some((m1, jj)) = denominator {
        if m1.depth() < jj {
            return Err(Error::depth(format!(
                "m₁ depth {} is below {jj}",
                m1.depth()
            )));
        }
    }
    Ok((0..=n)
        .map(|p| {
            power
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != zero())
                .map(|(k, c)| c * phi.coefficient(p + k) * shift_ratio(m2, p, k, denominator))
                .sum()
        })
        .collect())
}

/// `λ^j(∂_{m₂,z})φ` with as many coefficients as the data allow.
pub fn apply_symbol_power(
    symbol: &Symbol,
    j: usize,
    phi: &FormalSeries,
    m2: &MomentSequence,
) -> Result<FormalSeries> {
    let spread = symbol.power(j)?.len() - 1;
    let top = phi.degree().min(m2.depth());
    if top < spread {
        return Err(Error::depth(format!(
            "λ^{j}(∂) needs data of degree ≥ {spread}, got {}",
            phi.degree()
        )));
    }
    let c = symbol_power_series(symbol, j, phi, m2, top - spread, None)?;
    FormalSeries::new(c, &format!("lambda^{j}({})", phi.origin()))
}

/// Truncated `Σ_{j ≤ J} u_j(z) t^j` with each `u_j` of degree `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct FormalSolution2D {
    pub coefficients: Vec<FormalSeries>,
    pub r0: f64,
}

impl FormalSolution2D {
    pub fn new(coefficients: Vec<FormalSeries>, r0: f64) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::param("a solution needs u_0 at least"));
        }
        let n = coefficients[0].degree();
        if coefficients.iter().any(|u| u.degree() != n) {
            return Err(Error::param("all u_j must share the z-truncation"));
        }
        Ok(FormalSolution2D { coefficients, r0 })
    }

    pub fn j_max(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn n_max(&self) -> usize {
        self.coefficients[0].degree()
    }

    pub fn u(&self, j: usize) -> &FormalSeries {
        &self.coefficients[j]
    }

    /// `Σ_p |u_{j,p}| r₀^p`, an upper bound for `sup_{|z| ≤ r₀} |u_j|` on
    /// the truncation.
    pub fn sup_proxies(&self) -> Vec<f64> {
        self.coefficients
            .iter()
            .map(|u| {
                u.coefficients()
                    .iter()
                    .rev()
                    .fold(0.0, |acc, c| acc * self.r0 + c.norm())
            })
            .collect()
    }
}

/// Formal solution of `(∂_{m₁,t} − λ(∂_{m₂,z}))^β u = 0` with zero data
/// below order `β−1` and `λ^{β−1}(∂)φ` at order `β−1`:
/// `u_j = C(j, β−1) λ^j(∂_{m₂,z})φ / m₁(j)`.
#[allow(clippy::too_many_arguments)]
pub fn formal_solution_single(
    beta: usize,
    symbol: &Symbol,
    phi: &FormalSeries,
    m1: &MomentSequence,
    m2: &MomentSequence,
    j_max: usize,
    n_max: usize,
    r0: f64,
) -> Result<FormalSolution2D> {
    if beta == 0 {
        return Err(Error::param("β must be at least 1"));
    }
    let coefficients = (0..=j_max)
        .into_par_iter()
        .map(|j| {
            if j + 1 < beta {
                return Ok(FormalSeries::zero(n_max));
            }
            let binom = binomial(j, beta - 1);
            let c = symbol_power_series(symbol, j, phi, m2, n_max, Some((m1, j)))?;
            FormalSeries::new(
                c.into_iter().map(|x| x * binom).collect(),
                &format!("u_{j}"),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    FormalSolution2D::new(coefficients, r0)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Coefficient-wise sum of sub-solutions.
pub fn superpose(parts: &[FormalSolution2D]) -> Result<FormalSolution2D> {
    let first = parts
        .first()
        .ok_or_else(|| Error::param("nothing to superpose"))?;
    if parts
        .iter()
        .any(|s| s.j_max() != first.j_max() || s.n_max() != first.n_max() || s.r0 != first.r0)
    {
        return Err(Error::DepthMismatch {
            left: first.j_max(),
            right: parts
                .iter()
                .map(|s| s.j_max())
                .find(|j| *j != first.j_max())
                .unwrap_or(first.j_max()),
        });
    }
    let coefficients = (0..=first.j_max())
        .map(|j| {
            let c: Vec<Complex64> = (0..=first.n_max())
                .map(|p| parts.iter().map(|s| s.u(j).coefficient(p)).sum())
                .collect();
            FormalSeries::new(c, &format!("u_{j}"))
        })
        .collect::<Result<Vec<_>>>()?;
    FormalSolution2D::new(coefficients, first.r0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Convergent,
    EntireWithGrowth,
    DivergentSummabilityCandidate,
    Unclassified,
}

impl Classification {
    pub fn label(&self) -> &'static str {
        match self {
            Classification::Convergent => "convergent",
            Classification::EntireWithGrowth => "entire-with-M-growth",
            Classification::DivergentSummabilityCandidate => "divergent-summability-candidate",
            Classification::Unclassified => "unclassified",
        }
    }
}

/// `s_j ≤ log C + j log A` fitted by least squares on `j ≥ 1`, then `C`
/// raised until the bound holds at every `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityWitness {
    pub c: f64,
    pub a: f64,
    /// `log(C Aʲ) − s_j ≥ 0`, indexed by `j`.
    pub slack: Vec<f64>,
    pub holds: bool,
}

fn witness(s: &[f64]) -> InequalityWitness {
    let pts: Vec<(f64, f64)> = s
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, v)| (j as f64, *v))
        .collect();
    let n = pts.len() as f64;
    let (mx, my) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let log_c = s
        .iter()
        .enumerate()
        .map(|(j, v)| v - j as f64 * slope)
        .fold(f64::NEG_INFINITY, f64::max);
    let slack: Vec<f64> = s
        .iter()
        .enumerate()
        .map(|(j, v)| log_c + j as f64 * slope - v)
        .collect();
    let roots: Vec<f64> = s
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, v)| (v / j as f64).exp())
        .collect();
    let finite = s.iter().all(|v| v.is_finite());
    InequalityWitness {
        c: log_c.exp(),
        a: slope.exp(),
        slack,
        holds: finite && !tail_grows(&roots),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    pub verdict: Classification,
    pub q: f64,
    /// `(m₂(qj)/m₁(j))^{1/j}` for `j = 1..J`.
    pub ratio_roots: Vec<f64>,
    /// `m₂(qj) m(j) ≤ C Dʲ m₁(j)`.
    pub entire: Option<InequalityWitness>,
    /// `m₂(qj) ≤ C₀ A₀ʲ m(j) m₁(j)`.
    pub lower: Option<InequalityWitness>,
    /// `m(j/q) m₁(j/q) ≤ C₁ A₁ʲ m₂(j)`.
    pub upper: Option<InequalityWitness>,
    /// `(sup-proxy_j · m₁(j)/m₂(qj))^{1/j}`: bounded when the proxies obey
    /// the bound `C Dʲ m₂(qj)/m₁(j)`.
    pub proxy_roots: Vec<f64>,
    pub proxy_bound_holds: bool,
    pub notes: Vec<String>,
}

impl ClassificationReport {
    /// CSV lines `j,ratio_root,ineq27_slack,ineq28_slack`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,ratio_root,ineq27_slack,ineq28_slack\n");
        let cell = |w: &Option<InequalityWitness>, j: usize| {
            w.as_ref()
                .and_then(|w| w.slack.get(j))
                .map_or(String::new(), |s| format!("{s:.10e}"))
        };
        for (i, r) in self.ratio_roots.iter().enumerate() {
            let j = i + 1;
            out.push_str(&format!(
                "{j},{r:.10e},{},{}\n",
                cell(&self.lower, j),
                cell(&self.upper, j)
            ));
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("verdict: {}\nq: {}\n", self.verdict.label(), self.q);
        let w = |name: &str, x: &Option<InequalityWitness>| {
            x.as_ref().map_or(String::new(), |w| {
                format!(
                    "{name}: C = {:.6e}, A = {:.6e}, holds = {}\n",
                    w.c, w.a, w.holds
                )
            })
        };
        out.push_str(&w("entire bound", &self.entire));
        out.push_str(&w("lower moment inequality", &self.lower));
        out.push_str(&w("upper moment inequality", &self.upper));
        out.push_str(&format!(
            "sup-proxy bound holds: {}\n",
            self.proxy_bound_holds
        ));
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        out
    }
}

/// Classifies the growth of `m₂(qj)/m₁(j)`, optionally against a
/// candidate sequence `m`.
pub fn growth_classify(
    solution: &FormalSolution2D,
    m1: &MomentSequence,
    m2: &MomentSequence,
    q: f64,
    candidate: Option<&MomentSequence>,
) -> Result<ClassificationReport> {
    let jm = solution.j_max();
    if jm < 4 {
        return Err(Error::depth(format!(
            "classification needs J ≥ 4, got {jm}"
        )));
    }
    let mut notes = Vec::new();
    let lm = |m: &MomentSequence, x: f64, name: &str, notes: &mut Vec<String>| {
        let v = log_moment_at(m, x)
            .ok_or_else(|| Error::depth(format!("{name}({x}) beyond table depth {}", m.depth())))?;
        if m.law().is_none()
            && x.fract() != 0.0
            && !notes.iter().any(|n: &String| n.starts_with(name))
        {
            notes.push(format!(
                "{name} at non-integer arguments is interpolated in log scale"
            ));
        }
        Ok::<f64, Error>(v)
    };
    let mut log_r = Vec::with_capacity(jm + 1);
    for j in 0..=jm {
        log_r.push(lm(m2, q * j as f64, "m2", &mut notes)? - lm(m1, j as f64, "m1", &mut notes)?);
    }
    let ratio_roots: Vec<f64> = (1..=jm).map(|j| (log_r[j] / j as f64).exp()).collect();
    let convergent = !tail_grows(&ratio_roots);

    let proxies = solution.sup_proxies();
    let proxy_roots: Vec<f64> = (1..=jm)
        .filter(|&j| proxies[j] > 0.0)
        .map(|j| ((proxies[j].ln() - log_r[j]) / j as f64).exp())
        .collect();
    let proxy_bound_holds = !tail_grows(&proxy_roots);

    let (mut entire, mut lower, mut upper) = (None, None, None);
    if let Some(m) = candidate {
        let mut s_entire = Vec::new();
        let mut s_lower = Vec::new();
        let mut s_upper = Vec::new();
        for j in 0..=jm {
            let jf = j as f64;
            let log_m = lm(m, jf, "m", &mut notes)?;
            s_entire.push(log_r[j] + log_m);
            s_lower.push(log_r[j] - log_m);
            let x = jf / q;
            s_upper.push(
                lm(m, x, "m", &mut notes)? + lm(m1, x, "m1", &mut notes)?
                    - lm(m2, jf, "m2", &mut notes)?,
            );
        }
        entire = Some(witness(&s_entire));
        lower = Some(witness(&s_lower));
        upper = Some(witness(&s_upper));
    }
    let verdict = if convergent {
        Classification::Convergent
    } else if entire.as_ref().is_some_and(|w| w.holds) {
        Classification::EntireWithGrowth
    } else if lower.as_ref().is_some_and(|w| w.holds) && upper.as_ref().is_some_and(|w| w.holds) {
        Classification::DivergentSummabilityCandidate
    } else {
        Classification::Unclassified
    };
    Ok(ClassificationReport {
        verdict,
        q,
        ratio_roots,
        entire,
        lower,
        upper,
        proxy_roots,
        proxy_bound_holds,
        notes,
    })
}

/// Summability of `Σ u_j(z) t^j` in direction `d`: the sup-norm proxies of
/// `v_j = u_j/m(j)` are continued by a rational approximant and their
/// growth is fitted on the ray.
#[derive(Debug, Clone)]
pub struct TwoVariableReport {
    pub direction: f64,
    pub proxies: Vec<f64>,
    /// `v_j(0)`, the `t`-series at `z = 0`.
    pub origin_series: FormalSeries,
    pub poles: Vec<Complex64>,
    pub growth: Option<GrowthFit>,
    pub certified: bool,
    pub reasons: Vec<String>,
    origin_approximant: Option<Pade>,
}

impl TwoVariableReport {
    /// The continued `Σ v_j(0) tʲ`.
    pub fn origin_value(&self, t: Complex64) -> Option<Complex64> {
        self.origin_approximant.as_ref().map(|p| p.eval(t))
    }
}

fn pole_on_ray(p: Complex64, d: f64) -> bool {
    let dir = Complex64::from_polar(1.0, d);
    let along = (p * dir.conj()).re;
    along > 0.0 && (p - dir * along).norm() <= 1e-6 * p.norm().max(1.0)
}

pub fn summability_2var_check(
    solution: &FormalSolution2D,
    m: &MomentSequence,
    d: f64,
) -> Result<TwoVariableReport> {
    let jm = solution.j_max();
    if m.depth() < jm {
        return Err(Error::DepthMismatch {
            left: jm,
            right: m.depth(),
        });
    }
    let proxies: Vec<f64> = solution
        .sup_proxies()
        .iter()
        .enumerate()
        .map(|(j, s)| s / m.value(j))
        .collect();
    let origin: Vec<Complex64> = (0..=jm)
        .map(|j| solution.u(j).coefficient(0) / m.value(j))
        .collect();
    let origin_series = FormalSeries::new(origin.clone(), "v_j(0)")?;
    let (mdeg, ndeg) = (jm - jm / 2, jm / 2);
    let origin_approximant = Pade::new(&origin, mdeg, ndeg).ok();
    let mut reasons = Vec::new();
    if proxies.iter().all(|p| *p == 0.0) {
        return Ok(TwoVariableReport {
            direction: d,
            proxies,
            origin_series,
            poles: Vec::new(),
            growth: None,
            certified: true,
            reasons: vec!["zero solution".into()],
            origin_approximant,
        });
    }
    let proxy_c: Vec<Complex64> = proxies.iter().map(|p| Complex64::new(*p, 0.0)).collect();
    let pade = Pade::new(&proxy_c, mdeg, ndeg)?;
    let mut poles = pade.poles();
    if let Some(o) = &origin_approximant {
        poles.extend(o.poles());
    }
    let blocking: Vec<String> = poles
        .iter()
        .filter(|p| pole_on_ray(**p, d))
        .map(|p| format!("{p:.6}"))
        .collect();
    if !blocking.is_empty() {
        reasons.push(format!(
            "approximant poles on the ray arg t = {d}: {}",
            blocking.join(", ")
        ));
    }
    let growth = if blocking.is_empty() {
        let table: SequenceTable = m.to_table()?;
        let ray = Sector::new(d, 0.05, None)?;
        let r_max = (0.25 * table.quotient(table.depth() - 1)).min(1e2);
        let pts = ray.sample_points(1e-2, r_max, 40, 3);
        let fit = growth_class_fit(|t| pade.eval(t.to_complex()), &table, &ray, &pts);
        if !fit.member() {
            reasons.push(format!(
                "sup-proxy continuation not of the candidate growth: {}",
                fit.fit.note
            ));
        }
        Some(fit)
    } else {
        None
    };
    Ok(TwoVariableReport {
        direction: d,
        proxies,
        origin_series,
        certified: reasons.is_empty(),
        poles,
        growth,
        reasons,
        origin_approximant,
    })
}

/// One factor `(λ − λ_α(ξ))^{n_α}` of the symbol of the equation.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    pub symbol: Symbol,
    pub multiplicity: usize,
}

/// A problem `P(∂_{m₁,t}, ∂_{m₂,z})u = 0` with `n = Σ n_α` data entries.
///
/// The data are taken already decomposed: entry `k` is `φ_{αβ}` for the
/// `k`-th pair `(α, β)` in factor order with `β = 1..n_α`.
#[derive(Clone)]
pub struct MPDEProblem {
    pub factors: Vec<Factor>,
    pub m1: MomentSequence,
    pub m2: MomentSequence,
    pub data: Vec<FormalSeries>,
    /// Optional closed forms of the data, used for growth checks.
    pub evaluators: Vec<Option<SurfaceFn>>,
    pub j_max: usize,
    pub n_max: usize,
    pub r0: f64,
}

impl std::fmt::Debug for MPDEProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MPDEProblem")
            .field("factors", &self.factors)
            .field("m1", &self.m1.source())
            .field("m2", &self.m2.source())
            .field("data", &self.data.len())
            .field("j_max", &self.j_max)
            .field("n_max", &self.n_max)
            .field("r0", &self.r0)
            .finish()
    }
}

impl MPDEProblem {
    pub fn new(
        factors: Vec<Factor>,
        m1: MomentSequence,
        m2: MomentSequence,
        data: Vec<FormalSeries>,
        j_max: usize,
        n_max: usize,
        r0: f64,
    ) -> Result<Self> {
        let n: usize = factors.iter().map(|f| f.multiplicity).sum();
        if factors.is_empty() || factors.iter().any(|f| f.multiplicity == 0) {
            return Err(Error::param("every factor needs a positive multiplicity"));
        }
        if n != data.len() {
            return Err(Error::param(format!(
                "{} data entries supplied for an equation of order {n}",
                data.len()
            )));
        }
        if !(r0 > 0.0) {
            return Err(Error::param(format!("r0 must be positive, got {r0}")));
        }
        Ok(MPDEProblem {
            evaluators: vec![None; data.len()],
            factors,
            m1,
            m2,
            data,
            j_max,
            n_max,
            r0,
        })
    }

    pub fn with_evaluator(mut self, k: usize, f: SurfaceFn) -> Result<Self> {
        let slot = self
            .evaluators
            .get_mut(k)
            .ok_or_else(|| Error::param(format!("no data entry {k}")))?;
        *slot = Some(f);
        Ok(self)
    }

    pub fn order(&self) -> usize {
        self.data.len()
    }

    /// Whether every factor has the same pole order.
    pub fn assumption_a(&self) -> bool {
        let q0 = self.factors[0].symbol.pole_order();
        self.factors
            .iter()
            .all(|f| f.symbol.pole_order() == q0 && f.symbol.leading().is_some())
    }

    /// `(α, β, φ_{αβ})` in data order.
    fn pieces(&self) -> Vec<(usize, usize, &FormalSeries)> {
        let mut out = Vec::new();
        let mut k = 0;
        for (a, f) in self.factors.iter().enumerate() {
            for b in 1..=f.multiplicity {
                out.push((a, b, &self.data[k]));
                k += 1;
            }
        }
        out
    }

    /// Normalized formal solution as the superposition of the single-factor
    /// solutions.
    pub fn formal_solution(&self) -> Result<FormalSolution2D> {
        let parts = self
            .pieces()
            .into_iter()
            .map(|(a, b, phi)| {
                formal_solution_single(
                    b,
                    &self.factors[a].symbol,
                    phi,
                    &self.m1,
                    &self.m2,
                    self.j_max,
                    self.n_max,
                    self.r0,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        superpose(&parts)
    }
}

/// Data condition in one direction.
#[derive(Debug, Clone, PartialEq)]
pub struct DataDirectionCheck {
    pub factor: usize,
    pub beta: usize,
    pub direction: f64,
    pub holds: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct DirectionRow {
    pub solution_direction: f64,
    pub solution_certified: bool,
    pub data: Vec<DataDirectionCheck>,
    pub data_holds: bool,
    /// Whether the two sides of the equivalence agree.
    pub agree: bool,
}

#[derive(Debug, Clone)]
pub struct AssumptionAReport {
    pub mu: u32,
    pub nu: u32,
    pub classification: ClassificationReport,
    pub rows: Vec<DirectionRow>,
}

impl AssumptionAReport {
    pub fn to_text(&self) -> String {
        let mut out = format!("q = {}/{}\n", self.mu, self.nu);
        out.push_str(&self.classification.to_text());
        for r in &self.rows {
            out.push_str(&format!(
                "direction {:.6}: solution {}, data {}{}\n",
                r.solution_direction,
                if r.solution_certified {
                    "certified"
                } else {
                    "not-certified"
                },
                if r.data_holds { "holds" } else { "fails" },
                if r.agree { "" } else { " (sides disagree)" }
            ));
            for c in &r.data {
                out.push_str(&format!(
                    "  data (α = {}, β = {}) at {:.6}: {} {}\n",
                    c.factor + 1,
                    c.beta,
                    c.direction,
                    if c.holds { "holds" } else { "fails" },
                    c.detail
                ));
            }
        }
        out
    }
}

/// Direction bookkeeping for problems whose factors share a pole order
/// `q = μ/ν`: for each `d + 2nπ/ν` the solution is checked for summability
/// and every `φ_{αβ}` for growth `m^{(1/q)}` on the `μ` directions
/// `(d + arg λ_α)/q + 2kπ/μ`.
pub fn assumption_a_classify(
    problem: &MPDEProblem,
    candidate: &MomentSequence,
    d: f64,
) -> Result<AssumptionAReport> {
    if !problem.assumption_a() {
        return Err(Error::param("factors do not share a common pole order"));
    }
    let (mu, nu) = problem.factors[0].symbol.pole_order();
    let q = mu as f64 / nu as f64;
    let solution = problem.formal_solution()?;
    let classification = growth_classify(&solution, &problem.m1, &problem.m2, q, Some(candidate))?;

    // m^{(1/q)} = (m(p)^{1/q}).
    let data_table = SequenceTable::from_log_values(
        (0..=candidate.depth())
            .map(|p| candidate.log_value(p) / q)
            .collect(),
    )?;
    let mut data = Vec::new();
    let mut k_index = 0;
    for (a, f) in problem.factors.iter().enumerate() {
        let arg = f.symbol.leading().map_or(0.0, |l| l.arg());
        for b in 1..=f.multiplicity {
            let phi = &problem.data[k_index];
            let evaluator = problem.evaluators[k_index].clone();
            for k in 0..mu {
                let dir = (d + arg) / q + 2.0 * PI * k as f64 / mu as f64;
                data.push(data_check(a, b, phi, evaluator.as_ref(), &data_table, dir)?);
            }
            k_index += 1;
        }
    }
    let data_holds = data.iter().all(|c| c.holds);
    let rows = (0..nu)
        .map(|n| {
            let dir = d + 2.0 * PI * n as f64 / nu as f64;
            let s = summability_2var_check(&solution, candidate, dir)?;
            Ok(DirectionRow {
                solution_direction: dir,
                solution_certified: s.certified,
                data: data.clone(),
                data_holds,
                agree: s.certified == data_holds,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AssumptionAReport {
        mu,
        nu,
        classification,
        rows,
    })
}

fn data_check(
    factor: usize,
    beta: usize,
    phi: &FormalSeries,
    evaluator: Option<&SurfaceFn>,
    table: &SequenceTable,
    direction: f64,
) -> Result<DataDirectionCheck> {
    let ray = Sector::new(direction, 0.05, None)?;
    let r_max = (0.25 * table.quotient(table.depth() - 1)).min(1e2);
    let pts = ray.sample_points(1e-2, r_max, 40, 3);
    let (fit, detail) = match evaluator {
        Some(f) => (
            growth_class_fit(|z| f(z), table, &ray, &pts),
            "closed form".to_string(),
        ),
        None => {
            let d = phi.degree();
            let pade = Pade::new(phi.coefficients(), d - d / 2, d / 2)?;
            if let Some(p) = pade
                .poles()
                .into_iter()
                .find(|p| pole_on_ray(*p, direction))
            {
                return Ok(DataDirectionCheck {
                    factor,
                    beta,
                    direction,
                    holds: false,
                    detail: format!("singularity at {p:.6} on the ray"),
                });
            }
            (
                growth_class_fit(
                    |z: SurfacePoint| pade.eval(z.to_complex()),
                    table,
                    &ray,
                    &pts,
                ),
                "rational continuation".to_string(),
            )
        }
    };
    Ok(DataDirectionCheck {
        factor,
        beta,
        direction,
        holds: fit.member(),
        detail: format!("{detail}: {}", fit.fit.note),
    })
}
