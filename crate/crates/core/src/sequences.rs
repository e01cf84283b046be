//! Strongly regular sequences and their associated functions.
//!
//! Tables store `log M_p` so that factorial-type sequences can be carried far
//! beyond the range of `f64`. Every verdict produced here is a finite-depth
//! statement about the stored prefix.

use crate::error::{Error, Result};

/// Relative slack used when comparing quantities computed in log space.
const LOG_SLACK: f64 = 1e-12;

/// Grid ratio for the μ and ρ(s) witness searches.
pub const WITNESS_GRID: f64 = 1.05;

/// Closed-form families of sequences `(M_p)` with `M_0 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub enum SequenceFamily {
    /// `M_p = p!^α`.
    Gevrey { alpha: f64 },
    /// `M_p = p!^α ∏_{m=0}^{p} log^β(e + m)`.
    GevreyLog { alpha: f64, beta: f64 },
    /// `M_p = q^{p²}`.
    QPower { q: f64 },
    /// Termwise product.
    Product(Box<SequenceFamily>, Box<SequenceFamily>),
    /// Termwise power `M_p^exponent`; pass `1/s` for the `M^{(1/s)}` convention.
    Power {
        base: Box<SequenceFamily>,
        exponent: f64,
    },
    /// Explicit values, starting with 1.
    Explicit(Vec<f64>),
}

impl SequenceFamily {
    pub fn gevrey(alpha: f64) -> Self {
        SequenceFamily::Gevrey { alpha }
    }

    pub fn product(a: SequenceFamily, b: SequenceFamily) -> Self {
        SequenceFamily::Product(Box::new(a), Box::new(b))
    }

    pub fn power(base: SequenceFamily, exponent: f64) -> Self {
        SequenceFamily::Power {
            base: Box::new(base),
            exponent,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SequenceFamily::Gevrey { alpha } => positive("alpha", *alpha),
            SequenceFamily::GevreyLog { alpha, beta } => {
                positive("alpha", *alpha)?;
                if !beta.is_finite() {
                    return Err(Error::param("beta must be finite"));
                }
                Ok(())
            }
            SequenceFamily::QPower { q } => {
                if !(q.is_finite() && *q > 1.0) {
                    return Err(Error::param(format!("q must exceed 1, got {q}")));
                }
                Ok(())
            }
            SequenceFamily::Product(a, b) => {
                a.validate()?;
                b.validate()
            }
            SequenceFamily::Power { base, exponent } => {
                positive("exponent", *exponent)?;
                base.validate()
            }
            SequenceFamily::Explicit(values) => {
                if values.first() != Some(&1.0) {
                    return Err(Error::param("explicit values must start with 1"));
                }
                if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
                    return Err(Error::param(format!(
                        "explicit value {v} is not a positive number"
                    )));
                }
                for p in 1..values.len().saturating_sub(1) {
                    let before = values[p] / values[p - 1];
                    let after = values[p + 1] / values[p];
                    if after < before * (1.0 - LOG_SLACK) {
                        return Err(Error::param(format!(
                            "explicit quotients decrease at p = {p} ({before} > {after})"
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    /// `(m_p, log m_p)` for the quotient `m_p = M_{p+1}/M_p`.
    fn quotient(&self, p: usize) -> (f64, f64) {
        let n = (p + 1) as f64;
        match self {
            SequenceFamily::Gevrey { alpha } => (n.powf(*alpha), alpha * n.ln()),
            SequenceFamily::GevreyLog { alpha, beta } => {
                let l = (std::f64::consts::E + n).ln();
                (
                    n.powf(*alpha) * l.powf(*beta),
                    alpha * n.ln() + beta * l.ln(),
                )
            }
            SequenceFamily::QPower { q } => {
                let e = (2 * p + 1) as f64;
                (q.powf(e), e * q.ln())
            }
            SequenceFamily::Product(a, b) => {
                let (va, la) = a.quotient(p);
                let (vb, lb) = b.quotient(p);
                (va * vb, la + lb)
            }
            SequenceFamily::Power { base, exponent } => {
                let (v, l) = base.quotient(p);
                (v.powf(*exponent), l * exponent)
            }
            SequenceFamily::Explicit(values) => {
                let v = values[p + 1] / values[p];
                (v, v.ln())
            }
        }
    }

    fn max_depth(&self) -> Option<usize> {
        match self {
            SequenceFamily::Explicit(values) => Some(values.len().saturating_sub(1)),
            SequenceFamily::Product(a, b) => match (a.max_depth(), b.max_depth()) {
                (Some(x), Some(y)) => Some(x.min(y)),
                (x, y) => x.or(y),
            },
            SequenceFamily::Power { base, .. } => base.max_depth(),
            _ => None,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::param(format!("{name} must be positive, got {v}")))
    }
}

/// Finite prefix `M_0..M_N` of a sequence, stored as logarithms together
/// with the quotients `m_p = M_{p+1}/M_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceTable {
    family: Option<SequenceFamily>,
    log_m: Vec<f64>,
    quotients: Vec<f64>,
    log_quotients: Vec<f64>,
    monotone: bool,
}

/// Builds the table `M_0..M_N` for a family.
pub fn generate(family: &SequenceFamily, n: usize) -> Result<SequenceTable> {
    if n < 2 {
        return Err(Error::param(format!("depth must be at least 2, got {n}")));
    }
    family.validate()?;
    if let Some(max) = family.max_depth() {
        if n > max {
            return Err(Error::depth(format!(
                "explicit values reach depth {max}, requested {n}"
            )));
        }
    }
    let mut log_m = Vec::with_capacity(n + 1);
    let mut quotients = Vec::with_capacity(n);
    let mut log_quotients = Vec::with_capacity(n);
    log_m.push(0.0);
    for p in 0..n {
        let (v, l) = family.quotient(p);
        quotients.push(v);
        log_quotients.push(l);
        log_m.push(log_m[p] + l);
    }
    let monotone = is_monotone(&log_quotients);
    Ok(SequenceTable {
        family: Some(family.clone()),
        log_m,
        quotients,
        log_quotients,
        monotone,
    })
}

fn is_monotone(log_quotients: &[f64]) -> bool {
    log_quotients
        .windows(2)
        .all(|w| w[1] >= w[0] - LOG_SLACK * (1.0 + w[0].abs()))
}

impl SequenceTable {
    /// A table without family metadata from `log M_0..log M_N`
    /// (`log M_0` must be 0). No axiom is assumed.
    pub fn from_log_values(log_m: Vec<f64>) -> Result<Self> {
        if log_m.len() < 2 {
            return Err(Error::param("a table needs at least two entries"));
        }
        if log_m[0].abs() > 1e-12 {
            return Err(Error::param(format!(
                "M_0 must be 1, got exp({})",
                log_m[0]
            )));
        }
        if let Some(v) = log_m.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("log M_p = {v}")));
        }
        let mut log_m = log_m;
        log_m[0] = 0.0;
        let log_quotients: Vec<f64> = log_m.windows(2).map(|w| w[1] - w[0]).collect();
        let quotients = log_quotients.iter().map(|l| l.exp()).collect();
        let monotone = is_monotone(&log_quotients);
        Ok(SequenceTable {
            family: None,
            log_m,
            quotients,
            log_quotients,
            monotone,
        })
    }

    /// A table without family metadata from `M_0..M_N`.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::param(format!("value {v} is not a positive number")));
        }
        Self::from_log_values(values.iter().map(|v| v.ln()).collect())
    }

    /// Termwise product `M_p M'_p` of two tables of equal depth.
    pub fn product(&self, other: &SequenceTable) -> Result<SequenceTable> {
        self.same_depth(other)?;
        Self::from_log_values(
            self.log_m
                .iter()
                .zip(&other.log_m)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Termwise quotient `M_p / M'_p` of two tables of equal depth.
    pub fn quotient_table(&self, other: &SequenceTable) -> Result<SequenceTable> {
        self.same_depth(other)?;
        Self::from_log_values(
            self.log_m
                .iter()
                .zip(&other.log_m)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    fn same_depth(&self, other: &SequenceTable) -> Result<()> {
        if self.depth() != other.depth() {
            return Err(Error::DepthMismatch {
                left: self.depth(),
                right: other.depth(),
            });
        }
        Ok(())
    }

    pub fn family(&self) -> Option<&SequenceFamily> {
        self.family.as_ref()
    }

    /// The depth `N` (the table holds `M_0..M_N`).
    pub fn depth(&self) -> usize {
        self.log_m.len() - 1
    }

    pub fn log_value(&self, p: usize) -> f64 {
        self.log_m[p]
    }

    /// `M_p`; overflows to infinity past the `f64` range.
    pub fn value(&self, p: usize) -> f64 {
        self.log_m[p].exp()
    }

    pub fn log_values(&self) -> &[f64] {
        &self.log_m
    }

    pub fn quotient(&self, p: usize) -> f64 {
        self.quotients[p]
    }

    pub fn quotients(&self) -> &[f64] {
        &self.quotients
    }

    pub fn log_quotients(&self) -> &[f64] {
        &self.log_quotients
    }

    /// Whether the stored quotients are non-decreasing.
    pub fn has_monotone_quotients(&self) -> bool {
        self.monotone
    }

    /// A prefix `M_0..M_n` of this table.
    pub fn truncate(&self, n: usize) -> Result<SequenceTable> {
        if n < 1 || n > self.depth() {
            return Err(Error::depth(format!(
                "cannot truncate depth {} to {n}",
                self.depth()
            )));
        }
        let mut t = self.clone();
        t.log_m.truncate(n + 1);
        t.quotients.truncate(n);
        t.log_quotients.truncate(n);
        t.monotone = is_monotone(&t.log_quotients);
        Ok(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    /// Log-convexity `M_p² ≤ M_{p-1} M_{p+1}`.
    LogConvex,
    /// Moderate growth `M_{p+ℓ} ≤ A^{p+ℓ} M_p M_ℓ`.
    ModerateGrowth,
    /// Strong non-quasianalyticity `Σ_{ℓ≥p} M_ℓ/((ℓ+1)M_{ℓ+1}) ≤ B M_p/M_{p+1}`.
    StrongNonQuasianalytic,
}

impl std::fmt::Display for Axiom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Axiom::LogConvex => "alpha0",
            Axiom::ModerateGrowth => "mu",
            Axiom::StrongNonQuasianalytic => "gamma1",
        })
    }
}

/// Finite-depth verdict on one axiom.
#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    pub axiom: Axiom,
    pub depth: usize,
    pub holds_to_depth: bool,
    /// `A` for μ, `B` for γ1.
    pub witness: Option<f64>,
    pub first_violation: Option<usize>,
}

/// Checks one axiom on the stored prefix.
///
/// μ and γ1 cannot fail on a finite prefix in the strict sense, so a failure
/// is declared when the constant demanded at depth `N` outgrows the one
/// demanded at depth `N/2` (μ: by more than half the half-depth log-demand
/// plus 0.02; γ1: by more than 10%).
pub fn check_axiom(table: &SequenceTable, axiom: Axiom) -> Result<AxiomReport> {
    let n = table.depth();
    if n < 3 {
        return Err(Error::depth(format!(
            "axiom checks need depth at least 3, got {n}"
        )));
    }
    let lm = &table.log_m;
    let report = match axiom {
        Axiom::LogConvex => {
            let first = (1..n).find(|&p| {
                let lhs = 2.0 * lm[p];
                let rhs = lm[p - 1] + lm[p + 1];
                lhs > rhs + LOG_SLACK * (1.0 + lhs.abs())
            });
            AxiomReport {
                axiom,
                depth: n,
                holds_to_depth: first.is_none(),
                witness: None,
                first_violation: first,
            }
        }
        Axiom::ModerateGrowth => {
            // demand[k] = max_{p+l=k} (log M_k - log M_p - log M_l)/k, cumulated.
            let mut cumulative = vec![0.0f64; n + 1];
            for k in 1..=n {
                let mut d = 0.0f64;
                for p in 0..=k {
                    d = d.max((lm[k] - lm[p] - lm[k - p]) / k as f64);
                }
                cumulative[k] = cumulative[k - 1].max(d);
            }
            let half = n.div_ceil(2);
            let witness = grid_ceiling(cumulative[n].exp());
            let growth = cumulative[n] - cumulative[half];
            let holds = growth <= 0.5 * cumulative[half] + 0.02;
            let first_violation = if holds {
                None
            } else {
                let limit = grid_ceiling(cumulative[half].exp()).ln();
                Some(
                    (half + 1..=n)
                        .find(|&k| cumulative[k] > limit + LOG_SLACK)
                        .unwrap_or(n),
                )
            };
            AxiomReport {
                axiom,
                depth: n,
                holds_to_depth: holds,
                witness: Some(witness),
                first_violation,
            }
        }
        Axiom::StrongNonQuasianalytic => {
            let ratios_full = gamma1_ratios(table, n);
            let half = n.div_ceil(2).max(2);
            let ratios_half = gamma1_ratios(table, half);
            let b_full = ratios_full.iter().cloned().fold(0.0, f64::max);
            let b_half = ratios_half.iter().cloned().fold(0.0, f64::max);
            let holds = b_full <= 1.1 * b_half;
            let first_violation = if holds {
                None
            } else {
                ratios_full.iter().position(|&r| r > 1.1 * b_half)
            };
            AxiomReport {
                axiom,
                depth: n,
                holds_to_depth: holds,
                witness: Some(b_full),
                first_violation,
            }
        }
    };
    Ok(report)
}

/// `m_p Σ_{ℓ=p}^{depth-1} 1/((ℓ+1) m_ℓ)` for `p < depth`.
fn gamma1_ratios(table: &SequenceTable, depth: usize) -> Vec<f64> {
    let mut out = vec![0.0; depth];
    // Tail sums relative to m_p, accumulated backwards in log-safe form.
    let mut tail = 0.0;
    for p in (0..depth).rev() {
        // tail_p = 1/((p+1) m_p) + tail_{p+1}; we store m_p * tail_p.
        let lq = table.log_quotients[p];
        let next = if p + 1 < depth {
            tail * (-(table.log_quotients[p + 1] - lq)).exp()
        } else {
            0.0
        };
        tail = 1.0 / (p + 1) as f64 + next;
        out[p] = tail;
    }
    out
}

/// Smallest value `1.05^k ≥ x` with `k ≥ 0`.
fn grid_ceiling(x: f64) -> f64 {
    if x <= 1.0 {
        return 1.0;
    }
    let k = (x.ln() / WITNESS_GRID.ln() - 1e-9).ceil().max(0.0);
    WITNESS_GRID.powf(k)
}

/// Result of checking `M_p^{1/p} ≤ m_p ≤ A² M_p^{1/p}`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientBoundReport {
    pub a: f64,
    pub holds: bool,
    pub first_violation: Option<usize>,
}

pub fn quotient_bounds(table: &SequenceTable, a: f64) -> QuotientBoundReport {
    let two_log_a = 2.0 * a.ln();
    let first = (1..table.depth()).find(|&p| {
        let root = table.log_m[p] / p as f64;
        let lq = table.log_quotients[p];
        let slack = LOG_SLACK * (1.0 + lq.abs());
        lq < root - slack || lq > two_log_a + root + slack
    });
    QuotientBoundReport {
        a,
        holds: first.is_none(),
        first_violation: first,
    }
}

/// Evaluators for `h_M` and `M(t)` over a table.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthMaps {
    pub table: SequenceTable,
}

/// Estimated order `ρ[M]` and growth index `ω(M) = 1/ρ[M]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderEstimate {
    pub rho: f64,
    pub omega: f64,
    /// max - min of `log n / log m_n` over the tail half.
    pub tail_width: f64,
    pub depth: usize,
}

/// Verdict on whether a diagnostic sequence settles in its last quarter.
#[derive(Debug, Clone, PartialEq)]
pub enum TailVerdict {
    Stable { limit: f64, width: f64 },
    Unstable { width: f64 },
    NonFinite,
}

impl TailVerdict {
    pub fn limit(&self) -> Option<f64> {
        match self {
            TailVerdict::Stable { limit, .. } => Some(*limit),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProximateOrderDiagnostic {
    pub depth: usize,
    /// `(p, (p+1)/M(m_p))`.
    pub criterion3: Vec<(usize, f64)>,
    /// `(p, p log(m_{p+1}/m_p))`.
    pub cor410: Vec<(usize, f64)>,
    pub criterion3_tail: TailVerdict,
    pub cor410_tail: TailVerdict,
    /// `Some(limit)` when both sequences settle within the band.
    pub consistent_limit: Option<f64>,
    pub note: String,
}

/// Witness for `h_M(t) ≤ h_M(ρ t)^s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoWitness {
    pub s: f64,
    pub rho: f64,
}

/// Equivalence verdict with the ratio roots `(M'_p/M_p)^{1/p}`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub depth: usize,
    pub ratio_roots: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
    pub equivalent: bool,
}

impl EquivalenceReport {
    pub fn bounds(&self) -> Option<(f64, f64)> {
        self.equivalent.then_some((self.lower, self.upper))
    }
}

/// Ratio by which a monotone tail must move between `N/2` and `N` to be
/// declared unbounded.
pub const UNBOUNDED_TAIL_RATIO: f64 = 1.25;

/// Heuristic for "monotonically unbounded across the tail": the tail half
/// is monotone and moves by more than [`UNBOUNDED_TAIL_RATIO`].
pub fn tail_unbounded(values: &[f64]) -> bool {
    if values.len() < 4 {
        return false;
    }
    let tail = &values[values.len() / 2..];
    let first = tail[0];
    let last = tail[tail.len() - 1];
    let rising = tail.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12));
    let falling = tail.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    (rising && last > first * UNBOUNDED_TAIL_RATIO)
        || (falling && first > last * UNBOUNDED_TAIL_RATIO)
}

/// One-sided form of [`tail_unbounded`]: only a rising tail counts.
pub fn tail_grows(values: &[f64]) -> bool {
    if values.len() < 4 {
        return false;
    }
    let tail = &values[values.len() / 2..];
    let rising = tail.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12));
    rising && tail[tail.len() - 1] > tail[0] * UNBOUNDED_TAIL_RATIO
}

/// Compares two tables of equal depth.
pub fn equivalence_check(a: &SequenceTable, b: &SequenceTable) -> Result<EquivalenceReport> {
    a.same_depth(b)?;
    let n = a.depth();
    let ratio_roots: Vec<f64> = (1..=n)
        .map(|p| ((b.log_m[p] - a.log_m[p]) / p as f64).exp())
        .collect();
    let lower = ratio_roots.iter().cloned().fold(f64::INFINITY, f64::min);
    let upper = ratio_roots.iter().cloned().fold(0.0, f64::max);
    let equivalent = !tail_unbounded(&ratio_roots) && lower > 0.0 && upper.is_finite();
    Ok(EquivalenceReport {
        depth: n,
        ratio_roots,
        lower,
        upper,
        equivalent,
    })
}

impl GrowthMaps {
    pub fn new(table: SequenceTable) -> Self {
        GrowthMaps { table }
    }

    /// `log h_M(t)`, `-∞` at `t = 0`.
    pub fn log_h(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::domain(format!("h_M needs t >= 0, got {t}")));
        }
        if t == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        let lt = t.ln();
        let t_ = &self.table;
        if !t_.monotone {
            return Ok((0..=t_.depth())
                .map(|p| t_.log_m[p] + p as f64 * lt)
                .fold(f64::INFINITY, f64::min));
        }
        let inv = 1.0 / t;
        let p = t_.quotients.partition_point(|&m| m < inv);
        if p == t_.depth() {
            return Err(Error::depth(format!(
                "h_M({t:e}) lies below the last breakpoint 1/m_{} = {:e}",
                p - 1,
                1.0 / t_.quotients[p - 1]
            )));
        }
        Ok(t_.log_m[p] + p as f64 * lt)
    }

    /// `h_M(t) = inf_p M_p t^p`.
    pub fn h(&self, t: f64) -> Result<f64> {
        self.log_h(t).map(f64::exp)
    }

    /// `M(t) = sup_p log(t^p/M_p)`.
    pub fn big_m(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::domain(format!("M(t) needs t > 0, got {t}")));
        }
        let lt = t.ln();
        let t_ = &self.table;
        if !t_.monotone {
            return Ok((0..=t_.depth())
                .map(|p| p as f64 * lt - t_.log_m[p])
                .fold(f64::NEG_INFINITY, f64::max));
        }
        let p = t_.quotients.partition_point(|&m| m < t);
        if p == t_.depth() {
            return Err(Error::depth(format!(
                "M({t:e}) lies beyond the last quotient m_{} = {:e}",
                p - 1,
                t_.quotients[p - 1]
            )));
        }
        Ok(p as f64 * lt - t_.log_m[p])
    }

    /// Largest argument at which `M(t)` is resolved by the table.
    pub fn big_m_range(&self) -> f64 {
        self.table.quotients[self.table.depth() - 1]
    }

    /// `ρ[M] ≈ max log n / log m_n` over the tail half; `ω = 1/ρ`.
    pub fn order_and_omega(&self) -> Result<OrderEstimate> {
        let n = self.table.depth();
        let values: Vec<f64> = ((n / 2).max(2)..n)
            .filter_map(|k| {
                let lq = self.table.log_quotients[k];
                (lq > 0.0).then(|| (k as f64).ln() / lq)
            })
            .collect();
        if values.is_empty() {
            return Err(Error::NonFinite(
                "no tail quotient exceeds 1; order is infinite".into(),
            ));
        }
        let rho = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let low = values.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::NonFinite(format!("order estimate {rho}")));
        }
        Ok(OrderEstimate {
            rho,
            omega: 1.0 / rho,
            tail_width: rho - low,
            depth: n,
        })
    }

    /// Smallest `ρ = 1.05^k ≤ rho_max` with `h(t) ≤ h(ρt)^s` on every grid point.
    pub fn rho_of_s(&self, s: f64, grid: &[f64], rho_max: f64) -> Result<RhoWitness> {
        if !(s >= 1.0) {
            return Err(Error::domain(format!("rho(s) needs s >= 1, got {s}")));
        }
        let base: Vec<f64> = grid.iter().map(|&t| self.log_h(t)).collect::<Result<_>>()?;
        let mut rho = 1.0;
        while rho <= rho_max {
            let mut ok = true;
            for (&t, &lh) in grid.iter().zip(&base) {
                let scaled = s * self.log_h(rho * t)?;
                if lh > scaled + LOG_SLACK * (1.0 + lh.abs()) {
                    ok = false;
                    break;
                }
            }
            if ok {
                return Ok(RhoWitness { s, rho });
            }
            rho *= WITNESS_GRID;
        }
        Err(Error::domain(format!(
            "rho({s}) grid exhausted up to {rho_max}"
        )))
    }

    /// Proximate-order sequences `(p+1)/M(m_p)` and `p log(m_{p+1}/m_p)`.
    ///
    /// A sequence counts as settled when its last quarter varies by at most
    /// `band`.
    pub fn proximate_order_diagnostic(&self, band: f64) -> ProximateOrderDiagnostic {
        let n = self.table.depth();
        let criterion3: Vec<(usize, f64)> = (0..n)
            .map(|p| {
                let m = self.big_m(self.table.quotients[p]).unwrap_or(f64::NAN);
                let v = if m > 0.0 {
                    (p + 1) as f64 / m
                } else {
                    f64::INFINITY
                };
                (p, v)
            })
            .collect();
        let cor410: Vec<(usize, f64)> = (0..n.saturating_sub(1))
            .map(|p| {
                let lq = &self.table.log_quotients;
                (p, p as f64 * (lq[p + 1] - lq[p]))
            })
            .collect();
        let criterion3_tail = tail_verdict(&criterion3, band);
        let cor410_tail = tail_verdict(&cor410, band);
        let (consistent_limit, note) = if n < 50 {
            (None, format!("inconclusive: depth {n} below 50"))
        } else {
            match (&criterion3_tail, &cor410_tail) {
                (TailVerdict::Stable { limit, .. }, TailVerdict::Stable { .. }) => (
                    Some(*limit),
                    format!("consistent with proximate order, limit ~ {limit:.6} at depth {n}"),
                ),
                (TailVerdict::NonFinite, _) | (_, TailVerdict::NonFinite) => (
                    None,
                    format!(
                        "inconclusive at depth {n}: non-finite values (quotients not increasing)"
                    ),
                ),
                _ => (
                    None,
                    format!("inconclusive at depth {n}: tail exceeds band {band}"),
                ),
            }
        };
        ProximateOrderDiagnostic {
            depth: n,
            criterion3,
            cor410,
            criterion3_tail,
            cor410_tail,
            consistent_limit,
            note,
        }
    }
}

fn tail_verdict(values: &[(usize, f64)], band: f64) -> TailVerdict {
    if values.is_empty() {
        return TailVerdict::NonFinite;
    }
    let tail = &values[(3 * values.len()) / 4..];
    if tail.iter().any(|(_, v)| !v.is_finite()) {
        return TailVerdict::NonFinite;
    }
    let hi = tail.iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
    let lo = tail.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
    let width = hi - lo;
    if width <= band {
        TailVerdict::Stable {
            limit: tail[tail.len() - 1].1,
            width,
        }
    } else {
        TailVerdict::Unstable { width }
    }
}
