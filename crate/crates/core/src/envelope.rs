//! Sampled envelope fits against `h_M`.
//!
//! A growth envelope is `|f(z)| ≤ c / h_M(k/|z|) = c·exp(M(|z|/k))`; a decay
//! envelope is `|f(z)| ≤ c·h_M(k/|z|)`. Both are fitted on finite samples,
//! so a verdict only speaks for the sampled radii.

use crate::sequences::GrowthMaps;

/// Ratio of the geometric `k` grid.
const K_STEP: f64 = 1.05;
const K_MIN: f64 = 1e-3;
const K_MAX: f64 = 1e3;
/// Allowed drift of the fitted `k` when the outer half of the radii is dropped.
const STABILITY: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Envelope {
    Growth,
    Decay,
}

/// One sample `(|z|, log|f(z)|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub radius: f64,
    pub log_abs: f64,
}

impl Sample {
    pub fn new(radius: f64, abs: f64) -> Self {
        Sample {
            radius,
            log_abs: abs.ln(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeFit {
    pub kind: Envelope,
    /// Tightest `k` on the grid whose excess does not grow in the outer half.
    pub k: Option<f64>,
    /// Same fit restricted to radii `≤ R/2`.
    pub k_half: Option<f64>,
    /// `log c = max` excess over all samples at `k`.
    pub log_c: f64,
    pub member: bool,
    pub samples: usize,
    pub radius_range: (f64, f64),
    /// Range of `k` over which every sample was resolvable.
    pub k_range: (f64, f64),
    pub note: String,
}

impl EnvelopeFit {
    pub fn c(&self) -> f64 {
        self.log_c.exp()
    }

    /// Re-checks the fitted bound at one sample.
    pub fn holds_at(&self, maps: &GrowthMaps, sample: &Sample) -> bool {
        let Some(k) = self.k else { return false };
        match excess(maps, self.kind, k, sample) {
            Some(e) => e <= self.log_c + 1e-12 * (1.0 + self.log_c.abs()),
            None => false,
        }
    }
}

fn excess(maps: &GrowthMaps, kind: Envelope, k: f64, s: &Sample) -> Option<f64> {
    if s.log_abs.is_nan() || s.log_abs == f64::INFINITY {
        return None;
    }
    let lh = maps.log_h(k / s.radius).ok()?;
    Some(match kind {
        Envelope::Growth => s.log_abs + lh,
        Envelope::Decay => s.log_abs - lh,
    })
}

/// Excesses at `k` if every sample is resolvable and finite-or-zero.
fn excesses(maps: &GrowthMaps, kind: Envelope, k: f64, samples: &[Sample]) -> Option<Vec<f64>> {
    samples.iter().map(|s| excess(maps, kind, k, s)).collect()
}

/// The outer half of the radii must not exceed the inner maximum.
fn tail_settled(samples: &[Sample], ex: &[f64]) -> bool {
    let r_max = samples.iter().map(|s| s.radius).fold(0.0, f64::max);
    let mut inner = f64::NEG_INFINITY;
    let mut outer = f64::NEG_INFINITY;
    let mut has_inner = false;
    for (s, &e) in samples.iter().zip(ex) {
        if s.radius <= 0.5 * r_max {
            inner = inner.max(e);
            has_inner = true;
        } else {
            outer = outer.max(e);
        }
    }
    !has_inner || outer <= inner + 1e-9 * (1.0 + inner.abs().min(1e300))
}

fn k_grid(maps: &GrowthMaps, samples: &[Sample], kind: Envelope) -> Vec<f64> {
    let r_max = samples.iter().map(|s| s.radius).fold(0.0, f64::max);
    let lo = K_MIN.max(r_max / maps.big_m_range());
    let mut grid = Vec::new();
    let mut k = lo;
    while k <= K_MAX {
        grid.push(k);
        k *= K_STEP;
    }
    if kind == Envelope::Growth {
        grid.reverse();
    }
    grid
}

fn tightest(maps: &GrowthMaps, samples: &[Sample], kind: Envelope) -> Option<(f64, f64)> {
    for k in k_grid(maps, samples, kind) {
        if let Some(ex) = excesses(maps, kind, k, samples) {
            if tail_settled(samples, &ex) {
                let log_c = ex.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                return Some((k, log_c));
            }
        }
    }
    None
}

/// Fits an envelope of the given kind to the samples.
pub fn fit_envelope(samples: &[Sample], maps: &GrowthMaps, kind: Envelope) -> EnvelopeFit {
    let samples: Vec<Sample> = samples.iter().filter(|s| s.radius > 0.0).copied().collect();
    let r_min = samples
        .iter()
        .map(|s| s.radius)
        .fold(f64::INFINITY, f64::min);
    let r_max = samples.iter().map(|s| s.radius).fold(0.0, f64::max);
    let grid = k_grid(maps, &samples, kind);
    let k_range = match (grid.first(), grid.last()) {
        (Some(a), Some(b)) => (a.min(*b), a.max(*b)),
        _ => (f64::NAN, f64::NAN),
    };
    if samples.is_empty() {
        return EnvelopeFit {
            kind,
            k: None,
            k_half: None,
            log_c: f64::NAN,
            member: false,
            samples: 0,
            radius_range: (f64::NAN, f64::NAN),
            k_range,
            note: "no samples".into(),
        };
    }
    if samples
        .iter()
        .any(|s| s.log_abs.is_nan() || s.log_abs == f64::INFINITY)
    {
        return EnvelopeFit {
            kind,
            k: None,
            k_half: None,
            log_c: f64::INFINITY,
            member: false,
            samples: samples.len(),
            radius_range: (r_min, r_max),
            k_range,
            note: "non-finite samples (overflow)".into(),
        };
    }
    let full = tightest(maps, &samples, kind);
    let half: Vec<Sample> = samples
        .iter()
        .filter(|s| s.radius <= 0.5 * r_max)
        .copied()
        .collect();
    let k_half = if half.is_empty() {
        None
    } else {
        tightest(maps, &half, kind).map(|x| x.0)
    };
    let (k, log_c) = match full {
        Some((k, c)) => (Some(k), c),
        None => (None, f64::INFINITY),
    };
    let (member, note) = match (k, k_half) {
        (None, _) => (
            false,
            format!("no k in {k_range:?} keeps the excess bounded"),
        ),
        (Some(k), None) => (true, format!("fit k = {k:.4e}; half-range fit unavailable")),
        (Some(k), Some(kh)) => {
            let stable = match kind {
                Envelope::Growth => k >= kh / STABILITY,
                Envelope::Decay => k <= kh * STABILITY,
            };
            if stable {
                (true, format!("fit k = {k:.4e}, half-range k = {kh:.4e}"))
            } else {
                (
                    false,
                    format!("k drifts from {kh:.4e} to {k:.4e} as radii grow"),
                )
            }
        }
    };
    EnvelopeFit {
        kind,
        k,
        k_half,
        log_c,
        member,
        samples: samples.len(),
        radius_range: (r_min, r_max),
        k_range,
        note,
    }
}

/// `n` log-spaced points from `a` to `b` inclusive.
pub fn log_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
        .collect()
}
