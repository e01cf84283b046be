//! Adaptive Gauss-Kronrod quadrature for complex-valued integrands of one
//! real variable, plus semi-infinite integration by doubling panels.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_73,
    0.054_755_896_574_352,
    0.075_039_674_810_919_95,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_5,
    0.149_445_554_002_916_9,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

/// Integral estimate with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: Complex64,
    pub error: f64,
    pub evals: usize,
}

/// Accuracy request: the result is accepted once
/// `error <= max(abs, rel * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub fn relative(rel: f64) -> Self {
        Tolerance {
            rel,
            abs: 0.0,
            max_intervals: 4000,
        }
    }

    pub fn with_abs(mut self, abs: f64) -> Self {
        self.abs = abs;
        self
    }

    fn target(&self, value: Complex64) -> f64 {
        self.abs.max(self.rel * value.norm())
    }
}

struct Piece {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Piece {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    let mut values = [Complex64::new(0.0, 0.0); 21];
    values[20] = fc;
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        values[2 * j] = f1;
        values[2 * j + 1] = f2;
        kron += (f1 + f2) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    let mean = kron * 0.5;
    let mut resabs = fc.norm() * WGK[10];
    let mut resasc = (fc - mean).norm() * WGK[10];
    for j in 0..10 {
        resabs += (values[2 * j].norm() + values[2 * j + 1].norm()) * WGK[j];
        resasc += ((values[2 * j] - mean).norm() + (values[2 * j + 1] - mean).norm()) * WGK[j];
    }
    let value = kron * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut error = ((kron - gauss) * half).norm();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    if !value.re.is_finite() || !value.im.is_finite() {
        error = f64::INFINITY;
    }
    Piece { a, b, value, error }
}

/// Globally adaptive 21-point Gauss-Kronrod integration over `[a, b]`.
pub fn integrate<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    tol: Tolerance,
) -> Result<Quadrature> {
    let q = adapt(&f, a, b, tol);
    if !(q.value.re.is_finite() && q.value.im.is_finite()) {
        return Err(Error::NonFinite(format!("integral over [{a}, {b}]")));
    }
    if q.error > tol.target(q.value) {
        return Err(Error::Quadrature {
            what: format!("interval [{a}, {b}]"),
            estimate: q.value.norm(),
            error: q.error,
        });
    }
    Ok(q)
}

/// Best-effort adaptive integration; the caller judges the error estimate.
fn adapt<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, tol: Tolerance) -> Quadrature {
    let first = kronrod(f, a, b);
    let mut value = first.value;
    let mut error = first.error;
    let mut evals = 21;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    while error > tol.target(value) && heap.len() < tol.max_intervals {
        let worst = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // Interval cannot be split further in floating point.
            heap.push(worst);
            break;
        }
        let left = kronrod(f, worst.a, mid);
        let right = kronrod(f, mid, worst.b);
        evals += 42;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        if heap.len() % 64 == 0 {
            // Re-sum to limit drift from the incremental updates.
            value = heap.iter().map(|p| p.value).sum();
            error = heap.iter().map(|p| p.error).sum();
        }
    }
    Quadrature {
        value: heap.iter().map(|p| p.value).sum(),
        error: heap.iter().map(|p| p.error).sum(),
        evals,
    }
}

/// Integrates over `[start, ∞)` using panels of doubling width
/// `[start + w(2^k - 1), start + w(2^{k+1} - 1)]`.
///
/// Panels are added until two consecutive panels are negligible and
/// non-increasing; the last panel is added to the error as a tail estimate.
pub fn integrate_to_infinity<F: Fn(f64) -> Complex64>(
    f: F,
    start: f64,
    first_width: f64,
    tol: Tolerance,
) -> Result<Quadrature> {
    const MAX_PANELS: usize = 200;
    let mut total = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    let mut evals = 0;
    let mut width = first_width;
    let mut lo = start;
    let mut quiet = 0;
    let mut previous = f64::INFINITY;
    for panel in 0..MAX_PANELS {
        let hi = lo + width;
        let panel_tol = Tolerance {
            rel: tol.rel,
            abs: (0.01 * tol.abs).max(0.01 * tol.rel * total.norm()),
            max_intervals: tol.max_intervals,
        };
        let q = adapt(&f, lo, hi, panel_tol);
        if !(q.value.re.is_finite() && q.value.im.is_finite()) {
            return Err(Error::NonFinite(format!("panel [{lo}, {hi}]")));
        }
        // A panel may fall short of its own target if the shortfall is
        // negligible against the running total.
        if q.error > panel_tol.target(q.value) && q.error > 0.1 * tol.target(total + q.value) {
            return Err(Error::Quadrature {
                what: format!("panel [{lo}, {hi}]"),
                estimate: q.value.norm(),
                error: q.error,
            });
        }
        total += q.value;
        error += q.error;
        evals += q.evals;
        let size = q.value.norm();
        let negligible = size <= 1e-3 * tol.target(total).max(f64::MIN_POSITIVE) || size == 0.0;
        if negligible && size <= previous {
            quiet += 1;
        } else {
            quiet = 0;
        }
        previous = size;
        if quiet >= 2 && panel >= 2 {
            return Ok(Quadrature {
                value: total,
                error: error + size,
                evals,
            });
        }
        lo = hi;
        width *= 2.0;
        if !lo.is_finite() {
            break;
        }
    }
    Err(Error::Quadrature {
        what: "semi-infinite panels exhausted".into(),
        estimate: total.norm(),
        error,
    })
}
