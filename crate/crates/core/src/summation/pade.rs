//! Rational approximants from Taylor coefficients, with numerical degree
//! reduction by singular values so that spurious pole-zero pairs do not
//! appear when the requested degrees are too large.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;

const RANK_TOL: f64 = 1e-14;

/// `a(u/σ)/b(u/σ)` with `b(0) = 1`, where the scale `σ` evens out the
/// geometric growth of the input coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Pade {
    pub numerator: Vec<Complex64>,
    pub denominator: Vec<Complex64>,
    pub scale: f64,
    /// The degrees that were requested.
    pub requested: (usize, usize),
}

fn horner(c: &[Complex64], u: Complex64) -> Complex64 {
    c.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, x| acc * u + x)
}

fn trim_trailing(v: &mut Vec<Complex64>, tol: f64) {
    while v.len() > 1 && v.last().is_some_and(|x| x.norm() <= tol) {
        v.pop();
    }
}

/// `exp(−slope)` of a least-squares line through `log|c_k|`, over the
/// nonzero coefficients; 1 when there are fewer than two.
fn growth_scale(c: &[Complex64]) -> f64 {
    let pts: Vec<(f64, f64)> = c
        .iter()
        .enumerate()
        .filter(|(_, x)| x.norm() > 0.0 && x.is_finite())
        .map(|(k, x)| (k as f64, x.norm().ln()))
        .collect();
    if pts.len() < 2 {
        return 1.0;
    }
    let n = pts.len() as f64;
    let (mx, my) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let scale = (-sxy / sxx).exp();
    if scale.is_finite() && scale > 0.0 {
        scale
    } else {
        1.0
    }
}

impl Pade {
    /// Type `[m/n]` approximant from `c_0, …, c_{m+n}`.
    pub fn new(coefficients: &[Complex64], m: usize, n: usize) -> Result<Self> {
        if coefficients.len() < m + n + 1 {
            return Err(Error::depth(format!(
                "[{m}/{n}] approximant needs {} coefficients, got {}",
                m + n + 1,
                coefficients.len()
            )));
        }
        let scale = growth_scale(&coefficients[..m + n + 1]);
        let scaled: Vec<Complex64> = coefficients[..m + n + 1]
            .iter()
            .enumerate()
            .map(|(k, x)| x * scale.powi(k as i32))
            .collect();
        let c = &scaled[..];
        let zero = Complex64::new(0.0, 0.0);
        let norm = c.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let tol = RANK_TOL * norm;
        if c[..=m].iter().all(|x| x.norm() <= tol) {
            return Ok(Pade {
                numerator: vec![zero],
                denominator: vec![Complex64::new(1.0, 0.0)],
                scale,
                requested: (m, n),
            });
        }
        // Toeplitz entry (i, j) = c_{i−j}.
        let toeplitz = |rows: std::ops::Range<usize>, cols: usize| {
            DMatrix::from_fn(rows.len(), cols, |i, j| {
                let k = (rows.start + i) as isize - j as isize;
                if k >= 0 {
                    c[k as usize]
                } else {
                    zero
                }
            })
        };
        let (mut m, mut n) = (m, n);
        let mut b = vec![Complex64::new(1.0, 0.0)];
        while n > 0 {
            // Pad the n×(n+1) block with a zero row so the SVD exposes its
            // null vector.
            let mut square = DMatrix::zeros(n + 1, n + 1);
            square
                .rows_mut(0, n)
                .copy_from(&toeplitz(m + 1..m + n + 1, n + 1));
            let svd = square.svd(false, true);
            let rank = svd.singular_values.iter().filter(|s| **s > tol).count();
            if rank < n {
                m -= (n - rank).min(m);
                n = rank;
                continue;
            }
            let v_t = svd
                .v_t
                .ok_or_else(|| Error::domain("SVD failed in rational approximant"))?;
            let smallest = (0..=n)
                .min_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]))
                .unwrap_or(n);
            b = v_t.row(smallest).iter().map(|x| x.conj()).collect();
            break;
        }
        let mut a: Vec<Complex64> = (0..=m)
            .map(|i| {
                (0..b.len())
                    .filter(|&j| j <= i)
                    .map(|j| c[i - j] * b[j])
                    .sum()
            })
            .collect();
        // A vanishing b_0 means a common factor u; drop it from both.
        let lead = b.iter().position(|x| x.norm() > RANK_TOL).unwrap_or(0);
        b.drain(..lead);
        a.drain(..lead.min(a.len()));
        if a.is_empty() {
            a.push(zero);
        }
        let b0 = b[0];
        let bn: f64 = b.iter().map(|x| x.norm()).fold(0.0, f64::max);
        if b0.norm() <= RANK_TOL * bn {
            return Err(Error::domain(
                "rational approximant has a pole at the origin",
            ));
        }
        for x in a.iter_mut().chain(b.iter_mut()) {
            *x /= b0;
        }
        trim_trailing(&mut a, tol);
        trim_trailing(&mut b, RANK_TOL);
        Ok(Pade {
            numerator: a,
            denominator: b,
            scale,
            requested: (m, n),
        })
    }

    pub fn degrees(&self) -> (usize, usize) {
        (self.numerator.len() - 1, self.denominator.len() - 1)
    }

    pub fn eval(&self, u: Complex64) -> Complex64 {
        let w = u / self.scale;
        horner(&self.numerator, w) / horner(&self.denominator, w)
    }

    /// Zeros of the denominator.
    pub fn poles(&self) -> Vec<Complex64> {
        let b = &self.denominator;
        let n = b.len() - 1;
        let poles: Vec<Complex64> = match n {
            0 => Vec::new(),
            1 => vec![-b[0] / b[1]],
            _ => {
                let lead = b[n];
                let companion = DMatrix::from_fn(n, n, |i, j| {
                    if j == n - 1 {
                        -b[i] / lead
                    } else if i == j + 1 {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                });
                companion
                    .schur()
                    .eigenvalues()
                    .map(|e| e.iter().copied().collect())
                    .unwrap_or_default()
            }
        };
        poles.into_iter().map(|p| p * self.scale).collect()
    }
}
