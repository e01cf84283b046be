//! Inputs shared by the benchmarks.

use resum_core::mpde::{formal_solution_single, FormalSolution2D, Symbol};
use resum_core::{FormalSeries, MomentSequence, Result};

/// Truncated `1/(1−z)`.
pub fn geometric(degree: usize) -> FormalSeries {
    FormalSeries::from_real(&vec![1.0; degree + 1], "1/(1-z)").expect("finite coefficients")
}

/// Formal solution of `(∂_t − ∂_z²)u = 0` with factorial moments and data
/// `1/(1−z)`, to `t`-order `j_max` and `z`-degree 20.
pub fn heat_solution(j_max: usize) -> Result<(FormalSolution2D, MomentSequence)> {
    let m = MomentSequence::factorial(2 * j_max + 60);
    let symbol = Symbol::real_polynomial(&[0.0, 0.0, 1.0])?;
    let sol = formal_solution_single(
        1,
        &symbol,
        &geometric(2 * j_max + 20),
        &m,
        &m,
        j_max,
        20,
        0.1,
    )?;
    Ok((sol, m))
}
