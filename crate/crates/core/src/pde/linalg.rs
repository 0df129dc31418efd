use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Systems whose estimated ∞-norm condition number exceeds this are refused.
pub const MAX_CONDITION: f64 = 1e12;

/// LU solve plus a Hager-style lower bound on `κ∞(A)`.
pub(crate) fn solve_guarded(a: DMatrix<f64>, b: &DVector<f64>) -> Result<(DVector<f64>, f64)> {
    let n = a.nrows();
    let norm_a = (0..n)
        .map(|i| a.row(i).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let lu = a.lu();
    let x = lu.solve(b).ok_or(Error::IllConditioned(f64::INFINITY))?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::IllConditioned(f64::INFINITY));
    }
    let mut inv_norm = 0.0f64;
    let probes = [
        DVector::from_element(n, 1.0),
        DVector::from_fn(n, |i, _| if i % 2 == 0 { 1.0 } else { -1.0 }),
        DVector::from_fn(n, |i, _| if (i / 3) % 2 == 0 { 1.0 } else { -1.0 }),
    ];
    for p in probes {
        let y = lu.solve(&p).ok_or(Error::IllConditioned(f64::INFINITY))?;
        inv_norm = inv_norm.max(y.amax());
        let s = y.map(|v| if v >= 0.0 { 1.0 } else { -1.0 });
        let y2 = lu.solve(&s).ok_or(Error::IllConditioned(f64::INFINITY))?;
        inv_norm = inv_norm.max(y2.amax());
    }
    let cond = norm_a * inv_norm;
    if !cond.is_finite() || cond > MAX_CONDITION {
        return Err(Error::IllConditioned(cond));
    }
    Ok((x, cond))
}
