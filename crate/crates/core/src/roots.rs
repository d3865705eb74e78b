//! Scalar root bracketing helpers.

/// Bisects a sign change of `f` on `[lo, hi]` until the bracket is narrower
/// than `tol`, returning the midpoint of the final bracket.
///
/// The caller guarantees `f(lo)` and `f(hi)` differ in sign (or one is
/// zero). `f` is fallible so that solver failures surface immediately.
pub fn bisect<E>(
    mut f: impl FnMut(f64) -> Result<f64, E>,
    mut lo: f64,
    mut hi: f64,
    f_lo: f64,
    tol: f64,
) -> Result<f64, E> {
    if f_lo == 0.0 {
        return Ok(lo);
    }
    let lo_positive = f_lo > 0.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}
