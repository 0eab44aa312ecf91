//! Derivative-free bracketing and minimization helpers.

use crate::scalar::Scalar;

/// Result of a bisection run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bisection<T> {
    pub root: T,
    pub residual: T,
    pub iterations: usize,
}

/// Bisection for an increasing residual with `g(lo) <= 0 <= g(hi)`.
///
/// Stops once `|g(mid)| <= f_tol` and the bracket is narrower than `x_tol`,
/// or after `max_iter` halvings. Errors from `g` abort immediately.
pub fn bisect_increasing<T, E, G>(
    mut g: G,
    mut lo: T,
    mut hi: T,
    x_tol: T,
    f_tol: T,
    max_iter: usize,
) -> Result<Bisection<T>, E>
where
    T: Scalar,
    G: FnMut(T) -> Result<T, E>,
{
    let half = T::lit(0.5);
    let mut mid = half * (lo + hi);
    let mut g_mid = g(mid)?;
    let mut iterations = 1;
    while iterations < max_iter {
        if g_mid == T::zero() || (g_mid.abs() <= f_tol && hi - lo <= x_tol) {
            break;
        }
        if g_mid < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
        let next = half * (lo + hi);
        if next == mid {
            break;
        }
        mid = next;
        g_mid = g(mid)?;
        iterations += 1;
    }
    Ok(Bisection {
        root: mid,
        residual: g_mid,
        iterations,
    })
}

/// Golden-section search for a minimum of `g` on `[lo, hi]`.
///
/// Returns `(argmin, min)`; the interval shrinks until its width is below `x_tol`.
pub fn golden_min<T: Scalar, G: FnMut(T) -> T>(mut g: G, mut lo: T, mut hi: T, x_tol: T) -> (T, T) {
    let inv_phi = T::lit(0.618_033_988_749_894_9);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut g1 = g(x1);
    let mut g2 = g(x2);
    let mut guard = 0;
    while hi - lo > x_tol && guard < 500 {
        guard += 1;
        if g1 <= g2 {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - inv_phi * (hi - lo);
            g1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + inv_phi * (hi - lo);
            g2 = g(x2);
        }
    }
    if g1 <= g2 {
        (x1, g1)
    } else {
        (x2, g2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    #[test]
    fn bisection_finds_sqrt_two() {
        let b = bisect_increasing(
            |x: f64| Ok::<_, Infallible>(x * x - 2.0),
            0.0,
            2.0,
            1e-14,
            1e-14,
            200,
        )
        .unwrap();
        assert!((b.root - 2f64.sqrt()).abs() < 1e-13);
        assert!(b.iterations < 60);
    }

    #[test]
    fn bisection_propagates_errors() {
        let r = bisect_increasing(|_: f64| Err::<f64, _>("boom"), 0.0, 1.0, 1e-9, 1e-9, 10);
        assert_eq!(r, Err("boom"));
    }

    #[test]
    fn golden_section_locates_parabola_minimum() {
        let (x, v) = golden_min(|x: f64| (x - 0.3).powi(2), -2.0, 5.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-9);
        assert!(v < 1e-18);
    }
}
