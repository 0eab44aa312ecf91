//! Ordinary least-squares line fits.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit<T> {
    pub slope: T,
    pub intercept: T,
    /// Coefficient of determination; `1` when the data has no spread.
    pub r2: T,
}

/// Fits `y = slope·x + intercept`; needs at least `min_points` pairs.
pub fn fit_line<T: Scalar>(xs: &[T], ys: &[T], min_points: usize) -> Result<LineFit<T>> {
    let n = xs.len().min(ys.len());
    if n < min_points.max(2) {
        return Err(Error::InsufficientData {
            needed: min_points.max(2),
            got: n,
        });
    }
    let nf = T::from_count(n);
    let mean_x = xs[..n].iter().fold(T::zero(), |s, &x| s + x) / nf;
    let mean_y = ys[..n].iter().fold(T::zero(), |s, &y| s + y) / nf;
    let (mut sxx, mut sxy, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxx = sxx + dx * dx;
        sxy = sxy + dx * dy;
        syy = syy + dy * dy;
    }
    if sxx == T::zero() {
        return Err(Error::InsufficientData { needed: 2, got: 1 });
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .fold(T::zero(), |s, r| s + r);
    let r2 = if syy == T::zero() {
        T::one()
    } else {
        T::one() - ss_res / syy
    };
    Ok(LineFit {
        slope,
        intercept,
        r2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let xs: Vec<f64> = (0..10).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x - 1.0).collect();
        let fit = fit_line(&xs, &ys, 8).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-14);
        assert!((fit.intercept + 1.0).abs() < 1e-13);
        assert!((fit.r2 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn too_few_points() {
        assert!(matches!(
            fit_line(&[0.0, 1.0], &[1.0, 2.0], 8),
            Err(Error::InsufficientData { needed: 8, got: 2 })
        ));
    }
}
