//! Piecewise cubic Hermite interpolation on sorted abscissae.

use crate::scalar::Scalar;

/// Hermite cubic on one interval, `t ∈ [0, 1]`, interval width `h`.
#[inline]
pub fn hermite<T: Scalar>(y0: T, y1: T, m0: T, m1: T, h: T, t: T) -> T {
    let one = T::one();
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = two * t3 - three * t2 + one;
    let h10 = t3 - two * t2 + t;
    let h01 = three * t2 - two * t3;
    let h11 = t3 - t2;
    h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1
}

/// Derivative of [`hermite`] with respect to the physical abscissa.
#[inline]
pub fn hermite_slope<T: Scalar>(y0: T, y1: T, m0: T, m1: T, h: T, t: T) -> T {
    let one = T::one();
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let six = T::lit(6.0);
    let t2 = t * t;
    let d00 = six * t2 - six * t;
    let d10 = three * t2 - T::lit(4.0) * t + one;
    let d01 = six * t - six * t2;
    let d11 = three * t2 - two * t;
    (d00 * y0 + d01 * y1) / h + d10 * m0 + d11 * m1
}

/// Fritsch–Carlson limiter: scales the end slopes so the cubic stays monotone.
#[inline]
pub fn limit_monotone<T: Scalar>(y0: T, y1: T, h: T, m0: T, m1: T) -> (T, T) {
    let secant = (y1 - y0) / h;
    if secant == T::zero() {
        return (T::zero(), T::zero());
    }
    let a = m0 / secant;
    let b = m1 / secant;
    if a < T::zero() || b < T::zero() {
        return (
            m0.max(T::zero()) * secant.signum(),
            m1.max(T::zero()) * secant.signum(),
        );
    }
    let r2 = a * a + b * b;
    let nine = T::lit(9.0);
    if r2 > nine {
        let tau = T::lit(3.0) / r2.sqrt();
        (tau * a * secant, tau * b * secant)
    } else {
        (m0, m1)
    }
}

/// Index `i` with `xs[i] <= x <= xs[i + 1]`, clamped to the valid range.
pub fn locate<T: Scalar>(xs: &[T], x: T) -> usize {
    let n = xs.len();
    debug_assert!(n >= 2);
    match xs.binary_search_by(|p| p.partial_cmp(&x).unwrap_or(std::cmp::Ordering::Less)) {
        Ok(i) => i.min(n - 2),
        Err(i) => i.saturating_sub(1).min(n - 2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_reproduces_cubics() {
        // y = x^3 on [1, 3]
        let (y0, y1, m0, m1, h) = (1.0, 27.0, 3.0, 27.0, 2.0);
        for k in 0..=10 {
            let t = k as f64 / 10.0;
            let x = 1.0 + 2.0 * t;
            assert!((hermite(y0, y1, m0, m1, h, t) - x * x * x).abs() < 1e-12);
            assert!((hermite_slope(y0, y1, m0, m1, h, t) - 3.0 * x * x).abs() < 1e-12);
        }
    }

    #[test]
    fn limiter_caps_overshoot() {
        let (m0, m1) = limit_monotone(0.0, 1.0, 1.0, 10.0, 10.0);
        assert!(m0 * m0 + m1 * m1 <= 9.0 + 1e-12);
        assert_eq!(limit_monotone(0.0, 1.0, 1.0, 1.0, 2.0), (1.0, 2.0));
    }

    #[test]
    fn locate_clamps() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        assert_eq!(locate(&xs, -1.0), 0);
        assert_eq!(locate(&xs, 0.5), 0);
        assert_eq!(locate(&xs, 2.0), 2);
        assert_eq!(locate(&xs, 3.0), 2);
        assert_eq!(locate(&xs, 9.0), 2);
    }
}
