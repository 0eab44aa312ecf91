//! Adaptive Dormand–Prince 5(4) integration of scalar ODEs `y' = g(x, y)`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Step-size control for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct Tolerances<T> {
    pub rtol: T,
    pub atol: T,
    /// Largest step allowed; also bounds the spacing of recorded samples.
    pub h_max: T,
    pub max_steps: usize,
}

impl<T: Scalar> Tolerances<T> {
    pub fn new(rtol: T, atol: T, h_max: T) -> Self {
        Self {
            rtol,
            atol,
            h_max,
            max_steps: 1_000_000,
        }
    }
}

/// Why an integration stopped before reaching the end of the interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stop<T> {
    Completed,
    /// The user predicate fired at this `(x, y)`.
    Halted(T, T),
}

/// Integrates from `x0` to `x1` (either direction), calling `record` after
/// every accepted step. `halt` is checked on each accepted state.
pub fn integrate<T, G, R, H>(
    mut g: G,
    x0: T,
    y0: T,
    x1: T,
    tol: &Tolerances<T>,
    mut record: R,
    mut halt: H,
) -> Result<(T, Stop<T>)>
where
    T: Scalar,
    G: FnMut(T, T) -> T,
    R: FnMut(T, T),
    H: FnMut(T, T) -> bool,
{
    let c = |v: f64| T::lit(v);
    let span = x1 - x0;
    if span == T::zero() {
        return Ok((y0, Stop::Completed));
    }
    let dir = span.signum();
    let length = span.abs();

    let (a21, a31, a32) = (c(1.0 / 5.0), c(3.0 / 40.0), c(9.0 / 40.0));
    let (a41, a42, a43) = (c(44.0 / 45.0), c(-56.0 / 15.0), c(32.0 / 9.0));
    let (a51, a52, a53, a54) = (
        c(19372.0 / 6561.0),
        c(-25360.0 / 2187.0),
        c(64448.0 / 6561.0),
        c(-212.0 / 729.0),
    );
    let (a61, a62, a63, a64, a65) = (
        c(9017.0 / 3168.0),
        c(-355.0 / 33.0),
        c(46732.0 / 5247.0),
        c(49.0 / 176.0),
        c(-5103.0 / 18656.0),
    );
    let (b1, b3, b4, b5, b6) = (
        c(35.0 / 384.0),
        c(500.0 / 1113.0),
        c(125.0 / 192.0),
        c(-2187.0 / 6784.0),
        c(11.0 / 84.0),
    );
    // difference between the 5th- and 4th-order weights
    let (e1, e3, e4, e5, e6, e7) = (
        c(71.0 / 57600.0),
        c(-71.0 / 16695.0),
        c(71.0 / 1920.0),
        c(-17253.0 / 339200.0),
        c(22.0 / 525.0),
        c(-1.0 / 40.0),
    );
    let (c2, c3, c4, c5) = (c(0.2), c(0.3), c(0.8), c(8.0 / 9.0));

    let mut x = x0;
    let mut y = y0;
    let mut k1 = g(x, y);
    let mut h = (length * c(1e-3)).min(tol.h_max);
    let mut travelled = T::zero();
    let mut steps = 0usize;
    record(x, y);

    while travelled < length {
        steps += 1;
        if steps > tol.max_steps {
            return Err(Error::Integration(format!(
                "step budget exhausted at x = {}",
                x.as_f64()
            )));
        }
        let last = travelled + h >= length;
        let hs = if last { length - travelled } else { h } * dir;

        let k2 = g(x + c2 * hs, y + hs * a21 * k1);
        let k3 = g(x + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
        let k4 = g(x + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
        let k5 = g(
            x + c5 * hs,
            y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4),
        );
        let k6 = g(
            x + hs,
            y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5),
        );
        let y_new = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        let k7 = g(x + hs, y_new);
        let err = (hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7)).abs();
        let scale = tol.atol + tol.rtol * y.abs().max(y_new.abs());
        let ratio = err / scale;

        if !y_new.is_finite() || !ratio.is_finite() {
            h = h * c(0.25);
            if h < length * c(1e-14) {
                return Err(Error::Integration(format!(
                    "non-finite state near x = {}",
                    x.as_f64()
                )));
            }
            continue;
        }

        if ratio <= T::one() {
            travelled = if last { length } else { travelled + h };
            x = if last { x1 } else { x + hs };
            y = y_new;
            k1 = k7;
            record(x, y);
            if halt(x, y) {
                return Ok((y, Stop::Halted(x, y)));
            }
        }
        let factor = if ratio == T::zero() {
            c(5.0)
        } else {
            (c(0.9) * ratio.powf(c(-0.2))).max(c(0.2)).min(c(5.0))
        };
        h = (h * factor).min(tol.h_max);
        if h < length * c(1e-15) {
            return Err(Error::Integration(format!(
                "step size underflow near x = {}",
                x.as_f64()
            )));
        }
    }
    Ok((y, Stop::Completed))
}

/// One classical Runge–Kutta step for an autonomous scalar ODE.
pub fn rk4_step<T: Scalar, G: Fn(T) -> T>(g: &G, y: T, h: T) -> T {
    let half = T::lit(0.5);
    let k1 = g(y);
    let k2 = g(y + half * h * k1);
    let k3 = g(y + half * h * k2);
    let k4 = g(y + h * k3);
    y + h / T::lit(6.0) * (k1 + T::lit(2.0) * (k2 + k3) + k4)
}
