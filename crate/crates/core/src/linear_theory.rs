//! Closed-form theory of the piecewise-linear envelope problems.
//!
//! For `h(u) = αu` on `[0,a]` and `h(u) = β(u−1)` on `[a,1]` the profile
//! equation `u'' − c u' + h(u) = 0` is solved by exponentials with rates
//! `λ₀⁺(c) = (c + √(c² − 4α))/2` and `λ₁⁻(c) = (c − √(c² − 4β))/2`. The
//! matched speed is the `c` making that solution C¹ at `z = 0`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::reaction::{EnvelopeKind, SlopeBounds};
use crate::roots::bisect_increasing;
use crate::scalar::Scalar;

/// Default residual tolerance used by [`speed_bracket`].
pub const MATCH_TOL: f64 = 1e-13;

/// Upper end of the expanding bisection bracket for matched speeds.
const C_CAP: f64 = 1024.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenRates<T> {
    pub lambda0_plus: T,
    pub lambda1_minus: T,
    pub c: T,
    pub alpha: T,
    pub beta: T,
}

/// Positive root of `λ² − cλ + α = 0`.
pub fn lambda0_plus<T: Scalar>(c: T, alpha: T) -> T {
    let four = T::lit(4.0);
    (c + (c * c - four * alpha).sqrt()) * T::lit(0.5)
}

/// Negative root of `λ² − cλ + β = 0`.
pub fn lambda1_minus<T: Scalar>(c: T, beta: T) -> T {
    let four = T::lit(4.0);
    (c - (c * c - four * beta).sqrt()) * T::lit(0.5)
}

pub fn eigen_rates<T: Scalar>(c: T, alpha: T, beta: T) -> Result<EigenRates<T>> {
    if !(alpha < T::zero()) {
        return Err(Error::Domain {
            what: "alpha (must be negative)",
            value: alpha.as_f64(),
        });
    }
    if !(beta < T::zero()) {
        return Err(Error::Domain {
            what: "beta (must be negative)",
            value: beta.as_f64(),
        });
    }
    if !(c >= T::zero()) {
        return Err(Error::Domain {
            what: "speed (must be non-negative)",
            value: c.as_f64(),
        });
    }
    Ok(EigenRates {
        lambda0_plus: lambda0_plus(c, alpha),
        lambda1_minus: lambda1_minus(c, beta),
        c,
        alpha,
        beta,
    })
}

/// `Φ(c) = (1−a)√(c²−4β) − a√(c²−4α) − c`, strictly decreasing in `c`.
///
/// `Φ(c) = 0` is equivalent to `a = λ₁⁻/(λ₁⁻ − λ₀⁺)`.
pub fn matching_residual<T: Scalar>(c: T, alpha: T, beta: T, a: T) -> T {
    let four = T::lit(4.0);
    (T::one() - a) * (c * c - four * beta).sqrt() - a * (c * c - four * alpha).sqrt() - c
}

/// Speed at which the envelope wave with slopes `(alpha, beta)` is C¹.
pub fn match_speed<T: Scalar>(alpha: T, beta: T, a: T, tol: T) -> Result<T> {
    match_named_speed("matched speed", alpha, beta, a, tol)
}

fn match_named_speed<T: Scalar>(name: &'static str, alpha: T, beta: T, a: T, tol: T) -> Result<T> {
    eigen_rates(T::zero(), alpha, beta)?;
    if !(a > T::zero() && a < T::one()) {
        return Err(Error::Domain {
            what: "branch point a",
            value: a.as_f64(),
        });
    }
    let phi = |c: T| matching_residual(c, alpha, beta, a);
    let phi0 = phi(T::zero());
    if phi0.abs() <= tol {
        return Ok(T::zero());
    }
    if phi0 < T::zero() {
        return Err(Error::NoPositiveRoot {
            speed: name,
            phi0: phi0.as_f64(),
        });
    }
    let mut hi = T::one();
    while phi(hi) >= T::zero() {
        hi = hi + hi;
        if hi > T::lit(C_CAP) {
            return Err(Error::BracketFailure { c_max: C_CAP });
        }
    }
    let found = bisect_increasing(
        |c| Ok::<_, Error>(-phi(c)),
        T::zero(),
        hi,
        T::infinity(),
        tol,
        400,
    )?;
    Ok(found.root)
}

/// The four matched speeds bracketing the true wave speed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpeedBracket<T> {
    /// `(alpha_lo, beta_hi)` pairing, the lower end of the bracket.
    pub c_check: T,
    /// `(alpha_lo, beta_lo)` pairing.
    pub c_under: T,
    /// `(alpha_hi, beta_hi)` pairing.
    pub c_over: T,
    /// `(alpha_hi, beta_lo)` pairing, the upper end of the bracket.
    pub c_hat: T,
    pub ordering_ok: bool,
}

impl<T: Scalar> SpeedBracket<T> {
    /// Checks `0 < č ≤ min(c̲, c̄) ≤ max(c̲, c̄) ≤ ĉ` with slack `tol`.
    pub fn ordering_holds(c_check: T, c_under: T, c_over: T, c_hat: T, tol: T) -> bool {
        let lo = c_under.min(c_over);
        let hi = c_under.max(c_over);
        c_check > tol && c_check <= lo + tol && hi <= c_hat + tol
    }

    pub fn contains(&self, c: T, tol: T) -> bool {
        self.c_check - tol <= c && c <= self.c_hat + tol
    }
}

pub fn speed_bracket<T: Scalar>(bounds: &SlopeBounds<T>, a: T) -> Result<SpeedBracket<T>> {
    let tol = T::lit(MATCH_TOL);
    let speed = |name: &'static str, kind| {
        let (alpha, beta) = bounds.pairing(kind);
        match_named_speed(name, alpha, beta, a, tol)
    };
    let c_check = speed("c_check", EnvelopeKind::GLo)?;
    let c_under = speed("c_under", EnvelopeKind::FLo)?;
    let c_over = speed("c_over", EnvelopeKind::FHi)?;
    let c_hat = speed("c_hat", EnvelopeKind::GHi)?;
    let ordering_ok = SpeedBracket::ordering_holds(c_check, c_under, c_over, c_hat, T::lit(1e-9));
    Ok(SpeedBracket {
        c_check,
        c_under,
        c_over,
        c_hat,
        ordering_ok,
    })
}

/// Piecewise-exponential profile: `a e^{rate_left z}` for `z < 0`,
/// `1 + (a − 1) e^{rate_right z}` for `z ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeWave<T> {
    pub c: T,
    pub rate_left: T,
    pub rate_right: T,
    pub a: T,
}

impl<T: Scalar> EnvelopeWave<T> {
    /// Wave of the envelope problem with slopes `(alpha, beta)` at speed `c`.
    pub fn new(c: T, alpha: T, beta: T, a: T) -> Result<Self> {
        let rates = eigen_rates(c, alpha, beta)?;
        Ok(Self {
            c,
            rate_left: rates.lambda0_plus,
            rate_right: rates.lambda1_minus,
            a,
        })
    }

    pub fn profile(&self, z: T) -> T {
        envelope_profile(self, z)
    }

    pub fn slope(&self, z: T) -> T {
        if z < T::zero() {
            self.a * self.rate_left * (self.rate_left * z).exp()
        } else {
            (self.a - T::one()) * self.rate_right * (self.rate_right * z).exp()
        }
    }

    pub fn derivative_gap(&self) -> T {
        derivative_gap(self)
    }
}

pub fn envelope_profile<T: Scalar>(w: &EnvelopeWave<T>, z: T) -> T {
    if z == T::zero() {
        w.a
    } else if z < T::zero() {
        w.a * (w.rate_left * z).exp()
    } else {
        T::one() + (w.a - T::one()) * (w.rate_right * z).exp()
    }
}

/// Jump `u_z(0⁻) − u_z(0⁺)` of the envelope wave.
pub fn derivative_gap<T: Scalar>(w: &EnvelopeWave<T>) -> T {
    w.rate_left * w.a - w.rate_right * (w.a - T::one())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn eigen_rate_examples() {
        let r = eigen_rates(0.0, -1.0, -1.0).unwrap();
        assert_eq!(r.lambda0_plus, 1.0);
        assert_eq!(r.lambda1_minus, -1.0);
        assert!(close(lambda0_plus(1.0, -1.0), 1.618_033_988_749_895, 1e-15));
        assert!(close(lambda0_plus(0.0, -1.3), 1.140_175_425_099_138, 1e-15));
        assert!(eigen_rates(0.0, 0.0, -1.0).is_err());
        assert!(eigen_rates(0.0, -1.0, 0.5).is_err());
        assert!(eigen_rates(-0.1, -1.0, -1.0).is_err());
    }

    #[test]
    fn matched_speed_examples() {
        let c = match_speed(-1.0, -1.0, 0.3, 1e-14).unwrap();
        assert!(close(c, 0.872_871_560_943_969_6, 1e-12));
        assert_eq!(match_speed(-1.0, -1.0, 0.5, 1e-12).unwrap(), 0.0);
        let c_check = match_speed(-1.3, -0.5, 0.3, 1e-14).unwrap();
        assert!(close(c_check, 0.324_701_625_236_378_5, 1e-12));
    }

    #[test]
    fn leftward_regime_is_an_error() {
        let err = match_speed(-1.0, -1.0, 0.6, 1e-12).unwrap_err();
        assert!(matches!(err, Error::NoPositiveRoot { .. }));
    }

    #[test]
    fn demo_bracket() {
        let bounds = SlopeBounds {
            alpha_lo: -1.3,
            alpha_hi: -1.0,
            beta_lo: -1.2,
            beta_hi: -0.5,
        };
        let b = speed_bracket(&bounds, 0.3).unwrap();
        // values frozen from an independent root solve of a = λ₁⁻/(λ₁⁻ − λ₀⁺)
        assert!(close(b.c_check, 0.324_701_625_236_378_5, 1e-11));
        assert!(close(b.c_under, 0.926_741_697_678_500_2, 1e-11));
        assert!(close(b.c_over, 0.419_532_270_519_594_3, 1e-11));
        assert!(close(b.c_hat, 1.017_811_303_545_043, 1e-11));
        assert!(b.ordering_ok);
    }

    #[test]
    fn symmetric_bracket_is_degenerate() {
        let bounds = SlopeBounds {
            alpha_lo: -1.0,
            alpha_hi: -1.0,
            beta_lo: -1.0,
            beta_hi: -1.0,
        };
        let b = speed_bracket(&bounds, 0.5).unwrap();
        assert_eq!([b.c_check, b.c_under, b.c_over, b.c_hat], [0.0; 4]);
        assert!(!b.ordering_ok);
    }

    #[test]
    fn failing_entry_is_named() {
        let bounds = SlopeBounds {
            alpha_lo: -1.0,
            alpha_hi: -1.0,
            beta_lo: -1.0,
            beta_hi: -1.0,
        };
        match speed_bracket(&bounds, 0.7) {
            Err(Error::NoPositiveRoot { speed, .. }) => assert_eq!(speed, "c_check"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn envelope_profile_examples() {
        let w = EnvelopeWave {
            c: 0.0,
            rate_left: 1.0,
            rate_right: -1.0,
            a: 0.3,
        };
        assert_eq!(w.profile(0.0), 0.3);
        assert!(close(w.profile(-1.0), 0.110_363_832_351_433, 1e-14));
        assert!(close(w.profile(60.0), 1.0, 1e-15));
    }

    #[test]
    fn derivative_gap_examples() {
        let c = match_speed(-1.0, -1.0, 0.3, 1e-14).unwrap();
        let matched: EnvelopeWave<f64> = EnvelopeWave::new(c, -1.0, -1.0, 0.3).unwrap();
        assert!(matched.derivative_gap().abs() <= 1e-9);
        let w = EnvelopeWave::new(0.0, -1.0, -1.0, 0.3).unwrap();
        assert!(close(w.derivative_gap(), -0.4, 1e-15));
        let sym = EnvelopeWave::new(0.0, -1.0, -1.0, 0.5).unwrap();
        assert_eq!(sym.derivative_gap(), 0.0);
    }

    #[test]
    fn single_precision_match() {
        let c = match_speed(-1.0f32, -1.0, 0.3, 1e-6).unwrap();
        assert!((c - 0.872_871_56).abs() < 1e-5);
    }
}
