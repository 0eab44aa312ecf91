//! Explicit super/sub-solution envelopes `U±` around the traveling wave.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::reaction::ReactionTerm;
use crate::roots::{bisect_increasing, golden_min};
use crate::scalar::Scalar;
use crate::shooting::WaveSolution;

/// Constants of the envelopes `U±(x,t) = u*(x + ct + z0 ± σδ(1 − e^{−γt})) ± δe^{−γt}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuperSubParams<T> {
    pub gamma: T,
    pub sigma: T,
    pub delta0: T,
    #[serde(rename = "K0")]
    pub k0: T,
    #[serde(rename = "K1")]
    pub k1: T,
    /// Difference-quotient bound across the jump, restricted to `y − x ≥ rho`.
    #[serde(rename = "K2_sep")]
    pub k2_sep: T,
    pub eps_star: T,
    #[serde(rename = "M")]
    pub m: T,
    pub rho: T,
}

impl<T: Scalar> SuperSubParams<T> {
    /// Largest admissible perturbation: `min(δ0, a/4, (1 − a)/4)`.
    pub fn max_delta(&self, a: T) -> T {
        let quarter = T::lit(0.25);
        self.delta0.min(a * quarter).min((T::one() - a) * quarter)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeSign {
    Plus,
    Minus,
}

/// Smallest `M` with `u*(−M) ≤ a/2` and `u*(M) ≥ (1 + a)/2`.
pub fn select_m<T: Scalar>(ws: &WaveSolution<T>) -> T {
    let a = ws.a;
    let half = T::lit(0.5);
    let level_crossing = |level: T, lo: T, hi: T| {
        bisect_increasing(
            |z| Ok::<_, Error>(ws.u_at(z) - level),
            lo,
            hi,
            T::lit(1e-12),
            T::infinity(),
            200,
        )
        .map(|b| b.root)
        .unwrap_or(lo)
    };
    let (z_lo, z_hi) = ws.z_range();
    let left = -level_crossing(a * half, z_lo, T::zero());
    let right = level_crossing((T::one() + a) * half, T::zero(), z_hi);
    left.max(right)
}

/// Computes `γ, δ0, σ, K0, K1, K2_sep, ε*` for the given `M` and separation `rho`.
pub fn supersub_params<T: Scalar>(
    ws: &WaveSolution<T>,
    f: &ReactionTerm<T>,
    m: T,
    rho: T,
) -> Result<SuperSubParams<T>> {
    let a = f.a();
    let half = T::lit(0.5);
    if !(rho > T::zero()) {
        return Err(Error::Domain {
            what: "separation rho",
            value: rho.as_f64(),
        });
    }
    let slack = T::lit(1e-9);
    if !(m > T::zero()
        && ws.u_at(-m) <= a * half + slack
        && ws.u_at(m) >= (T::one() + a) * half - slack)
    {
        return Err(Error::Domain {
            what: "M (profile must reach a/2 and (1+a)/2)",
            value: m.as_f64(),
        });
    }
    let (k0, k1) = f.derivative_bounds();
    let k2_sep = jump_quotient_bound(f, rho);
    let gamma = half * (-f.f0().derivative_at(T::zero())).min(-f.f1().derivative_at(T::one()));

    let eps_star = ws
        .z_grid
        .iter()
        .zip(&ws.w_values)
        .filter(|(&z, _)| z.abs() <= m)
        .map(|(_, &w)| w)
        .fold(T::infinity(), T::min);
    if !(eps_star > T::zero() && eps_star.is_finite()) {
        return Err(Error::DegenerateProfile(format!(
            "min of u*_z on |z| <= M is {}",
            eps_star.as_f64()
        )));
    }
    let total = k0 + k1 + k2_sep;
    Ok(SuperSubParams {
        gamma,
        sigma: (gamma + total) / (gamma * eps_star),
        delta0: gamma / total,
        k0,
        k1,
        k2_sep,
        eps_star,
        m,
        rho,
    })
}

/// `max (f1(y) − f0(x)) / (y − x)` over `x ∈ [0, a]`, `y ∈ [a, 1]`, `y − x ≥ rho`.
fn jump_quotient_bound<T: Scalar>(f: &ReactionTerm<T>, rho: T) -> T {
    let a = f.a();
    let q = |x: T, y: T| (f.f1().eval(y) - f.f0().eval(x)) / (y - x);
    let n = 400;
    let xs: Vec<T> = (0..=n)
        .map(|i| a * T::from_count(i) / T::from_count(n))
        .collect();
    let ys: Vec<T> = (0..=n)
        .map(|i| a + (T::one() - a) * T::from_count(i) / T::from_count(n))
        .collect();
    let mut best = (T::neg_infinity(), T::zero(), T::one());
    for &x in &xs {
        for &y in &ys {
            if y - x >= rho {
                let v = q(x, y);
                if v > best.0 {
                    best = (v, x, y);
                }
            }
        }
        // the constraint boundary y = x + rho is rarely a grid line
        let y = x + rho;
        if y >= a && y <= T::one() {
            let v = q(x, y);
            if v > best.0 {
                best = (v, x, y);
            }
        }
    }
    // coordinate refinement inside the feasible set
    let (_, mut x, mut y) = best;
    let hx = a / T::from_count(n);
    let hy = (T::one() - a) / T::from_count(n);
    let tol = T::lit(1e-12);
    for _ in 0..4 {
        let x_hi = (x + hx).min(a).min(y - rho);
        let x_lo = (x - hx).max(T::zero()).min(x_hi);
        x = golden_min(|s| -q(s, y), x_lo, x_hi, tol).0;
        let y_lo = (y - hy).max(a).max(x + rho);
        let y_hi = (y + hy).min(T::one()).max(y_lo);
        y = golden_min(|s| -q(x, s), y_lo, y_hi, tol).0;
    }
    best.0.max(q(x, y))
}

/// Value of `U+` (`sign = Plus`) or `U−` at `(x, t)`.
pub fn envelope_value<T: Scalar>(
    ws: &WaveSolution<T>,
    p: &SuperSubParams<T>,
    sign: EnvelopeSign,
    x: T,
    t: T,
    z0: T,
    delta: T,
) -> T {
    let s = match sign {
        EnvelopeSign::Plus => T::one(),
        EnvelopeSign::Minus => -T::one(),
    };
    let decay = (-p.gamma * t).exp();
    let shift = s * p.sigma * delta * (T::one() - decay);
    ws.u_at(x + ws.c_star * t + z0 + shift) + s * delta * decay
}
