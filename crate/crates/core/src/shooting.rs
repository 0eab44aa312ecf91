//! Phase-plane shooting for the nonlinear wave speed and profile.
//!
//! In the coordinates `(u, w = u_z)` the profile equation becomes
//! `dw/du = c − f(u)/w`. The left path leaves `(0, 0)` along the unstable
//! direction `w ≈ λ₀⁺u`, the right path enters `(1, 0)` along
//! `w ≈ λ₁⁻(u − 1)`. The mismatch `S(c) = w⁻(a; c) − w⁺(a; c)` is strictly
//! increasing in `c`; its root is the wave speed.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interp::{hermite, hermite_slope, limit_monotone, locate};
use crate::linear_theory::{lambda0_plus, lambda1_minus, SpeedBracket};
use crate::ode::{integrate, rk4_step, Stop, Tolerances};
use crate::reaction::ReactionTerm;
use crate::roots::bisect_increasing;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `u ∈ [0, a]`, driven by `f0`.
    Left,
    /// `u ∈ [a, 1]`, driven by `f1`.
    Right,
}

/// Numerical controls for the phase-plane integration.
#[derive(Debug, Clone, Copy)]
pub struct ShootingOptions<T> {
    /// Distance from the singular equilibrium at which the linearized seed is placed.
    pub eps: T,
    pub rtol: T,
    /// Right-side paths falling below this are reported as collapsed.
    pub w_floor: T,
}

impl<T: Scalar> ShootingOptions<T> {
    pub fn for_term(f: &ReactionTerm<T>) -> Self {
        let rtol = T::lit(1e-10).max(T::epsilon() * T::lit(100.0));
        Self {
            eps: default_eps(f.a()),
            rtol,
            w_floor: T::lit(1e-12),
        }
    }
}

/// `max(1e-6 · min(a, 1 − a), 1e-8)`, raised to `1000 ε_mach` for narrow types.
pub fn default_eps<T: Scalar>(a: T) -> T {
    let floor = T::lit(1e-8).max(T::epsilon() * T::lit(1000.0));
    (T::lit(1e-6) * a.min(T::one() - a)).max(floor)
}

/// A trajectory `w(u)` of the phase-plane equation, sorted by increasing `u`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhasePath<T> {
    pub side: Side,
    pub c: T,
    pub samples: Vec<(T, T)>,
    #[serde(skip)]
    slopes: Vec<T>,
    #[serde(skip)]
    seed_rate: T,
}

impl<T: Scalar> PhasePath<T> {
    /// Value of `w` at the branch point.
    pub fn w_at_branch(&self) -> T {
        match self.side {
            Side::Left => self.samples.last().expect("non-empty path").1,
            Side::Right => self.samples[0].1,
        }
    }

    /// Interpolated `w(u)`; beyond the sampled range the seed line is used
    /// towards the equilibrium and a first-order extension towards `a`.
    pub fn eval(&self, u: T) -> T {
        let (u_first, w_first) = self.samples[0];
        let (u_last, w_last) = *self.samples.last().expect("non-empty path");
        match self.side {
            Side::Left if u <= u_first => return self.seed_rate * u,
            Side::Right if u >= u_last => return self.seed_rate * (u - T::one()),
            Side::Left if u >= u_last => {
                return w_last + self.slopes[self.slopes.len() - 1] * (u - u_last)
            }
            Side::Right if u <= u_first => return w_first + self.slopes[0] * (u - u_first),
            _ => {}
        }
        let i = locate_samples(&self.samples, u);
        let (u0, w0) = self.samples[i];
        let (u1, w1) = self.samples[i + 1];
        let h = u1 - u0;
        hermite(w0, w1, self.slopes[i], self.slopes[i + 1], h, (u - u0) / h)
    }
}

fn locate_samples<T: Scalar>(samples: &[(T, T)], u: T) -> usize {
    let n = samples.len();
    let mut lo = 0;
    let mut hi = n - 1;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if samples[mid].0 <= u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Integrates one half of the phase-plane problem with default tolerances.
pub fn shoot_half<T: Scalar>(
    f: &ReactionTerm<T>,
    side: Side,
    c: T,
    eps: T,
) -> Result<PhasePath<T>> {
    let opts = ShootingOptions {
        eps,
        ..ShootingOptions::for_term(f)
    };
    shoot_half_with(f, side, c, &opts)
}

pub fn shoot_half_with<T: Scalar>(
    f: &ReactionTerm<T>,
    side: Side,
    c: T,
    opts: &ShootingOptions<T>,
) -> Result<PhasePath<T>> {
    let a = f.a();
    let eps = opts.eps;
    let limit = a.min(T::one() - a) / T::lit(100.0);
    if !(eps > T::zero() && eps <= limit) {
        return Err(Error::Domain {
            what: "shooting eps",
            value: eps.as_f64(),
        });
    }
    if !(c >= T::zero()) {
        return Err(Error::Domain {
            what: "shooting speed",
            value: c.as_f64(),
        });
    }
    let (branch, seed_rate, u_start, w_start) = match side {
        Side::Left => {
            let rate = lambda0_plus(c, f.f0().derivative_at(T::zero()));
            (f.f0(), rate, eps, rate * eps)
        }
        Side::Right => {
            let rate = lambda1_minus(c, f.f1().derivative_at(T::one()));
            (f.f1(), rate, T::one() - eps, -rate * eps)
        }
    };
    if !(w_start > T::zero()) {
        return Err(Error::Domain {
            what: "linearized seed (check H1)",
            value: w_start.as_f64(),
        });
    }
    let rhs = |u: T, w: T| c - branch.eval(u) / w;
    let tol = Tolerances {
        rtol: opts.rtol,
        atol: T::min_positive_value().max(T::lit(1e-300)),
        h_max: (a.min(T::one() - a)) / T::lit(400.0),
        max_steps: 2_000_000,
    };
    let mut samples = Vec::new();
    let mut slopes = Vec::new();
    let floor = opts.w_floor;
    let (_, stop) = integrate(
        rhs,
        u_start,
        w_start,
        a,
        &tol,
        |u, w| {
            samples.push((u, w));
            slopes.push(rhs(u, w));
        },
        |_, w| !(w > floor),
    )?;
    if let Stop::Halted(u, w) = stop {
        return Err(Error::PathCollapse {
            u: u.as_f64(),
            w: w.as_f64(),
        });
    }
    if side == Side::Right {
        samples.reverse();
        slopes.reverse();
    }
    Ok(PhasePath {
        side,
        c,
        samples,
        slopes,
        seed_rate,
    })
}

/// `S(c) = w⁻(a; c) − w⁺(a; c)`; a collapsed right path counts as `w⁺ = 0`.
pub fn speed_mismatch<T: Scalar>(f: &ReactionTerm<T>, c: T) -> Result<T> {
    speed_mismatch_with(f, c, &ShootingOptions::for_term(f))
}

pub fn speed_mismatch_with<T: Scalar>(
    f: &ReactionTerm<T>,
    c: T,
    opts: &ShootingOptions<T>,
) -> Result<T> {
    let left = shoot_half_with(f, Side::Left, c, opts)?.w_at_branch();
    let right = match shoot_half_with(f, Side::Right, c, opts) {
        Ok(path) => path.w_at_branch(),
        Err(Error::PathCollapse { .. }) => T::zero(),
        Err(e) => return Err(e),
    };
    Ok(left - right)
}

/// Outcome of [`find_speed`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpeedSolve<T> {
    pub c_star: T,
    pub residual: T,
    pub iterations: usize,
    /// Bracket actually bisected.
    pub search_lo: T,
    pub search_hi: T,
    /// `false` when the interior spot check saw `S` decrease.
    pub monotone_ok: bool,
}

const C_CAP: f64 = 1024.0;

/// Bisects `S(c)` for the wave speed.
pub fn find_speed<T: Scalar>(
    f: &ReactionTerm<T>,
    bracket: &SpeedBracket<T>,
    tol_c: T,
) -> Result<SpeedSolve<T>> {
    find_speed_with(f, bracket, tol_c, &ShootingOptions::for_term(f))
}

pub fn find_speed_with<T: Scalar>(
    f: &ReactionTerm<T>,
    bracket: &SpeedBracket<T>,
    tol_c: T,
    opts: &ShootingOptions<T>,
) -> Result<SpeedSolve<T>> {
    let s = |c: T| speed_mismatch_with(f, c, opts);
    let (mut lo, mut hi) = if bracket.ordering_ok {
        (bracket.c_check, bracket.c_hat)
    } else {
        (T::zero(), T::one())
    };
    let s_lo = s(lo)?;
    if s_lo > T::zero() {
        if lo > T::zero() {
            lo = T::zero();
        }
        let s0 = s(lo)?;
        if s0 > T::zero() {
            return Err(Error::NoPositiveRoot {
                speed: "c_star",
                phi0: s0.as_f64(),
            });
        }
    }
    while s(hi)? < T::zero() {
        hi = hi + hi;
        if hi > T::lit(C_CAP) {
            return Err(Error::BracketFailure { c_max: C_CAP });
        }
    }

    let mut monotone_ok = true;
    let mut prev = None;
    for k in 1..=5 {
        let c = lo + (hi - lo) * T::from_count(k) / T::lit(6.0);
        let v = s(c)?;
        if let Some(p) = prev {
            if v <= p {
                monotone_ok = false;
            }
        }
        prev = Some(v);
    }

    let found = bisect_increasing(s, lo, hi, tol_c, tol_c, 200)?;
    if !(found.root > tol_c) {
        return Err(Error::NoPositiveRoot {
            speed: "c_star",
            phi0: found.residual.as_f64(),
        });
    }
    Ok(SpeedSolve {
        c_star: found.root,
        residual: found.residual,
        iterations: found.iterations,
        search_lo: lo,
        search_hi: hi,
        monotone_ok,
    })
}

/// Sampled traveling-wave profile `u(z)` with `u(0) = a`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaveSolution<T> {
    pub c_star: T,
    pub a: T,
    pub z_grid: Vec<T>,
    pub u_values: Vec<T>,
    pub w_values: Vec<T>,
    pub derivative_jump_at_0: T,
    pub bracket: Option<SpeedBracket<T>>,
    /// Exponential rate of the left tail, `λ₀⁺(c*)` at `f0'(0)`.
    pub left_rate: T,
    /// Exponential rate of the right tail, `λ₁⁻(c*)` at `f1'(1)`.
    pub right_rate: T,
    dz: T,
}

impl<T: Scalar> WaveSolution<T> {
    pub fn dz(&self) -> T {
        self.dz
    }

    pub fn z_range(&self) -> (T, T) {
        (self.z_grid[0], *self.z_grid.last().expect("non-empty grid"))
    }

    /// `u*(z)`: monotone Hermite inside the sampled range, exponential tails outside.
    pub fn u_at(&self, z: T) -> T {
        let n = self.z_grid.len();
        let (z_lo, z_hi) = self.z_range();
        if z <= z_lo {
            return self.u_values[0] * (self.left_rate * (z - z_lo)).exp();
        }
        if z >= z_hi {
            return T::one()
                - (T::one() - self.u_values[n - 1]) * (self.right_rate * (z - z_hi)).exp();
        }
        let (i, t) = self.cell(z);
        let (m0, m1) = limit_monotone(
            self.u_values[i],
            self.u_values[i + 1],
            self.dz,
            self.w_values[i],
            self.w_values[i + 1],
        );
        hermite(self.u_values[i], self.u_values[i + 1], m0, m1, self.dz, t)
    }

    /// `u*_z(z)` consistent with [`WaveSolution::u_at`].
    pub fn slope_at(&self, z: T) -> T {
        let (z_lo, z_hi) = self.z_range();
        if z <= z_lo {
            return self.left_rate * self.u_at(z);
        }
        if z >= z_hi {
            return -self.right_rate * (T::one() - self.u_at(z));
        }
        let (i, t) = self.cell(z);
        let (m0, m1) = limit_monotone(
            self.u_values[i],
            self.u_values[i + 1],
            self.dz,
            self.w_values[i],
            self.w_values[i + 1],
        );
        hermite_slope(self.u_values[i], self.u_values[i + 1], m0, m1, self.dz, t)
    }

    fn cell(&self, z: T) -> (usize, T) {
        let n = self.z_grid.len();
        let s = (z - self.z_grid[0]) / self.dz;
        let mut i = s.floor().to_usize().unwrap_or(0).min(n - 2);
        if self.z_grid[i] > z || self.z_grid[i + 1] < z {
            i = locate(&self.z_grid, z);
        }
        (i, (z - self.z_grid[i]) / self.dz)
    }
}

/// Integrates `du/dz = w(u)` outward from `u(0) = a` along both phase paths.
pub fn reconstruct_profile<T: Scalar>(
    f: &ReactionTerm<T>,
    c_star: T,
    u_eps: T,
    dz: T,
) -> Result<WaveSolution<T>> {
    reconstruct_profile_with(f, c_star, u_eps, dz, &ShootingOptions::for_term(f))
}

pub fn reconstruct_profile_with<T: Scalar>(
    f: &ReactionTerm<T>,
    c_star: T,
    u_eps: T,
    dz: T,
    opts: &ShootingOptions<T>,
) -> Result<WaveSolution<T>> {
    if !(u_eps > T::zero() && u_eps <= T::lit(1e-3)) {
        return Err(Error::Domain {
            what: "profile u_eps",
            value: u_eps.as_f64(),
        });
    }
    if !(dz > T::zero()) {
        return Err(Error::Domain {
            what: "profile dz",
            value: dz.as_f64(),
        });
    }
    let a = f.a();
    let left = shoot_half_with(f, Side::Left, c_star, opts)?;
    let right = shoot_half_with(f, Side::Right, c_star, opts)?;
    let w_left = |u: T| left.eval(u);
    let w_right = |u: T| right.eval(u);

    let max_steps = 10_000_000usize;
    let mut back = vec![(a, left.w_at_branch())];
    let mut u = a;
    while u > u_eps {
        u = rk4_step(&w_left, u, -dz);
        back.push((u, w_left(u)));
        if back.len() > max_steps {
            return Err(Error::Integration("left tail did not decay".into()));
        }
    }
    let mut fwd = vec![(a, right.w_at_branch())];
    let mut u = a;
    while u < T::one() - u_eps {
        u = rk4_step(&w_right, u, dz);
        fwd.push((u, w_right(u)));
        if fwd.len() > max_steps {
            return Err(Error::Integration("right tail did not saturate".into()));
        }
    }

    let n_left = back.len() - 1;
    let mut z_grid = Vec::with_capacity(n_left + fwd.len());
    let mut u_values = Vec::with_capacity(z_grid.capacity());
    let mut w_values = Vec::with_capacity(z_grid.capacity());
    for (k, &(u, w)) in back.iter().enumerate().rev() {
        z_grid.push(-(T::from_count(k) * dz));
        u_values.push(u);
        w_values.push(w);
    }
    // z = 0 is shared; the right path value there is dropped so u_values stays single-valued
    for (k, &(u, w)) in fwd.iter().enumerate().skip(1) {
        z_grid.push(T::from_count(k) * dz);
        u_values.push(u);
        w_values.push(w);
    }
    let derivative_jump_at_0 = (left.w_at_branch() - right.w_at_branch()).abs();
    Ok(WaveSolution {
        c_star,
        a,
        z_grid,
        u_values,
        w_values,
        derivative_jump_at_0,
        bracket: None,
        left_rate: lambda0_plus(c_star, f.f0().derivative_at(T::zero())),
        right_rate: lambda1_minus(c_star, f.f1().derivative_at(T::one())),
        dz,
    })
}

/// C¹ matching at `z = 0` and positivity of `u_z`.
pub fn verify_c1<T: Scalar>(ws: &WaveSolution<T>, tol: T) -> bool {
    ws.derivative_jump_at_0 <= tol && ws.w_values.iter().all(|&w| w > T::zero())
}
