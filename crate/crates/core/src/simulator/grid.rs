use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reaction::ReactionTerm;
use crate::scalar::Scalar;

/// States outside this range are treated as a numerical blow-up.
pub const DIVERGENCE_BOUNDS: (f64, f64) = (-0.5, 1.5);

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Boundary nodes are held fixed; fronts start with `0` on the left and `1` on the right.
    #[default]
    Dirichlet01,
    /// Zero flux through both ends.
    Neumann,
}

/// Uniform grid on `[x_min, x_max]` with a fixed time step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid1D<T> {
    pub x_min: T,
    pub x_max: T,
    pub dx: T,
    pub dt: T,
    pub bc: Boundary,
    cells: usize,
}

impl<T: Scalar> Grid1D<T> {
    pub fn new(x_min: T, x_max: T, dx: T, dt: T, bc: Boundary) -> Result<Self> {
        if !(dx > T::zero()) || !(dt > T::zero()) {
            return Err(Error::InvalidGrid("dx and dt must be positive".into()));
        }
        if !(x_max > x_min) {
            return Err(Error::InvalidGrid("x_max must exceed x_min".into()));
        }
        let ratio = (x_max - x_min) / dx;
        let cells = ratio.round();
        if (ratio - cells).abs() > T::lit(1e-9) * ratio {
            return Err(Error::InvalidGrid(format!(
                "(x_max - x_min)/dx = {} is not an integer",
                ratio.as_f64()
            )));
        }
        let cells = cells.to_usize().unwrap_or(0);
        if cells < 16 {
            return Err(Error::InvalidGrid(format!(
                "{cells} cells, need at least 16"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            dx,
            dt,
            bc,
            cells,
        })
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn nodes(&self) -> usize {
        self.cells + 1
    }

    pub fn x(&self, i: usize) -> T {
        if i == self.cells {
            self.x_max
        } else {
            self.x_min + self.dx * T::from_count(i)
        }
    }

    pub fn xs(&self) -> Vec<T> {
        (0..self.nodes()).map(|i| self.x(i)).collect()
    }

    /// Samples `u0` at every node.
    pub fn sample(&self, u0: impl Fn(T) -> T) -> Vec<T> {
        (0..self.nodes()).map(|i| u0(self.x(i))).collect()
    }

    /// Errors when `dt` exceeds the explicit-reaction bound of `f`.
    pub fn check_stability(&self, f: &ReactionTerm<T>) -> Result<()> {
        let bound = dt_stability(f);
        if self.dt > bound {
            return Err(Error::InvalidGrid(format!(
                "dt = {} exceeds dt_stability = {}",
                self.dt.as_f64(),
                bound.as_f64()
            )));
        }
        Ok(())
    }
}

/// `1.9 / max(K0, K1)`.
pub fn dt_stability<T: Scalar>(f: &ReactionTerm<T>) -> T {
    let (k0, k1) = f.derivative_bounds();
    T::lit(1.9) / k0.max(k1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimState<T> {
    pub t: T,
    pub u: Vec<T>,
}

/// Prefactored trapezoidal-diffusion / explicit-reaction step.
#[derive(Debug, Clone)]
pub struct Stepper<T> {
    grid: Grid1D<T>,
    half_r: T,
    // Thomas elimination of (I - dt/2 L): modified upper diagonal and pivots
    upper_mod: Vec<T>,
    pivot_inv: Vec<T>,
    lower: Vec<T>,
}

impl<T: Scalar> Stepper<T> {
    pub fn new(grid: Grid1D<T>) -> Self {
        let n = grid.nodes();
        let r = grid.dt / (grid.dx * grid.dx);
        let half_r = r * T::lit(0.5);
        let mut lower = vec![-half_r; n];
        let mut diag = vec![T::one() + r; n];
        let mut upper = vec![-half_r; n];
        match grid.bc {
            Boundary::Dirichlet01 => {
                diag[0] = T::one();
                upper[0] = T::zero();
                diag[n - 1] = T::one();
                lower[n - 1] = T::zero();
            }
            Boundary::Neumann => {
                upper[0] = -r;
                lower[n - 1] = -r;
            }
        }
        lower[0] = T::zero();
        upper[n - 1] = T::zero();

        let mut upper_mod = vec![T::zero(); n];
        let mut pivot_inv = vec![T::zero(); n];
        pivot_inv[0] = T::one() / diag[0];
        upper_mod[0] = upper[0] * pivot_inv[0];
        for i in 1..n {
            let p = diag[i] - lower[i] * upper_mod[i - 1];
            pivot_inv[i] = T::one() / p;
            upper_mod[i] = upper[i] * pivot_inv[i];
        }
        Self {
            grid,
            half_r,
            upper_mod,
            pivot_inv,
            lower,
        }
    }

    pub fn grid(&self) -> &Grid1D<T> {
        &self.grid
    }

    /// Advances `u` by one step into `out` with an arbitrary reaction.
    pub fn step_into(&self, u: &[T], out: &mut [T], reaction: impl Fn(T) -> T) {
        let n = u.len();
        debug_assert_eq!(n, self.grid.nodes());
        let hr = self.half_r;
        let dt = self.grid.dt;
        let two = T::lit(2.0);
        match self.grid.bc {
            Boundary::Dirichlet01 => {
                out[0] = u[0];
                out[n - 1] = u[n - 1];
            }
            Boundary::Neumann => {
                out[0] = u[0] + two * hr * (u[1] - u[0]) + dt * reaction(u[0]);
                out[n - 1] = u[n - 1] + two * hr * (u[n - 2] - u[n - 1]) + dt * reaction(u[n - 1]);
            }
        }
        for i in 1..n - 1 {
            out[i] = u[i] + hr * (u[i - 1] - two * u[i] + u[i + 1]) + dt * reaction(u[i]);
        }
        // forward sweep then back substitution
        out[0] = out[0] * self.pivot_inv[0];
        for i in 1..n {
            out[i] = (out[i] - self.lower[i] * out[i - 1]) * self.pivot_inv[i];
        }
        for i in (0..n - 1).rev() {
            out[i] = out[i] - self.upper_mod[i] * out[i + 1];
        }
    }

    /// One step of `u_t = u_xx + f(u)`.
    pub fn advance(&self, f: &ReactionTerm<T>, s: &SimState<T>) -> Result<SimState<T>> {
        let mut out = vec![T::zero(); s.u.len()];
        self.step_into(&s.u, &mut out, |v| f.eval_extended(v));
        let t = s.t + self.grid.dt;
        check_bounds(&self.grid, t, &out)?;
        Ok(SimState { t, u: out })
    }
}

pub(crate) fn check_bounds<T: Scalar>(grid: &Grid1D<T>, t: T, u: &[T]) -> Result<()> {
    let (lo, hi) = (T::lit(DIVERGENCE_BOUNDS.0), T::lit(DIVERGENCE_BOUNDS.1));
    if let Some(i) = u.iter().position(|&v| !(v >= lo && v <= hi)) {
        return Err(Error::Divergence {
            t: t.as_f64(),
            x: grid.x(i).as_f64(),
            u: u[i].as_f64(),
        });
    }
    Ok(())
}

/// One IMEX step; see [`Stepper`] for repeated stepping.
pub fn step<T: Scalar>(f: &ReactionTerm<T>, s: &SimState<T>, g: &Grid1D<T>) -> Result<SimState<T>> {
    if s.u.len() != g.nodes() {
        return Err(Error::InvalidGrid(format!(
            "state has {} nodes, grid has {}",
            s.u.len(),
            g.nodes()
        )));
    }
    Stepper::new(*g).advance(f, s)
}
