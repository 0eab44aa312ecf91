use serde::Serialize;

use super::grid::{check_bounds, Grid1D, SimState, Stepper};
use crate::error::{Error, Result};
use crate::fit::fit_line;
use crate::reaction::ReactionTerm;
use crate::roots::golden_min;
use crate::scalar::Scalar;
use crate::shooting::WaveSolution;

/// Level-`a` crossing of a state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrontPosition<T> {
    pub x: T,
    /// Number of sign changes of `u − a`; more than one means `x` is their median.
    pub crossings: usize,
}

impl<T> FrontPosition<T> {
    pub fn multiple_fronts(&self) -> bool {
        self.crossings > 1
    }
}

/// Linear-interpolated crossing of the level `a`.
pub fn front_position<T: Scalar>(s: &SimState<T>, g: &Grid1D<T>, a: T) -> Result<FrontPosition<T>> {
    let mut crossings = Vec::new();
    for i in 0..s.u.len().saturating_sub(1) {
        let d0 = s.u[i] - a;
        let d1 = s.u[i + 1] - a;
        if (d0 < T::zero()) != (d1 < T::zero()) {
            let theta = d0 / (d0 - d1);
            crossings.push(g.x(i) + g.dx * theta);
        }
    }
    if crossings.is_empty() {
        return Err(Error::NoFront);
    }
    let x = crossings[(crossings.len() - 1) / 2];
    Ok(FrontPosition {
        x,
        crossings: crossings.len(),
    })
}

fn interior_range<T: Scalar>(g: &Grid1D<T>) -> (usize, usize) {
    let margin = (T::lit(0.05) * T::from_count(g.cells()))
        .ceil()
        .to_usize()
        .unwrap_or(0);
    (margin, g.cells() - margin)
}

fn sup_distance<T: Scalar>(s: &SimState<T>, g: &Grid1D<T>, ws: &WaveSolution<T>, z: T) -> T {
    let (lo, hi) = interior_range(g);
    (lo..=hi).fold(T::zero(), |m, i| {
        m.max((s.u[i] - ws.u_at(g.x(i) + z)).abs())
    })
}

/// `min_z sup_x |u(x) − u*(x + z)|` over the interior (5% margins excluded).
///
/// The search is centred on the shift that puts `u*`'s level `a` on the
/// state's front; without a front the co-moving shift `c·t` is used as is.
pub fn shift_distance<T: Scalar>(
    s: &SimState<T>,
    g: &Grid1D<T>,
    ws: &WaveSolution<T>,
    c: T,
) -> (T, T) {
    let centre = match front_position(s, g, ws.a) {
        Ok(front) => -front.x,
        Err(_) => {
            let z = c * s.t;
            return (sup_distance(s, g, ws, z), z);
        }
    };
    let (lo, hi) = interior_range(g);
    let half_width = T::lit(5.0).min((g.x(hi) - g.x(lo)) / T::lit(4.0));
    let steps = (half_width / g.dx).ceil().to_usize().unwrap_or(1);
    let mut best = (sup_distance(s, g, ws, centre), centre);
    for k in 1..=steps {
        for z in [
            centre - g.dx * T::from_count(k),
            centre + g.dx * T::from_count(k),
        ] {
            let d = sup_distance(s, g, ws, z);
            if d < best.0 {
                best = (d, z);
            }
        }
    }
    let (z, d) = golden_min(
        |z| sup_distance(s, g, ws, z),
        best.1 - g.dx,
        best.1 + g.dx,
        T::lit(1e-3) * g.dx,
    );
    if d < best.0 {
        (d, z)
    } else {
        best
    }
}

/// Observation controls for [`run`].
#[derive(Debug, Clone)]
pub struct RunOptions<'a, T> {
    pub observe_every: T,
    /// When set, shift distances to this wave are recorded.
    pub reference: Option<&'a WaveSolution<T>>,
    pub snapshot_times: Vec<T>,
}

impl<'a, T: Scalar> RunOptions<'a, T> {
    pub fn every(observe_every: T) -> Self {
        Self {
            observe_every,
            reference: None,
            snapshot_times: Vec::new(),
        }
    }

    pub fn with_reference(mut self, ws: &'a WaveSolution<T>) -> Self {
        self.reference = Some(ws);
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub front_positions: Vec<Option<T>>,
    pub shift_distances: Vec<T>,
    pub best_shifts: Vec<T>,
    pub snapshots: Vec<SimState<T>>,
    /// Observations at which `u − a` changed sign more than once.
    pub multiple_front_times: Vec<T>,
    pub final_state: Option<SimState<T>>,
}

/// Evolves `u0` to `t_end`, observing every `observe_every` time units.
pub fn run<T: Scalar>(
    f: &ReactionTerm<T>,
    u0: Vec<T>,
    g: &Grid1D<T>,
    t_end: T,
    opts: &RunOptions<'_, T>,
) -> Result<Trajectory<T>> {
    if !(t_end > T::zero()) {
        return Err(Error::Domain {
            what: "t_end",
            value: t_end.as_f64(),
        });
    }
    if !(opts.observe_every > T::zero()) {
        return Err(Error::Domain {
            what: "observe_every",
            value: opts.observe_every.as_f64(),
        });
    }
    if u0.len() != g.nodes() {
        return Err(Error::InvalidGrid(format!(
            "initial data has {} nodes, grid has {}",
            u0.len(),
            g.nodes()
        )));
    }
    check_bounds(g, T::zero(), &u0)?;
    let stepper = Stepper::new(*g);
    let n_steps = (t_end / g.dt).round().to_usize().unwrap_or(0).max(1);
    // observation j falls on the step nearest j * observe_every
    let obs_step = |j: usize| {
        (opts.observe_every * T::from_count(j) / g.dt)
            .round()
            .to_usize()
            .unwrap_or(usize::MAX)
    };
    let mut next_obs = 0;
    let mut snapshot_steps: Vec<usize> = opts
        .snapshot_times
        .iter()
        .map(|&t| (t / g.dt).round().to_usize().unwrap_or(0).min(n_steps))
        .collect();
    snapshot_steps.sort_unstable();
    snapshot_steps.dedup();

    let mut tr = Trajectory::default();
    let mut state = SimState {
        t: T::zero(),
        u: u0,
    };
    let mut scratch = vec![T::zero(); state.u.len()];
    for k in 0..=n_steps {
        if k > 0 {
            stepper.step_into(&state.u, &mut scratch, |v| f.eval_extended(v));
            std::mem::swap(&mut state.u, &mut scratch);
            state.t = g.dt * T::from_count(k);
            check_bounds(g, state.t, &state.u)?;
        }
        if k >= obs_step(next_obs) || k == n_steps {
            observe(&mut tr, &state, g, f, opts);
            while obs_step(next_obs) <= k {
                next_obs += 1;
            }
        }
        if snapshot_steps.binary_search(&k).is_ok() {
            tr.snapshots.push(state.clone());
        }
    }
    tr.final_state = Some(state);
    Ok(tr)
}

fn observe<T: Scalar>(
    tr: &mut Trajectory<T>,
    s: &SimState<T>,
    g: &Grid1D<T>,
    f: &ReactionTerm<T>,
    opts: &RunOptions<'_, T>,
) {
    if tr.times.last().is_some_and(|&t| t >= s.t) {
        return;
    }
    tr.times.push(s.t);
    let front = front_position(s, g, f.a()).ok();
    if front.is_some_and(|fp| fp.multiple_fronts()) {
        tr.multiple_front_times.push(s.t);
    }
    tr.front_positions.push(front.map(|fp| fp.x));
    if let Some(ws) = opts.reference {
        let (d, z) = shift_distance(s, g, ws, ws.c_star);
        tr.shift_distances.push(d);
        tr.best_shifts.push(z);
    }
}

fn window_indices<T: Scalar>(times: &[T], window: (T, T)) -> impl Iterator<Item = usize> + '_ {
    times
        .iter()
        .enumerate()
        .filter(move |(_, &t)| t >= window.0 && t <= window.1)
        .map(|(i, _)| i)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpeedFit<T> {
    /// Slope of the front position in time (negative for a leftward-moving front).
    pub speed: T,
    pub r2: T,
}

/// Least-squares slope of the front position over `t_window`.
pub fn estimate_speed<T: Scalar>(tr: &Trajectory<T>, t_window: (T, T)) -> Result<SpeedFit<T>> {
    let (ts, xs): (Vec<T>, Vec<T>) = window_indices(&tr.times, t_window)
        .filter_map(|i| tr.front_positions[i].map(|x| (tr.times[i], x)))
        .unzip();
    let fit = fit_line(&ts, &xs, 8)?;
    Ok(SpeedFit {
        speed: fit.slope,
        r2: fit.r2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit<T> {
    #[serde(rename = "K")]
    pub k: T,
    pub kappa: T,
    pub r2: T,
}

/// Fits `d(t) ≈ K e^{−κt}` to the shift distances in `t_window`.
pub fn fit_decay<T: Scalar>(tr: &Trajectory<T>, t_window: (T, T)) -> Result<DecayFit<T>> {
    let mut ts = Vec::new();
    let mut logs = Vec::new();
    for i in window_indices(&tr.times, t_window) {
        let Some(&d) = tr.shift_distances.get(i) else {
            continue;
        };
        if !(d > T::zero()) {
            return Err(Error::NonPositiveDistance {
                t: tr.times[i].as_f64(),
                value: d.as_f64(),
            });
        }
        ts.push(tr.times[i]);
        logs.push(d.ln());
    }
    let fit = fit_line(&ts, &logs, 8)?;
    Ok(DecayFit {
        k: fit.intercept.exp(),
        kappa: -fit.slope,
        r2: fit.r2,
    })
}
