//! Comparison-principle diagnostics: heat-kernel lower bound, the scalar
//! reaction ODEs, and ordering preservation under the discrete flow.

use serde::Serialize;

use super::grid::{check_bounds, Grid1D, Stepper};
use crate::error::{Error, Result};
use crate::ode::{integrate, Tolerances};
use crate::reaction::ReactionTerm;
use crate::scalar::Scalar;

/// `exp(−k_inf·t − L²/t) / (2√(πt))`.
pub fn heat_kernel_eps<T: Scalar>(t: T, l: T, k_inf: T) -> Result<T> {
    if !(t > T::zero()) {
        return Err(Error::Domain {
            what: "heat kernel time",
            value: t.as_f64(),
        });
    }
    if !(l > T::zero()) {
        return Err(Error::Domain {
            what: "heat kernel half-width",
            value: l.as_f64(),
        });
    }
    let pi = T::lit(std::f64::consts::PI);
    Ok((-k_inf * t - l * l / t).exp() / (T::lit(2.0) * (pi * t).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OdeBranch {
    /// `q' = f0(q)`
    Q0,
    /// `q' = f1(q)`
    Q1,
}

/// Samples `(t, q(t))` of `q' = f_i(q)`, `q(0) = a`.
pub fn reaction_ode<T: Scalar>(
    f: &ReactionTerm<T>,
    branch: OdeBranch,
    t_end: T,
) -> Result<Vec<(T, T)>> {
    if !(t_end > T::zero()) {
        return Err(Error::Domain {
            what: "t_end",
            value: t_end.as_f64(),
        });
    }
    let poly = match branch {
        OdeBranch::Q0 => f.f0(),
        OdeBranch::Q1 => f.f1(),
    };
    let tol = Tolerances::new(T::lit(1e-10), T::lit(1e-14), t_end / T::lit(400.0));
    let mut samples = Vec::new();
    integrate(
        |_, q| poly.eval(q),
        T::zero(),
        f.a(),
        t_end,
        &tol,
        |t, q| samples.push((t, q)),
        |_, _| false,
    )?;
    Ok(samples)
}

/// Worst ordering violation `max(0, lower − upper)` seen during a joint evolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonReport<T> {
    pub max_violation: T,
    pub x: T,
    pub t: T,
}

/// Evolves `lower0 ≤ upper0` side by side and records ordering violations.
pub fn comparison_check<T: Scalar>(
    f: &ReactionTerm<T>,
    lower0: Vec<T>,
    upper0: Vec<T>,
    g: &Grid1D<T>,
    t_end: T,
) -> Result<ComparisonReport<T>> {
    if lower0.len() != g.nodes() || upper0.len() != g.nodes() {
        return Err(Error::InvalidGrid(
            "initial data does not match the grid".into(),
        ));
    }
    if let Some(i) = lower0.iter().zip(&upper0).position(|(l, u)| l > u) {
        return Err(Error::Domain {
            what: "lower0 must not exceed upper0 (x)",
            value: g.x(i).as_f64(),
        });
    }
    let stepper = Stepper::new(*g);
    let n_steps = (t_end / g.dt).round().to_usize().unwrap_or(0);
    let mut lower = lower0;
    let mut upper = upper0;
    let mut scratch = vec![T::zero(); lower.len()];
    let mut report = ComparisonReport {
        max_violation: T::zero(),
        x: g.x_min,
        t: T::zero(),
    };
    for k in 1..=n_steps {
        let t = g.dt * T::from_count(k);
        stepper.step_into(&lower, &mut scratch, |v| f.eval_extended(v));
        std::mem::swap(&mut lower, &mut scratch);
        stepper.step_into(&upper, &mut scratch, |v| f.eval_extended(v));
        std::mem::swap(&mut upper, &mut scratch);
        check_bounds(g, t, &lower)?;
        check_bounds(g, t, &upper)?;
        for (i, (&l, &u)) in lower.iter().zip(&upper).enumerate() {
            let v = l - u;
            if v > report.max_violation {
                report = ComparisonReport {
                    max_violation: v,
                    x: g.x(i),
                    t,
                };
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::Boundary;

    #[test]
    fn kernel_bound_examples() {
        let v: f64 = heat_kernel_eps(1.0, 1.0, 0.0).unwrap();
        assert!((v - 0.103_776_874_355_148_7).abs() < 1e-15);
        let mut prev = f64::INFINITY;
        for k in [0.0, 1.0, 10.0, 100.0] {
            let e = heat_kernel_eps(1.0, 1.0, k).unwrap();
            assert!(e < prev);
            prev = e;
        }
        assert!(heat_kernel_eps(1.0, 1.0, 1e6).unwrap() == 0.0);
        let mut prev = f64::INFINITY;
        for l in [0.5, 1.0, 2.0, 4.0] {
            let e = heat_kernel_eps(0.7, l, 0.0).unwrap();
            assert!(e < prev);
            prev = e;
        }
        assert!(heat_kernel_eps(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn reaction_ode_limits() {
        let f = ReactionTerm::<f64>::quadratic_demo();
        let q1 = reaction_ode(&f, OdeBranch::Q1, 20.0).unwrap();
        assert!(q1.last().unwrap().1 >= 0.999);
        assert!(q1.windows(2).all(|p| p[1].1 >= p[0].1));
        assert!(q1.iter().all(|&(_, q)| q >= 0.3 && q < 1.0));
        let q0 = reaction_ode(&f, OdeBranch::Q0, 20.0).unwrap();
        assert!(q0.last().unwrap().1 <= 0.001);
        assert!(q0.windows(2).all(|p| p[1].1 <= p[0].1));
        assert!(q0.iter().all(|&(_, q)| q > 0.0 && q <= 0.3));
    }

    #[test]
    fn identical_and_equilibrium_pairs_stay_ordered() {
        let f = ReactionTerm::<f64>::quadratic_demo();
        let g = Grid1D::new(-10.0, 10.0, 0.05, 0.01, Boundary::Dirichlet01).unwrap();
        let u = g.sample(|x| if x < 0.0 { 0.0 } else { 1.0 });
        let r = comparison_check(&f, u.clone(), u, &g, 2.0).unwrap();
        assert_eq!(r.max_violation, 0.0);
        let r = comparison_check(&f, vec![0.0; g.nodes()], vec![1.0; g.nodes()], &g, 2.0).unwrap();
        assert_eq!(r.max_violation, 0.0);
        assert!(comparison_check(&f, vec![1.0; g.nodes()], vec![0.0; g.nodes()], &g, 1.0).is_err());
    }
}
