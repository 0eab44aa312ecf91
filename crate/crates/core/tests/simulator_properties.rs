mod common;

use bistable_core::simulator::{
    comparison_check, envelope_value, heat_kernel_eps, run, select_m, shift_distance,
    supersub_params, EnvelopeSign, RunOptions, Stepper,
};
use bistable_core::{Boundary, Grid1D, ReactionTerm, SimState};

fn demo() -> (ReactionTerm, bistable_core::WaveSolution) {
    let f = ReactionTerm::quadratic_demo();
    let ws = common::solve(&f, 1e-6);
    (f, ws)
}

#[test]
fn shift_distance_recovers_known_shifts() {
    let (_, ws) = demo();
    let g = Grid1D::new(-30.0, 30.0, 0.05, 0.01, Boundary::Dirichlet01).unwrap();
    let shifted = SimState {
        t: 0.0,
        u: g.sample(|x| ws.u_at(x - 2.0)),
    };
    let (d, z) = shift_distance(&shifted, &g, &ws, ws.c_star);
    assert!((z + 2.0).abs() <= 1e-2, "{z}");
    assert!(d <= 5.0 * g.dx * g.dx, "{d}");

    let exact = SimState {
        t: 0.0,
        u: g.sample(|x| ws.u_at(x)),
    };
    let (d, z) = shift_distance(&exact, &g, &ws, ws.c_star);
    assert!(d <= 1e-12 && z.abs() <= 1e-12, "{d} {z}");

    let zero = SimState {
        t: 0.0,
        u: vec![0.0; g.nodes()],
    };
    let (d, _) = shift_distance(&zero, &g, &ws, ws.c_star);
    assert!(d > 0.99 && d <= 1.0, "{d}");
}

fn wave_run(
    ws: &bistable_core::WaveSolution,
    f: &ReactionTerm,
    dx: f64,
    dt: f64,
    t_end: f64,
) -> Vec<f64> {
    let g = Grid1D::new(-40.0, 40.0, dx, dt, Boundary::Dirichlet01).unwrap();
    let opts = RunOptions::every(0.5).with_reference(ws);
    run(f, g.sample(|x| ws.u_at(x)), &g, t_end, &opts)
        .unwrap()
        .shift_distances
}

#[test]
fn sampled_wave_stays_close() {
    let (f, ws) = demo();
    let (dx, dt) = (0.05, 0.01);
    let d = wave_run(&ws, &f, dx, dt, 10.0);
    let bound = 5.0 * (dx * dx + dt);
    assert!(d.iter().all(|&v| v <= bound), "{d:?}");
}

#[test]
fn scheme_error_halves_with_grid() {
    let (f, ws) = demo();
    let coarse = *wave_run(&ws, &f, 0.05, 0.01, 5.0).last().unwrap();
    let fine = *wave_run(&ws, &f, 0.025, 0.005, 5.0).last().unwrap();
    assert!(coarse / fine >= 1.8, "{coarse} / {fine}");
}

#[test]
fn diffusion_stays_above_heat_kernel_bound() {
    let g = Grid1D::new(-20.0, 20.0, 0.05, 0.005, Boundary::Dirichlet01).unwrap();
    let stepper = Stepper::new(g);
    let mut u = g.sample(|x: f64| (1.0 - x.abs()).max(0.0));
    let mass: f64 = u.iter().sum::<f64>() * g.dx;
    let l = 3.0;
    let mut scratch = u.clone();
    let mut t = 0.0;
    for target in [0.5, 1.0, 2.0] {
        while t < target - 1e-9 {
            stepper.step_into(&u, &mut scratch, |_| 0.0);
            std::mem::swap(&mut u, &mut scratch);
            t += g.dt;
        }
        let min = g
            .xs()
            .iter()
            .zip(&u)
            .filter(|(x, _)| x.abs() < l)
            .map(|(_, &v)| v)
            .fold(f64::INFINITY, f64::min);
        let bound = heat_kernel_eps(t, l, 0.0).unwrap() * mass;
        assert!(min >= bound, "t = {t}: {min} < {bound}");
    }
}

#[test]
fn perturbed_waves_stay_ordered() {
    let (f, ws) = demo();
    let rho = 0.05 * f.a().min(1.0 - f.a());
    let p = supersub_params(&ws, &f, select_m(&ws), rho).unwrap();
    let delta = p.delta0 / 2.0;
    let (dx, dt) = (0.05, 0.01);
    let g = Grid1D::new(-40.0, 40.0, dx, dt, Boundary::Dirichlet01).unwrap();
    let lower = g.sample(|x| envelope_value(&ws, &p, EnvelopeSign::Minus, x, 0.0, 0.0, delta));
    let upper = g.sample(|x| envelope_value(&ws, &p, EnvelopeSign::Plus, x, 0.0, 0.0, delta));
    let report = comparison_check(&f, lower, upper, &g, 10.0).unwrap();
    assert!(report.max_violation <= 10.0 * (dx * dx + dt), "{report:?}");
}
