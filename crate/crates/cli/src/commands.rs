//! The six subcommands. Each writes its artifacts under the output directory
//! and returns a one-row [`Summary`] used by sweeps.

use std::path::Path;

use bistable_core::linear_theory::{lambda0_plus, lambda1_minus, speed_bracket};
use bistable_core::shooting::{
    find_speed_with, reconstruct_profile_with, shoot_half_with, speed_mismatch_with, verify_c1,
    SpeedSolve,
};
use bistable_core::simulator::{
    dt_stability, estimate_speed, fit_decay, front_position, run, RunOptions,
};
use bistable_core::{
    Boundary, EnvelopeKind, Side, SimState, SlopeBounds, SpeedBracket, Trajectory, WaveSolution,
};
use clap::ValueEnum;
use serde::Serialize;
use serde_json::json;

use crate::config::{InitialCondition, Resolved};
use crate::error::CliError;
use crate::output::{csv_bytes, json_bytes, write_atomic, Artifact, Cell, SCHEMA_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Check,
    Bounds,
    Speed,
    Profile,
    Simulate,
    Stability,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Bounds => "bounds",
            Command::Speed => "speed",
            Command::Profile => "profile",
            Command::Simulate => "simulate",
            Command::Stability => "stability",
        }
    }

    /// Columns of [`Summary::metrics`].
    pub fn metric_names(self) -> &'static [&'static str] {
        match self {
            Command::Check => &["h3_integral", "all_ok", "remark2_ok"],
            Command::Bounds => &["c_check", "c_under", "c_over", "c_hat"],
            Command::Speed => &["c_star", "c_check", "c_hat", "derivative_jump"],
            Command::Profile => &["c_star", "derivative_jump", "points"],
            Command::Simulate => &["c_star", "front_speed", "final_shift_distance"],
            Command::Stability => &["c_star", "kappa", "K", "r2", "front_speed"],
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Summary {
    pub metrics: Vec<Option<f64>>,
    pub warnings: Vec<String>,
}

pub fn run_command(cmd: Command, r: &Resolved, out: &Path) -> Result<Summary, CliError> {
    match cmd {
        Command::Check => check(r, out),
        Command::Bounds => bounds(r, out),
        Command::Speed => speed(r, out),
        Command::Profile => profile(r, out),
        Command::Simulate => simulate(r, out, false),
        Command::Stability => simulate(r, out, true),
    }
}

fn write_json<R: Serialize>(
    out: &Path,
    cmd: Command,
    r: &Resolved,
    warnings: &[String],
    result: R,
) -> Result<(), CliError> {
    let artifact = Artifact {
        schema_version: SCHEMA_VERSION,
        command: cmd.name(),
        config: &r.config,
        warnings,
        result,
    };
    write_atomic(
        &out.join(format!("{}.json", cmd.name())),
        &json_bytes(&artifact),
    )
}

fn flag(b: bool) -> Option<f64> {
    Some(if b { 1.0 } else { 0.0 })
}

fn check(r: &Resolved, out: &Path) -> Result<Summary, CliError> {
    let f = &r.term;
    let report = f.check_hypotheses(r.config.solver.hypothesis_tol);
    let (k0, k1) = f.derivative_bounds();
    let result = json!({
        "report": report,
        "all_ok": report.all_ok(),
        "derivative_bounds": {"K0": k0, "K1": k1},
        "dt_stability": dt_stability(f),
    });
    write_json(out, Command::Check, r, &[], result)?;
    if !report.all_ok() {
        let failed: Vec<&str> = [
            ("H1", report.h1_ok),
            ("H2", report.h2_ok),
            ("H3", report.h3_ok),
        ]
        .iter()
        .filter(|(_, ok)| !ok)
        .map(|(h, _)| *h)
        .collect();
        return Err(CliError::Hypothesis(format!(
            "{} violated (H3 integral {})",
            failed.join(", "),
            report.h3_integral
        )));
    }
    Ok(Summary {
        metrics: vec![
            Some(report.h3_integral),
            flag(report.all_ok()),
            flag(report.remark2_ok),
        ],
        warnings: Vec::new(),
    })
}

fn slope_bracket(r: &Resolved) -> Result<(SlopeBounds, SpeedBracket), CliError> {
    let bounds = r.term.slope_bounds(r.config.solver.slope_grid)?;
    let bracket = speed_bracket(&bounds, r.term.a())?;
    Ok((bounds, bracket))
}

fn bracket_warnings(br: &SpeedBracket) -> Vec<String> {
    if br.ordering_ok {
        Vec::new()
    } else {
        vec![format!(
            "speed ordering c_check <= c_under <= c_over <= c_hat fails ({}, {}, {}, {}); searching [0, 1] instead",
            br.c_check, br.c_under, br.c_over, br.c_hat
        )]
    }
}

fn bounds(r: &Resolved, out: &Path) -> Result<Summary, CliError> {
    let (bounds, br) = slope_bracket(r)?;
    let a = r.term.a();
    let speeds = [br.c_check, br.c_under, br.c_over, br.c_hat];
    let kinds = [
        EnvelopeKind::GLo,
        EnvelopeKind::FLo,
        EnvelopeKind::FHi,
        EnvelopeKind::GHi,
    ];
    let waves: Vec<_> = kinds
        .iter()
        .zip(speeds)
        .map(|(&kind, c)| {
            let (alpha, beta) = bounds.pairing(kind);
            json!({
                "kind": kind,
                "alpha": alpha,
                "beta": beta,
                "c": c,
                "rate_left": lambda0_plus(c, alpha),
                "rate_right": lambda1_minus(c, beta),
            })
        })
        .collect();
    let warnings = bracket_warnings(&br);
    let result = json!({
        "slope_bounds": bounds,
        "remark2_terms": bounds.ordering_terms(a),
        "bracket": br,
        "envelope_waves": waves,
    });
    write_json(out, Command::Bounds, r, &warnings, result)?;
    Ok(Summary {
        metrics: speeds.iter().map(|&c| Some(c)).collect(),
        warnings,
    })
}

fn solve_speed(r: &Resolved) -> Result<(SlopeBounds, SpeedBracket, SpeedSolve<f64>), CliError> {
    let (bounds, br) = slope_bracket(r)?;
    let sol = find_speed_with(&r.term, &br, r.config.solver.tol_c, &r.shooting)?;
    Ok((bounds, br, sol))
}

fn solve_wave(r: &Resolved) -> Result<(SlopeBounds, SpeedSolve<f64>, WaveSolution), CliError> {
    let (bounds, br, sol) = solve_speed(r)?;
    let s = &r.config.solver;
    let mut ws = reconstruct_profile_with(&r.term, sol.c_star, s.u_eps, s.dz, &r.shooting)?;
    ws.bracket = Some(br);
    Ok((bounds, sol, ws))
}

/// Phase-plane picture at one speed: both shooting paths and the four envelope lines.
fn phase_csv(r: &Resolved, bounds: &SlopeBounds, c: f64) -> (Vec<u8>, Vec<String>) {
    let a = r.term.a();
    let mut rows = Vec::new();
    let mut problems = Vec::new();
    for (label, side) in [("shoot_left", Side::Left), ("shoot_right", Side::Right)] {
        match shoot_half_with(&r.term, side, c, &r.shooting) {
            Ok(path) => rows.extend(
                path.samples
                    .iter()
                    .map(|&(u, w)| vec![Cell::Text(label.into()), u.into(), w.into()]),
            ),
            Err(e) => problems.push(format!("{label} at c = {c}: {e}")),
        }
    }
    let n = 100;
    for (label, alpha) in [
        ("envelope_alpha_lo", bounds.alpha_lo),
        ("envelope_alpha_hi", bounds.alpha_hi),
    ] {
        let rate = lambda0_plus(c, alpha);
        rows.extend((0..=n).map(|i| {
            let u = a * i as f64 / n as f64;
            vec![Cell::Text(label.into()), u.into(), (rate * u).into()]
        }));
    }
    for (label, beta) in [
        ("envelope_beta_lo", bounds.beta_lo),
        ("envelope_beta_hi", bounds.beta_hi),
    ] {
        let rate = lambda1_minus(c, beta);
        rows.extend((0..=n).map(|i| {
            let u = a + (1.0 - a) * i as f64 / n as f64;
            vec![
                Cell::Text(label.into()),
                u.into(),
                (rate * (u - 1.0)).into(),
            ]
        }));
    }
    (csv_bytes(&["path", "u", "w"], rows), problems)
}

fn speed(r: &Resolved, out: &Path) -> Result<Summary, CliError> {
    let (bounds, br, sol) = solve_speed(r)?;
    let jump = speed_mismatch_with(&r.term, sol.c_star, &r.shooting)?.abs();
    let mut warnings = bracket_warnings(&br);
    if !sol.monotone_ok {
        warnings.push("speed mismatch was not increasing at an interior check point".into());
    }
    let speeds = [
        ("c_zero", 0.0),
        ("c_check", br.c_check),
        ("c_under", br.c_under),
        ("c_over", br.c_over),
        ("c_hat", br.c_hat),
        ("c_star", sol.c_star),
    ];
    let mut phase = Vec::new();
    for (label, c) in speeds {
        let file = format!("phase_paths/{label}.csv");
        let (bytes, problems) = phase_csv(r, &bounds, c);
        write_atomic(&out.join(&file), &bytes)?;
        warnings.extend(problems);
        phase.push(json!({"label": label, "c": c, "file": file}));
    }
    let result = json!({
        "c_star": sol.c_star,
        "solve": sol,
        "bracket": br,
        "derivative_jump_at_0": jump,
        "phase_paths": phase,
    });
    write_json(out, Command::Speed, r, &warnings, result)?;
    Ok(Summary {
        metrics: vec![
            Some(sol.c_star),
            Some(br.c_check),
            Some(br.c_hat),
            Some(jump),
        ],
        warnings,
    })
}

fn profile(r: &Resolved, out: &Path) -> Result<Summary, CliError> {
    let (_, sol, ws) = solve_wave(r)?;
    let rows = ws
        .z_grid
        .iter()
        .zip(&ws.u_values)
        .zip(&ws.w_values)
        .map(|((&z, &u), &w)| vec![z.into(), u.into(), w.into()]);
    write_atomic(&out.join("profile.csv"), &csv_bytes(&["z", "u", "w"], rows))?;
    let (z_min, z_max) = ws.z_range();
    let c1_ok = verify_c1(&ws, 1e-6);
    let mut warnings = Vec::new();
    if !c1_ok {
        warnings.push(format!(
            "profile is not C1 to 1e-6 (jump {})",
            ws.derivative_jump_at_0
        ));
    }
    let result = json!({
        "c_star": sol.c_star,
        "points": ws.z_grid.len(),
        "z_min": z_min,
        "z_max": z_max,
        "dz": ws.dz(),
        "derivative_jump_at_0": ws.derivative_jump_at_0,
        "c1_ok": c1_ok,
        "left_rate": ws.left_rate,
        "right_rate": ws.right_rate,
        "file": "profile.csv",
    });
    write_json(out, Command::Profile, r, &warnings, result)?;
    Ok(Summary {
        metrics: vec![
            Some(sol.c_star),
            Some(ws.derivative_jump_at_0),
            Some(ws.z_grid.len() as f64),
        ],
        warnings,
    })
}

fn table_value(table: &[[f64; 2]], x: f64) -> f64 {
    let first = table[0];
    let last = table[table.len() - 1];
    if x <= first[0] {
        return first[1];
    }
    if x >= last[0] {
        return last[1];
    }
    let i = table.partition_point(|row| row[0] <= x) - 1;
    let (p, q) = (table[i], table[i + 1]);
    p[1] + (q[1] - p[1]) * (x - p[0]) / (q[0] - p[0])
}

pub fn initial_data(r: &Resolved, ws: &WaveSolution) -> Vec<f64> {
    let g = &r.grid;
    let e = &r.config.experiment;
    let mut u = match e.initial_condition {
        InitialCondition::Step => g.sample(|x| if x < 0.0 { 0.0 } else { 1.0 }),
        InitialCondition::Wave => g.sample(|x| ws.u_at(x)),
        InitialCondition::WavePlusDelta => g.sample(|x| (ws.u_at(x) + e.delta).min(1.0)),
        InitialCondition::CustomTable => {
            let table = e.table.as_deref().expect("validated");
            g.sample(|x| table_value(table, x))
        }
    };
    if g.bc == Boundary::Dirichlet01 {
        let n = u.len();
        u[0] = 0.0;
        u[n - 1] = 1.0;
    }
    u
}

/// Warns when the front, moving towards `x_min`, gets within 10 of it by `t_end`.
fn domain_warning(r: &Resolved, u0: &[f64], c_star: f64) -> Option<String> {
    let g = &r.grid;
    let t_end = r.config.experiment.t_end;
    let start = front_position(
        &SimState {
            t: 0.0,
            u: u0.to_vec(),
        },
        g,
        r.term.a(),
    )
    .map(|fp| fp.x)
    .unwrap_or(0.0);
    let reach = start - c_star * t_end;
    (reach - 10.0 < g.x_min).then(|| {
        format!(
            "domain too short: the front reaches x = {reach:.3} by t = {t_end}; x_min should be below {:.3}",
            reach - 10.0
        )
    })
}

fn trajectory_rows(tr: &Trajectory) -> Vec<Vec<Cell>> {
    (0..tr.times.len())
        .map(|i| {
            vec![
                tr.times[i].into(),
                tr.front_positions[i].into(),
                tr.shift_distances.get(i).copied().into(),
                tr.best_shifts.get(i).copied().into(),
            ]
        })
        .collect()
}

const TRAJECTORY_HEADER: [&str; 4] = ["t", "front_position", "shift_distance", "z_best"];

fn simulate(r: &Resolved, out: &Path, stability: bool) -> Result<Summary, CliError> {
    let (_, sol, ws) = solve_wave(r)?;
    let c_star = sol.c_star;
    let e = &r.config.experiment;
    let u0 = initial_data(r, &ws);
    let mut warnings: Vec<String> = domain_warning(r, &u0, c_star).into_iter().collect();

    let mut opts = RunOptions::every(e.observe_every).with_reference(&ws);
    if !stability {
        opts.snapshot_times = r.config.output.snapshot_times.clone();
    }
    let tr = run(&r.term, u0, &r.grid, e.t_end, &opts)?;
    if let Some(&t) = tr.multiple_front_times.first() {
        warnings.push(format!(
            "u - a changed sign more than once at {} observations (first at t = {t})",
            tr.multiple_front_times.len()
        ));
    }
    let speed_fit = estimate_speed(&tr, r.speed_window()).ok();
    let front_speed = speed_fit.map(|s| -s.speed);
    if speed_fit.is_none() {
        warnings.push("too few front positions in the speed window to fit a speed".into());
    }
    let speed_error = front_speed.map(|s| (s - c_star).abs() / c_star);

    if stability {
        write_atomic(
            &out.join("stability.csv"),
            &csv_bytes(&TRAJECTORY_HEADER, trajectory_rows(&tr)),
        )?;
        let window = r.decay_window();
        let decay = fit_decay(&tr, window)?;
        let result = json!({
            "kappa": decay.kappa,
            "K": decay.k,
            "r2": decay.r2,
            "window": [window.0, window.1],
            "speed": front_speed,
            "speed_error_vs_cstar": speed_error,
            "c_star": c_star,
            "file": "stability.csv",
        });
        write_json(out, Command::Stability, r, &warnings, result)?;
        return Ok(Summary {
            metrics: vec![
                Some(c_star),
                Some(decay.kappa),
                Some(decay.k),
                Some(decay.r2),
                front_speed,
            ],
            warnings,
        });
    }

    write_atomic(
        &out.join("trajectory.csv"),
        &csv_bytes(&TRAJECTORY_HEADER, trajectory_rows(&tr)),
    )?;
    let xs = r.grid.xs();
    let mut snapshots = Vec::new();
    for (i, s) in tr.snapshots.iter().enumerate() {
        let file = format!("snapshots/snapshot_{i:03}.csv");
        let rows = xs.iter().zip(&s.u).map(|(&x, &u)| vec![x.into(), u.into()]);
        write_atomic(&out.join(&file), &csv_bytes(&["x", "u"], rows))?;
        snapshots.push(json!({"t": s.t, "file": file}));
    }
    let final_distance = tr.shift_distances.last().copied();
    let result = json!({
        "c_star": c_star,
        "speed": front_speed,
        "speed_r2": speed_fit.map(|s| s.r2),
        "speed_window": r.config.experiment.speed_window,
        "speed_error_vs_cstar": speed_error,
        "final_shift_distance": final_distance,
        "final_time": tr.times.last(),
        "observations": tr.times.len(),
        "multiple_front_times": tr.multiple_front_times,
        "file": "trajectory.csv",
        "snapshots": snapshots,
    });
    write_json(out, Command::Simulate, r, &warnings, result)?;
    Ok(Summary {
        metrics: vec![Some(c_star), front_speed, final_distance],
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_interpolation() {
        let t = [[-1.0, 0.0], [1.0, 1.0]];
        assert_eq!(table_value(&t, -5.0), 0.0);
        assert_eq!(table_value(&t, 0.0), 0.5);
        assert_eq!(table_value(&t, 1.0), 1.0);
        assert_eq!(table_value(&t, 3.0), 1.0);
    }
}
