//! The JSON run configuration: parsing, defaults, and validation.
//!
//! A configuration is normalized before use: the reaction becomes an inline
//! polynomial pair and every defaulted field is filled in, so the normalized
//! form embedded in artifacts parses back to itself.

use bistable_core::shooting::{default_eps, ShootingOptions};
use bistable_core::simulator::dt_stability;
use bistable_core::{Boundary, BranchRule, Grid1D, ReactionTerm};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ReactionSpec {
    /// `"quadratic_demo"` or `"piecewise_linear(k,a)"`.
    Preset(String),
    Named {
        preset: String,
        #[serde(default)]
        branch_rule: Option<BranchRule>,
    },
    Inline {
        a: f64,
        f0: Vec<f64>,
        f1: Vec<f64>,
        #[serde(default)]
        branch_rule: Option<BranchRule>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    /// Seed distance for the shooting paths; defaults from `a`.
    pub eps: Option<f64>,
    pub rtol: f64,
    /// Bisection tolerance on `c*`.
    pub tol_c: f64,
    pub dz: f64,
    /// Profile truncation level for exported profiles.
    pub u_eps: f64,
    pub slope_grid: usize,
    pub hypothesis_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            eps: None,
            rtol: 1e-10,
            tol_c: 1e-10,
            dz: 1e-2,
            u_eps: 1e-4,
            slope_grid: 4096,
            hypothesis_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub dx: f64,
    /// Defaults to `0.2·dx`.
    pub dt: Option<f64>,
    pub bc: Boundary,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            x_min: -60.0,
            x_max: 60.0,
            dx: 0.05,
            dt: None,
            bc: Boundary::Dirichlet01,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialCondition {
    /// `0` for `x < 0`, `1` for `x ≥ 0`.
    #[default]
    Step,
    /// The computed wave `u*(x)`.
    Wave,
    /// `u*(x) + delta`, clipped to `[0, 1]`.
    WavePlusDelta,
    /// Piecewise-linear interpolation of `experiment.table`.
    CustomTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub t_end: f64,
    pub observe_every: f64,
    pub initial_condition: InitialCondition,
    pub delta: f64,
    /// Decay-fit window; defaults to `[t_end/4, t_end]`.
    pub window: Option<[f64; 2]>,
    /// Front-speed fit window; defaults to `[t_end/2, t_end]`.
    pub speed_window: Option<[f64; 2]>,
    /// `(x, u)` pairs for `custom_table`.
    pub table: Option<Vec<[f64; 2]>>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            t_end: 40.0,
            observe_every: 0.5,
            initial_condition: InitialCondition::Step,
            delta: 0.05,
            window: None,
            speed_window: None,
            table: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub directory: String,
    pub snapshot_times: Vec<f64>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: "out".into(),
            snapshot_times: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub reaction: ReactionSpec,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub experiment: ExperimentConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

/// A validated configuration with its derived objects.
#[derive(Debug, Clone)]
pub struct Resolved {
    /// Normalized form; every optional field is `Some`.
    pub config: RunConfig,
    pub term: ReactionTerm,
    pub grid: Grid1D,
    pub shooting: ShootingOptions<f64>,
}

impl Resolved {
    pub fn decay_window(&self) -> (f64, f64) {
        let w = self.config.experiment.window.expect("normalized");
        (w[0], w[1])
    }

    pub fn speed_window(&self) -> (f64, f64) {
        let w = self.config.experiment.speed_window.expect("normalized");
        (w[0], w[1])
    }
}

pub fn parse_config(text: &str) -> Result<Resolved, CliError> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| CliError::Validation(vec![format!("config: {e}")]))?;
    from_value(value)
}

pub fn from_value(value: Value) -> Result<Resolved, CliError> {
    let raw: RunConfig = serde_json::from_value(value)
        .map_err(|e| CliError::Validation(vec![format!("config: {e}")]))?;
    normalize(raw)
}

fn build_term(spec: &ReactionSpec) -> Result<ReactionTerm, String> {
    let rule = |r: &Option<BranchRule>| r.unwrap_or_default();
    match spec {
        ReactionSpec::Preset(name) => ReactionTerm::preset(name),
        ReactionSpec::Named {
            preset,
            branch_rule,
        } => ReactionTerm::preset(preset).map(|f| f.with_branch_rule(rule(branch_rule))),
        ReactionSpec::Inline {
            a,
            f0,
            f1,
            branch_rule,
        } => ReactionTerm::new(*a, f0.clone(), f1.clone(), rule(branch_rule)),
    }
    .map_err(|e| e.to_string())
}

/// The inline form of a term.
pub fn inline_spec(f: &ReactionTerm) -> ReactionSpec {
    ReactionSpec::Inline {
        a: f.a(),
        f0: f.f0().coefficients().to_vec(),
        f1: f.f1().coefficients().to_vec(),
        branch_rule: Some(f.branch_rule()),
    }
}

/// Replaces the reaction with its inline form, leaving other defaults unfilled.
pub fn inline_reaction(value: &Value) -> Result<Value, CliError> {
    let raw: RunConfig = serde_json::from_value(value.clone())
        .map_err(|e| CliError::Validation(vec![format!("config: {e}")]))?;
    let term = build_term(&raw.reaction)
        .map_err(|e| CliError::Validation(vec![format!("reaction: {e}")]))?;
    let mut out = value.clone();
    out["reaction"] = serde_json::to_value(inline_spec(&term)).expect("serializable");
    Ok(out)
}

fn check(errors: &mut Vec<String>, ok: bool, field: &str, msg: impl FnOnce() -> String) {
    if !ok {
        errors.push(format!("{field}: {}", msg()));
    }
}

fn check_window(errors: &mut Vec<String>, field: &str, w: [f64; 2], t_end: f64) {
    check(
        errors,
        w[0] >= 0.0 && w[0] < w[1] && w[1] <= t_end,
        field,
        || {
            format!(
                "[{}, {}] must satisfy 0 <= start < end <= t_end = {t_end}",
                w[0], w[1]
            )
        },
    );
}

pub fn normalize(mut cfg: RunConfig) -> Result<Resolved, CliError> {
    let mut errors = Vec::new();
    let term = match build_term(&cfg.reaction) {
        Ok(f) => Some(f),
        Err(e) => {
            errors.push(format!("reaction: {e}"));
            None
        }
    };
    if let Some(f) = &term {
        cfg.reaction = inline_spec(f);
    }

    let s = &mut cfg.solver;
    if let (None, Some(f)) = (s.eps, &term) {
        s.eps = Some(default_eps(f.a()));
    }
    if let (Some(eps), Some(f)) = (s.eps, &term) {
        let limit = f.a().min(1.0 - f.a()) / 100.0;
        check(&mut errors, eps > 0.0 && eps <= limit, "solver.eps", || {
            format!("{eps} must lie in (0, min(a, 1 - a)/100 = {limit}]")
        });
    }
    check(
        &mut errors,
        s.rtol > 0.0 && s.rtol <= 1e-3,
        "solver.rtol",
        || format!("{} must lie in (0, 1e-3]", s.rtol),
    );
    check(&mut errors, s.tol_c > 0.0, "solver.tol_c", || {
        format!("{} must be positive", s.tol_c)
    });
    check(&mut errors, s.dz > 0.0 && s.dz <= 1.0, "solver.dz", || {
        format!("{} must lie in (0, 1]", s.dz)
    });
    check(
        &mut errors,
        s.u_eps > 0.0 && s.u_eps <= 1e-3,
        "solver.u_eps",
        || format!("{} must lie in (0, 1e-3]", s.u_eps),
    );
    check(&mut errors, s.slope_grid >= 16, "solver.slope_grid", || {
        format!("{} must be at least 16", s.slope_grid)
    });
    check(
        &mut errors,
        s.hypothesis_tol >= 0.0,
        "solver.hypothesis_tol",
        || format!("{} must be non-negative", s.hypothesis_tol),
    );

    let g = &mut cfg.grid;
    if g.dt.is_none() && g.dx.is_finite() {
        g.dt = Some(0.2 * g.dx);
    }
    let dt = g.dt.unwrap_or(f64::NAN);
    check(&mut errors, g.dx > 0.0, "grid.dx", || {
        format!("{} must be positive", g.dx)
    });
    check(&mut errors, dt > 0.0, "grid.dt", || {
        format!("{dt} must be positive")
    });
    check(&mut errors, g.x_max > g.x_min, "grid.x_max", || {
        format!("{} must exceed x_min = {}", g.x_max, g.x_min)
    });
    let grid = match Grid1D::new(g.x_min, g.x_max, g.dx, dt, g.bc) {
        Ok(grid) => Some(grid),
        Err(e) => {
            if g.dx > 0.0 && dt > 0.0 && g.x_max > g.x_min {
                errors.push(format!("grid: {e}"));
            }
            None
        }
    };
    if let Some(f) = &term {
        let bound = dt_stability(f);
        check(&mut errors, !(dt > bound), "grid.dt", || {
            format!("{dt} exceeds dt_stability = {bound}")
        });
    }

    let e = &mut cfg.experiment;
    check(&mut errors, e.t_end > 0.0, "experiment.t_end", || {
        format!("{} must be positive", e.t_end)
    });
    check(
        &mut errors,
        e.observe_every > 0.0 && e.observe_every <= e.t_end,
        "experiment.observe_every",
        || format!("{} must lie in (0, t_end]", e.observe_every),
    );
    check(
        &mut errors,
        e.delta >= 0.0 && e.delta < 1.0,
        "experiment.delta",
        || format!("{} must lie in [0, 1)", e.delta),
    );
    if e.t_end > 0.0 {
        let t = e.t_end;
        let w = *e.window.get_or_insert([0.25 * t, t]);
        check_window(&mut errors, "experiment.window", w, t);
        let w = *e.speed_window.get_or_insert([0.5 * t, t]);
        check_window(&mut errors, "experiment.speed_window", w, t);
    }
    match (&e.table, e.initial_condition) {
        (None, InitialCondition::CustomTable) => {
            errors.push("experiment.table: required by initial_condition custom_table".into())
        }
        (Some(table), _) => {
            check(&mut errors, table.len() >= 2, "experiment.table", || {
                "needs at least two rows".into()
            });
            check(
                &mut errors,
                table.windows(2).all(|p| p[1][0] > p[0][0]),
                "experiment.table",
                || "x values must be strictly increasing".into(),
            );
            check(
                &mut errors,
                table.iter().all(|r| (0.0..=1.0).contains(&r[1])),
                "experiment.table",
                || "u values must lie in [0, 1]".into(),
            );
        }
        _ => {}
    }

    let o = &cfg.output;
    check(
        &mut errors,
        !o.directory.is_empty(),
        "output.directory",
        || "must not be empty".into(),
    );
    for (i, &t) in o.snapshot_times.iter().enumerate() {
        check(
            &mut errors,
            t >= 0.0 && t <= cfg.experiment.t_end,
            &format!("output.snapshot_times[{i}]"),
            || format!("{t} must lie in [0, t_end]"),
        );
    }

    match (term, grid) {
        (Some(term), Some(grid)) if errors.is_empty() => {
            let s = &cfg.solver;
            let shooting = ShootingOptions {
                eps: s.eps.expect("filled above"),
                rtol: s.rtol,
                ..ShootingOptions::for_term(&term)
            };
            Ok(Resolved {
                config: cfg,
                term,
                grid,
                shooting,
            })
        }
        _ => Err(CliError::Validation(errors)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn errors(text: &str) -> Vec<String> {
        match parse_config(text) {
            Err(CliError::Validation(e)) => e,
            other => panic!("expected a validation error, got {other:?}"),
        }
    }

    #[test]
    fn preset_with_defaults() {
        let r = parse_config(r#"{"reaction": "quadratic_demo"}"#).unwrap();
        assert_eq!(r.term.a(), 0.3);
        assert_eq!(r.config.grid.dx, 0.05);
        assert_eq!(r.config.grid.dt, Some(0.2 * 0.05));
        assert_eq!(r.config.experiment.window, Some([10.0, 40.0]));
        match &r.config.reaction {
            ReactionSpec::Inline {
                a,
                f0,
                f1,
                branch_rule,
            } => {
                assert_eq!(*a, 0.3);
                assert_eq!(f0, &[0.0, -1.0, -1.0]);
                assert_eq!(f1.len(), 3);
                assert_eq!(*branch_rule, Some(BranchRule::RightClosed));
            }
            other => panic!("not normalized: {other:?}"),
        }
    }

    #[test]
    fn normalized_form_round_trips() {
        let r = parse_config(
            r#"{"reaction": {"preset": "piecewise_linear(-1,0.3)", "branch_rule": "average"}}"#,
        )
        .unwrap();
        let text = serde_json::to_string(&r.config).unwrap();
        let again = parse_config(&text).unwrap();
        assert_eq!(again.config, r.config);
        assert_eq!(again.term.branch_rule(), BranchRule::Average);
    }

    #[test]
    fn unknown_preset_names_the_field() {
        let e = errors(r#"{"reaction": "cubic_demo"}"#);
        assert_eq!(e.len(), 1);
        assert!(e[0].starts_with("reaction:"), "{e:?}");
    }

    #[test]
    fn unstable_dt_cites_the_bound() {
        let e = errors(r#"{"reaction": "quadratic_demo", "grid": {"dt": 1.5}}"#);
        assert!(
            e.iter()
                .any(|m| m.starts_with("grid.dt") && m.contains("dt_stability")),
            "{e:?}"
        );
    }

    #[test]
    fn violations_are_aggregated() {
        let e = errors(
            r#"{"reaction": "quadratic_demo",
                "solver": {"u_eps": 0.1, "rtol": -1},
                "experiment": {"t_end": 10, "window": [5, 20], "initial_condition": "custom_table"},
                "output": {"snapshot_times": [3, 50]}}"#,
        );
        for field in [
            "solver.u_eps",
            "solver.rtol",
            "experiment.window",
            "experiment.table",
            "output.snapshot_times[1]",
        ] {
            assert!(
                e.iter().any(|m| m.starts_with(field)),
                "{field} missing from {e:?}"
            );
        }
        assert_eq!(e.len(), 5);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let e = errors(r#"{"reaction": "quadratic_demo", "grid": {"dy": 0.1}}"#);
        assert!(e[0].contains("dy"));
    }

    #[test]
    fn inlining_keeps_other_fields_raw() {
        let v: Value = serde_json::from_str(
            r#"{"reaction": "piecewise_linear(-1,0.3)", "grid": {"dx": 0.1}}"#,
        )
        .unwrap();
        let inl = inline_reaction(&v).unwrap();
        assert_eq!(inl["reaction"]["a"], 0.3);
        assert!(inl["grid"].get("dt").is_none());
    }
}
