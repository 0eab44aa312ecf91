#![allow(dead_code)]

use bistable_core::linear_theory::speed_bracket;
use bistable_core::shooting::{find_speed, reconstruct_profile};
use bistable_core::{BranchRule, ReactionTerm, WaveSolution};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// `(1 − 2a)/√(a(1 − a))`, the matched speed of the `k = −1` linear term.
pub fn linear_speed(a: f64) -> f64 {
    (1.0 - 2.0 * a) / (a * (1.0 - a)).sqrt()
}

/// Random quartic terms passing (H1)-(H3) with the slope-ordering chain.
pub fn admissible_quartics(count: usize, seed: u64) -> Vec<ReactionTerm> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let a: f64 = rng.gen_range(0.15..0.4);
        let s0: f64 = rng.gen_range(0.5..2.0);
        let s1: f64 = rng.gen_range(0.5..2.0);
        let b: [f64; 3] = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let d: [f64; 3] = [
            rng.gen_range(-0.3..0.3),
            rng.gen_range(-0.3..0.3),
            rng.gen_range(-0.3..0.3),
        ];
        // f0 = -s0 u (1 + b1 u + b2 u² + b3 u³)
        let f0 = vec![0.0, -s0, -s0 * b[0], -s0 * b[1], -s0 * b[2]];
        // f1 = (1 − u) q(u), q = s1 (1 + d1 u + d2 u² + d3 u³)
        let q = [s1, s1 * d[0], s1 * d[1], s1 * d[2]];
        let f1 = vec![q[0], q[1] - q[0], q[2] - q[1], q[3] - q[2], -q[3]];
        let f = ReactionTerm::new(a, f0, f1, BranchRule::RightClosed).unwrap();
        let report = f.check_hypotheses(1e-9);
        if report.all_ok() && report.remark2_ok {
            out.push(f);
        }
    }
    out
}

/// Speed and export-quality profile of a term.
pub fn solve(f: &ReactionTerm, u_eps: f64) -> WaveSolution {
    let bounds = f.slope_bounds(4096).unwrap();
    let bracket = speed_bracket(&bounds, f.a()).unwrap();
    let c = find_speed(f, &bracket, 1e-10).unwrap().c_star;
    let mut ws = reconstruct_profile(f, c, u_eps, 1e-2).unwrap();
    ws.bracket = Some(bracket);
    ws
}

/// Adaptive Simpson quadrature.
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn step(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 40)
}
