//! The discontinuous bistable nonlinearity, its hypothesis audit, slope
//! bounds and piecewise-linear envelopes.
//!
//! A reaction term is a pair of polynomial branches: `f0` on `[0, a]` and
//! `f1` on `[a, 1]`, with a jump at the branch point `a`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::golden_min;
use crate::scalar::Scalar;

/// Polynomial in ascending-degree coefficient form, restricted to a closed interval.
///
/// Evaluation runs in the Taylor basis about an anchor point (the equilibrium
/// the branch is attached to), so values near the equilibrium keep full
/// relative accuracy and a root at the anchor evaluates to exactly zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchPoly<T> {
    coefficients: Vec<T>,
    domain_lo: T,
    domain_hi: T,
    #[serde(skip)]
    anchor: T,
    #[serde(skip)]
    shifted: Vec<T>,
}

impl<T: Scalar> BranchPoly<T> {
    pub fn new(coefficients: Vec<T>, domain_lo: T, domain_hi: T) -> Result<Self> {
        Self::anchored(coefficients, domain_lo, domain_hi, T::zero())
    }

    /// Like [`BranchPoly::new`], expanding about `anchor` for evaluation.
    pub fn anchored(coefficients: Vec<T>, domain_lo: T, domain_hi: T, anchor: T) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidPolynomial("empty coefficient list".into()));
        }
        if let Some(bad) = coefficients.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidPolynomial(format!(
                "non-finite coefficient {}",
                bad.as_f64()
            )));
        }
        if !(domain_lo < domain_hi) {
            return Err(Error::InvalidPolynomial(format!(
                "empty domain [{}, {}]",
                domain_lo.as_f64(),
                domain_hi.as_f64()
            )));
        }
        let mut shifted = taylor_shift(&coefficients, anchor);
        // rounding residue of an exact root at the anchor
        let scale = coefficients.iter().fold(T::zero(), |s, c| s + c.abs());
        if shifted[0].abs() <= T::lit(8.0) * T::epsilon() * scale {
            shifted[0] = T::zero();
        }
        Ok(Self {
            coefficients,
            domain_lo,
            domain_hi,
            anchor,
            shifted,
        })
    }

    pub fn coefficients(&self) -> &[T] {
        &self.coefficients
    }

    pub fn domain(&self) -> (T, T) {
        (self.domain_lo, self.domain_hi)
    }

    /// Polynomial value; ignores the domain.
    pub fn eval(&self, u: T) -> T {
        horner(&self.shifted, u - self.anchor)
    }

    pub fn derivative_at(&self, u: T) -> T {
        let s = u - self.anchor;
        let mut acc = T::zero();
        for (k, &c) in self.shifted.iter().enumerate().skip(1).rev() {
            acc = acc * s + c * T::from_count(k);
        }
        acc
    }

    /// Exact integral over `[lo, hi]` from the antiderivative.
    pub fn integral(&self, lo: T, hi: T) -> T {
        self.antiderivative(hi) - self.antiderivative(lo)
    }

    fn antiderivative(&self, u: T) -> T {
        let s = u - self.anchor;
        let mut acc = T::zero();
        for (k, &c) in self.shifted.iter().enumerate().rev() {
            acc = acc * s + c / T::from_count(k + 1);
        }
        acc * s
    }

    /// `p(u) / (u − anchor)`, with its limit at the anchor.
    fn ratio_at_anchor(&self, u: T) -> T {
        let s = u - self.anchor;
        let tail = if self.shifted.len() > 1 {
            horner(&self.shifted[1..], s)
        } else {
            T::zero()
        };
        if s == T::zero() {
            tail
        } else {
            tail + self.shifted[0] / s
        }
    }
}

/// Coefficients of `p(anchor + s)` in powers of `s`.
fn taylor_shift<T: Scalar>(coefficients: &[T], anchor: T) -> Vec<T> {
    let mut d = coefficients.to_vec();
    if anchor == T::zero() {
        return d;
    }
    let n = d.len();
    for i in 0..n {
        for k in (i..n - 1).rev() {
            d[k] = d[k] + anchor * d[k + 1];
        }
    }
    d
}

fn horner<T: Scalar>(coefficients: &[T], u: T) -> T {
    coefficients
        .iter()
        .rev()
        .fold(T::zero(), |acc, &c| acc * u + c)
}

/// Value returned by [`ReactionTerm::eval`] exactly at the branch point.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchRule {
    /// `f0(a)`
    LeftClosed,
    /// `f1(a)`
    #[default]
    RightClosed,
    /// `(f0(a) + f1(a)) / 2`
    Average,
}

/// Bistable nonlinearity with a single jump at `a`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReactionTerm<T> {
    a: T,
    f0: BranchPoly<T>,
    f1: BranchPoly<T>,
    branch_rule: BranchRule,
}

impl<T: Scalar> ReactionTerm<T> {
    pub fn new(a: T, f0: Vec<T>, f1: Vec<T>, branch_rule: BranchRule) -> Result<Self> {
        if !(a > T::zero() && a < T::one()) {
            return Err(Error::InvalidReaction(format!(
                "branch point a = {} must lie in (0, 1)",
                a.as_f64()
            )));
        }
        Ok(Self {
            a,
            f0: BranchPoly::new(f0, T::zero(), a)?,
            f1: BranchPoly::anchored(f1, a, T::one(), T::one())?,
            branch_rule,
        })
    }

    /// `f0(u) = -u - u^2` on `[0, 0.3]`, `f1(u) = (1 - u)(u + 0.2)` on `[0.3, 1]`.
    pub fn quadratic_demo() -> Self {
        let c = T::lit;
        Self::new(
            c(0.3),
            vec![c(0.0), c(-1.0), c(-1.0)],
            vec![c(0.2), c(0.8), c(-1.0)],
            BranchRule::RightClosed,
        )
        .expect("demo term is valid")
    }

    /// `f0(u) = k u`, `f1(u) = k (u - 1)`.
    pub fn piecewise_linear(k: T, a: T) -> Result<Self> {
        Self::new(a, vec![T::zero(), k], vec![-k, k], BranchRule::RightClosed)
    }

    /// Resolves a preset name: `quadratic_demo` or `piecewise_linear(k,a)`.
    pub fn preset(name: &str) -> Result<Self> {
        let name = name.trim();
        if name == "quadratic_demo" {
            return Ok(Self::quadratic_demo());
        }
        let args = name
            .strip_prefix("piecewise_linear(")
            .and_then(|rest| rest.strip_suffix(')'))
            .ok_or_else(|| Error::InvalidReaction(format!("unknown preset '{name}'")))?;
        let parsed: Vec<f64> = args
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidReaction(format!("preset '{name}': {e}")))?;
        match parsed[..] {
            [k, a] => Self::piecewise_linear(T::lit(k), T::lit(a)),
            _ => Err(Error::InvalidReaction(format!(
                "preset '{name}' expects two arguments (k, a)"
            ))),
        }
    }

    pub fn with_branch_rule(mut self, rule: BranchRule) -> Self {
        self.branch_rule = rule;
        self
    }

    pub fn a(&self) -> T {
        self.a
    }

    pub fn f0(&self) -> &BranchPoly<T> {
        &self.f0
    }

    pub fn f1(&self) -> &BranchPoly<T> {
        &self.f1
    }

    pub fn branch_rule(&self) -> BranchRule {
        self.branch_rule
    }

    /// `f(u)` on `[0, 1]`, using the branch rule exactly at `u = a`.
    pub fn eval(&self, u: T) -> Result<T> {
        if !(u >= T::zero() && u <= T::one()) {
            return Err(Error::Domain {
                what: "reaction argument",
                value: u.as_f64(),
            });
        }
        Ok(self.eval_unchecked(u))
    }

    fn eval_unchecked(&self, u: T) -> T {
        if u < self.a {
            self.f0.eval(u)
        } else if u > self.a {
            self.f1.eval(u)
        } else {
            match self.branch_rule {
                BranchRule::LeftClosed => self.f0.eval(u),
                BranchRule::RightClosed => self.f1.eval(u),
                BranchRule::Average => T::lit(0.5) * (self.f0.eval(u) + self.f1.eval(u)),
            }
        }
    }

    /// `f` extended to the whole line by its tangents at `0` and `1`.
    pub fn eval_extended(&self, u: T) -> T {
        if u < T::zero() {
            self.f0.derivative_at(T::zero()) * u
        } else if u > T::one() {
            self.f1.derivative_at(T::one()) * (u - T::one())
        } else {
            self.eval_unchecked(u)
        }
    }

    /// `∫_0^a f0 + ∫_a^1 f1`, exact.
    pub fn potential_integral(&self) -> T {
        self.f0.integral(T::zero(), self.a) + self.f1.integral(self.a, T::one())
    }

    /// `f0(u) / u`, with its limit at `u = 0`.
    pub fn left_ratio(&self, u: T) -> T {
        self.f0.ratio_at_anchor(u)
    }

    /// `f1(u) / (u - 1)`, with its limit at `u = 1`.
    pub fn right_ratio(&self, u: T) -> T {
        self.f1.ratio_at_anchor(u)
    }

    /// Inf/sup of `f0(u)/u` on `[0, a]` and `f1(u)/(u-1)` on `[a, 1]`.
    pub fn slope_bounds(&self, n_grid: usize) -> Result<SlopeBounds<T>> {
        let n_grid = n_grid.max(64);
        let (alpha_lo, alpha_hi) = ratio_extrema(|u| self.left_ratio(u), T::zero(), self.a, n_grid);
        let (beta_lo, beta_hi) = ratio_extrema(|u| self.right_ratio(u), self.a, T::one(), n_grid);
        let bounds = SlopeBounds {
            alpha_lo,
            alpha_hi,
            beta_lo,
            beta_hi,
        };
        for (name, value) in [
            ("alpha_lo", alpha_lo),
            ("alpha_hi", alpha_hi),
            ("beta_lo", beta_lo),
            ("beta_hi", beta_hi),
        ] {
            if !(value < T::zero()) {
                return Err(Error::NonNegativeSlope {
                    bound: name,
                    value: value.as_f64(),
                });
            }
        }
        Ok(bounds)
    }

    /// Audits (H1)-(H3) and the ordering chain between the slope bounds.
    pub fn check_hypotheses(&self, tol: T) -> HypothesisReport<T> {
        let mut violations = Vec::new();
        let zero = T::zero();
        let one = T::one();

        let h1_checks = [
            (
                "H1: f0(0) = 0",
                zero,
                self.f0.eval(zero),
                self.f0.eval(zero).abs() <= tol,
            ),
            (
                "H1: f0'(0) < 0",
                zero,
                self.f0.derivative_at(zero),
                self.f0.derivative_at(zero) < -tol,
            ),
            (
                "H1: f1(1) = 0",
                one,
                self.f1.eval(one),
                self.f1.eval(one).abs() <= tol,
            ),
            (
                "H1: f1'(1) < 0",
                one,
                self.f1.derivative_at(one),
                self.f1.derivative_at(one) < -tol,
            ),
        ];
        let mut h1_ok = true;
        for (label, u, value, ok) in h1_checks {
            if !ok {
                h1_ok = false;
                violations.push(Violation::new(label, u, value));
            }
        }

        let n = AUDIT_GRID;
        let mut h2_ok = true;
        for i in 1..=n {
            let u = self.a * T::from_count(i) / T::from_count(n);
            let v = self.f0.eval(u);
            if !(-v > tol) {
                h2_ok = false;
                violations.push(Violation::new("H2: f0 < 0 on (0, a]", u, v));
            }
        }
        for i in 0..n {
            let u = self.a + (one - self.a) * T::from_count(i) / T::from_count(n);
            let v = self.f1.eval(u);
            if !(v > tol) {
                h2_ok = false;
                violations.push(Violation::new("H2: f1 > 0 on [a, 1)", u, v));
            }
        }

        let h3_integral = self.potential_integral();
        let h3_ok = h3_integral > tol;
        if !h3_ok {
            violations.push(Violation::new(
                "H3: potential integral > 0",
                self.a,
                h3_integral,
            ));
        }

        let slope_bounds = self.slope_bounds(SLOPE_GRID).ok();
        let remark2_ok = slope_bounds
            .as_ref()
            .map(|b| b.ordering_chain(self.a, tol))
            .unwrap_or(false);

        HypothesisReport {
            h1_ok,
            h2_ok,
            h3_ok,
            h3_integral,
            remark2_ok,
            slope_bounds,
            violations,
        }
    }

    /// Piecewise-linear envelope term built from the slope bounds.
    pub fn envelope(&self, bounds: &SlopeBounds<T>, kind: EnvelopeKind) -> Self {
        let (left, right) = bounds.pairing(kind);
        Self {
            a: self.a,
            f0: BranchPoly::new(vec![T::zero(), left], T::zero(), self.a).expect("valid envelope"),
            f1: BranchPoly::anchored(vec![-right, right], self.a, T::one(), T::one())
                .expect("valid envelope"),
            branch_rule: self.branch_rule,
        }
    }

    /// Largest `|f0'|` on `[0, a]` and `|f1'|` on `[a, 1]`.
    pub fn derivative_bounds(&self) -> (T, T) {
        let k0 = abs_max(|u| self.f0.derivative_at(u), T::zero(), self.a);
        let k1 = abs_max(|u| self.f1.derivative_at(u), self.a, T::one());
        (k0, k1)
    }
}

const AUDIT_GRID: usize = 4000;
const SLOPE_GRID: usize = 4096;

fn abs_max<T: Scalar>(g: impl Fn(T) -> T, lo: T, hi: T) -> T {
    let (_, neg) = grid_refined_min(|u| -g(u).abs(), lo, hi, 1024);
    -neg
}

fn ratio_extrema<T: Scalar>(ratio: impl Fn(T) -> T, lo: T, hi: T, n: usize) -> (T, T) {
    let (_, min) = grid_refined_min(&ratio, lo, hi, n);
    let (_, neg_max) = grid_refined_min(|u| -ratio(u), lo, hi, n);
    (min, -neg_max)
}

/// Uniform-grid minimum refined by golden section on the neighbouring cells.
fn grid_refined_min<T: Scalar>(g: impl Fn(T) -> T, lo: T, hi: T, n: usize) -> (T, T) {
    let h = (hi - lo) / T::from_count(n);
    let node = |i: usize| {
        if i == n {
            hi
        } else {
            lo + h * T::from_count(i)
        }
    };
    let (mut best_i, mut best) = (0, g(lo));
    for i in 1..=n {
        let v = g(node(i));
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let left = node(best_i.saturating_sub(1));
    let right = node((best_i + 1).min(n));
    let tol = T::lit(1e-10) * (hi - lo).max(T::min_positive_value());
    let (x, v) = golden_min(&g, left, right, tol);
    if v < best {
        (x, v)
    } else {
        (node(best_i), best)
    }
}

/// Which slope-bound pairing an envelope uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeKind {
    /// `(alpha_lo, beta_lo)`
    FLo,
    /// `(alpha_hi, beta_hi)`
    FHi,
    /// `(alpha_lo, beta_hi)`
    GLo,
    /// `(alpha_hi, beta_lo)`
    GHi,
}

impl EnvelopeKind {
    pub const ALL: [EnvelopeKind; 4] = [Self::FLo, Self::FHi, Self::GLo, Self::GHi];
}

/// Extremal ratios `f0(u)/u` and `f1(u)/(u-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeBounds<T> {
    pub alpha_lo: T,
    pub alpha_hi: T,
    pub beta_lo: T,
    pub beta_hi: T,
}

impl<T: Scalar> SlopeBounds<T> {
    /// (left slope, right slope) of the envelope of the given kind.
    pub fn pairing(&self, kind: EnvelopeKind) -> (T, T) {
        match kind {
            EnvelopeKind::FLo => (self.alpha_lo, self.beta_lo),
            EnvelopeKind::FHi => (self.alpha_hi, self.beta_hi),
            EnvelopeKind::GLo => (self.alpha_lo, self.beta_hi),
            EnvelopeKind::GHi => (self.alpha_hi, self.beta_lo),
        }
    }

    /// `√(−ᾱ)a ≤ √(−α̲)a < √(−β̄)(1−a) ≤ √(−β̲)(1−a)`; the middle link is strict by `tol`.
    pub fn ordering_chain(&self, a: T, tol: T) -> bool {
        let [p, q, r, s] = self.ordering_terms(a);
        p <= q + tol && q + tol < r && r <= s + tol
    }

    pub fn ordering_terms(&self, a: T) -> [T; 4] {
        let b = T::one() - a;
        [
            (-self.alpha_hi).sqrt() * a,
            (-self.alpha_lo).sqrt() * a,
            (-self.beta_hi).sqrt() * b,
            (-self.beta_lo).sqrt() * b,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation<T> {
    pub hypothesis: String,
    pub u: T,
    pub value: T,
}

impl<T> Violation<T> {
    fn new(hypothesis: &str, u: T, value: T) -> Self {
        Self {
            hypothesis: hypothesis.to_string(),
            u,
            value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport<T> {
    pub h1_ok: bool,
    pub h2_ok: bool,
    pub h3_ok: bool,
    pub h3_integral: T,
    pub remark2_ok: bool,
    pub slope_bounds: Option<SlopeBounds<T>>,
    pub violations: Vec<Violation<T>>,
}

impl<T> HypothesisReport<T> {
    pub fn all_ok(&self) -> bool {
        self.h1_ok && self.h2_ok && self.h3_ok
    }
}
