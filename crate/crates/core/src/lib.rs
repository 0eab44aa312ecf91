//! Traveling waves of the bistable equation `u_t = u_xx + f(u)` where `f`
//! jumps at a single threshold `a`.
//!
//! The crate is organised bottom-up:
//!
//! * [`reaction`]: the nonlinearity, its hypothesis audit and slope bounds;
//! * [`linear_theory`]: closed-form envelope waves and the speed bracket;
//! * [`shooting`]: phase-plane shooting for the true speed and profile;
//! * [`simulator`]: finite-difference evolution, front tracking, and the
//!   stability diagnostics (shift distance, decay fitting, comparison).
//!
//! All numerics are generic over [`Scalar`]; the aliases below fix `f64`.

pub mod error;
pub mod fit;
pub mod interp;
pub mod linear_theory;
pub mod ode;
pub mod reaction;
pub mod roots;
pub mod scalar;
pub mod shooting;
pub mod simulator;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type ReactionTerm = reaction::ReactionTerm<f64>;
pub type SlopeBounds = reaction::SlopeBounds<f64>;
pub type HypothesisReport = reaction::HypothesisReport<f64>;
pub type SpeedBracket = linear_theory::SpeedBracket<f64>;
pub type EnvelopeWave = linear_theory::EnvelopeWave<f64>;
pub type PhasePath = shooting::PhasePath<f64>;
pub type WaveSolution = shooting::WaveSolution<f64>;
pub type Grid1D = simulator::Grid1D<f64>;
pub type SimState = simulator::SimState<f64>;
pub type Trajectory = simulator::Trajectory<f64>;
pub type SuperSubParams = simulator::SuperSubParams<f64>;

pub use reaction::{BranchRule, EnvelopeKind};
pub use shooting::Side;
pub use simulator::Boundary;
