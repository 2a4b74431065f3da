//! Compile single-mode Fock superpositions into cascades of coherent
//! displacements and conditional single-photon additions, and evaluate the
//! probability that the cascade succeeds.
//!
//! The pipeline is:
//!
//! 1. [`target`] builds a normalized [`TargetState`].
//! 2. [`synthesis::compile`] factors it through the roots of its
//!    characteristic polynomial into a [`SynthesisPlan`].
//! 3. [`probability::breakdown`] evaluates the success probability in
//!    closed form, and [`simulator::run_plan`] executes the same cascade on
//!    truncated Fock vectors as an independent check.
//! 4. [`search`] sweeps and optimizes beam-splitter transmittances and root
//!    orderings.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod fock;
pub mod math;
pub mod probability;
pub mod search;
pub mod simulator;
pub mod synthesis;
pub mod target;

pub use error::{Error, Result};
pub use fock::{FockVector, TruncationPolicy};
pub use math::Polynomial;
pub use probability::{breakdown, total_probability, ProbabilityBreakdown};
pub use search::{StagewiseConfig, SweepCurve};
pub use simulator::{run_plan, SimOutcome};
pub use synthesis::{compile, BeamSplitter, LoSettings, SynthesisPlan};
pub use target::{phase_state, PhaseStateSpec, TargetState};

pub use num_complex::Complex64;
