//! Constructive SQ learning: approximating sets extracted from SQ
//! algorithms, the projected iterative learner driven by them, an exhaustive
//! CSQ baseline for finite classes and the weak agnostic learner.

mod agnostic;
mod algorithm;
mod gpsi;
mod learner;

pub use agnostic::{weak_agnostic_learner, WeakHypothesis};
pub use algorithm::{exhaustive_csq_learner, run_with_oracle, ExhaustiveCsq, SqAlgorithm};
pub use gpsi::{build_gpsi, ApproxSet, ApproxSetGenerator, FixedGenerator, Provenance, SimulationGenerator};
pub use learner::{
    iteration_bound, projected_learner, HaltReason, IterationRecord, LearnerOptions, LearnerRun,
    LearnerTrace,
};

/// Default query budget for simulated algorithms.
pub const DEFAULT_QUERY_BUDGET: usize = 1 << 20;
