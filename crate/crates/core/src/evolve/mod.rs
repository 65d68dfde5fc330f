//! Valiant-style evolution: loss-based fitness, mutation algorithms, the
//! SelNB selection rule, evolution runs and the monotone disjunction evolver.

mod fitness;
mod mutation;
mod params;
mod selection;

pub use fitness::{empirical_lperf, lperf, lperf_gain, Loss, EXACT_SAMPLE_LIMIT};
pub use mutation::{
    disjunction_mutator, disjunction_neighborhood, disjunction_params, sq_neighborhood, LazyUniformMutator,
    MutationAlgorithm, NeighborFn, Representation,
};
pub use params::{evolve_lsq_params, LsqParams, DEFAULT_C_HOEFFDING};
pub use selection::{
    evolve_run, selnb_step, EvolutionTrace, FitnessMode, GenerationRecord, Outcome, RunOptions, SelNBParams, Step,
};
