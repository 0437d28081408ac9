//! Crepant resolution of binomial hypersurfaces by iterated blow-ups of codimension-two centers
//! `E ∩ F`.
//!
//! The global model ([`BinomialState`]) tracks divisors with their multiplicities and the strata
//! of `X` along which `X` is not transversal to the divisors. The chart oracle
//! ([`ChartComplex`]) recomputes the same data by monomial substitution in local coordinates and
//! is the authority whenever the two disagree.

mod chart;
mod run;
mod state;

pub use chart::{Chart, ChartComplex, ChartVar, FaceInfo};
pub use run::{
    count_new_classes, oracle_check, run_resolution, run_resolution_observed,
    toric_exceptional_count, ResolutionLog, RunOptions, StepLog, DEFAULT_STEP_LIMIT,
};
pub use state::{
    init_cyclic_cover, is_subset, max_of, BinomialState, BlowupRecord, DivisorId, DivisorRec,
    FTable, FValue, Klass, Mutation, Origin, Stratum, StratumId, TieBreak,
};
