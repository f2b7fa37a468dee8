//! PSSM construction from hit sets and iterated profile search.

mod build;
mod dirichlet;
mod iterate;
mod weights;

pub use build::{build_pssm, half_bit_score};
pub use dirichlet::{dirichlet_posterior, DirichletComponent, DirichletMixture};
pub use iterate::{
    HitFilter, IterationConfig, IterationQuery, IterationRecord, IterationState, KeepAll, ProfileSearch, Status,
    WindowRun, DEFAULT_MIN_HITS, DEFAULT_SCHEDULE,
};
pub use weights::{henikoff_weights, WeightedHitSet};
