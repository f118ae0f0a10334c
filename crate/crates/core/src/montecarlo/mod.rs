//! Sampling chains from the factorized Gibbs measure.
//!
//! Spacings are i.i.d., so a chain of `N` particles is `N` independent
//! draws from the one-spacing density. Two samplers are provided: a
//! tabulated inverse CDF (the production path) and rejection from a
//! Gaussian envelope (a cross-check that shares no tabulation code).

mod chain;
mod rng;
mod sampler;
mod spread;
mod stats;

pub use chain::{sample_chain, sample_replicas, write_chain_csv, ChainSample, Provenance};
pub use rng::{stream_rng, RNG_ALGORITHM};
pub use sampler::{sample_spacing, InverseCdfSampler, RejectionSampler, SpacingSampler};
pub use spread::{harmonic_spread_experiment, SpreadResult, TailModel};
pub use stats::{
    empirical_stats, ks_critical_one_sample, ks_critical_two_sample, ks_one_sample,
    ks_one_sample_numeric, ks_two_sample, SampleStats, KS_COEFFICIENT_1PCT,
};
