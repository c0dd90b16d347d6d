//! Seeded samplers, law-of-large-numbers and ergodic experiments, and
//! large-deviation rates of empirical mean sets.

mod experiments;
mod ldp;
mod sampler;

pub use experiments::{
    ergodic_experiment, estimate_mean_set, slln_experiment, stationary_distribution, ExperimentSettings, TARGET_ATOMS,
};
pub use ldp::{
    kl_divergence, ldp_experiment, ldp_rate_function, relative_entropy, LdpMode, LdpResult, MeanSetEvent,
    MAX_RATE_ATOMS,
};
pub use sampler::{
    sample_empirical, sample_empirical_replication, Distribution, PointSpec, SamplerKind, SamplerSpec, KERNEL_TOLERANCE,
};
