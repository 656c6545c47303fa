//! Estimating breadth, decipherability and residual ambiguity from
//! observed interactions.

mod bootstrap;
mod counts;
mod estimators;
mod profile;

pub use bootstrap::{bootstrap_ci, BootstrapConfig, EstimateWithCI, Statistic, MIN_REPLICATES};
pub use counts::{ingest, tabulate, CountTable, RecordFormat};
pub use estimators::{
    estimate_conditional_entropy, estimate_entropy, estimate_mutual_information, Axis, Estimator,
    Method,
};
pub use profile::empirical_profile;
