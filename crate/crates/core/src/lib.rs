//! Semiotic capacity toolkit.
//!
//! A message source is a softmax family over fixed scores whose temperature
//! `λ` is the generative complexity. An audience and context form a channel
//! mapping messages to categorical interpretations. From these the crate
//! computes, in bits:
//!
//! | quantity | meaning |
//! |----------|---------|
//! | breadth `S(λ)` | entropy of the message distribution |
//! | decipherability `D(λ)` | mutual information between message and interpretation |
//! | residual ambiguity | `H(Int \| M)` |
//! | capacity | `max_λ D(λ)`, plus the Blahut–Arimoto bound over all inputs |
//! | risk | `S / D` |
//!
//! The same quantities can be estimated from logged interactions
//! ([`estimation`]), certified against thresholds ([`certify`]) and steered
//! online ([`adapt`]).
//!
//! ```
//! use semioscope_core::{capacity, scenario};
//!
//! let s = scenario::builtin("tiered_default").unwrap();
//! let best = capacity::lambda_opt(&s.source, &s.channel, (0.05, 20.0), 33, 1e-4).unwrap();
//! assert!(best.lambda_opt > 0.05 && best.lambda_opt < 20.0);
//! ```

pub mod adapt;
pub mod capacity;
pub mod certify;
pub mod channel;
pub mod error;
pub mod estimation;
pub mod info;
pub mod sampling;
pub mod scenario;
pub mod source;

pub use channel::{
    decipherability, joint_distribution, residual_ambiguity, Scenario, SemioticChannel,
};
pub use error::{Error, Result};
pub use info::{Bits, JointDist, ProbVector};
pub use source::{breadth, message_distribution, Lambda, SourceFamily};
