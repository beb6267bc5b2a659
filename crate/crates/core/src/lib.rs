//! Random weak integer compositions: samplers for the uniform, evolutionary
//! and geometric models, statistics, pattern matching, closed-form theory,
//! exact oracles and a Monte Carlo sweep harness.

pub mod analysis;
pub mod cli;
pub mod composition;
pub mod estimate;
pub mod experiment;
pub mod error;
pub mod figures;
pub mod oracle;
pub mod patterns;
pub mod property;
pub mod render;
pub mod report;
pub mod rng;
pub mod samplers;
pub mod theory;

pub use composition::{count_compositions, composition_size, Composition, ModelParams};
pub use error::{Error, Result};
pub use patterns::{parse_pattern, MatchReport, PatternKind, PatternSpec};
pub use rng::RngStream;
