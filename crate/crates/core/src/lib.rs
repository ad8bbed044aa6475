//! Zero-error versus ε-error sum rates of deterministic two-user interference
//! channels.
//!
//! The crate is organised bottom-up:
//!
//! * [`channel`]: single-letter channels, blocklength extension, the random
//!   erasure/identity ensemble and the channel text format.
//! * [`coding`]: codes, exact success probabilities, zero-error predicates,
//!   time sharing and the brute-force zero-error sum-rate oracle.
//! * [`bpis`]: conflict graphs and exact maximum bipartite independent sets.
//! * [`uniform`]: γ-uniform and (d,ε)-diverse predicates, intensional set
//!   families and the explicit uniform-set constructions.
//! * [`codegen`]: Hamming packing and the packed zero-error code pipeline.
//! * [`bounds`]: closed-form rate bounds.
//! * [`experiment`]: reproducible CSV experiment runners used by the CLI.

pub mod bounds;
pub mod bpis;
pub mod channel;
pub mod codegen;
pub mod coding;
mod error;
pub mod experiment;
pub mod math;
pub mod uniform;

pub use error::{Error, Result};

pub use channel::{Channel, ChannelOutput, OutputWord, Symbol, Word};
pub use coding::{Code, CodebookPair, RatePoint};

/// Artifact version embedded in experiment output headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
