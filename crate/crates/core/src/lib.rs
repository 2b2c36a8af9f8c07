//! Decoherence waves in a Bose-Einstein condensate.
//!
//! A projective measurement of the particle number in one cell of a condensate
//! destroys its coherence with the rest of the system, and the damage spreads
//! out as a wave carried by the one-particle propagator. This crate computes
//! that wave in three ways:
//!
//! - [`ideal`]: the large-`M` theory of an ideal gas, with Poisson branch
//!   weights and closed-form density matrices;
//! - [`bogoliubov`]: the weakly interacting uniform gas, where the front moves
//!   at the sound velocity;
//! - [`oracle`]: exact many-body evolution in a Fock space, for small systems.
//!
//! [`greens`] holds the propagators, [`front`] the front-speed fit, and
//! [`cli`] the config-driven runner behind the `decowave` binary.

pub mod bogoliubov;
pub mod cli;
pub mod error;
pub mod front;
pub mod greens;
pub mod ideal;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod series;

pub use error::{Error, Result};
