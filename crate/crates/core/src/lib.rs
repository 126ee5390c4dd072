//! Secret key agreement over adversarial wiretap channels.
//!
//! Layers, bottom up: prime-field arithmetic ([`gf`]), hashing, MAC, AMD
//! and extractor primitives ([`primitives`]), the list-decodable LV code
//! ([`lvcode`]), the adversarial channel and strategy library
//! ([`channel`]), the protocols ([`protocols`]) and the estimators and
//! exhaustive checks ([`analysis`], [`verify`]).

pub mod analysis;
pub mod channel;
pub mod error;
pub mod gf;
pub mod lvcode;
pub mod primitives;
pub mod protocols;
pub mod rational;
pub mod sampler;
pub mod verify;

/// One channel symbol: a vector of `u` field residues.
pub type Symbol = Vec<u32>;

pub use channel::{build_strategy, AdversaryStrategy, ChannelParams, RoundLog, STRATEGY_NAMES};
pub use error::{Error, Result};
pub use gf::{Field, FieldElement, Poly};
pub use lvcode::{LVCodeword, LVParams};
pub use protocols::{run_session, SessionOutcome, SkaConfig, Variant};
pub use rational::Fraction;
pub use sampler::{FieldSampler, RngSampler, ScriptedSampler};
