//! Sliding secure symmetric multilevel diversity coding and multilevel
//! secret sharing over prime fields: encoders, decoders, rate regions and
//! exact verifiers.

pub mod field;
pub mod io;
pub mod regions;
pub mod schemes;
pub mod verifier;
