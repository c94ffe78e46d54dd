pub mod aht;
pub mod analysis;
pub mod error;
pub mod gates;
pub mod model;
pub mod processor;
pub mod qstate;
pub mod rng;
pub mod sawtooth;
pub mod sequences;

pub use error::{Error, Result};
