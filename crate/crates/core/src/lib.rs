//! Exact decision procedures for orbit-closure membership.
pub mod decider;
pub mod degbound;
pub mod elim;
pub mod error;
pub mod exactmath;
pub mod polyring;
pub mod repmodel;
pub mod torusoracle;

pub use error::{Error, Result};
