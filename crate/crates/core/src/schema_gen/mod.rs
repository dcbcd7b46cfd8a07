//! Random generation and validation of values against a [`DataSchema`].
//!
//! [`DataSchema`]: crate::td_model::DataSchema

mod generate;
mod random;
mod validate;

pub use generate::{generate, GenerateError, DEPTH_CAP};
pub use random::RandomSource;
pub use validate::{validate, ValidationResult, Violation};
