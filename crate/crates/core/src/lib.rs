//! Recognition of binary linear context-free rewriting systems by Boolean
//! matrix multiplication.

pub mod error;
pub mod grammar;

pub use error::{Error, Result};
pub mod address;
pub mod boolean;
pub mod matrix;
pub mod reduction;
pub mod oracle;
pub mod recognizer;
pub mod bundled;
pub mod sample;
pub mod cli;
