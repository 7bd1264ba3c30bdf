pub mod channel;
pub mod cli;
pub mod error;
pub mod eve;
pub mod gaussian;
pub mod keyrate;
pub mod thermal;

pub use error::{Error, Result};
