pub mod error;
pub mod bgg;
pub mod cli;
pub mod emodule;
pub mod filtered;
pub mod format;
pub mod linalg;
pub mod models;
pub mod random;

pub use error::{Error, Result};
