pub mod cli;
pub mod discrete;
pub mod entropy;
pub mod error;
pub mod gaussian;
pub mod io;
pub(crate) mod linalg;
pub mod relations;
pub mod tolerance;

pub use error::{Error, Result};
