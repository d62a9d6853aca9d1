pub mod classification;
pub mod cli;
pub mod error;
pub mod estimates;
pub mod quadrature;
pub mod solver;
pub mod special;

pub use error::{Error, Result};
