pub mod arnoldi;
pub mod bounds;
pub mod error;
pub mod linalg;
pub mod matgen;
pub mod mmio;

pub use error::{Error, Result};
