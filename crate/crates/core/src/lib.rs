//! Exact multiplicities of Deligne-Lusztig and almost unipotent characters of `GL_n(q)`.

pub mod cli;
pub mod dlchar;
pub mod error;
pub mod formulas;
pub mod glnq;
pub mod green;
pub mod group;
pub mod scalar;
pub mod torus;
pub mod weyl;

pub use error::{Error, Result};
