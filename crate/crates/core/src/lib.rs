//! Symbolic dynamics and thermodynamic tools for step skew products with
//! concave interval fiber maps.

pub mod bifurcation;
pub mod error;
pub mod maps;
pub mod measures;
pub mod numeric;
pub mod orbits;
pub mod sft;
pub mod symbolic;
pub mod verify;
pub mod word;

pub use error::{Error, Result};
pub use maps::{FiberMap, FiberPair, Tolerances};
pub use word::{Word, w};
