//! Arithmetic of the Markoff-type cubic surfaces
//! `x² + y² + z² + xyz = ax + by + cz + d` attached to integer vectors
//! `k = (k1, k2, k3, k4)`.

pub mod error;
pub mod numeric;

pub use error::{Error, Result};
pub mod surface;
pub mod picard;
pub mod local;
pub mod brauer;
pub mod descent;
pub mod density;
pub mod fixtures;
