//! Stable-law limits for resultant forces of N random power-law sources.

pub mod angular;
pub mod charfn;
pub mod error;
pub mod linalg;
pub mod mc;
pub mod quadrature;
pub mod renorm;
pub mod tail;

pub use error::{Error, Result};
