pub mod coupling;
pub mod dynamics;
pub mod ergodics;
pub mod harness;
pub mod error;
pub mod noise;
pub mod propagator;
pub mod renormalization;
pub mod spectral;

pub use error::{Error, Result};
