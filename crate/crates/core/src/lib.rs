//! Nonlocal interaction energies for well-barrier kernels under the
//! bathtub constraint `0 <= ρ <= 1`, `∫ρ = m`.

pub mod cli;
pub mod densities;
pub mod droplets;
pub mod energy;
pub mod error;
pub mod extended;
pub mod kernels;
pub mod numeric;
pub mod plot;
pub mod search;
pub mod toy1d;

pub use error::{Error, Result};
pub use extended::ExtReal;
