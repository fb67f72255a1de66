pub mod error;
pub mod moyal;
pub mod spectral;

pub use error::{Error, Result};
pub mod exact_states;
pub mod numerics;
pub mod ansatz;
pub mod reduced;
pub mod pde;
pub mod config;
pub mod checks;
pub mod harness;
