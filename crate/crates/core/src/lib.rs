pub mod beam;
pub mod cli;
pub mod ber;
pub mod config;
pub mod crosstalk;
pub mod error;
pub mod montecarlo;
pub mod numerics;
pub mod scenario;
pub mod sweep;

pub use error::{Error, Result};
