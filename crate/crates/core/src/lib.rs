pub mod config;
pub mod error;
pub mod factors;
pub mod game;
pub mod gsa;
pub mod market;
pub mod rng;
pub mod runner;
pub mod sd;
pub mod stats;

pub use error::{Error, Result};
