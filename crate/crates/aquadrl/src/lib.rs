//! File formats, configuration, parallel evaluation and plotting around
//! [`aquadrl_core`].

pub mod checkpoint;
pub mod cli;
pub mod config;
mod error;
pub mod eval;
pub mod io;
pub mod plot;
pub mod records;

pub use aquadrl_core as core;
pub use error::{Error, Result};
