//! File formats, parallel sweeps and the command-line front end for
//! `shadowphase-core`.

pub mod archive;
pub mod config;
pub mod error;
pub mod io;
pub mod pipeline;

pub use error::{Error, Result};
pub use shadowphase_core as core;
